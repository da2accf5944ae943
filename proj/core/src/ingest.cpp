#include "snipsearch/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <utility>

namespace snipsearch {

namespace {

constexpr size_t kChunkSize = 64 * 1024;

void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_attr(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::optional<int64_t> parse_int(std::string_view text) {
    int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        return std::nullopt;
    }
    return value;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

using AttrList = std::vector<std::pair<std::string, std::string>>;

const std::string* find_attr(const AttrList& attrs, std::string_view name) {
    for (const auto& [key, value] : attrs) {
        if (key == name) return &value;
    }
    return nullptr;
}

// Chunked scanner for self-closing <row .../> elements. Holds at most one row
// (plus one read chunk) in memory at a time.
class RowScanner {
public:
    explicit RowScanner(std::istream& in) : in_(in) {}

    std::optional<AttrList> next_row() {
        compact();
        size_t p;
        while (true) {
            p = buf_.find("<row", pos_);
            if (p != std::string::npos) {
                if (p + 4 >= buf_.size() && !eof_) {
                    fill();
                    continue;  // need the char after "<row"
                }
                if (p + 4 >= buf_.size()) {
                    throw XmlParseError("truncated row element", base_ + p);
                }
                char c = buf_[p + 4];
                if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '/') {
                    pos_ = p + 4;
                    break;
                }
                pos_ = p + 1;  // e.g. "<rows...": not a row element
                continue;
            }
            if (eof_) return std::nullopt;
            // keep a partial "<ro" suffix so a tag split across chunks survives
            if (buf_.size() > pos_ + 3) pos_ = buf_.size() - 3;
            compact();
            fill();
        }
        return parse_attributes();
    }

    size_t high_water() const { return high_water_; }

private:
    AttrList parse_attributes() {
        AttrList attrs;
        while (true) {
            skip_ws();
            char c = buf_[pos_];
            if (c == '/') {
                if (!ensure(2)) {
                    throw XmlParseError("unterminated row element", base_ + pos_);
                }
                if (buf_[pos_ + 1] != '>') {
                    throw XmlParseError("expected '>' after '/'", base_ + pos_ + 1);
                }
                pos_ += 2;
                return attrs;
            }
            if (c == '>') {
                throw XmlParseError("row element is not self-closing", base_ + pos_);
            }
            attrs.push_back(parse_one_attribute());
        }
    }

    std::pair<std::string, std::string> parse_one_attribute() {
        size_t name_start = pos_;
        while (true) {
            if (pos_ >= buf_.size() && !refill_or_throw()) break;
            char c = buf_[pos_];
            if (c == '=' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '/' ||
                c == '>') {
                break;
            }
            ++pos_;
        }
        std::string name = buf_.substr(name_start, pos_ - name_start);
        skip_ws();
        if (buf_[pos_] != '=') {
            throw XmlParseError("expected '=' after attribute name '" + name + "'",
                                base_ + pos_);
        }
        ++pos_;
        skip_ws();
        char quote = buf_[pos_];
        if (quote != '"' && quote != '\'') {
            throw XmlParseError("expected quoted value for attribute '" + name + "'",
                                base_ + pos_);
        }
        ++pos_;
        size_t value_start = pos_;
        while (true) {
            size_t q = buf_.find(quote, pos_);
            if (q != std::string::npos) {
                std::string raw = buf_.substr(value_start, q - value_start);
                pos_ = q + 1;
                return {std::move(name), decode_entities(raw)};
            }
            pos_ = buf_.size();
            if (!fill()) {
                throw XmlParseError("unterminated value for attribute '" + name + "'",
                                    base_ + value_start - 1);
            }
        }
    }

    void skip_ws() {
        while (true) {
            if (pos_ >= buf_.size() && !refill_or_throw()) return;
            char c = buf_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else {
                return;
            }
        }
    }

    bool refill_or_throw() {
        if (fill()) return true;
        throw XmlParseError("unexpected end of input inside row element", base_ + pos_);
    }

    bool ensure(size_t n) {
        while (buf_.size() - pos_ < n) {
            if (!fill()) return false;
        }
        return true;
    }

    bool fill() {
        if (eof_) return false;
        size_t old = buf_.size();
        buf_.resize(old + kChunkSize);
        in_.read(buf_.data() + old, static_cast<std::streamsize>(kChunkSize));
        size_t got = static_cast<size_t>(in_.gcount());
        buf_.resize(old + got);
        high_water_ = std::max(high_water_, buf_.size());
        if (got == 0) {
            eof_ = true;
            return false;
        }
        return true;
    }

    void compact() {
        if (pos_ >= kChunkSize) {
            base_ += pos_;
            buf_.erase(0, pos_);
            pos_ = 0;
        }
    }

    std::istream& in_;
    std::string buf_;
    size_t pos_ = 0;
    uint64_t base_ = 0;
    size_t high_water_ = 0;
    bool eof_ = false;
};

}  // namespace

XmlParseError::XmlParseError(const std::string& message, uint64_t byte_offset)
    : std::runtime_error(message + " at byte " + std::to_string(byte_offset)),
      byte_offset_(byte_offset) {}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c != '&') {
            out.push_back(c);
            ++i;
            continue;
        }
        size_t semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::string_view name = text.substr(i + 1, semi - i - 1);
        if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "amp") {
            out.push_back('&');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (!name.empty() && name[0] == '#') {
            uint32_t cp = 0;
            bool ok = false;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                auto [ptr, ec] = std::from_chars(name.data() + 2, name.data() + name.size(),
                                                 cp, 16);
                ok = ec == std::errc{} && ptr == name.data() + name.size();
            } else {
                auto [ptr, ec] =
                    std::from_chars(name.data() + 1, name.data() + name.size(), cp, 10);
                ok = ec == std::errc{} && ptr == name.data() + name.size();
            }
            if (!ok || cp > 0x10FFFF) {
                out.push_back('&');
                ++i;
                continue;
            }
            append_utf8(out, cp);
        } else {
            out.push_back('&');
            ++i;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PostStream
// ---------------------------------------------------------------------------

struct PostStream::Impl {
    explicit Impl(std::istream& in) : scanner(in) {}
    RowScanner scanner;
    SkipReport report;
};

PostStream::PostStream(std::istream& in) : impl_(new Impl(in)) {}
PostStream::~PostStream() { delete impl_; }
const SkipReport& PostStream::report() const { return impl_->report; }
size_t PostStream::buffer_high_water() const { return impl_->scanner.high_water(); }

std::optional<RawPostRow> PostStream::next() {
    while (auto attrs = impl_->scanner.next_row()) {
        const std::string* id_attr = find_attr(*attrs, "Id");
        std::optional<int64_t> id = id_attr ? parse_int(*id_attr) : std::nullopt;
        if (!id) {
            ++impl_->report.missing_id;
            continue;
        }
        const std::string* type_attr = find_attr(*attrs, "PostTypeId");
        if (!type_attr) {
            ++impl_->report.missing_post_type;
            continue;
        }

        RawPostRow row;
        row.id = *id;
        if (*type_attr == "1") {
            row.post_type = PostType::question;
        } else if (*type_attr == "2") {
            row.post_type = PostType::answer;
        } else {
            row.post_type = PostType::other;
        }
        if (const std::string* v = find_attr(*attrs, "AcceptedAnswerId")) {
            row.accepted_answer_id = parse_int(*v);
        }
        if (const std::string* v = find_attr(*attrs, "ParentId")) {
            row.parent_id = parse_int(*v);
        }
        if (const std::string* v = find_attr(*attrs, "Title")) {
            row.title = *v;
        }
        if (const std::string* v = find_attr(*attrs, "Body")) {
            row.body_html = *v;
        }
        if (const std::string* v = find_attr(*attrs, "Tags")) {
            // decoded attribute looks like "<python><pandas>"
            const std::string& raw = *v;
            size_t i = 0;
            while (i < raw.size()) {
                if (raw[i] != '<') {
                    ++i;
                    continue;
                }
                size_t close = raw.find('>', i + 1);
                if (close == std::string::npos) break;
                if (close > i + 1) {
                    row.tags.push_back(ascii_lower(
                        std::string_view(raw).substr(i + 1, close - i - 1)));
                }
                i = close + 1;
            }
        }
        if (const std::string* v = find_attr(*attrs, "FavoriteCount")) {
            row.favorite_count = parse_int(*v);
        }
        if (const std::string* v = find_attr(*attrs, "Score")) {
            row.score = parse_int(*v);
        }

        bool valid = row.id > 0;
        if (row.post_type == PostType::answer && !row.parent_id) valid = false;
        if (row.post_type == PostType::question && !row.title) valid = false;
        if (!valid) {
            ++impl_->report.invariant_violation;
            continue;
        }
        ++impl_->report.rows_yielded;
        return row;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LinkStream
// ---------------------------------------------------------------------------

struct LinkStream::Impl {
    explicit Impl(std::istream& in) : scanner(in) {}
    RowScanner scanner;
    SkipReport report;
};

LinkStream::LinkStream(std::istream& in) : impl_(new Impl(in)) {}
LinkStream::~LinkStream() { delete impl_; }
const SkipReport& LinkStream::report() const { return impl_->report; }
size_t LinkStream::buffer_high_water() const { return impl_->scanner.high_water(); }

std::optional<RawLinkRow> LinkStream::next() {
    while (auto attrs = impl_->scanner.next_row()) {
        const std::string* post_attr = find_attr(*attrs, "PostId");
        const std::string* related_attr = find_attr(*attrs, "RelatedPostId");
        std::optional<int64_t> post_id = post_attr ? parse_int(*post_attr) : std::nullopt;
        std::optional<int64_t> related =
            related_attr ? parse_int(*related_attr) : std::nullopt;
        if (!post_id || !related) {
            ++impl_->report.missing_id;
            continue;
        }
        const std::string* type_attr = find_attr(*attrs, "LinkTypeId");
        if (!type_attr) {
            ++impl_->report.missing_post_type;
            continue;
        }
        if (*post_id == *related) {
            ++impl_->report.invariant_violation;
            continue;
        }
        RawLinkRow row;
        row.post_id = *post_id;
        row.related_post_id = *related;
        row.link_type = (*type_attr == "3") ? LinkType::duplicate : LinkType::other;
        ++impl_->report.rows_yielded;
        return row;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Convenience and serialization
// ---------------------------------------------------------------------------

std::vector<RawPostRow> parse_posts(std::istream& in, SkipReport* report) {
    PostStream stream(in);
    std::vector<RawPostRow> rows;
    while (auto row = stream.next()) {
        rows.push_back(std::move(*row));
    }
    if (report) *report = stream.report();
    return rows;
}

std::vector<RawLinkRow> parse_links(std::istream& in, SkipReport* report) {
    LinkStream stream(in);
    std::vector<RawLinkRow> rows;
    while (auto row = stream.next()) {
        rows.push_back(*row);
    }
    if (report) *report = stream.report();
    return rows;
}

std::vector<RawPostRow> filter_tagged_questions(const std::vector<RawPostRow>& rows,
                                                std::string_view tag) {
    std::vector<RawPostRow> out;
    for (const RawPostRow& row : rows) {
        if (row.post_type != PostType::question) continue;
        if (std::find(row.tags.begin(), row.tags.end(), tag) == row.tags.end()) continue;
        out.push_back(row);
    }
    return out;
}

std::string serialize_posts_xml(const std::vector<RawPostRow>& rows) {
    std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
    for (const RawPostRow& row : rows) {
        out += "  <row Id=\"" + std::to_string(row.id) + "\"";
        const char* type_id = row.post_type == PostType::question  ? "1"
                              : row.post_type == PostType::answer ? "2"
                                                                  : "99";
        out += " PostTypeId=\"";
        out += type_id;
        out += "\"";
        if (row.accepted_answer_id) {
            out += " AcceptedAnswerId=\"" + std::to_string(*row.accepted_answer_id) + "\"";
        }
        if (row.parent_id) {
            out += " ParentId=\"" + std::to_string(*row.parent_id) + "\"";
        }
        if (row.title) {
            out += " Title=\"" + encode_attr(*row.title) + "\"";
        }
        out += " Body=\"" + encode_attr(row.body_html) + "\"";
        if (!row.tags.empty()) {
            std::string raw;
            for (const std::string& tag : row.tags) {
                raw += "<" + tag + ">";
            }
            out += " Tags=\"" + encode_attr(raw) + "\"";
        }
        if (row.favorite_count) {
            out += " FavoriteCount=\"" + std::to_string(*row.favorite_count) + "\"";
        }
        if (row.score) {
            out += " Score=\"" + std::to_string(*row.score) + "\"";
        }
        out += " />\n";
    }
    out += "</posts>\n";
    return out;
}

std::string serialize_links_xml(const std::vector<RawLinkRow>& rows) {
    std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<postlinks>\n";
    for (const RawLinkRow& row : rows) {
        out += "  <row PostId=\"" + std::to_string(row.post_id) + "\" RelatedPostId=\"" +
               std::to_string(row.related_post_id) + "\" LinkTypeId=\"" +
               (row.link_type == LinkType::duplicate ? std::string("3") : std::string("1")) +
               "\" />\n";
    }
    out += "</postlinks>\n";
    return out;
}

}  // namespace snipsearch
