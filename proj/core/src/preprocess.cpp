#include "snipsearch/preprocess.hpp"

#include <algorithm>

namespace snipsearch {

namespace {

constexpr std::string_view kTracebackSign = "Traceback (most recent call last)";

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
}

bool is_ident_char(char c) { return is_word_char(c) || c == '.'; }

bool ends_with(std::string_view text, std::string_view suffix) {
    return text.size() >= suffix.size() &&
           text.substr(text.size() - suffix.size()) == suffix;
}

// Matches ^[A-Za-z_][A-Za-z0-9_.]*(Error|Exception|Warning)\b against one line
// and returns the matched identifier. Greedy: the longest prefix whose
// Error/Exception/Warning suffix sits on a word boundary wins.
std::optional<std::string> match_error_head(std::string_view line) {
    if (line.empty()) return std::nullopt;
    char first = line[0];
    bool first_ok =
        (first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z') || first == '_';
    if (!first_ok) return std::nullopt;

    size_t run = 1;
    while (run < line.size() && is_ident_char(line[run])) ++run;

    static constexpr std::string_view kSuffixes[] = {"Error", "Exception", "Warning"};
    for (size_t end = run; end >= 2; --end) {
        // word boundary after the match: end of line or a non-word character
        if (end < line.size() && is_word_char(line[end])) continue;
        std::string_view candidate = line.substr(0, end);
        for (std::string_view suffix : kSuffixes) {
            // at least one identifier char must precede the suffix
            if (candidate.size() > suffix.size() && ends_with(candidate, suffix)) {
                return std::string(candidate);
            }
        }
    }
    return std::nullopt;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        size_t end = (nl == std::string_view::npos) ? text.size() : nl;
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
}

// True if `html` has a code open tag at `i` ("<code>" or "<code ...>");
// returns the index just past the '>' in `content_start`.
bool match_code_open(std::string_view html, size_t i, size_t* content_start) {
    if (html.compare(i, 5, "<code") != 0) return false;
    size_t j = i + 5;
    if (j >= html.size()) return false;
    if (html[j] != '>' && html[j] != ' ' && html[j] != '\t' && html[j] != '\n') return false;
    size_t close = html.find('>', j);
    if (close == std::string_view::npos) return false;
    *content_start = close + 1;
    return true;
}

void append_merged(std::string& field, const std::string& block) {
    if (!field.empty()) field.push_back('\n');
    field += block;
}

}  // namespace

NoSnippetError::NoSnippetError(int64_t question_id)
    : std::runtime_error("question " + std::to_string(question_id) +
                         " has neither code nor error; cannot form a query") {}

std::vector<std::string> extract_code_blocks(std::string_view body_html) {
    std::vector<std::string> blocks;
    size_t i = 0;
    while (i < body_html.size()) {
        if (body_html[i] != '<') {
            ++i;
            continue;
        }
        size_t content_start = 0;
        if (!match_code_open(body_html, i, &content_start)) {
            ++i;
            continue;
        }
        size_t close = body_html.find("</code>", content_start);
        size_t content_end = (close == std::string_view::npos) ? body_html.size() : close;
        blocks.push_back(
            decode_entities(body_html.substr(content_start, content_end - content_start)));
        i = (close == std::string_view::npos) ? body_html.size() : close + 7;
    }
    return blocks;
}

BlockKind classify_block(std::string_view text) {
    if (text.find(kTracebackSign) != std::string_view::npos) return BlockKind::error;
    bool has_head = false;
    for_each_line(text, [&](std::string_view line) {
        if (!has_head && match_error_head(line)) has_head = true;
    });
    return has_head ? BlockKind::error : BlockKind::code;
}

std::optional<std::string> extract_error_keyword(std::string_view error_text) {
    std::optional<std::string> keyword;
    for_each_line(error_text, [&](std::string_view line) {
        if (auto match = match_error_head(line)) keyword = std::move(match);
    });
    return keyword;
}

std::string strip_markup(std::string_view html) {
    std::string text;
    text.reserve(html.size());
    size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c != '<') {
            text.push_back(c);
            ++i;
            continue;
        }
        // only treat '<' as markup when it plausibly opens a tag
        if (i + 1 < html.size()) {
            char n = html[i + 1];
            bool tag_like = (n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z') || n == '/' ||
                            n == '!' || n == '?';
            if (tag_like) {
                size_t close = html.find('>', i + 1);
                if (close != std::string_view::npos) {
                    i = close + 1;
                    continue;
                }
            }
        }
        text.push_back(c);
        ++i;
    }
    return decode_entities(text);
}

ProcessedQuestion assemble_question(
    const RawPostRow& row,
    const std::unordered_map<int64_t, const RawPostRow*>& answers,
    const std::unordered_map<int64_t, int64_t>& duplicate_of,
    AssembleReport* report) {
    ProcessedQuestion question;
    question.id = row.id;
    question.title = row.title.value_or("");
    question.body_text = strip_markup(row.body_html);
    question.favorite_count = row.favorite_count;

    for (const std::string& block : extract_code_blocks(row.body_html)) {
        if (classify_block(block) == BlockKind::error) {
            append_merged(question.error, block);
        } else {
            append_merged(question.code, block);
        }
    }
    if (!question.error.empty()) {
        question.keyword = extract_error_keyword(question.error);
    }

    if (row.accepted_answer_id) {
        auto it = answers.find(*row.accepted_answer_id);
        if (it != answers.end()) {
            question.best_answer = strip_markup(it->second->body_html);
        } else if (report) {
            ++report->missing_best_answer;
        }
    }

    auto dup = duplicate_of.find(row.id);
    if (dup != duplicate_of.end()) {
        question.duplicate_of = dup->second;
    }
    return question;
}

TokenSeq truncate_middle(TokenSeq tokens, size_t max_len) {
    if (max_len < 2) {
        throw std::invalid_argument("truncate_middle: max_len must be >= 2");
    }
    if (tokens.size() <= max_len) return tokens;
    size_t head = (max_len + 1) / 2;
    size_t tail = max_len / 2;
    TokenSeq out;
    out.reserve(max_len);
    out.insert(out.end(), tokens.begin(), tokens.begin() + static_cast<ptrdiff_t>(head));
    out.insert(out.end(), tokens.end() - static_cast<ptrdiff_t>(tail), tokens.end());
    return out;
}

Query build_query(const ProcessedQuestion& question, size_t max_len, CutMode cut_mode) {
    if (!question.has_snippet()) {
        throw NoSnippetError(question.id);
    }
    TokenSeq tokens = tokenize(question.code);
    TokenSeq error_tokens = tokenize(question.error);
    tokens.insert(tokens.end(), error_tokens.begin(), error_tokens.end());
    if (cut_mode == CutMode::middle) {
        tokens = truncate_middle(std::move(tokens), max_len);
    } else if (tokens.size() > max_len) {
        tokens.resize(max_len);
    }
    return Query{std::move(tokens), question.id};
}

}  // namespace snipsearch
