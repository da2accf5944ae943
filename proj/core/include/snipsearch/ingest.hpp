#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snipsearch {

enum class PostType { question, answer, other };
enum class LinkType { duplicate, other };

struct RawPostRow {
    int64_t id = 0;
    PostType post_type = PostType::other;
    std::optional<int64_t> accepted_answer_id;
    std::optional<int64_t> parent_id;
    std::optional<std::string> title;
    std::string body_html;
    std::vector<std::string> tags;  // lowercase, no angle brackets
    std::optional<int64_t> favorite_count;
    std::optional<int64_t> score;

    bool operator==(const RawPostRow&) const = default;
};

struct RawLinkRow {
    int64_t post_id = 0;
    int64_t related_post_id = 0;
    LinkType link_type = LinkType::other;

    bool operator==(const RawLinkRow&) const = default;
};

// Malformed XML. `byte_offset` is the position in the input stream where the
// problem was detected.
class XmlParseError : public std::runtime_error {
public:
    XmlParseError(const std::string& message, uint64_t byte_offset);
    uint64_t byte_offset() const { return byte_offset_; }

private:
    uint64_t byte_offset_;
};

// Rows that were skipped rather than yielded, by reason.
struct SkipReport {
    uint64_t rows_yielded = 0;
    uint64_t missing_id = 0;
    uint64_t missing_post_type = 0;
    uint64_t invariant_violation = 0;

    uint64_t total_skipped() const { return missing_id + missing_post_type + invariant_violation; }
};

// Streaming parser over the dump's Posts file. Reads the input in fixed-size
// chunks and never buffers more than one `row` element at a time, so memory
// stays bounded regardless of file size.
class PostStream {
public:
    explicit PostStream(std::istream& in);
    ~PostStream();
    PostStream(const PostStream&) = delete;
    PostStream& operator=(const PostStream&) = delete;

    // Next valid row in file order, or nullopt at end of input.
    // Throws XmlParseError on malformed input.
    std::optional<RawPostRow> next();

    const SkipReport& report() const;

    // High-water mark of the internal scan buffer, in bytes. Grows with the
    // largest single row, not with file size.
    size_t buffer_high_water() const;

private:
    struct Impl;
    Impl* impl_;
};

// Streaming parser over the dump's PostLinks file. LinkTypeId=3 maps to
// LinkType::duplicate, everything else to LinkType::other.
class LinkStream {
public:
    explicit LinkStream(std::istream& in);
    ~LinkStream();
    LinkStream(const LinkStream&) = delete;
    LinkStream& operator=(const LinkStream&) = delete;

    std::optional<RawLinkRow> next();
    const SkipReport& report() const;
    size_t buffer_high_water() const;

private:
    struct Impl;
    Impl* impl_;
};

// Convenience: drain a whole stream into a vector.
std::vector<RawPostRow> parse_posts(std::istream& in, SkipReport* report = nullptr);
std::vector<RawLinkRow> parse_links(std::istream& in, SkipReport* report = nullptr);

// Rows with post_type == question carrying `tag`, order preserved.
std::vector<RawPostRow> filter_tagged_questions(const std::vector<RawPostRow>& rows,
                                                std::string_view tag = "python");

// Re-serialize rows in the dump's XML layout. Parsing the output yields the
// input rows again (used by round-trip tests and synthetic data generation).
std::string serialize_posts_xml(const std::vector<RawPostRow>& rows);
std::string serialize_links_xml(const std::vector<RawLinkRow>& rows);

// Decodes HTML entities (&lt; &gt; &amp; &quot; &apos; and numeric forms)
// exactly once. Unknown entities are left untouched.
std::string decode_entities(std::string_view text);

}  // namespace snipsearch
