#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snipsearch/ingest.hpp"
#include "snipsearch/tokenize.hpp"

namespace snipsearch {

enum class BlockKind { code, error };

struct CodeBlock {
    std::string text;
    BlockKind kind = BlockKind::code;
};

// One forum question after field extraction. `code` and `error` hold the
// merged contents of the question's code-tagged blocks, split by whether the
// block looks like an interpreter traceback. Empty string means absent.
struct ProcessedQuestion {
    int64_t id = 0;
    std::string title;
    std::string body_text;  // markup-stripped body, code-tag contents kept in place
    std::string code;
    std::string error;
    std::optional<std::string> keyword;      // error type, e.g. "ValueError"
    std::optional<std::string> best_answer;  // markup-stripped accepted answer
    std::optional<int64_t> duplicate_of;
    std::optional<int64_t> favorite_count;

    bool operator==(const ProcessedQuestion&) const = default;

    bool has_code() const { return !code.empty(); }
    bool has_error() const { return !error.empty(); }
    bool has_snippet() const { return has_code() || has_error(); }
};

struct Query {
    TokenSeq tokens;
    int64_t source_question = 0;

    bool operator==(const Query&) const = default;
};

enum class CutMode { middle, head };

// Question has neither code nor error, so no query can be formed from it.
class NoSnippetError : public std::runtime_error {
public:
    explicit NoSnippetError(int64_t question_id);
};

// Inner text of every code-tagged region in document order, entities decoded.
// Tolerates unbalanced markup: an unclosed tag runs to end of input.
std::vector<std::string> extract_code_blocks(std::string_view body_html);

// A block is an error iff it contains "Traceback (most recent call last)" or
// some line starts with an identifier ending in Error/Exception/Warning at a
// word boundary (e.g. "ValueError: ...", "my.mod.CustomError: ...").
BlockKind classify_block(std::string_view text);

// Identifier of the last error-head line, or nullopt. Python tracebacks name
// the raised error in the final frame, so the last match wins.
std::optional<std::string> extract_error_keyword(std::string_view error_text);

// Removes markup tags and decodes entities, keeping all inner text (including
// code-tag contents) in place.
std::string strip_markup(std::string_view html);

struct AssembleReport {
    uint64_t missing_best_answer = 0;
};

// row must be a question. `answers` maps answer post id -> row; `duplicate_of`
// maps question id -> first duplicate target.
ProcessedQuestion assemble_question(
    const RawPostRow& row,
    const std::unordered_map<int64_t, const RawPostRow*>& answers,
    const std::unordered_map<int64_t, int64_t>& duplicate_of,
    AssembleReport* report = nullptr);

// Keeps the first ceil(max_len/2) and last floor(max_len/2) tokens of an
// over-long sequence. max_len must be >= 2.
TokenSeq truncate_middle(TokenSeq tokens, size_t max_len);

// q = code tokens ++ error tokens, truncated per cut mode. Throws
// NoSnippetError when both fields are empty.
Query build_query(const ProcessedQuestion& question, size_t max_len, CutMode cut_mode);

}  // namespace snipsearch
