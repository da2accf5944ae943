#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "snipsearch/ingest.hpp"
#include "snipsearch/preprocess.hpp"

using namespace snipsearch;
namespace fs = std::filesystem;

namespace {
const fs::path kFixtureDir = SNIPSEARCH_FIXTURE_DIR;

TokenSeq make_tokens(size_t count) {
    TokenSeq tokens;
    for (size_t i = 1; i <= count; ++i) tokens.push_back("t" + std::to_string(i));
    return tokens;
}
}  // namespace

TEST_CASE("extract_code_blocks returns inner text in document order") {
    CHECK(extract_code_blocks("<p>hi</p><code>x=1</code>") ==
          std::vector<std::string>{"x=1"});
    CHECK(extract_code_blocks("<code>a</code><code>b</code>") ==
          std::vector<std::string>{"a", "b"});
    CHECK(extract_code_blocks("&lt;code&gt;-free body").empty());
}

TEST_CASE("extract_code_blocks decodes entities and tolerates unbalanced markup") {
    CHECK(extract_code_blocks("<code>x &lt; 3 &amp;&amp; y</code>") ==
          std::vector<std::string>{"x < 3 && y"});
    // unclosed tag runs to end of input
    CHECK(extract_code_blocks("<p>a</p><code>tail without close") ==
          std::vector<std::string>{"tail without close"});
    // attributes on the open tag
    CHECK(extract_code_blocks("<code class=\"python\">y = 2</code>") ==
          std::vector<std::string>{"y = 2"});
}

TEST_CASE("classify_block base cases") {
    CHECK(classify_block("def f():\n  return 1") == BlockKind::code);
    CHECK(classify_block(
              "Traceback (most recent call last):\n ...\nValueError: bad literal") ==
          BlockKind::error);
    CHECK(classify_block("KeyError: 'name'") == BlockKind::error);
}

TEST_CASE("classify_block edge behavior") {
    // substring "Error" alone is not an error head
    CHECK(classify_block("x = error_handler(5)") == BlockKind::code);
    CHECK(classify_block("Errors were found") == BlockKind::code);
    // head must sit at line start
    CHECK(classify_block("  ValueError: indented") == BlockKind::code);
    // bare head with end-of-line boundary
    CHECK(classify_block("ConnectionResetError") == BlockKind::error);
    // dotted module path
    CHECK(classify_block("numpy.linalg.LinAlgError: Singular matrix") == BlockKind::error);
    // a head needs at least one character before the suffix
    CHECK(classify_block("Error: plain") == BlockKind::code);
}

TEST_CASE("classify_block matches the hand-labeled fixture 20/20") {
    std::ifstream in(kFixtureDir / "labeled_blocks.json");
    REQUIRE(in.good());
    nlohmann::json blocks = nlohmann::json::parse(in);
    REQUIRE(blocks.size() == 20);
    size_t matches = 0;
    for (const auto& block : blocks) {
        BlockKind expected = block.at("label").get<std::string>() == "error"
                                 ? BlockKind::error
                                 : BlockKind::code;
        if (classify_block(block.at("text").get<std::string>()) == expected) ++matches;
    }
    CHECK(matches == 20);
}

TEST_CASE("classify_block is deterministic") {
    std::string text = "Traceback (most recent call last):\nValueError: x";
    CHECK(classify_block(text) == classify_block(text));
}

TEST_CASE("extract_error_keyword returns the last error head") {
    CHECK(extract_error_keyword("...\nValueError: invalid literal") == "ValueError");
    CHECK(extract_error_keyword("KeyError: x\n...\nTypeError: y") == "TypeError");
    CHECK(extract_error_keyword("no error lines here") == std::nullopt);
}

TEST_CASE("extract_error_keyword keeps dotted prefixes") {
    CHECK(extract_error_keyword("urllib.error.HTTPError: 404") == "urllib.error.HTTPError");
}

TEST_CASE("strip_markup removes tags, keeps code contents in place") {
    CHECK(strip_markup("<p>hi</p><code>x=1</code>") == "hix=1");
    CHECK(strip_markup("a &lt; b &amp; c") == "a < b & c");
    CHECK(strip_markup("2 < 3 is not a tag") == "2 < 3 is not a tag");
}

namespace {

struct FixtureCorpus {
    std::vector<RawPostRow> posts;
    std::unordered_map<int64_t, const RawPostRow*> answers;
    std::unordered_map<int64_t, const RawPostRow*> questions;
    std::unordered_map<int64_t, int64_t> duplicate_of;
};

FixtureCorpus load_fixture() {
    FixtureCorpus fc;
    std::ifstream in(kFixtureDir / "posts_fixture.xml", std::ios::binary);
    fc.posts = parse_posts(in);
    for (const RawPostRow& row : fc.posts) {
        if (row.post_type == PostType::answer) fc.answers.emplace(row.id, &row);
        if (row.post_type == PostType::question) fc.questions.emplace(row.id, &row);
    }
    std::ifstream links_in(kFixtureDir / "links_fixture.xml", std::ios::binary);
    for (const RawLinkRow& link : parse_links(links_in)) {
        if (link.link_type == LinkType::duplicate) {
            fc.duplicate_of.emplace(link.post_id, link.related_post_id);
        }
    }
    return fc;
}

}  // namespace

TEST_CASE("assemble_question: fixture question 42 gets answer 43's stripped body") {
    FixtureCorpus fc = load_fixture();
    ProcessedQuestion q42 =
        assemble_question(*fc.questions.at(42), fc.answers, fc.duplicate_of);
    REQUIRE(q42.best_answer.has_value());
    CHECK(*q42.best_answer == strip_markup(fc.answers.at(43)->body_html));
    CHECK(q42.best_answer->find("read_csv") != std::string::npos);
    CHECK(q42.best_answer->find("<") == std::string::npos);
    CHECK(q42.has_code());
    CHECK(!q42.has_error());
    CHECK(!q42.keyword.has_value());
    CHECK(q42.favorite_count == 12);
}

TEST_CASE("assemble_question: blocks are classified independently and merged") {
    FixtureCorpus fc = load_fixture();
    ProcessedQuestion q44 =
        assemble_question(*fc.questions.at(44), fc.answers, fc.duplicate_of);
    CHECK(q44.has_code());
    CHECK(q44.has_error());
    CHECK(q44.code.find("int(\"abc\")") != std::string::npos);
    CHECK(q44.error.find("Traceback") != std::string::npos);
    CHECK(q44.keyword == "ValueError");

    // the traceback's inner entities decoded exactly once
    CHECK(q44.error.find("<module>") != std::string::npos);
}

TEST_CASE("assemble_question: missing accepted answer is counted") {
    FixtureCorpus fc = load_fixture();
    AssembleReport report;
    ProcessedQuestion q50 =
        assemble_question(*fc.questions.at(50), fc.answers, fc.duplicate_of, &report);
    CHECK(!q50.best_answer.has_value());
    CHECK(report.missing_best_answer == 1);
}

TEST_CASE("assemble_question: duplicate link recorded") {
    FixtureCorpus fc = load_fixture();
    ProcessedQuestion q54 =
        assemble_question(*fc.questions.at(54), fc.answers, fc.duplicate_of);
    CHECK(q54.duplicate_of == 42);
    CHECK(q54.keyword == "FileNotFoundError");
}

TEST_CASE("assemble_question never places a block in both fields") {
    FixtureCorpus fc = load_fixture();
    for (const auto& [id, row] : fc.questions) {
        ProcessedQuestion q = assemble_question(*row, fc.answers, fc.duplicate_of);
        for (const std::string& block : extract_code_blocks(row->body_html)) {
            bool in_code = q.code.find(block) != std::string::npos;
            bool in_error = q.error.find(block) != std::string::npos;
            CHECK(!(in_code && in_error));
        }
    }
}

TEST_CASE("truncate_middle keeps head and tail") {
    CHECK(truncate_middle(make_tokens(10), 4) == TokenSeq{"t1", "t2", "t9", "t10"});
    CHECK(truncate_middle(make_tokens(3), 4) == TokenSeq{"t1", "t2", "t3"});
    CHECK(truncate_middle(make_tokens(10), 5) ==
          TokenSeq{"t1", "t2", "t3", "t9", "t10"});
}

TEST_CASE("truncate_middle rejects max_len < 2") {
    CHECK_THROWS_AS(truncate_middle(make_tokens(3), 1), std::invalid_argument);
    CHECK_THROWS_AS(truncate_middle(make_tokens(3), 0), std::invalid_argument);
}

TEST_CASE("truncate_middle is idempotent") {
    for (size_t len : {0u, 1u, 5u, 10u, 31u, 100u}) {
        for (size_t max_len : {2u, 4u, 5u, 17u, 512u}) {
            TokenSeq once = truncate_middle(make_tokens(len), max_len);
            CHECK(truncate_middle(once, max_len) == once);
            CHECK(once.size() == std::min(len, max_len));
        }
    }
}

TEST_CASE("build_query concatenates code then error tokens") {
    ProcessedQuestion q;
    q.id = 7;
    q.code = "a b";
    q.error = "c Error";
    Query query = build_query(q, 512, CutMode::middle);
    CHECK(query.tokens == TokenSeq{"a", "b", "c", "error"});
    CHECK(query.source_question == 7);
}

TEST_CASE("build_query applies the cut mode") {
    ProcessedQuestion q;
    q.id = 1;
    std::string code;
    for (int i = 1; i <= 600; ++i) code += "w" + std::to_string(i) + " ";
    q.code = code;

    Query middle = build_query(q, 512, CutMode::middle);
    REQUIRE(middle.tokens.size() == 512);
    CHECK(middle.tokens.front() == "w1");
    CHECK(middle.tokens[255] == "w256");
    CHECK(middle.tokens[256] == "w345");  // 600 - 256 + 1
    CHECK(middle.tokens.back() == "w600");

    Query head = build_query(q, 512, CutMode::head);
    REQUIRE(head.tokens.size() == 512);
    CHECK(head.tokens.back() == "w512");
}

TEST_CASE("build_query requires a snippet") {
    ProcessedQuestion q;
    q.id = 9;
    q.title = "no snippet here";
    CHECK_THROWS_AS((void)build_query(q, 512, CutMode::middle), NoSnippetError);
}
