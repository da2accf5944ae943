#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "snipsearch/ingest.hpp"
#include "snipsearch/preprocess.hpp"

namespace snipsearch {

// How a retrievable document is assembled from question fields.
//   train_no_body:       title + best_answer (training default; the query was
//                        extracted from the body, so the body would leak it)
//   inference_full:      title + body + best_answer
//   train_stripped_body: title + body with code/error contents removed +
//                        best_answer
enum class CompositionPolicy { train_no_body, inference_full, train_stripped_body };

const char* to_string(CompositionPolicy policy);
CompositionPolicy composition_policy_from_string(std::string_view name);

struct DocumentRecord {
    int64_t doc_id = 0;  // question id of the answered post
    std::string text;
    CompositionPolicy policy_used = CompositionPolicy::inference_full;
};

struct EvalPair {
    Query query;          // built from duplicate question A
    int64_t gold_doc_id;  // document of target question B
};

struct PretrainPair {
    Query query;
    int64_t target_doc_id;  // target document is composed with its body included
};

using Corpus = std::vector<ProcessedQuestion>;

class CompositionError : public std::runtime_error {
public:
    CompositionError(int64_t doc_id, const std::string& field);
};

class CorpusLoadError : public std::runtime_error {
public:
    CorpusLoadError(const std::string& message, uint64_t line_number);
    uint64_t line_number() const { return line_number_; }

private:
    uint64_t line_number_;
};

// Joins the policy's fields with one blank line, in order title, [body],
// best_answer. Throws CompositionError when a required field is missing.
// Under inference_full a missing best_answer is simply omitted so that
// unanswered pretraining targets stay composable.
DocumentRecord compose_document(const ProcessedQuestion& question, CompositionPolicy policy);

// The retrieval collection: one document per answered question.
std::vector<DocumentRecord> compose_corpus_documents(const Corpus& corpus,
                                                     CompositionPolicy policy);

struct QueryBuildOptions {
    size_t max_query_len = 512;
    CutMode cut_mode = CutMode::middle;
};

// One pair per duplicate link A->B where B is answered and A has a snippet.
std::vector<EvalPair> build_eval_set(const Corpus& corpus,
                                     const std::vector<RawLinkRow>& links,
                                     const QueryBuildOptions& options = {});

// One pair per duplicate link A->B where A has a snippet, excluding every pair
// already claimed by build_eval_set. Targets are the unanswered duplicates.
std::vector<PretrainPair> build_pretraining_pairs(const Corpus& corpus,
                                                  const std::vector<RawLinkRow>& links,
                                                  const QueryBuildOptions& options = {});

// JSON-lines persistence, one question per line, stable field names
// (id, title, body, code, error, keyword, best_answer, duplicate_of,
// favorite_count). load(persist(c)) == c field for field.
void persist_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

// Pair files share one JSON-lines schema: query_tokens, source_question,
// gold_doc_id, and optionally hard_negative_doc_ids (written by the miner).
struct PairRecord {
    Query query;
    int64_t gold_doc_id = 0;
    std::vector<int64_t> hard_negative_doc_ids;

    bool operator==(const PairRecord&) const = default;
};

void persist_pairs(const std::vector<PairRecord>& pairs, const std::filesystem::path& path);
std::vector<PairRecord> load_pairs(const std::filesystem::path& path);

std::vector<PairRecord> to_pair_records(const std::vector<EvalPair>& pairs);
std::vector<PairRecord> to_pair_records(const std::vector<PretrainPair>& pairs);

// Field presence counts over a corpus (the containment structure makes
// with_either >= max(with_code, with_error) and with_both <= min(...)).
struct CorpusFieldStats {
    uint64_t total = 0;
    uint64_t with_code = 0;
    uint64_t with_error = 0;
    uint64_t with_both = 0;
    uint64_t with_either = 0;
    uint64_t with_best_answer = 0;
};

CorpusFieldStats corpus_field_stats(const Corpus& corpus);

}  // namespace snipsearch
