#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snipsearch/corpus.hpp"
#include "snipsearch/eval.hpp"
#include "snipsearch/trainer.hpp"

namespace snipsearch {

// Synthetic retrieval corpus with a known separable structure: each query
// question shares `signature_tokens` unique tokens with its gold document,
// everything else is filler drawn from a small shared vocabulary. Distractor
// documents are filler only.
struct SyntheticSpec {
    size_t query_count = 200;
    size_t distractor_count = 1000;
    size_t signature_tokens = 3;
    size_t filler_vocab = 100;
    uint64_t seed = 0;
};

struct SyntheticData {
    Corpus corpus;                  // query questions, gold questions, distractors
    std::vector<RawLinkRow> links;  // one duplicate link per query -> gold
};

SyntheticData generate_synthetic_corpus(const SyntheticSpec& spec);

// Desk-scale training settings for the synthetic corpus. The linear encoder
// needs a far larger learning rate and shorter warmup than the defaults,
// which are sized for a large pretrained model.
TrainerConfig demo_trainer_config(uint64_t seed);

struct DemoConfig {
    uint64_t seed = 0;
    unsigned workers = 1;
    size_t query_count = 200;
    size_t distractor_count = 1000;
    size_t mine_k = 10;
};

struct DemoResult {
    EvalReport bm25;
    EvalReport dense_initial;
    EvalReport dense_trained;
    EvalReport dense_self_trained;
    std::string delta_table;
};

// End-to-end smoke path: generate the synthetic corpus, evaluate BM25 and the
// untrained encoder, train, mine hard negatives, retrain, and evaluate again.
// Deterministic given the seed; worker count must not change any output.
DemoResult demo_pipeline(const DemoConfig& config = {});

// Reports as JSON files plus the delta table, all byte-deterministic.
void write_demo_outputs(const DemoResult& result, const std::filesystem::path& dir);

}  // namespace snipsearch
