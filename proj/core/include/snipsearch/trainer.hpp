#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "snipsearch/corpus.hpp"
#include "snipsearch/encoder.hpp"
#include "snipsearch/rng.hpp"

namespace snipsearch {

struct TrainingExample {
    Query query;
    int64_t positive_doc_id = 0;
    std::vector<int64_t> hard_negative_doc_ids;  // never contains the positive
};

struct TrainerConfig {
    double learning_rate = 1e-5;
    uint32_t warmup_steps = 3500;
    double clip_norm = 2.0;
    uint32_t batch_size = 12;
    uint32_t accumulation_steps = 1;
    uint32_t max_query_len = 512;
    uint32_t max_doc_len = 512;
    uint32_t epochs = 1;
    uint32_t max_steps = 0;  // optimizer-step cap; 0 means no cap
    uint64_t seed = 0;
    CompositionPolicy composition_policy = CompositionPolicy::train_no_body;
    CutMode cut_mode = CutMode::middle;
    uint32_t embedding_dim = 64;
    uint32_t feature_buckets = 1u << 15;
    bool augment = false;  // random crop + deletion of document tokens
    double crop_fraction = 0.0;
    double delete_prob = 0.0;

    void validate() const;  // throws std::invalid_argument
};

// Flat key=value file mirroring TrainerConfig ('#' starts a comment).
TrainerConfig load_trainer_config(const std::filesystem::path& path);
void save_trainer_config(const TrainerConfig& config, const std::filesystem::path& path);

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& message) : std::runtime_error(message) {}
};

// -log(exp(s+) / (sum_j exp(s-_j) + exp(s+))), stabilized by max subtraction
// so scores up to |700| do not overflow.
double contrastive_loss(double pos_score, const std::vector<double>& neg_scores);

// Negatives for query i: every other positive in the batch plus every hard
// negative in the batch, minus i's own positive. Returned sets are sorted and
// deduplicated. Throws std::invalid_argument when two examples share a
// positive (the caller re-batches).
std::vector<std::vector<int64_t>> assemble_batch_negatives(
    const std::vector<TrainingExample>& batch);

// Composes, tokenizes, truncates and featurizes documents by id, with caching.
// When augmentation is on, each access corrupts the cached token sequence with
// the supplied rng instead of reusing a cached feature vector.
class DocFeatureSource {
public:
    DocFeatureSource(const Corpus& corpus, const TrainerConfig& config);

    const FeatureVector& features(int64_t doc_id);
    FeatureVector augmented_features(int64_t doc_id, Rng& rng);
    bool contains(int64_t doc_id) const { return by_id_.count(doc_id) != 0; }
    const TrainerConfig& config() const { return config_; }

private:
    const TokenSeq& doc_tokens(int64_t doc_id);

    const Corpus& corpus_;
    TrainerConfig config_;
    std::unordered_map<int64_t, size_t> by_id_;
    std::unordered_map<int64_t, TokenSeq> token_cache_;
    std::unordered_map<int64_t, FeatureVector> feature_cache_;
};

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;  // same shape/layout as EncoderParams::weights()
};

// Mean contrastive loss over the batch with in-batch negatives, and its exact
// analytic gradient with respect to W.
//
// With scores s(q,c) = (W x_q)^T (W x_c) and softmax weights p over each
// query's candidate set, dL/dW for one query is
//     e_u x_q^T + e_q u^T,   u = sum_c (p_c - [c = positive]) x_c,
// where e_q = W x_q and e_u = W u; both terms are rank-one updates over the
// sparse feature nonzeros.
LossAndGrad loss_and_gradients(const EncoderParams& params,
                               const std::vector<TrainingExample>& batch,
                               DocFeatureSource& docs, Rng* augment_rng = nullptr);

// Scales grad to clip_norm when its L2 norm exceeds it. Returns the
// pre-clip norm.
double clip_gradients(std::vector<double>& grad, double clip_norm);

// Linear warmup from 0 to learning_rate over warmup_steps, then constant.
double lr_schedule(uint64_t step, const TrainerConfig& config);

struct AdamState {
    explicit AdamState(size_t size)
        : first_moment(size, 0.0), second_moment(size, 0.0) {}

    std::vector<double> first_moment;
    std::vector<double> second_moment;
    uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Standard Adam update with bias correction; increments the step counter.
void adam_step(AdamState& state, EncoderParams& params, const std::vector<double>& grad,
               double lr);

struct TrainLog {
    std::vector<double> step_losses;       // one entry per optimizer step
    std::vector<double> epoch_mean_losses;
    uint64_t optimizer_steps = 0;
    uint64_t examples_seen = 0;
};

// Shuffles examples each epoch (seeded), groups them into batches with
// distinct positives, accumulates gradients over accumulation_steps
// micro-batches (averaged), clips, and applies one Adam step per window.
// Deterministic given config.seed.
TrainLog train(EncoderParams& params, const std::vector<TrainingExample>& examples,
               const Corpus& corpus, const TrainerConfig& config);

// Top-k retrieval for each pair; everything retrieved except the gold becomes
// a hard negative. The index must be built from `params`.
std::vector<TrainingExample> mine_hard_negatives(const EncoderParams& params,
                                                 const VectorIndex& index,
                                                 const std::vector<PairRecord>& pairs,
                                                 size_t k);

// Removes a contiguous span of floor(crop_fraction * len) tokens at a random
// start, then deletes each survivor independently with delete_prob.
TokenSeq corrupt_document(const TokenSeq& tokens, Rng& rng, double crop_fraction,
                          double delete_prob);

std::vector<TrainingExample> to_training_examples(const std::vector<PairRecord>& pairs);

}  // namespace snipsearch
