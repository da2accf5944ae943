#include "snipsearch/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "snipsearch/io.hpp"
#include "snipsearch/preprocess.hpp"

namespace snipsearch {

namespace {

bool is_power_of_two(uint32_t value) { return value != 0 && (value & (value - 1)) == 0; }

TokenSeq truncate_head(TokenSeq tokens, size_t max_len) {
    if (tokens.size() > max_len) tokens.resize(max_len);
    return tokens;
}

TokenSeq truncate_query(TokenSeq tokens, const TrainerConfig& config) {
    if (config.cut_mode == CutMode::middle) {
        return truncate_middle(std::move(tokens), config.max_query_len);
    }
    return truncate_head(std::move(tokens), config.max_query_len);
}

}  // namespace

void TrainerConfig::validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("config: learning_rate < 0");
    if (warmup_steps < 1) throw std::invalid_argument("config: warmup_steps < 1");
    if (clip_norm <= 0.0) throw std::invalid_argument("config: clip_norm <= 0");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size < 1");
    if (accumulation_steps < 1) throw std::invalid_argument("config: accumulation_steps < 1");
    if (max_query_len < 2) throw std::invalid_argument("config: max_query_len < 2");
    if (max_doc_len < 2) throw std::invalid_argument("config: max_doc_len < 2");
    if (epochs < 1) throw std::invalid_argument("config: epochs < 1");
    if (embedding_dim < 2) throw std::invalid_argument("config: embedding_dim < 2");
    if (!is_power_of_two(feature_buckets)) {
        throw std::invalid_argument("config: feature_buckets must be a power of two");
    }
    if (crop_fraction < 0.0 || crop_fraction >= 1.0) {
        throw std::invalid_argument("config: crop_fraction must be in [0, 1)");
    }
    if (delete_prob < 0.0 || delete_prob >= 1.0) {
        throw std::invalid_argument("config: delete_prob must be in [0, 1)");
    }
}

TrainerConfig load_trainer_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    TrainerConfig config;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": expected key = value");
        }
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto as_bool = [&](const std::string& v) {
            if (v == "true" || v == "1") return true;
            if (v == "false" || v == "0") return false;
            throw std::runtime_error("config: bad boolean for " + key + ": " + v);
        };
        try {
            if (key == "learning_rate") config.learning_rate = std::stod(value);
            else if (key == "warmup_steps") config.warmup_steps = static_cast<uint32_t>(std::stoul(value));
            else if (key == "clip_norm") config.clip_norm = std::stod(value);
            else if (key == "batch_size") config.batch_size = static_cast<uint32_t>(std::stoul(value));
            else if (key == "accumulation_steps") config.accumulation_steps = static_cast<uint32_t>(std::stoul(value));
            else if (key == "max_query_len") config.max_query_len = static_cast<uint32_t>(std::stoul(value));
            else if (key == "max_doc_len") config.max_doc_len = static_cast<uint32_t>(std::stoul(value));
            else if (key == "epochs") config.epochs = static_cast<uint32_t>(std::stoul(value));
            else if (key == "max_steps") config.max_steps = static_cast<uint32_t>(std::stoul(value));
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "composition_policy") config.composition_policy = composition_policy_from_string(value);
            else if (key == "cut_mode") config.cut_mode = value == "head" ? CutMode::head : CutMode::middle;
            else if (key == "embedding_dim") config.embedding_dim = static_cast<uint32_t>(std::stoul(value));
            else if (key == "feature_buckets") config.feature_buckets = static_cast<uint32_t>(std::stoul(value));
            else if (key == "augment") config.augment = as_bool(value);
            else if (key == "crop_fraction") config.crop_fraction = std::stod(value);
            else if (key == "delete_prob") config.delete_prob = std::stod(value);
            else throw std::runtime_error("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": bad value for " + key);
        }
    }
    config.validate();
    return config;
}

void save_trainer_config(const TrainerConfig& config, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "learning_rate = " << config.learning_rate << "\n";
    out << "warmup_steps = " << config.warmup_steps << "\n";
    out << "clip_norm = " << config.clip_norm << "\n";
    out << "batch_size = " << config.batch_size << "\n";
    out << "accumulation_steps = " << config.accumulation_steps << "\n";
    out << "max_query_len = " << config.max_query_len << "\n";
    out << "max_doc_len = " << config.max_doc_len << "\n";
    out << "epochs = " << config.epochs << "\n";
    out << "max_steps = " << config.max_steps << "\n";
    out << "seed = " << config.seed << "\n";
    out << "composition_policy = " << to_string(config.composition_policy) << "\n";
    out << "cut_mode = " << (config.cut_mode == CutMode::head ? "head" : "middle") << "\n";
    out << "embedding_dim = " << config.embedding_dim << "\n";
    out << "feature_buckets = " << config.feature_buckets << "\n";
    out << "augment = " << (config.augment ? "true" : "false") << "\n";
    out << "crop_fraction = " << config.crop_fraction << "\n";
    out << "delete_prob = " << config.delete_prob << "\n";
    atomic_write_file(path, out.str());
}

double contrastive_loss(double pos_score, const std::vector<double>& neg_scores) {
    double max_score = pos_score;
    for (double s : neg_scores) max_score = std::max(max_score, s);
    double sum = std::exp(pos_score - max_score);
    for (double s : neg_scores) sum += std::exp(s - max_score);
    return -(pos_score - max_score) + std::log(sum);
}

std::vector<std::vector<int64_t>> assemble_batch_negatives(
    const std::vector<TrainingExample>& batch) {
    std::set<int64_t> positives;
    for (const TrainingExample& example : batch) {
        if (!positives.insert(example.positive_doc_id).second) {
            throw std::invalid_argument(
                "batch has duplicate positive doc id " +
                std::to_string(example.positive_doc_id) + "; re-batch and retry");
        }
    }
    std::set<int64_t> pool(positives);
    for (const TrainingExample& example : batch) {
        pool.insert(example.hard_negative_doc_ids.begin(),
                    example.hard_negative_doc_ids.end());
    }
    std::vector<std::vector<int64_t>> negatives;
    negatives.reserve(batch.size());
    for (const TrainingExample& example : batch) {
        std::vector<int64_t> own;
        for (int64_t doc_id : pool) {
            if (doc_id != example.positive_doc_id) own.push_back(doc_id);
        }
        negatives.push_back(std::move(own));
    }
    return negatives;
}

// ---------------------------------------------------------------------------
// DocFeatureSource
// ---------------------------------------------------------------------------

DocFeatureSource::DocFeatureSource(const Corpus& corpus, const TrainerConfig& config)
    : corpus_(corpus), config_(config) {
    by_id_.reserve(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        by_id_.emplace(corpus[i].id, i);
    }
}

const TokenSeq& DocFeatureSource::doc_tokens(int64_t doc_id) {
    auto cached = token_cache_.find(doc_id);
    if (cached != token_cache_.end()) return cached->second;
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) {
        throw TrainingError("doc id " + std::to_string(doc_id) + " not in corpus");
    }
    DocumentRecord doc =
        compose_document(corpus_[it->second], config_.composition_policy);
    return token_cache_.emplace(doc_id, tokenize(doc.text)).first->second;
}

const FeatureVector& DocFeatureSource::features(int64_t doc_id) {
    auto cached = feature_cache_.find(doc_id);
    if (cached != feature_cache_.end()) return cached->second;
    FeatureVector fv = featurize(truncate_head(doc_tokens(doc_id), config_.max_doc_len),
                                 config_.feature_buckets);
    return feature_cache_.emplace(doc_id, std::move(fv)).first->second;
}

FeatureVector DocFeatureSource::augmented_features(int64_t doc_id, Rng& rng) {
    TokenSeq corrupted = corrupt_document(doc_tokens(doc_id), rng, config_.crop_fraction,
                                          config_.delete_prob);
    return featurize(truncate_head(std::move(corrupted), config_.max_doc_len),
                     config_.feature_buckets);
}

// ---------------------------------------------------------------------------
// Loss and gradients
// ---------------------------------------------------------------------------

LossAndGrad loss_and_gradients(const EncoderParams& params,
                               const std::vector<TrainingExample>& batch,
                               DocFeatureSource& docs, Rng* augment_rng) {
    if (batch.empty()) throw TrainingError("empty batch");
    const uint32_t dim = params.dim();
    const double batch_size = static_cast<double>(batch.size());

    std::vector<std::vector<int64_t>> negatives = assemble_batch_negatives(batch);

    // every candidate document in the batch, in deterministic (sorted) order
    std::set<int64_t> candidate_set;
    for (size_t i = 0; i < batch.size(); ++i) {
        candidate_set.insert(batch[i].positive_doc_id);
        candidate_set.insert(negatives[i].begin(), negatives[i].end());
    }

    std::map<int64_t, FeatureVector> doc_features;
    std::map<int64_t, Embedding> doc_embeddings;
    for (int64_t doc_id : candidate_set) {
        FeatureVector fv = augment_rng ? docs.augmented_features(doc_id, *augment_rng)
                                       : docs.features(doc_id);
        doc_embeddings.emplace(doc_id, encode(params, fv));
        doc_features.emplace(doc_id, std::move(fv));
    }

    LossAndGrad result;
    result.grad.assign(params.weights().size(), 0.0);

    auto add_outer = [&](const Embedding& dense, const FeatureVector& sparse) {
        for (const auto& [bucket, weight] : sparse.entries) {
            double* column = result.grad.data() + static_cast<size_t>(bucket) * dim;
            for (uint32_t r = 0; r < dim; ++r) {
                column[r] += weight * dense[r];
            }
        }
    };

    for (size_t i = 0; i < batch.size(); ++i) {
        const TrainingExample& example = batch[i];
        FeatureVector query_fv =
            featurize(truncate_query(example.query.tokens, docs.config()),
                      params.num_buckets());
        Embedding query_emb = encode(params, query_fv);

        // candidate order: positive first, then sorted negatives
        std::vector<int64_t> candidates;
        candidates.reserve(negatives[i].size() + 1);
        candidates.push_back(example.positive_doc_id);
        candidates.insert(candidates.end(), negatives[i].begin(), negatives[i].end());

        std::vector<double> scores;
        scores.reserve(candidates.size());
        for (int64_t doc_id : candidates) {
            scores.push_back(dot_score(query_emb, doc_embeddings.at(doc_id)));
        }

        double max_score = *std::max_element(scores.begin(), scores.end());
        double sum = 0.0;
        for (double s : scores) sum += std::exp(s - max_score);
        double loss_i = -(scores[0] - max_score) + std::log(sum);
        if (!std::isfinite(loss_i)) {
            throw TrainingError("non-finite loss for query " +
                                std::to_string(example.query.source_question));
        }
        result.loss += loss_i / batch_size;

        // softmax residuals g_c = (p_c - [c == positive]) / B
        Embedding weighted_emb(dim, 0.0);               // sum_c g_c * e_c
        std::map<uint32_t, double> weighted_features;   // sum_c g_c * x_c
        for (size_t c = 0; c < candidates.size(); ++c) {
            double g = std::exp(scores[c] - max_score) / sum - (c == 0 ? 1.0 : 0.0);
            g /= batch_size;
            const Embedding& e_c = doc_embeddings.at(candidates[c]);
            for (uint32_t r = 0; r < dim; ++r) weighted_emb[r] += g * e_c[r];
            for (const auto& [bucket, weight] : doc_features.at(candidates[c]).entries) {
                weighted_features[bucket] += g * weight;
            }
        }

        add_outer(weighted_emb, query_fv);
        FeatureVector u;
        u.num_buckets = params.num_buckets();
        u.entries.assign(weighted_features.begin(), weighted_features.end());
        add_outer(query_emb, u);
    }

    if (!std::isfinite(result.loss)) throw TrainingError("non-finite batch loss");
    return result;
}

double clip_gradients(std::vector<double>& grad, double clip_norm) {
    if (clip_norm <= 0.0) throw std::invalid_argument("clip_norm must be > 0");
    double norm_sq = 0.0;
    for (double g : grad) norm_sq += g * g;
    double norm = std::sqrt(norm_sq);
    if (norm > clip_norm) {
        double scale = clip_norm / norm;
        for (double& g : grad) g *= scale;
    }
    return norm;
}

double lr_schedule(uint64_t step, const TrainerConfig& config) {
    if (step >= config.warmup_steps) return config.learning_rate;
    return config.learning_rate * static_cast<double>(step) /
           static_cast<double>(config.warmup_steps);
}

void adam_step(AdamState& state, EncoderParams& params, const std::vector<double>& grad,
               double lr) {
    std::vector<double>& weights = params.weights();
    if (grad.size() != weights.size() || grad.size() != state.first_moment.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    ++state.step;
    double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < weights.size(); ++i) {
        double g = grad[i];
        double m = state.first_moment[i] = state.beta1 * state.first_moment[i] +
                                           (1.0 - state.beta1) * g;
        double v = state.second_moment[i] = state.beta2 * state.second_moment[i] +
                                            (1.0 - state.beta2) * g * g;
        double m_hat = m / bias1;
        double v_hat = v / bias2;
        weights[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

namespace {

// Greedy batching that keeps positives distinct within each batch; colliding
// examples are deferred to later batches rather than dropped.
std::vector<std::vector<size_t>> make_batches(const std::vector<size_t>& order,
                                              const std::vector<TrainingExample>& examples,
                                              size_t batch_size) {
    std::vector<std::vector<size_t>> batches;
    std::vector<size_t> pending = order;
    while (!pending.empty()) {
        std::vector<size_t> deferred;
        std::vector<size_t> batch;
        std::unordered_set<int64_t> batch_positives;
        for (size_t idx : pending) {
            int64_t positive = examples[idx].positive_doc_id;
            if (batch_positives.count(positive)) {
                deferred.push_back(idx);
                continue;
            }
            batch.push_back(idx);
            batch_positives.insert(positive);
            if (batch.size() == batch_size) {
                batches.push_back(std::move(batch));
                batch.clear();
                batch_positives.clear();
            }
        }
        if (!batch.empty()) batches.push_back(std::move(batch));
        pending = std::move(deferred);
    }
    return batches;
}

}  // namespace

TrainLog train(EncoderParams& params, const std::vector<TrainingExample>& examples,
               const Corpus& corpus, const TrainerConfig& config) {
    config.validate();
    if (examples.empty()) throw TrainingError("no training examples");
    if (params.dim() != config.embedding_dim ||
        params.num_buckets() != config.feature_buckets) {
        throw TrainingError("encoder shape does not match trainer config");
    }

    DocFeatureSource docs(corpus, config);
    AdamState state(params.weights().size());
    Rng augment_rng(config.seed ^ 0x517cc1b727220a95ULL);
    TrainLog log;

    std::vector<double> grad_sum(params.weights().size(), 0.0);
    uint64_t step = 0;
    bool done = false;

    for (uint32_t epoch = 0; epoch < config.epochs && !done; ++epoch) {
        std::vector<size_t> order(examples.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng epoch_rng(config.seed + 0x9e3779b97f4a7c15ULL * (epoch + 1));
        shuffle(order, epoch_rng);

        std::vector<std::vector<size_t>> batches =
            make_batches(order, examples, config.batch_size);

        double epoch_loss = 0.0;
        size_t epoch_batches = 0;
        size_t window = 0;
        double window_loss = 0.0;
        std::fill(grad_sum.begin(), grad_sum.end(), 0.0);

        auto flush_window = [&]() {
            double inv = 1.0 / static_cast<double>(window);
            for (double& g : grad_sum) g *= inv;
            clip_gradients(grad_sum, config.clip_norm);
            double lr = lr_schedule(step, config);
            adam_step(state, params, grad_sum, lr);
            log.step_losses.push_back(window_loss * inv);
            ++step;
            window = 0;
            window_loss = 0.0;
            std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
        };

        for (size_t b = 0; b < batches.size(); ++b) {
            std::vector<TrainingExample> batch;
            batch.reserve(batches[b].size());
            for (size_t idx : batches[b]) batch.push_back(examples[idx]);

            LossAndGrad result;
            try {
                result = loss_and_gradients(params, batch, docs,
                                            config.augment ? &augment_rng : nullptr);
            } catch (const TrainingError& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(b) + ": " + e.what());
            }
            log.examples_seen += batch.size();
            epoch_loss += result.loss;
            ++epoch_batches;
            window_loss += result.loss;
            for (size_t i = 0; i < grad_sum.size(); ++i) grad_sum[i] += result.grad[i];
            ++window;

            bool window_full = window == config.accumulation_steps;
            bool epoch_end = b + 1 == batches.size();
            if (window_full || epoch_end) {
                flush_window();
                if (config.max_steps != 0 && step >= config.max_steps) {
                    done = true;
                    break;
                }
            }
        }
        if (epoch_batches > 0) {
            log.epoch_mean_losses.push_back(epoch_loss /
                                            static_cast<double>(epoch_batches));
        }
    }
    log.optimizer_steps = step;
    return log;
}

std::vector<TrainingExample> mine_hard_negatives(const EncoderParams& params,
                                                 const VectorIndex& index,
                                                 const std::vector<PairRecord>& pairs,
                                                 size_t k) {
    if (k < 1) throw std::invalid_argument("mine_hard_negatives: k must be >= 1");
    std::vector<TrainingExample> examples;
    examples.reserve(pairs.size());
    for (const PairRecord& pair : pairs) {
        FeatureVector fv = featurize(pair.query.tokens, params.num_buckets());
        Embedding query_emb = encode(params, fv);
        TrainingExample example;
        example.query = pair.query;
        example.positive_doc_id = pair.gold_doc_id;
        for (const auto& [doc_id, score] : dense_search(index, query_emb, k)) {
            if (doc_id != pair.gold_doc_id) {
                example.hard_negative_doc_ids.push_back(doc_id);
            }
        }
        examples.push_back(std::move(example));
    }
    return examples;
}

TokenSeq corrupt_document(const TokenSeq& tokens, Rng& rng, double crop_fraction,
                          double delete_prob) {
    if (crop_fraction < 0.0 || crop_fraction >= 1.0) {
        throw std::invalid_argument("corrupt_document: crop_fraction must be in [0, 1)");
    }
    if (delete_prob < 0.0 || delete_prob >= 1.0) {
        throw std::invalid_argument("corrupt_document: delete_prob must be in [0, 1)");
    }
    TokenSeq out = tokens;
    size_t span = static_cast<size_t>(crop_fraction * static_cast<double>(out.size()));
    if (span > 0) {
        size_t start = static_cast<size_t>(rng.next_below(out.size() - span + 1));
        out.erase(out.begin() + static_cast<ptrdiff_t>(start),
                  out.begin() + static_cast<ptrdiff_t>(start + span));
    }
    if (delete_prob > 0.0) {
        TokenSeq kept;
        kept.reserve(out.size());
        for (std::string& token : out) {
            if (rng.next_double() >= delete_prob) kept.push_back(std::move(token));
        }
        out = std::move(kept);
    }
    return out;
}

std::vector<TrainingExample> to_training_examples(const std::vector<PairRecord>& pairs) {
    std::vector<TrainingExample> examples;
    examples.reserve(pairs.size());
    for (const PairRecord& pair : pairs) {
        TrainingExample example;
        example.query = pair.query;
        example.positive_doc_id = pair.gold_doc_id;
        for (int64_t doc_id : pair.hard_negative_doc_ids) {
            if (doc_id != pair.gold_doc_id) {
                example.hard_negative_doc_ids.push_back(doc_id);
            }
        }
        examples.push_back(std::move(example));
    }
    return examples;
}

}  // namespace snipsearch
