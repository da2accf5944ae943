// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
//
// Everything runs on synthetic or bundled fixture data with pinned seeds and
// tolerances; no network, no external corpora.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "snipsearch/bm25.hpp"
#include "snipsearch/corpus.hpp"
#include "snipsearch/encoder.hpp"
#include "snipsearch/eval.hpp"
#include "snipsearch/ingest.hpp"
#include "snipsearch/io.hpp"
#include "snipsearch/pipeline.hpp"
#include "snipsearch/preprocess.hpp"
#include "snipsearch/rng.hpp"
#include "snipsearch/trainer.hpp"

using namespace snipsearch;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtureDir = SNIPSEARCH_FIXTURE_DIR;

struct Criterion {
    int number;
    std::string name;
    std::function<std::string()> body;  // returns failure detail, empty = pass
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string fail(const std::string& detail) { return detail; }

#define ACCEPT_CHECK(cond, detail)                     \
    do {                                               \
        if (!(cond)) return fail(detail);              \
    } while (0)

// ---------------------------------------------------------------------------
// independent scalar BM25 (shares nothing with the index implementation)
// ---------------------------------------------------------------------------

struct ScalarBm25 {
    std::map<int64_t, TokenSeq> docs;
    double k1 = 1.2;
    double b = 0.75;

    double idf(const std::string& term) const {
        double df = 0.0;
        for (const auto& [id, tokens] : docs) {
            for (const std::string& t : tokens) {
                if (t == term) {
                    df += 1.0;
                    break;
                }
            }
        }
        return std::log((static_cast<double>(docs.size()) + 1.0) / (df + 0.5));
    }

    double score(const TokenSeq& query, int64_t doc_id) const {
        const TokenSeq& doc = docs.at(doc_id);
        double avgdl = 0.0;
        for (const auto& [id, tokens] : docs) avgdl += static_cast<double>(tokens.size());
        avgdl /= static_cast<double>(docs.size());
        double total = 0.0;
        for (const std::string& q : query) {
            double tf = 0.0;
            for (const std::string& t : doc) {
                if (t == q) tf += 1.0;
            }
            if (tf == 0.0) continue;
            total += idf(q) * tf * (k1 + 1.0) /
                     (tf + k1 * (1.0 - b + b * static_cast<double>(doc.size()) / avgdl));
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// criterion 1: BM25 oracle equivalence on random corpora
// ---------------------------------------------------------------------------

std::string criterion_bm25_oracle() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(2024);
    const double k1s[] = {0.5, 1.2, 2.0};
    const double bs[] = {0.0, 0.75, 1.0};
    double max_err = 0.0;
    for (int corpus_id = 0; corpus_id < 100; ++corpus_id) {
        double k1 = k1s[corpus_id % 3];
        double b = bs[(corpus_id / 3) % 3];
        ScalarBm25 oracle;
        oracle.k1 = k1;
        oracle.b = b;
        std::vector<DocumentRecord> docs;
        size_t doc_count = 1 + rng.next_below(50);
        for (size_t i = 0; i < doc_count; ++i) {
            size_t len = 1 + rng.next_below(10);
            TokenSeq tokens;
            std::string text;
            for (size_t t = 0; t < len; ++t) {
                std::string token = "v" + std::to_string(rng.next_below(20));
                tokens.push_back(token);
                text += token + " ";
            }
            int64_t doc_id = static_cast<int64_t>(i) + 1;
            docs.push_back({doc_id, text, CompositionPolicy::inference_full});
            oracle.docs[doc_id] = tokens;
        }
        Bm25Index index = Bm25Index::build(docs, k1, b);
        for (int q = 0; q < 3; ++q) {
            TokenSeq query;
            size_t qlen = 1 + rng.next_below(8);
            for (size_t t = 0; t < qlen; ++t) {
                query.push_back("v" + std::to_string(rng.next_below(24)));
            }
            for (const auto& [doc_id, tokens] : oracle.docs) {
                double got = index.score(query, doc_id);
                double want = oracle.score(query, doc_id);
                max_err = std::max(max_err, std::fabs(got - want));
            }
        }
    }
    double elapsed = seconds_since(start);
    ACCEPT_CHECK(max_err < 1e-9,
                 "max |index - oracle| = " + std::to_string(max_err));
    ACCEPT_CHECK(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s >= 10 s");
    return {};
}

// ---------------------------------------------------------------------------
// criterion 2: hand-derived BM25 instance
// ---------------------------------------------------------------------------

std::string criterion_bm25_hand_instance() {
    ScalarBm25 oracle;
    oracle.docs = {{1, {"a", "b"}}, {2, {"a"}}, {3, {"c"}}};

    double oracle_d2 = oracle.score({"a"}, 2);
    double oracle_d1 = oracle.score({"a"}, 1);
    double oracle_d3 = oracle.score({"a"}, 3);
    double oracle_idf = oracle.idf("a");
    ACCEPT_CHECK(std::fabs(oracle_d2 - 0.5236) <= 1e-4,
                 "oracle d2 = " + std::to_string(oracle_d2));
    ACCEPT_CHECK(std::fabs(oracle_d1 - 0.3902) <= 1e-4,
                 "oracle d1 = " + std::to_string(oracle_d1));
    ACCEPT_CHECK(oracle_d3 == 0.0, "oracle d3 nonzero");
    ACCEPT_CHECK(std::fabs(oracle_idf - std::log(1.6)) <= 1e-12, "oracle idf(a)");
    ACCEPT_CHECK(oracle_d2 > oracle_d1 && oracle_d1 > oracle_d3, "oracle ordering");

    std::vector<DocumentRecord> docs = {
        {1, "a b", CompositionPolicy::inference_full},
        {2, "a", CompositionPolicy::inference_full},
        {3, "c", CompositionPolicy::inference_full},
    };
    Bm25Index index = Bm25Index::build(docs, 1.2, 0.75);
    ACCEPT_CHECK(std::fabs(index.score({"a"}, 2) - oracle_d2) < 1e-9, "impl d2");
    ACCEPT_CHECK(std::fabs(index.score({"a"}, 1) - oracle_d1) < 1e-9, "impl d1");
    ACCEPT_CHECK(index.score({"a"}, 3) == 0.0, "impl d3");
    ACCEPT_CHECK(std::fabs(index.idf("a") - std::log(1.6)) < 1e-12, "impl idf");

    auto top = index.search({"a"}, 2);
    ACCEPT_CHECK(top.size() == 2 && top[0].first == 2 && top[1].first == 1,
                 "search order");
    return {};
}

// ---------------------------------------------------------------------------
// criterion 3: gradient check
// ---------------------------------------------------------------------------

std::string criterion_gradient_check() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(777);

    Corpus corpus;
    for (int i = 0; i < 12; ++i) {
        ProcessedQuestion q;
        q.id = 100 + i;
        q.title = "t" + std::to_string(i);
        q.body_text = "b";
        std::string answer;
        size_t len = 3 + rng.next_below(6);
        for (size_t t = 0; t < len; ++t) {
            answer += "tok" + std::to_string(rng.next_below(30)) + " ";
        }
        q.best_answer = answer;
        corpus.push_back(std::move(q));
    }

    TrainerConfig config;
    config.embedding_dim = 6;
    config.feature_buckets = 64;
    config.batch_size = 4;
    DocFeatureSource docs(corpus, config);

    double max_rel_err = 0.0;
    int instances = 0;
    for (int trial = 0; trial < 20; ++trial) {
        EncoderParams params = EncoderParams::random_init(6, 64, 9000 + trial);
        for (double& w : params.weights()) w *= 4.0;

        std::vector<TrainingExample> batch;
        std::set<int64_t> used;
        size_t batch_size = 2 + rng.next_below(3);
        for (size_t i = 0; i < batch_size; ++i) {
            int64_t positive = 100 + static_cast<int64_t>(rng.next_below(12));
            while (used.count(positive)) positive = 100 + static_cast<int64_t>(rng.next_below(12));
            used.insert(positive);
            TrainingExample example;
            example.positive_doc_id = positive;
            example.query.source_question = positive;
            size_t qlen = 1 + rng.next_below(4);
            for (size_t t = 0; t < qlen; ++t) {
                example.query.tokens.push_back("tok" + std::to_string(rng.next_below(30)));
            }
            if (rng.next_below(2) == 0) {
                int64_t neg = 100 + static_cast<int64_t>(rng.next_below(12));
                if (neg != positive) example.hard_negative_doc_ids.push_back(neg);
            }
            batch.push_back(std::move(example));
        }

        LossAndGrad analytic = loss_and_gradients(params, batch, docs);

        std::set<uint32_t> touched;
        for (const TrainingExample& example : batch) {
            for (const auto& [bucket, w] :
                 featurize(example.query.tokens, 64).entries) {
                touched.insert(bucket);
            }
            for (const auto& [bucket, w] :
                 docs.features(example.positive_doc_id).entries) {
                touched.insert(bucket);
            }
        }

        const double step = 1e-5;
        int probes = 0;
        for (uint32_t bucket : touched) {
            for (uint32_t r = 0; r < 6 && probes < 25; ++r) {
                size_t flat = static_cast<size_t>(bucket) * 6 + r;
                double saved = params.weights()[flat];
                params.weights()[flat] = saved + step;
                double up = loss_and_gradients(params, batch, docs).loss;
                params.weights()[flat] = saved - step;
                double down = loss_and_gradients(params, batch, docs).loss;
                params.weights()[flat] = saved;
                double fd = (up - down) / (2.0 * step);
                double a = analytic.grad[flat];
                double denom = std::max({std::fabs(a), std::fabs(fd), 1e-8});
                max_rel_err = std::max(max_rel_err, std::fabs(a - fd) / denom);
                ++probes;
            }
            if (probes >= 25) break;
        }
        if (probes >= 20) ++instances;
    }
    double elapsed = seconds_since(start);
    ACCEPT_CHECK(instances >= 20, "only " + std::to_string(instances) + " instances");
    ACCEPT_CHECK(max_rel_err < 1e-4, "max rel err = " + std::to_string(max_rel_err));
    ACCEPT_CHECK(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s >= 30 s");
    return {};
}

// ---------------------------------------------------------------------------
// criterion 4: loss identities
// ---------------------------------------------------------------------------

std::string criterion_loss_identities() {
    for (size_t n : {1u, 3u, 10u, 50u}) {
        for (double value : {0.0, -2.5, 7.0}) {
            std::vector<double> negs(n, value);
            double loss = contrastive_loss(value, negs);
            double expected = std::log(static_cast<double>(n) + 1.0);
            ACCEPT_CHECK(std::fabs(loss - expected) <= 1e-12,
                         "all-equal scores: n=" + std::to_string(n));
        }
    }

    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        double pos = 6.0 * rng.next_double() - 3.0;
        std::vector<double> negs;
        size_t n = 1 + rng.next_below(8);
        for (size_t i = 0; i < n; ++i) negs.push_back(6.0 * rng.next_double() - 3.0);
        double base = contrastive_loss(pos, negs);
        ACCEPT_CHECK(base > 0.0 && std::isfinite(base), "loss out of (0, inf)");
        for (double shift : {-100.0, -1.0, 0.25, 100.0}) {
            std::vector<double> shifted = negs;
            for (double& s : shifted) s += shift;
            ACCEPT_CHECK(std::fabs(contrastive_loss(pos + shift, shifted) - base) <= 1e-12,
                         "shift invariance");
        }
        ACCEPT_CHECK(contrastive_loss(pos + 0.25, negs) < base,
                     "loss not strictly decreasing in the positive score");
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 5: end-to-end training effect (pinned regression values)
// ---------------------------------------------------------------------------

struct TrainedPipeline {
    SyntheticData data;
    std::vector<EvalPair> pairs;
    std::vector<DocumentRecord> docs;
    EncoderParams params{64, 1u << 15, 0};
    double recall_before = 0.0;
    double recall_after = 0.0;
    uint64_t steps = 0;
};

double recall10(const EvalReport& report) {
    for (const auto& [k, value] : report.recall) {
        if (k == 10) return value;
    }
    return -1.0;
}

TrainedPipeline run_training_pipeline() {
    TrainedPipeline p;
    p.data = generate_synthetic_corpus({.query_count = 200,
                                        .distractor_count = 1000,
                                        .signature_tokens = 3,
                                        .filler_vocab = 100,
                                        .seed = 0});
    QueryBuildOptions options;
    options.max_query_len = 256;
    p.pairs = build_eval_set(p.data.corpus, p.data.links, options);
    p.docs = compose_corpus_documents(p.data.corpus, CompositionPolicy::inference_full);

    TrainerConfig config = demo_trainer_config(0);
    p.params = EncoderParams::random_init(config.embedding_dim, config.feature_buckets, 0);

    VectorIndex before = build_vector_index(p.params, p.docs);
    p.recall_before = recall10(evaluate(DenseRetriever(std::move(before), "d0"), p.pairs));

    std::vector<TrainingExample> examples = to_training_examples(to_pair_records(p.pairs));
    TrainLog log = train(p.params, examples, p.data.corpus, config);
    p.steps = log.optimizer_steps;

    VectorIndex after = build_vector_index(p.params, p.docs);
    p.recall_after = recall10(evaluate(DenseRetriever(std::move(after), "d1"), p.pairs));
    return p;
}

// measured once on this implementation and frozen; training is deterministic
constexpr double kPinnedRecallBefore = 0.0350;
constexpr double kPinnedRecallAfter = 0.9700;

std::string criterion_training_effect() {
    auto start = std::chrono::steady_clock::now();
    TrainedPipeline p = run_training_pipeline();
    double elapsed = seconds_since(start);

    ACCEPT_CHECK(p.pairs.size() == 200, "expected 200 eval pairs");
    ACCEPT_CHECK(p.docs.size() == 1200, "expected 1200 documents");
    ACCEPT_CHECK(p.recall_before <= 0.2,
                 "before-training Recall@10 = " + std::to_string(p.recall_before));
    ACCEPT_CHECK(p.steps <= 500, "trained for " + std::to_string(p.steps) + " steps");
    ACCEPT_CHECK(p.recall_after >= 0.9,
                 "after-training Recall@10 = " + std::to_string(p.recall_after));
    ACCEPT_CHECK(std::fabs(p.recall_before - kPinnedRecallBefore) < 1e-9,
                 "regression: before = " + std::to_string(p.recall_before));
    ACCEPT_CHECK(std::fabs(p.recall_after - kPinnedRecallAfter) < 1e-9,
                 "regression: after = " + std::to_string(p.recall_after));
    ACCEPT_CHECK(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s >= 60 s");
    return {};
}

// ---------------------------------------------------------------------------
// criterion 6: self-training mechanics
// ---------------------------------------------------------------------------

std::string criterion_self_training() {
    SyntheticData data = generate_synthetic_corpus({.query_count = 200,
                                                    .distractor_count = 1000,
                                                    .signature_tokens = 3,
                                                    .filler_vocab = 100,
                                                    .seed = 0});
    QueryBuildOptions options;
    options.max_query_len = 256;
    std::vector<EvalPair> pairs = build_eval_set(data.corpus, data.links, options);
    std::vector<DocumentRecord> docs =
        compose_corpus_documents(data.corpus, CompositionPolicy::inference_full);

    // (a) the miner never emits the gold as a negative: exhaustive check
    TrainerConfig config = demo_trainer_config(0);
    EncoderParams params =
        EncoderParams::random_init(config.embedding_dim, config.feature_buckets, 0);
    std::vector<EvalPair> train_half(pairs.begin(), pairs.begin() + 100);
    std::vector<EvalPair> held_out(pairs.begin() + 100, pairs.end());

    std::vector<TrainingExample> examples =
        to_training_examples(to_pair_records(train_half));
    train(params, examples, data.corpus, config);

    VectorIndex index = build_vector_index(params, docs);
    std::vector<TrainingExample> mined =
        mine_hard_negatives(params, index, to_pair_records(pairs), 10);
    ACCEPT_CHECK(mined.size() == pairs.size(), "mining dropped queries");
    for (const TrainingExample& example : mined) {
        for (int64_t negative : example.hard_negative_doc_ids) {
            ACCEPT_CHECK(negative != example.positive_doc_id,
                         "gold emitted as its own hard negative");
        }
        ACCEPT_CHECK(example.hard_negative_doc_ids.size() >= 9,
                     "fewer negatives than k-1");
    }

    // (b) one mine -> retrain loop must not degrade held-out Recall@10 by > 0.02
    double before = recall10(evaluate(DenseRetriever(index, "held-out"), held_out));

    std::vector<TrainingExample> mined_train =
        mine_hard_negatives(params, index, to_pair_records(train_half), 10);
    TrainerConfig retrain_config = config;
    retrain_config.max_steps = 150;
    retrain_config.epochs = 20;
    train(params, mined_train, data.corpus, retrain_config);

    VectorIndex index_after = build_vector_index(params, docs);
    double after = recall10(evaluate(DenseRetriever(index_after, "held-out"), held_out));
    ACCEPT_CHECK(after >= before - 0.02,
                 "held-out Recall@10 degraded: " + std::to_string(before) + " -> " +
                     std::to_string(after));
    return {};
}

// ---------------------------------------------------------------------------
// criterion 7: recall properties and worked examples
// ---------------------------------------------------------------------------

std::string criterion_recall_properties() {
    // worked examples
    RetrievalRun rank3;
    rank3.ranked = {{9, 8, 42, 7, 6}};
    rank3.gold = {42};
    ACCEPT_CHECK(recall_at_k(rank3, 5) == 1.0, "gold at rank 3, Recall@5");

    RetrievalRun rank7;
    rank7.ranked = {{10, 9, 8, 7, 6, 5, 42, 4, 3, 2}};
    rank7.gold = {42};
    ACCEPT_CHECK(recall_at_k(rank7, 5) == 0.0, "gold at rank 7, Recall@5");
    ACCEPT_CHECK(recall_at_k(rank7, 10) == 1.0, "gold at rank 7, Recall@10");

    RetrievalRun two;
    two.ranked = {{1, 42, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
                  {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 42}};
    two.gold = {42, 42};
    ACCEPT_CHECK(recall_at_k(two, 10) == 0.5, "two queries, golds at 2 and 12");

    // monotone in k on random runs; 1.0 at corpus size with every gold indexed
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        size_t corpus_size = 3 + rng.next_below(30);
        RetrievalRun run;
        size_t queries = 1 + rng.next_below(8);
        for (size_t q = 0; q < queries; ++q) {
            std::vector<int64_t> ranked;
            for (size_t i = 0; i < corpus_size; ++i) {
                ranked.push_back(static_cast<int64_t>(i) + 1);
            }
            shuffle(ranked, rng);
            run.gold.push_back(ranked[rng.next_below(corpus_size)]);
            run.ranked.push_back(std::move(ranked));
        }
        double previous = 0.0;
        for (size_t k = 1; k <= corpus_size; ++k) {
            double value = recall_at_k(run, k);
            ACCEPT_CHECK(value >= previous, "recall not monotone in k");
            previous = value;
        }
        ACCEPT_CHECK(recall_at_k(run, corpus_size) == 1.0,
                     "full-corpus recall below 1.0");
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 8: truncation and preprocessing
// ---------------------------------------------------------------------------

std::string criterion_preprocessing() {
    // truncate_middle worked examples
    TokenSeq ten, three;
    for (int i = 1; i <= 10; ++i) ten.push_back("t" + std::to_string(i));
    for (int i = 1; i <= 3; ++i) three.push_back("t" + std::to_string(i));
    ACCEPT_CHECK(truncate_middle(ten, 4) == TokenSeq({"t1", "t2", "t9", "t10"}),
                 "truncate_middle(10, 4)");
    ACCEPT_CHECK(truncate_middle(three, 4) == three, "truncate_middle(3, 4)");
    ACCEPT_CHECK(truncate_middle(ten, 5) == TokenSeq({"t1", "t2", "t3", "t9", "t10"}),
                 "truncate_middle(10, 5)");

    // 20-block hand-labeled fixture
    std::ifstream blocks_in(kFixtureDir / "labeled_blocks.json");
    ACCEPT_CHECK(blocks_in.good(), "labeled_blocks.json missing");
    nlohmann::json blocks = nlohmann::json::parse(blocks_in);
    ACCEPT_CHECK(blocks.size() == 20, "fixture does not have 20 blocks");
    size_t matched = 0;
    for (const auto& block : blocks) {
        BlockKind expected = block.at("label").get<std::string>() == "error"
                                 ? BlockKind::error
                                 : BlockKind::code;
        if (classify_block(block.at("text").get<std::string>()) == expected) ++matched;
    }
    ACCEPT_CHECK(matched == 20,
                 "classify_block matched " + std::to_string(matched) + "/20");

    // 50-row fixture ingest
    std::ifstream posts_in(kFixtureDir / "posts_fixture.xml", std::ios::binary);
    ACCEPT_CHECK(posts_in.good(), "posts_fixture.xml missing");
    SkipReport report;
    std::vector<RawPostRow> rows = parse_posts(posts_in, &report);
    ACCEPT_CHECK(rows.size() == 50,
                 "fixture parsed " + std::to_string(rows.size()) + "/50 rows");
    ACCEPT_CHECK(report.total_skipped() == 0, "fixture rows were skipped");

    // corpus persistence round-trips byte-identically
    std::unordered_map<int64_t, const RawPostRow*> answers;
    std::unordered_map<int64_t, int64_t> duplicates;
    for (const RawPostRow& row : rows) {
        if (row.post_type == PostType::answer) answers.emplace(row.id, &row);
    }
    Corpus corpus;
    for (const RawPostRow& row : filter_tagged_questions(rows)) {
        corpus.push_back(assemble_question(row, answers, duplicates));
    }
    ACCEPT_CHECK(!corpus.empty(), "fixture corpus is empty");
    fs::path path = fs::temp_directory_path() / "snipsearch_acceptance_corpus.jsonl";
    persist_corpus(corpus, path);
    std::string bytes_first = read_file(path);
    Corpus loaded = load_corpus(path);
    ACCEPT_CHECK(loaded == corpus, "corpus round-trip changed a field");
    persist_corpus(loaded, path);
    std::string bytes_second = read_file(path);
    fs::remove(path);
    ACCEPT_CHECK(bytes_first == bytes_second, "corpus round-trip changed bytes");
    return {};
}

// ---------------------------------------------------------------------------
// criterion 9: in-batch negative counting
// ---------------------------------------------------------------------------

std::string criterion_inbatch_counting() {
    for (size_t batch_size : {2u, 3u, 12u}) {
        for (size_t h : {0u, 1u, 5u}) {
            std::vector<TrainingExample> batch;
            int64_t next_negative = 10'000;
            for (size_t i = 0; i < batch_size; ++i) {
                TrainingExample example;
                example.positive_doc_id = 100 + static_cast<int64_t>(i);
                example.query.source_question = example.positive_doc_id;
                example.query.tokens = {"q" + std::to_string(i)};
                for (size_t j = 0; j < h; ++j) {
                    example.hard_negative_doc_ids.push_back(next_negative++);
                }
                batch.push_back(std::move(example));
            }
            auto negatives = assemble_batch_negatives(batch);
            size_t expected = (batch_size - 1) * (h + 1) + h;
            for (size_t i = 0; i < batch_size; ++i) {
                ACCEPT_CHECK(negatives[i].size() == expected,
                             "B=" + std::to_string(batch_size) + " h=" +
                                 std::to_string(h) + ": got " +
                                 std::to_string(negatives[i].size()) + ", want " +
                                 std::to_string(expected));
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// criterion 10: demo determinism and worker independence
// ---------------------------------------------------------------------------

std::string demo_fingerprint(const DemoResult& result) {
    return report_to_json(result.bm25) + report_to_json(result.dense_initial) +
           report_to_json(result.dense_trained) +
           report_to_json(result.dense_self_trained) + result.delta_table;
}

std::string criterion_determinism() {
    DemoConfig config;
    config.seed = 0;
    config.workers = 1;
    DemoResult first = demo_pipeline(config);
    DemoResult second = demo_pipeline(config);
    ACCEPT_CHECK(demo_fingerprint(first) == demo_fingerprint(second),
                 "two consecutive runs differ");

    config.workers = 4;
    DemoResult threaded = demo_pipeline(config);
    ACCEPT_CHECK(demo_fingerprint(first) == demo_fingerprint(threaded),
                 "worker count changed the reports");

    // written artifacts are byte-identical too
    fs::path dir_a = fs::temp_directory_path() / "snipsearch_acceptance_demo_a";
    fs::path dir_b = fs::temp_directory_path() / "snipsearch_acceptance_demo_b";
    write_demo_outputs(first, dir_a);
    write_demo_outputs(threaded, dir_b);
    for (const char* name :
         {"bm25_report.json", "dense_initial_report.json", "dense_trained_report.json",
          "dense_self_trained_report.json", "delta_table.txt", "summary.txt"}) {
        ACCEPT_CHECK(read_file(dir_a / name) == read_file(dir_b / name),
                     std::string("artifact differs: ") + name);
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    return {};
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "BM25 oracle equivalence (100 random corpora, 1e-9)", criterion_bm25_oracle},
        {2, "hand-derived BM25 instance (d2=0.5236, d1=0.3902, d3=0)",
         criterion_bm25_hand_instance},
        {3, "analytic gradients vs central finite differences (rel err < 1e-4)",
         criterion_gradient_check},
        {4, "loss identities: ln(n+1), shift invariance, monotone in s+",
         criterion_loss_identities},
        {5, "end-to-end training effect on the separable corpus",
         criterion_training_effect},
        {6, "self-training: miner purity and held-out non-degradation",
         criterion_self_training},
        {7, "recall properties and worked examples", criterion_recall_properties},
        {8, "truncation, classification fixture, ingest fixture, persistence",
         criterion_preprocessing},
        {9, "in-batch negative counting formula", criterion_inbatch_counting},
        {10, "demo determinism across runs and worker counts", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        try {
            detail = criterion.body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed = seconds_since(start);
        if (detail.empty()) {
            std::printf("[PASS] criterion %2d: %s (%.1f s)\n", criterion.number,
                        criterion.name.c_str(), elapsed);
        } else {
            std::printf("[FAIL] criterion %2d: %s — %s\n", criterion.number,
                        criterion.name.c_str(), detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
