#include "snipsearch/pipeline.hpp"

#include <string>

#include "snipsearch/bm25.hpp"
#include "snipsearch/io.hpp"
#include "snipsearch/rng.hpp"

namespace snipsearch {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::vector<std::string> draw_filler(Rng& rng, size_t count, size_t vocab) {
    std::vector<std::string> tokens;
    tokens.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        tokens.push_back("w" + std::to_string(rng.next_below(vocab)));
    }
    return tokens;
}

}  // namespace

SyntheticData generate_synthetic_corpus(const SyntheticSpec& spec) {
    Rng rng(spec.seed ^ 0xC0FFEEULL);
    SyntheticData data;
    data.corpus.reserve(2 * spec.query_count + spec.distractor_count);

    const int64_t query_base = 1000;
    const int64_t gold_base = query_base + static_cast<int64_t>(spec.query_count);
    const int64_t distractor_base = gold_base + static_cast<int64_t>(spec.query_count);

    for (size_t i = 0; i < spec.query_count; ++i) {
        std::vector<std::string> signature;
        for (size_t s = 0; s < spec.signature_tokens; ++s) {
            signature.push_back("sig" + std::to_string(i) + std::string(1, static_cast<char>('a' + s % 26)));
        }

        // query question: snippet fields carry the signature
        ProcessedQuestion query_q;
        query_q.id = query_base + static_cast<int64_t>(i);
        query_q.title = join_tokens(draw_filler(rng, 4, spec.filler_vocab));
        query_q.body_text = join_tokens(draw_filler(rng, 8, spec.filler_vocab));
        {
            std::vector<std::string> code_tokens = signature;
            std::vector<std::string> filler = draw_filler(rng, 24, spec.filler_vocab);
            code_tokens.insert(code_tokens.end(), filler.begin(), filler.end());
            query_q.code = join_tokens(code_tokens);
        }
        if (i % 2 == 1) {
            query_q.error = "ValueError: " + signature[0] + " lookup failed";
            query_q.keyword = "ValueError";
        }
        query_q.duplicate_of = gold_base + static_cast<int64_t>(i);
        data.corpus.push_back(std::move(query_q));

        // gold question: answered, shares the signature in its best answer
        ProcessedQuestion gold_q;
        gold_q.id = gold_base + static_cast<int64_t>(i);
        gold_q.title = join_tokens(draw_filler(rng, 4, spec.filler_vocab));
        gold_q.body_text = join_tokens(draw_filler(rng, 8, spec.filler_vocab));
        {
            std::vector<std::string> answer_tokens = signature;
            std::vector<std::string> filler = draw_filler(rng, 30, spec.filler_vocab);
            answer_tokens.insert(answer_tokens.end(), filler.begin(), filler.end());
            gold_q.best_answer = join_tokens(answer_tokens);
        }
        data.corpus.push_back(std::move(gold_q));

        data.links.push_back(RawLinkRow{query_base + static_cast<int64_t>(i),
                                        gold_base + static_cast<int64_t>(i),
                                        LinkType::duplicate});
    }

    for (size_t j = 0; j < spec.distractor_count; ++j) {
        ProcessedQuestion distractor;
        distractor.id = distractor_base + static_cast<int64_t>(j);
        distractor.title = join_tokens(draw_filler(rng, 4, spec.filler_vocab));
        distractor.body_text = join_tokens(draw_filler(rng, 8, spec.filler_vocab));
        distractor.best_answer = join_tokens(draw_filler(rng, 33, spec.filler_vocab));
        data.corpus.push_back(std::move(distractor));
    }
    return data;
}

TrainerConfig demo_trainer_config(uint64_t seed) {
    TrainerConfig config;
    config.learning_rate = 0.05;
    config.warmup_steps = 10;
    config.clip_norm = 2.0;
    config.batch_size = 12;
    config.accumulation_steps = 1;
    config.max_query_len = 256;
    config.max_doc_len = 256;
    config.epochs = 40;
    config.max_steps = 500;
    config.seed = seed;
    config.composition_policy = CompositionPolicy::train_no_body;
    config.cut_mode = CutMode::middle;
    config.embedding_dim = 64;
    config.feature_buckets = 1u << 15;
    return config;
}

DemoResult demo_pipeline(const DemoConfig& config) {
    SyntheticSpec spec;
    spec.query_count = config.query_count;
    spec.distractor_count = config.distractor_count;
    spec.seed = config.seed;
    SyntheticData data = generate_synthetic_corpus(spec);

    QueryBuildOptions query_options;
    query_options.max_query_len = 256;
    query_options.cut_mode = CutMode::middle;
    std::vector<EvalPair> pairs = build_eval_set(data.corpus, data.links, query_options);

    std::vector<DocumentRecord> docs =
        compose_corpus_documents(data.corpus, CompositionPolicy::inference_full);

    DemoResult result;

    Bm25Index bm25 = Bm25Index::build(docs);
    result.bm25 = evaluate(Bm25Retriever(std::move(bm25), "bm25"), pairs);

    TrainerConfig trainer_config = demo_trainer_config(config.seed);
    EncoderParams params = EncoderParams::random_init(
        trainer_config.embedding_dim, trainer_config.feature_buckets, config.seed);

    VectorIndex initial_index = build_vector_index(params, docs, config.workers);
    result.dense_initial =
        evaluate(DenseRetriever(std::move(initial_index), "dense-initial"), pairs);

    std::vector<TrainingExample> examples = to_training_examples(to_pair_records(pairs));
    train(params, examples, data.corpus, trainer_config);

    VectorIndex trained_index = build_vector_index(params, docs, config.workers);
    std::vector<TrainingExample> mined =
        mine_hard_negatives(params, trained_index, to_pair_records(pairs), config.mine_k);
    result.dense_trained =
        evaluate(DenseRetriever(std::move(trained_index), "dense-trained"), pairs);

    TrainerConfig retrain_config = trainer_config;
    retrain_config.max_steps = 150;
    retrain_config.epochs = 12;
    train(params, mined, data.corpus, retrain_config);

    VectorIndex self_trained_index = build_vector_index(params, docs, config.workers);
    result.dense_self_trained =
        evaluate(DenseRetriever(std::move(self_trained_index), "dense-self-trained"), pairs);

    result.delta_table = format_delta_table(
        compare_runs({result.bm25, result.dense_initial, result.dense_trained,
                      result.dense_self_trained}),
        10);
    return result;
}

void write_demo_outputs(const DemoResult& result, const std::filesystem::path& dir) {
    atomic_write_file(dir / "bm25_report.json", report_to_json(result.bm25));
    atomic_write_file(dir / "dense_initial_report.json",
                      report_to_json(result.dense_initial));
    atomic_write_file(dir / "dense_trained_report.json",
                      report_to_json(result.dense_trained));
    atomic_write_file(dir / "dense_self_trained_report.json",
                      report_to_json(result.dense_self_trained));
    atomic_write_file(dir / "delta_table.txt", result.delta_table);

    std::string summary;
    summary += format_report(result.bm25) + "\n";
    summary += format_report(result.dense_initial) + "\n";
    summary += format_report(result.dense_trained) + "\n";
    summary += format_report(result.dense_self_trained) + "\n";
    summary += result.delta_table;
    atomic_write_file(dir / "summary.txt", summary);
}

}  // namespace snipsearch
