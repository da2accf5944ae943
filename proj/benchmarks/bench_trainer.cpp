#include <benchmark/benchmark.h>

#include "snipsearch/pipeline.hpp"
#include "snipsearch/trainer.hpp"

using namespace snipsearch;

namespace {

struct TrainerFixture {
    TrainerFixture()
        : data(generate_synthetic_corpus({.query_count = 48,
                                          .distractor_count = 0,
                                          .signature_tokens = 3,
                                          .filler_vocab = 100,
                                          .seed = 1})) {
        config = demo_trainer_config(1);
        config.max_steps = 0;
        pairs = build_eval_set(data.corpus, data.links);
        examples = to_training_examples(to_pair_records(pairs));
    }

    SyntheticData data;
    TrainerConfig config;
    std::vector<EvalPair> pairs;
    std::vector<TrainingExample> examples;
};

}  // namespace

static void BM_LossAndGradients(benchmark::State& state) {
    TrainerFixture fixture;
    fixture.config.batch_size = static_cast<uint32_t>(state.range(0));
    DocFeatureSource docs(fixture.data.corpus, fixture.config);
    std::vector<TrainingExample> batch(
        fixture.examples.begin(),
        fixture.examples.begin() + state.range(0));
    EncoderParams params = EncoderParams::random_init(
        fixture.config.embedding_dim, fixture.config.feature_buckets, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_gradients(params, batch, docs).loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGradients)->Arg(4)->Arg(12);

static void BM_AdamStep(benchmark::State& state) {
    EncoderParams params = EncoderParams::random_init(64, 1u << 15, 0);
    AdamState adam(params.weights().size());
    std::vector<double> grad(params.weights().size(), 1e-4);
    for (auto _ : state) {
        adam_step(adam, params, grad, 1e-3);
        benchmark::DoNotOptimize(params.weights().data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(params.weights().size()));
}
BENCHMARK(BM_AdamStep);

static void BM_TrainEpoch(benchmark::State& state) {
    TrainerFixture fixture;
    fixture.config.epochs = 1;
    fixture.config.max_steps = 0;
    for (auto _ : state) {
        EncoderParams params = EncoderParams::random_init(
            fixture.config.embedding_dim, fixture.config.feature_buckets, 0);
        TrainLog log = train(params, fixture.examples, fixture.data.corpus,
                             fixture.config);
        benchmark::DoNotOptimize(log.optimizer_steps);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(fixture.examples.size()));
}
BENCHMARK(BM_TrainEpoch);
