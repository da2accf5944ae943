#include <benchmark/benchmark.h>

#include "snipsearch/encoder.hpp"
#include "snipsearch/rng.hpp"
#include "snipsearch/tokenize.hpp"

using namespace snipsearch;

namespace {

TokenSeq random_tokens(size_t count, uint64_t seed) {
    Rng rng(seed);
    TokenSeq tokens;
    for (size_t i = 0; i < count; ++i) {
        tokens.push_back("tok" + std::to_string(rng.next_below(20000)));
    }
    return tokens;
}

}  // namespace

static void BM_Featurize(benchmark::State& state) {
    TokenSeq tokens = random_tokens(static_cast<size_t>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(featurize(tokens, 1u << 15));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Featurize)->Arg(64)->Arg(512);

static void BM_Encode(benchmark::State& state) {
    EncoderParams params = EncoderParams::random_init(64, 1u << 15, 1);
    FeatureVector fv = featurize(random_tokens(static_cast<size_t>(state.range(0)), 9),
                                 params.num_buckets());
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode(params, fv));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(512);

static void BM_DenseSearch(benchmark::State& state) {
    EncoderParams params = EncoderParams::random_init(64, 1u << 15, 2);
    std::vector<DocumentRecord> docs;
    Rng rng(3);
    for (int64_t i = 1; i <= state.range(0); ++i) {
        std::string text;
        for (int t = 0; t < 50; ++t) {
            text += "tok" + std::to_string(rng.next_below(20000)) + " ";
        }
        docs.push_back({i, text, CompositionPolicy::inference_full});
    }
    VectorIndex index = build_vector_index(params, docs);
    Embedding query(params.dim());
    for (double& v : query) v = 2.0 * rng.next_double() - 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_search(index, query, 10));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DenseSearch)->Arg(1000)->Arg(10000);
