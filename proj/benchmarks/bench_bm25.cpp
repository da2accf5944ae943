#include <benchmark/benchmark.h>

#include "snipsearch/bm25.hpp"
#include "snipsearch/rng.hpp"

using namespace snipsearch;

namespace {

std::vector<DocumentRecord> synthetic_docs(size_t count, size_t tokens_per_doc,
                                           size_t vocab) {
    Rng rng(42);
    std::vector<DocumentRecord> docs;
    docs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        std::string text;
        for (size_t t = 0; t < tokens_per_doc; ++t) {
            text += "w" + std::to_string(rng.next_below(vocab)) + " ";
        }
        docs.push_back({static_cast<int64_t>(i) + 1, text,
                        CompositionPolicy::inference_full});
    }
    return docs;
}

TokenSeq synthetic_query(size_t length, size_t vocab, uint64_t seed) {
    Rng rng(seed);
    TokenSeq query;
    for (size_t i = 0; i < length; ++i) {
        query.push_back("w" + std::to_string(rng.next_below(vocab)));
    }
    return query;
}

}  // namespace

static void BM_Bm25Build(benchmark::State& state) {
    auto docs = synthetic_docs(static_cast<size_t>(state.range(0)), 60, 5000);
    for (auto _ : state) {
        Bm25Index index = Bm25Index::build(docs);
        benchmark::DoNotOptimize(index.doc_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Build)->Arg(1000)->Arg(5000);

static void BM_Bm25Search(benchmark::State& state) {
    auto docs = synthetic_docs(static_cast<size_t>(state.range(0)), 60, 5000);
    Bm25Index index = Bm25Index::build(docs);
    uint64_t seed = 0;
    for (auto _ : state) {
        TokenSeq query = synthetic_query(16, 5000, seed++);
        benchmark::DoNotOptimize(index.search(query, 10));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Bm25Search)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
