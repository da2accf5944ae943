#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "snipsearch/bm25.hpp"
#include "snipsearch/corpus.hpp"
#include "snipsearch/encoder.hpp"

namespace snipsearch {

struct RetrievalRun {
    std::vector<std::vector<int64_t>> ranked;  // per-query, no duplicate ids
    std::vector<int64_t> gold;                 // aligned with ranked
};

struct EvalReport {
    std::string label;
    uint64_t query_count = 0;
    uint64_t excluded = 0;  // gold missing from the corpus
    std::vector<std::pair<size_t, double>> recall;  // (k, recall), ascending k
};

// Fraction of queries whose gold appears in the first k results. k must
// be >= 1; each ranked list must have length >= k unless it already covers
// the whole corpus.
double recall_at_k(const RetrievalRun& run, size_t k);

// Uniform search interface over the two retriever families.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<std::pair<int64_t, double>> search(const TokenSeq& query,
                                                           size_t k) const = 0;
    virtual bool contains(int64_t doc_id) const = 0;
    virtual size_t doc_count() const = 0;
    virtual std::string label() const = 0;
};

class Bm25Retriever final : public Retriever {
public:
    explicit Bm25Retriever(Bm25Index index, std::string label = "bm25")
        : index_(std::move(index)), label_(std::move(label)) {}

    std::vector<std::pair<int64_t, double>> search(const TokenSeq& query,
                                                   size_t k) const override {
        return index_.search(query, k);
    }
    bool contains(int64_t doc_id) const override { return index_.contains(doc_id); }
    size_t doc_count() const override { return index_.doc_count(); }
    std::string label() const override { return label_; }

private:
    Bm25Index index_;
    std::string label_;
};

class DenseRetriever final : public Retriever {
public:
    explicit DenseRetriever(VectorIndex index, std::string label = "dense");

    std::vector<std::pair<int64_t, double>> search(const TokenSeq& query,
                                                   size_t k) const override;
    bool contains(int64_t doc_id) const override;
    size_t doc_count() const override { return index_.doc_ids.size(); }
    std::string label() const override { return label_; }

private:
    VectorIndex index_;
    std::string label_;
};

// Runs every pair's query through the retriever and reports recall at each k.
// Queries whose gold is not indexed are excluded and counted, not scored 0.
EvalReport evaluate(const Retriever& retriever, const std::vector<EvalPair>& pairs,
                    std::vector<size_t> ks = {5, 10, 20, 50});

// Per-k recall deltas between consecutive reports. All reports must share the
// same k set and query count.
struct DeltaRow {
    std::string label;
    std::vector<std::pair<size_t, double>> recall;
    std::vector<std::pair<size_t, double>> delta;  // empty for the first row
};

std::vector<DeltaRow> compare_runs(const std::vector<EvalReport>& reports);

// Line-oriented human-readable forms; byte-deterministic.
std::string format_report(const EvalReport& report);
std::string format_delta_table(const std::vector<DeltaRow>& rows, size_t focus_k = 10);

// Machine-readable JSON (single object / array of objects).
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace snipsearch
