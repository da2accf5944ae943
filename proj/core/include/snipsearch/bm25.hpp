#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "snipsearch/corpus.hpp"
#include "snipsearch/tokenize.hpp"

namespace snipsearch {

// Okapi BM25 inverted index.
//
//   score(q, d) = sum over query tokens of
//       idf(q_i) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
//   idf(q_i)    = ln((|D| + 1) / (df + 0.5))
//
// Repeated query tokens contribute once per occurrence (the query is a
// sequence). Ties in search are broken by ascending doc id.
class Bm25Index {
public:
    static constexpr double kDefaultK1 = 1.2;
    static constexpr double kDefaultB = 0.75;

    // Throws std::invalid_argument on a duplicate doc id.
    static Bm25Index build(const std::vector<DocumentRecord>& docs,
                           double k1 = kDefaultK1, double b = kDefaultB);

    double idf(std::string_view term) const;

    // Throws std::invalid_argument when doc_id is not indexed.
    double score(const TokenSeq& query, int64_t doc_id) const;

    // Top-k by descending score; result length is min(k, doc_count).
    // k must be >= 1.
    std::vector<std::pair<int64_t, double>> search(const TokenSeq& query, size_t k) const;

    size_t doc_count() const { return doc_len_.size(); }
    uint64_t total_len() const { return total_len_; }
    double k1() const { return k1_; }
    double b() const { return b_; }
    size_t doc_frequency(std::string_view term) const;
    bool contains(int64_t doc_id) const { return doc_len_.count(doc_id) != 0; }
    const std::vector<int64_t>& doc_ids() const { return doc_ids_; }

    // JSON file with a versioned header; byte-deterministic for equal input.
    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

private:
    Bm25Index() = default;

    double term_doc_score(uint32_t tf, double idf_value, uint32_t doc_len) const;

    // term -> (doc_id, term frequency), sorted by doc_id
    std::unordered_map<std::string, std::vector<std::pair<int64_t, uint32_t>>> postings_;
    std::unordered_map<int64_t, uint32_t> doc_len_;
    std::vector<int64_t> doc_ids_;  // ascending
    uint64_t total_len_ = 0;
    double k1_ = kDefaultK1;
    double b_ = kDefaultB;
};

}  // namespace snipsearch
