#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "snipsearch/corpus.hpp"
#include "snipsearch/tokenize.hpp"

namespace snipsearch {

// Stable 64-bit FNV-1a; the bucket assignment must not depend on the platform
// or standard library.
uint64_t stable_token_hash(std::string_view token);

// Sparse L2-normalized bag of hashed token counts. Entries are sorted by
// bucket and bucket indices are unique.
struct FeatureVector {
    std::vector<std::pair<uint32_t, double>> entries;
    uint32_t num_buckets = 0;
};

// num_buckets must be a power of two.
FeatureVector featurize(const TokenSeq& tokens, uint32_t num_buckets);

using Embedding = std::vector<double>;

// Trainable linear map W (dim x num_buckets, column-major) over hashed
// features. The same parameter value encodes both queries and documents.
class EncoderParams {
public:
    EncoderParams(uint32_t dim, uint32_t num_buckets, uint64_t seed);

    // Entries i.i.d. uniform in [-1/sqrt(F), 1/sqrt(F)] drawn from `seed`.
    static EncoderParams random_init(uint32_t dim, uint32_t num_buckets, uint64_t seed);

    uint32_t dim() const { return dim_; }
    uint32_t num_buckets() const { return num_buckets_; }
    uint64_t seed() const { return seed_; }

    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }

    double at(uint32_t row, uint32_t col) const {
        return weights_[static_cast<size_t>(col) * dim_ + row];
    }
    double& at(uint32_t row, uint32_t col) {
        return weights_[static_cast<size_t>(col) * dim_ + row];
    }

    // Binary file: magic, dim, num_buckets, seed, raw little-endian doubles.
    void save(const std::filesystem::path& path) const;
    static EncoderParams load(const std::filesystem::path& path);

    bool operator==(const EncoderParams&) const = default;

private:
    uint32_t dim_;
    uint32_t num_buckets_;
    uint64_t seed_;
    std::vector<double> weights_;  // column-major dim x num_buckets
};

// e = W * fv. Throws std::invalid_argument on a bucket-count mismatch.
Embedding encode(const EncoderParams& params, const FeatureVector& features);

// Standard inner product; dimensions must match.
double dot_score(const Embedding& query, const Embedding& document);

struct VectorIndex {
    std::vector<int64_t> doc_ids;
    std::vector<double> embeddings;  // row-major doc_count x dim, rows align with doc_ids
    uint32_t dim = 0;
    EncoderParams params;  // encoder that produced the rows; reused for queries
};

// Embedding row i = encode(params, featurize(tokenize(docs[i].text))).
// Rows are independent, so any worker count produces identical output.
// Throws std::invalid_argument on a duplicate doc id.
VectorIndex build_vector_index(const EncoderParams& params,
                               const std::vector<DocumentRecord>& docs,
                               unsigned workers = 1);

// Exact top-k by descending dot product, ties broken by ascending doc id.
// k must be >= 1; result length is min(k, doc_count).
std::vector<std::pair<int64_t, double>> dense_search(const VectorIndex& index,
                                                     const Embedding& query, size_t k);

void save_vector_index(const VectorIndex& index, const std::filesystem::path& path);
VectorIndex load_vector_index(const std::filesystem::path& path);

}  // namespace snipsearch
