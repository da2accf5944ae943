#include "snipsearch/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "snipsearch/rng.hpp"

namespace snipsearch {

namespace {

constexpr char kParamsMagic[8] = {'S', 'N', 'I', 'P', 'P', 'A', 'R', '1'};
constexpr char kIndexMagic[8] = {'S', 'N', 'I', 'P', 'D', 'I', 'X', '1'};

bool is_power_of_two(uint32_t value) { return value != 0 && (value & (value - 1)) == 0; }

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value, const std::filesystem::path& path) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated file: " + path.string());
}

void write_doubles(std::ofstream& out, const std::vector<double>& values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& values, size_t count,
                  const std::filesystem::path& path) {
    values.resize(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated file: " + path.string());
}

void write_i64s(std::ofstream& out, const std::vector<int64_t>& values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(int64_t)));
}

}  // namespace

uint64_t stable_token_hash(std::string_view token) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : token) {
        hash ^= static_cast<uint8_t>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

FeatureVector featurize(const TokenSeq& tokens, uint32_t num_buckets) {
    if (!is_power_of_two(num_buckets)) {
        throw std::invalid_argument("featurize: num_buckets must be a power of two");
    }
    FeatureVector fv;
    fv.num_buckets = num_buckets;
    if (tokens.empty()) return fv;

    std::vector<uint32_t> buckets;
    buckets.reserve(tokens.size());
    for (const std::string& token : tokens) {
        buckets.push_back(static_cast<uint32_t>(stable_token_hash(token) &
                                                (num_buckets - 1)));
    }
    std::sort(buckets.begin(), buckets.end());

    double norm_sq = 0.0;
    for (size_t i = 0; i < buckets.size();) {
        size_t j = i;
        while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
        double count = static_cast<double>(j - i);
        fv.entries.emplace_back(buckets[i], count);
        norm_sq += count * count;
        i = j;
    }
    double norm = std::sqrt(norm_sq);
    for (auto& [bucket, weight] : fv.entries) {
        weight /= norm;
    }
    return fv;
}

EncoderParams::EncoderParams(uint32_t dim, uint32_t num_buckets, uint64_t seed)
    : dim_(dim), num_buckets_(num_buckets), seed_(seed),
      weights_(static_cast<size_t>(dim) * num_buckets, 0.0) {
    if (dim < 2) throw std::invalid_argument("encoder: dim must be >= 2");
    if (!is_power_of_two(num_buckets)) {
        throw std::invalid_argument("encoder: num_buckets must be a power of two");
    }
}

EncoderParams EncoderParams::random_init(uint32_t dim, uint32_t num_buckets,
                                         uint64_t seed) {
    EncoderParams params(dim, num_buckets, seed);
    Rng rng(seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(num_buckets));
    for (double& w : params.weights_) {
        w = (2.0 * rng.next_double() - 1.0) * scale;
    }
    return params;
}

void EncoderParams::save(const std::filesystem::path& path) const {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(kParamsMagic, sizeof(kParamsMagic));
        write_pod(out, dim_);
        write_pod(out, num_buckets_);
        write_pod(out, seed_);
        write_doubles(out, weights_);
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

EncoderParams EncoderParams::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kParamsMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("not an encoder params file: " + path.string());
    }
    uint32_t dim = 0, num_buckets = 0;
    uint64_t seed = 0;
    read_pod(in, dim, path);
    read_pod(in, num_buckets, path);
    read_pod(in, seed, path);
    EncoderParams params(dim, num_buckets, seed);
    read_doubles(in, params.weights_, static_cast<size_t>(dim) * num_buckets, path);
    return params;
}

Embedding encode(const EncoderParams& params, const FeatureVector& features) {
    if (features.num_buckets != params.num_buckets()) {
        throw std::invalid_argument("encode: feature buckets do not match encoder");
    }
    Embedding out(params.dim(), 0.0);
    const std::vector<double>& w = params.weights();
    uint32_t dim = params.dim();
    for (const auto& [bucket, weight] : features.entries) {
        const double* column = w.data() + static_cast<size_t>(bucket) * dim;
        for (uint32_t r = 0; r < dim; ++r) {
            out[r] += weight * column[r];
        }
    }
    return out;
}

double dot_score(const Embedding& query, const Embedding& document) {
    if (query.size() != document.size()) {
        throw std::invalid_argument("dot_score: dimension mismatch");
    }
    double total = 0.0;
    for (size_t i = 0; i < query.size(); ++i) {
        total += query[i] * document[i];
    }
    return total;
}

VectorIndex build_vector_index(const EncoderParams& params,
                               const std::vector<DocumentRecord>& docs,
                               unsigned workers) {
    VectorIndex index{{}, {}, params.dim(), params};
    index.doc_ids.reserve(docs.size());
    {
        std::unordered_set<int64_t> seen;
        for (const DocumentRecord& doc : docs) {
            if (!seen.insert(doc.doc_id).second) {
                throw std::invalid_argument("vector index: duplicate doc id " +
                                            std::to_string(doc.doc_id));
            }
            index.doc_ids.push_back(doc.doc_id);
        }
    }
    index.embeddings.assign(docs.size() * static_cast<size_t>(params.dim()), 0.0);

    auto encode_range = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            Embedding row = encode(params, featurize(tokenize(docs[i].text),
                                                     params.num_buckets()));
            std::copy(row.begin(), row.end(),
                      index.embeddings.begin() +
                          static_cast<ptrdiff_t>(i * params.dim()));
        }
    };

    if (workers <= 1 || docs.size() < 2) {
        encode_range(0, docs.size());
    } else {
        unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(docs.size()));
        std::vector<std::thread> threads;
        size_t chunk = (docs.size() + n - 1) / n;
        for (unsigned t = 0; t < n; ++t) {
            size_t begin = t * chunk;
            size_t end = std::min(docs.size(), begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(encode_range, begin, end);
        }
        for (std::thread& thread : threads) thread.join();
    }
    return index;
}

std::vector<std::pair<int64_t, double>> dense_search(const VectorIndex& index,
                                                     const Embedding& query, size_t k) {
    if (k < 1) throw std::invalid_argument("dense_search: k must be >= 1");
    if (query.size() != index.dim) {
        throw std::invalid_argument("dense_search: query dimension mismatch");
    }
    size_t n = index.doc_ids.size();
    std::vector<std::pair<int64_t, double>> scored;
    scored.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const double* row = index.embeddings.data() + i * index.dim;
        double score = 0.0;
        for (uint32_t r = 0; r < index.dim; ++r) {
            score += query[r] * row[r];
        }
        scored.emplace_back(index.doc_ids[i], score);
    }
    auto better = [](const std::pair<int64_t, double>& lhs,
                     const std::pair<int64_t, double>& rhs) {
        if (lhs.second != rhs.second) return lhs.second > rhs.second;
        return lhs.first < rhs.first;
    };
    size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(take),
                      scored.end(), better);
    scored.resize(take);
    return scored;
}

void save_vector_index(const VectorIndex& index, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(kIndexMagic, sizeof(kIndexMagic));
        write_pod(out, index.dim);
        uint32_t num_buckets = index.params.num_buckets();
        uint64_t seed = index.params.seed();
        uint64_t doc_count = index.doc_ids.size();
        write_pod(out, num_buckets);
        write_pod(out, seed);
        write_pod(out, doc_count);
        write_i64s(out, index.doc_ids);
        write_doubles(out, index.embeddings);
        write_doubles(out, index.params.weights());
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

VectorIndex load_vector_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("not a dense index file: " + path.string());
    }
    uint32_t dim = 0, num_buckets = 0;
    uint64_t seed = 0, doc_count = 0;
    read_pod(in, dim, path);
    read_pod(in, num_buckets, path);
    read_pod(in, seed, path);
    read_pod(in, doc_count, path);

    EncoderParams params(dim, num_buckets, seed);
    VectorIndex index{{}, {}, dim, params};
    index.doc_ids.resize(doc_count);
    in.read(reinterpret_cast<char*>(index.doc_ids.data()),
            static_cast<std::streamsize>(doc_count * sizeof(int64_t)));
    if (!in) throw std::runtime_error("truncated file: " + path.string());
    read_doubles(in, index.embeddings, doc_count * dim, path);
    std::vector<double> weights;
    read_doubles(in, weights, static_cast<size_t>(dim) * num_buckets, path);
    index.params.weights() = std::move(weights);
    return index;
}

}  // namespace snipsearch
