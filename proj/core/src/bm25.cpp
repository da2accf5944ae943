#include "snipsearch/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "snipsearch/io.hpp"

namespace snipsearch {

namespace {
using ordered_json = nlohmann::ordered_json;
constexpr const char* kFormatName = "snipsearch-bm25-index";
constexpr int kFormatVersion = 1;
}  // namespace

Bm25Index Bm25Index::build(const std::vector<DocumentRecord>& docs, double k1, double b) {
    if (k1 < 0.0) throw std::invalid_argument("bm25: k1 must be >= 0");
    if (b < 0.0 || b > 1.0) throw std::invalid_argument("bm25: b must be in [0, 1]");

    Bm25Index index;
    index.k1_ = k1;
    index.b_ = b;
    for (const DocumentRecord& doc : docs) {
        if (index.doc_len_.count(doc.doc_id)) {
            throw std::invalid_argument("bm25: duplicate doc id " +
                                        std::to_string(doc.doc_id));
        }
        TokenSeq tokens = tokenize(doc.text);
        index.doc_len_[doc.doc_id] = static_cast<uint32_t>(tokens.size());
        index.total_len_ += tokens.size();
        index.doc_ids_.push_back(doc.doc_id);

        std::map<std::string, uint32_t> counts;
        for (std::string& token : tokens) {
            ++counts[std::move(token)];
        }
        for (auto& [term, tf] : counts) {
            index.postings_[term].emplace_back(doc.doc_id, tf);
        }
    }
    std::sort(index.doc_ids_.begin(), index.doc_ids_.end());
    for (auto& [term, posting] : index.postings_) {
        std::sort(posting.begin(), posting.end());
    }
    return index;
}

double Bm25Index::idf(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    double df = (it == postings_.end()) ? 0.0 : static_cast<double>(it->second.size());
    return std::log((static_cast<double>(doc_count()) + 1.0) / (df + 0.5));
}

size_t Bm25Index::doc_frequency(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::term_doc_score(uint32_t tf, double idf_value, uint32_t doc_len) const {
    double avgdl = static_cast<double>(total_len_) / static_cast<double>(doc_count());
    double tf_d = static_cast<double>(tf);
    double norm = 1.0 - b_ + b_ * static_cast<double>(doc_len) / avgdl;
    return idf_value * tf_d * (k1_ + 1.0) / (tf_d + k1_ * norm);
}

double Bm25Index::score(const TokenSeq& query, int64_t doc_id) const {
    auto len_it = doc_len_.find(doc_id);
    if (len_it == doc_len_.end()) {
        throw std::invalid_argument("bm25: unknown doc id " + std::to_string(doc_id));
    }
    double total = 0.0;
    for (const std::string& token : query) {
        auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        const auto& posting = it->second;
        auto hit = std::lower_bound(posting.begin(), posting.end(),
                                    std::make_pair(doc_id, uint32_t{0}));
        if (hit == posting.end() || hit->first != doc_id) continue;
        total += term_doc_score(hit->second, idf(token), len_it->second);
    }
    return total;
}

std::vector<std::pair<int64_t, double>> Bm25Index::search(const TokenSeq& query,
                                                          size_t k) const {
    if (k < 1) throw std::invalid_argument("bm25: k must be >= 1");
    std::vector<std::pair<int64_t, double>> scored;
    if (doc_count() == 0) return scored;

    std::unordered_map<int64_t, double> accumulator;
    for (const std::string& token : query) {
        auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        double idf_value = idf(token);
        for (const auto& [doc_id, tf] : it->second) {
            accumulator[doc_id] += term_doc_score(tf, idf_value, doc_len_.at(doc_id));
        }
    }

    scored.reserve(doc_count());
    for (int64_t doc_id : doc_ids_) {
        auto it = accumulator.find(doc_id);
        scored.emplace_back(doc_id, it == accumulator.end() ? 0.0 : it->second);
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

void Bm25Index::save(const std::filesystem::path& path) const {
    ordered_json out;
    out["format"] = kFormatName;
    out["version"] = kFormatVersion;
    out["k1"] = k1_;
    out["b"] = b_;
    out["total_len"] = total_len_;

    ordered_json doc_len = ordered_json::array();
    for (int64_t doc_id : doc_ids_) {
        doc_len.push_back({doc_id, doc_len_.at(doc_id)});
    }
    out["doc_len"] = std::move(doc_len);

    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, posting] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    ordered_json postings = ordered_json::object();
    for (const std::string& term : terms) {
        ordered_json rows = ordered_json::array();
        for (const auto& [doc_id, tf] : postings_.at(term)) {
            rows.push_back({doc_id, tf});
        }
        postings[term] = std::move(rows);
    }
    out["postings"] = std::move(postings);

    atomic_write_file(path, out.dump() + "\n");
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    ordered_json in = ordered_json::parse(read_file(path), nullptr, false);
    if (in.is_discarded() || !in.is_object() || in.value("format", "") != kFormatName) {
        throw std::runtime_error("not a bm25 index file: " + path.string());
    }
    if (in.value("version", 0) != kFormatVersion) {
        throw std::runtime_error("unsupported bm25 index version in " + path.string());
    }
    Bm25Index index;
    index.k1_ = in.at("k1").get<double>();
    index.b_ = in.at("b").get<double>();
    index.total_len_ = in.at("total_len").get<uint64_t>();
    for (const auto& entry : in.at("doc_len")) {
        int64_t doc_id = entry.at(0).get<int64_t>();
        index.doc_len_[doc_id] = entry.at(1).get<uint32_t>();
        index.doc_ids_.push_back(doc_id);
    }
    std::sort(index.doc_ids_.begin(), index.doc_ids_.end());
    for (const auto& [term, rows] : in.at("postings").items()) {
        auto& posting = index.postings_[term];
        for (const auto& entry : rows) {
            posting.emplace_back(entry.at(0).get<int64_t>(), entry.at(1).get<uint32_t>());
        }
    }
    return index;
}

}  // namespace snipsearch
