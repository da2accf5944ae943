#include "snipsearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace snipsearch {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_recall(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string format_signed(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.4f", value);
    return buf;
}

}  // namespace

double recall_at_k(const RetrievalRun& run, size_t k) {
    if (k < 1) throw std::invalid_argument("recall_at_k: k must be >= 1");
    if (run.ranked.size() != run.gold.size()) {
        throw std::invalid_argument("recall_at_k: ranked/gold size mismatch");
    }
    if (run.ranked.empty()) return 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < run.ranked.size(); ++i) {
        const std::vector<int64_t>& ranked = run.ranked[i];
        size_t take = std::min(k, ranked.size());
        for (size_t r = 0; r < take; ++r) {
            if (ranked[r] == run.gold[i]) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(run.ranked.size());
}

DenseRetriever::DenseRetriever(VectorIndex index, std::string label)
    : index_(std::move(index)), label_(std::move(label)) {}

std::vector<std::pair<int64_t, double>> DenseRetriever::search(const TokenSeq& query,
                                                               size_t k) const {
    FeatureVector fv = featurize(query, index_.params.num_buckets());
    Embedding query_emb = encode(index_.params, fv);
    return dense_search(index_, query_emb, k);
}

bool DenseRetriever::contains(int64_t doc_id) const {
    return std::find(index_.doc_ids.begin(), index_.doc_ids.end(), doc_id) !=
           index_.doc_ids.end();
}

EvalReport evaluate(const Retriever& retriever, const std::vector<EvalPair>& pairs,
                    std::vector<size_t> ks) {
    if (pairs.empty()) throw std::invalid_argument("evaluate: no eval pairs");
    if (ks.empty()) throw std::invalid_argument("evaluate: no k values");
    std::sort(ks.begin(), ks.end());
    if (ks.front() < 1) throw std::invalid_argument("evaluate: k must be >= 1");

    size_t max_k = ks.back();
    RetrievalRun run;
    uint64_t excluded = 0;
    for (const EvalPair& pair : pairs) {
        if (!retriever.contains(pair.gold_doc_id)) {
            ++excluded;
            continue;
        }
        size_t k = std::min(max_k, retriever.doc_count());
        std::vector<int64_t> ranked;
        for (const auto& [doc_id, score] : retriever.search(pair.query.tokens, k)) {
            ranked.push_back(doc_id);
        }
        run.ranked.push_back(std::move(ranked));
        run.gold.push_back(pair.gold_doc_id);
    }
    if (run.ranked.empty()) {
        throw std::invalid_argument("evaluate: every gold document is missing");
    }

    EvalReport report;
    report.label = retriever.label();
    report.query_count = run.ranked.size();
    report.excluded = excluded;
    for (size_t k : ks) {
        report.recall.emplace_back(k, recall_at_k(run, k));
    }
    return report;
}

std::vector<DeltaRow> compare_runs(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("compare_runs: no reports");
    for (const EvalReport& report : reports) {
        if (report.recall.size() != reports.front().recall.size()) {
            throw std::invalid_argument("compare_runs: reports use different k sets");
        }
        for (size_t i = 0; i < report.recall.size(); ++i) {
            if (report.recall[i].first != reports.front().recall[i].first) {
                throw std::invalid_argument("compare_runs: reports use different k sets");
            }
        }
        if (report.query_count != reports.front().query_count) {
            throw std::invalid_argument("compare_runs: reports have different query counts");
        }
    }
    std::vector<DeltaRow> rows;
    rows.reserve(reports.size());
    for (size_t i = 0; i < reports.size(); ++i) {
        DeltaRow row;
        row.label = reports[i].label;
        row.recall = reports[i].recall;
        if (i > 0) {
            for (size_t j = 0; j < row.recall.size(); ++j) {
                row.delta.emplace_back(row.recall[j].first,
                                       row.recall[j].second -
                                           reports[i - 1].recall[j].second);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_report(const EvalReport& report) {
    std::string out;
    out += "retriever: " + report.label + "\n";
    out += "queries:   " + std::to_string(report.query_count);
    out += " (excluded: " + std::to_string(report.excluded) + ")\n";
    for (const auto& [k, value] : report.recall) {
        out += "Recall@" + std::to_string(k);
        out.append(k < 10 ? 3 : (k < 100 ? 2 : 1), ' ');
        out += format_recall(value) + "\n";
    }
    return out;
}

std::string format_delta_table(const std::vector<DeltaRow>& rows, size_t focus_k) {
    size_t label_width = 5;
    for (const DeltaRow& row : rows) label_width = std::max(label_width, row.label.size());
    const std::string recall_col = "Recall@" + std::to_string(focus_k);

    std::string out = "model";
    out.append(label_width - 5 + 2, ' ');
    out += recall_col + "  delta\n";

    for (const DeltaRow& row : rows) {
        std::string line = row.label;
        line.append(label_width - row.label.size() + 2, ' ');

        const double* recall = nullptr;
        for (const auto& [k, value] : row.recall) {
            if (k == focus_k) recall = &value;
        }
        if (!recall) {
            throw std::invalid_argument("format_delta_table: focus k not in reports");
        }
        std::string cell = format_recall(*recall);
        line += cell;
        line.append(recall_col.size() - std::min(recall_col.size(), cell.size()) + 2, ' ');

        std::string delta_cell = "-";
        for (const auto& [k, value] : row.delta) {
            if (k == focus_k) delta_cell = format_signed(value);
        }
        out += line + delta_cell + "\n";
    }
    return out;
}

std::string report_to_json(const EvalReport& report) {
    ordered_json out;
    out["retriever"] = report.label;
    out["query_count"] = report.query_count;
    out["excluded"] = report.excluded;
    ordered_json recall = ordered_json::object();
    for (const auto& [k, value] : report.recall) {
        recall[std::to_string(k)] = value;
    }
    out["recall"] = std::move(recall);
    return out.dump() + "\n";
}

EvalReport report_from_json(const std::string& text) {
    ordered_json in = ordered_json::parse(text);
    EvalReport report;
    report.label = in.at("retriever").get<std::string>();
    report.query_count = in.at("query_count").get<uint64_t>();
    report.excluded = in.at("excluded").get<uint64_t>();
    std::vector<std::pair<size_t, double>> recall;
    for (const auto& [key, value] : in.at("recall").items()) {
        recall.emplace_back(std::stoul(key), value.get<double>());
    }
    std::sort(recall.begin(), recall.end());
    report.recall = std::move(recall);
    return report;
}

}  // namespace snipsearch
