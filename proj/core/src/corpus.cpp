#include "snipsearch/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "snipsearch/io.hpp"

namespace snipsearch {

namespace {

using ordered_json = nlohmann::ordered_json;

void remove_all_occurrences(std::string& text, const std::string& needle) {
    if (needle.empty()) return;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.erase(pos, needle.size());
    }
}

void append_part(std::string& text, const std::string& part) {
    if (part.empty()) return;
    if (!text.empty()) text += "\n\n";
    text += part;
}

std::unordered_map<int64_t, size_t> index_by_id(const Corpus& corpus) {
    std::unordered_map<int64_t, size_t> index;
    index.reserve(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        index.emplace(corpus[i].id, i);
    }
    return index;
}

}  // namespace

const char* to_string(CompositionPolicy policy) {
    switch (policy) {
        case CompositionPolicy::train_no_body: return "train_no_body";
        case CompositionPolicy::inference_full: return "inference_full";
        case CompositionPolicy::train_stripped_body: return "train_stripped_body";
    }
    return "inference_full";
}

CompositionPolicy composition_policy_from_string(std::string_view name) {
    if (name == "train_no_body") return CompositionPolicy::train_no_body;
    if (name == "inference_full") return CompositionPolicy::inference_full;
    if (name == "train_stripped_body") return CompositionPolicy::train_stripped_body;
    throw std::invalid_argument("unknown composition policy: " + std::string(name));
}

CompositionError::CompositionError(int64_t doc_id, const std::string& field)
    : std::runtime_error("cannot compose document " + std::to_string(doc_id) +
                         ": missing field '" + field + "'") {}

CorpusLoadError::CorpusLoadError(const std::string& message, uint64_t line_number)
    : std::runtime_error(message + " (line " + std::to_string(line_number) + ")"),
      line_number_(line_number) {}

DocumentRecord compose_document(const ProcessedQuestion& question,
                                CompositionPolicy policy) {
    std::string text;
    switch (policy) {
        case CompositionPolicy::train_no_body: {
            if (!question.best_answer) {
                throw CompositionError(question.id, "best_answer");
            }
            append_part(text, question.title);
            append_part(text, *question.best_answer);
            break;
        }
        case CompositionPolicy::inference_full: {
            append_part(text, question.title);
            append_part(text, question.body_text);
            if (question.best_answer) {
                append_part(text, *question.best_answer);
            }
            break;
        }
        case CompositionPolicy::train_stripped_body: {
            if (question.body_text.empty()) {
                throw CompositionError(question.id, "body");
            }
            std::string body = question.body_text;
            remove_all_occurrences(body, question.code);
            remove_all_occurrences(body, question.error);
            append_part(text, question.title);
            append_part(text, body);
            if (question.best_answer) {
                append_part(text, *question.best_answer);
            }
            break;
        }
    }
    if (text.empty()) {
        throw CompositionError(question.id, "title");
    }
    return DocumentRecord{question.id, std::move(text), policy};
}

std::vector<DocumentRecord> compose_corpus_documents(const Corpus& corpus,
                                                     CompositionPolicy policy) {
    std::vector<DocumentRecord> docs;
    for (const ProcessedQuestion& question : corpus) {
        if (!question.best_answer) continue;
        docs.push_back(compose_document(question, policy));
    }
    return docs;
}

std::vector<EvalPair> build_eval_set(const Corpus& corpus,
                                     const std::vector<RawLinkRow>& links,
                                     const QueryBuildOptions& options) {
    auto index = index_by_id(corpus);
    std::vector<EvalPair> pairs;
    for (const RawLinkRow& link : links) {
        if (link.link_type != LinkType::duplicate) continue;
        if (link.post_id == link.related_post_id) continue;
        auto a = index.find(link.post_id);
        auto b = index.find(link.related_post_id);
        if (a == index.end() || b == index.end()) continue;
        const ProcessedQuestion& source = corpus[a->second];
        const ProcessedQuestion& target = corpus[b->second];
        if (!target.best_answer) continue;
        if (!source.has_snippet()) continue;
        pairs.push_back(EvalPair{build_query(source, options.max_query_len, options.cut_mode),
                                 target.id});
    }
    return pairs;
}

std::vector<PretrainPair> build_pretraining_pairs(const Corpus& corpus,
                                                  const std::vector<RawLinkRow>& links,
                                                  const QueryBuildOptions& options) {
    auto index = index_by_id(corpus);
    std::set<std::pair<int64_t, int64_t>> eval_pairs;
    for (const EvalPair& pair : build_eval_set(corpus, links, options)) {
        eval_pairs.emplace(pair.query.source_question, pair.gold_doc_id);
    }
    std::vector<PretrainPair> pairs;
    for (const RawLinkRow& link : links) {
        if (link.link_type != LinkType::duplicate) continue;
        if (link.post_id == link.related_post_id) continue;
        if (eval_pairs.count({link.post_id, link.related_post_id})) continue;
        auto a = index.find(link.post_id);
        auto b = index.find(link.related_post_id);
        if (a == index.end() || b == index.end()) continue;
        const ProcessedQuestion& source = corpus[a->second];
        if (!source.has_snippet()) continue;
        pairs.push_back(PretrainPair{
            build_query(source, options.max_query_len, options.cut_mode),
            corpus[b->second].id});
    }
    return pairs;
}

namespace {

ordered_json question_to_json(const ProcessedQuestion& question) {
    ordered_json row;
    row["id"] = question.id;
    row["title"] = question.title;
    row["body"] = question.body_text;
    row["code"] = question.code;
    row["error"] = question.error;
    if (question.keyword) row["keyword"] = *question.keyword;
    if (question.best_answer) row["best_answer"] = *question.best_answer;
    if (question.duplicate_of) row["duplicate_of"] = *question.duplicate_of;
    if (question.favorite_count) row["favorite_count"] = *question.favorite_count;
    return row;
}

ProcessedQuestion question_from_json(const ordered_json& row) {
    ProcessedQuestion question;
    question.id = row.at("id").get<int64_t>();
    question.title = row.at("title").get<std::string>();
    question.body_text = row.at("body").get<std::string>();
    question.code = row.at("code").get<std::string>();
    question.error = row.at("error").get<std::string>();
    if (row.contains("keyword")) question.keyword = row["keyword"].get<std::string>();
    if (row.contains("best_answer")) {
        question.best_answer = row["best_answer"].get<std::string>();
    }
    if (row.contains("duplicate_of")) {
        question.duplicate_of = row["duplicate_of"].get<int64_t>();
    }
    if (row.contains("favorite_count")) {
        question.favorite_count = row["favorite_count"].get<int64_t>();
    }
    return question;
}

}  // namespace

void persist_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const ProcessedQuestion& question : corpus) {
        out += question_to_json(question).dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw CorpusLoadError("cannot open corpus file: " + path.string(), 0);
    }
    Corpus corpus;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        ordered_json row = ordered_json::parse(line, nullptr, false);
        if (row.is_discarded()) {
            throw CorpusLoadError("malformed JSON in corpus file", line_number);
        }
        try {
            corpus.push_back(question_from_json(row));
        } catch (const nlohmann::json::exception& e) {
            throw CorpusLoadError(std::string("bad corpus record: ") + e.what(),
                                  line_number);
        }
    }
    return corpus;
}

void persist_pairs(const std::vector<PairRecord>& pairs,
                   const std::filesystem::path& path) {
    std::string out;
    for (const PairRecord& pair : pairs) {
        ordered_json row;
        row["query_tokens"] = pair.query.tokens;
        row["source_question"] = pair.query.source_question;
        row["gold_doc_id"] = pair.gold_doc_id;
        if (!pair.hard_negative_doc_ids.empty()) {
            row["hard_negative_doc_ids"] = pair.hard_negative_doc_ids;
        }
        out += row.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<PairRecord> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw CorpusLoadError("cannot open pairs file: " + path.string(), 0);
    }
    std::vector<PairRecord> pairs;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        ordered_json row = ordered_json::parse(line, nullptr, false);
        if (row.is_discarded()) {
            throw CorpusLoadError("malformed JSON in pairs file", line_number);
        }
        try {
            PairRecord pair;
            pair.query.tokens = row.at("query_tokens").get<TokenSeq>();
            pair.query.source_question = row.at("source_question").get<int64_t>();
            pair.gold_doc_id = row.at("gold_doc_id").get<int64_t>();
            if (row.contains("hard_negative_doc_ids")) {
                pair.hard_negative_doc_ids =
                    row["hard_negative_doc_ids"].get<std::vector<int64_t>>();
            }
            pairs.push_back(std::move(pair));
        } catch (const nlohmann::json::exception& e) {
            throw CorpusLoadError(std::string("bad pair record: ") + e.what(), line_number);
        }
    }
    return pairs;
}

std::vector<PairRecord> to_pair_records(const std::vector<EvalPair>& pairs) {
    std::vector<PairRecord> records;
    records.reserve(pairs.size());
    for (const EvalPair& pair : pairs) {
        records.push_back(PairRecord{pair.query, pair.gold_doc_id, {}});
    }
    return records;
}

std::vector<PairRecord> to_pair_records(const std::vector<PretrainPair>& pairs) {
    std::vector<PairRecord> records;
    records.reserve(pairs.size());
    for (const PretrainPair& pair : pairs) {
        records.push_back(PairRecord{pair.query, pair.target_doc_id, {}});
    }
    return records;
}

CorpusFieldStats corpus_field_stats(const Corpus& corpus) {
    CorpusFieldStats stats;
    stats.total = corpus.size();
    for (const ProcessedQuestion& question : corpus) {
        bool code = question.has_code();
        bool error = question.has_error();
        if (code) ++stats.with_code;
        if (error) ++stats.with_error;
        if (code && error) ++stats.with_both;
        if (code || error) ++stats.with_either;
        if (question.best_answer) ++stats.with_best_answer;
    }
    return stats;
}

}  // namespace snipsearch
