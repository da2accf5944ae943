// snipsearch: search forum answers by code snippet and/or error traceback.
//
// Subcommands cover the whole pipeline: ingest -> build-corpus ->
// build-eval / build-pretrain -> index-bm25 / index-dense -> pretrain ->
// train -> mine-negatives -> evaluate -> search, plus a self-contained demo.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snipsearch/bm25.hpp"
#include "snipsearch/corpus.hpp"
#include "snipsearch/encoder.hpp"
#include "snipsearch/eval.hpp"
#include "snipsearch/ingest.hpp"
#include "snipsearch/io.hpp"
#include "snipsearch/pipeline.hpp"
#include "snipsearch/preprocess.hpp"
#include "snipsearch/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace snipsearch;

namespace {

bool log_enabled() {
    const char* level = std::getenv("SNIPSEARCH_LOG");
    return level == nullptr || std::string(level) != "quiet";
}

void log_line(const std::string& message) {
    if (log_enabled()) std::cerr << message << "\n";
}

void require_input(const fs::path& path) {
    if (!fs::exists(path)) {
        throw std::runtime_error("missing input: " + path.string());
    }
}

// ---------------------------------------------------------------------------
// raw-row JSONL (ingest output, build-corpus input)
// ---------------------------------------------------------------------------

const char* post_type_name(PostType type) {
    switch (type) {
        case PostType::question: return "question";
        case PostType::answer: return "answer";
        case PostType::other: return "other";
    }
    return "other";
}

PostType post_type_from(const std::string& name) {
    if (name == "question") return PostType::question;
    if (name == "answer") return PostType::answer;
    return PostType::other;
}

std::string raw_posts_to_jsonl(const std::vector<RawPostRow>& rows) {
    std::string out;
    for (const RawPostRow& row : rows) {
        ordered_json j;
        j["id"] = row.id;
        j["post_type"] = post_type_name(row.post_type);
        if (row.accepted_answer_id) j["accepted_answer_id"] = *row.accepted_answer_id;
        if (row.parent_id) j["parent_id"] = *row.parent_id;
        if (row.title) j["title"] = *row.title;
        j["body"] = row.body_html;
        j["tags"] = row.tags;
        if (row.favorite_count) j["favorite_count"] = *row.favorite_count;
        if (row.score) j["score"] = *row.score;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<RawPostRow> raw_posts_from_jsonl(const fs::path& path) {
    require_input(path);
    std::ifstream in(path);
    std::vector<RawPostRow> rows;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error(path.string() + ": malformed JSON at line " +
                                     std::to_string(line_number));
        }
        RawPostRow row;
        row.id = j.at("id").get<int64_t>();
        row.post_type = post_type_from(j.at("post_type").get<std::string>());
        if (j.contains("accepted_answer_id")) {
            row.accepted_answer_id = j["accepted_answer_id"].get<int64_t>();
        }
        if (j.contains("parent_id")) row.parent_id = j["parent_id"].get<int64_t>();
        if (j.contains("title")) row.title = j["title"].get<std::string>();
        row.body_html = j.at("body").get<std::string>();
        row.tags = j.at("tags").get<std::vector<std::string>>();
        if (j.contains("favorite_count")) {
            row.favorite_count = j["favorite_count"].get<int64_t>();
        }
        if (j.contains("score")) row.score = j["score"].get<int64_t>();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string raw_links_to_jsonl(const std::vector<RawLinkRow>& rows) {
    std::string out;
    for (const RawLinkRow& row : rows) {
        ordered_json j;
        j["post_id"] = row.post_id;
        j["related_post_id"] = row.related_post_id;
        j["link_type"] = row.link_type == LinkType::duplicate ? "duplicate" : "other";
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<RawLinkRow> raw_links_from_jsonl(const fs::path& path) {
    require_input(path);
    std::ifstream in(path);
    std::vector<RawLinkRow> rows;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error(path.string() + ": malformed JSON at line " +
                                     std::to_string(line_number));
        }
        RawLinkRow row;
        row.post_id = j.at("post_id").get<int64_t>();
        row.related_post_id = j.at("related_post_id").get<int64_t>();
        row.link_type = j.at("link_type").get<std::string>() == "duplicate"
                            ? LinkType::duplicate
                            : LinkType::other;
        rows.push_back(row);
    }
    return rows;
}

std::vector<EvalPair> eval_pairs_from_records(const std::vector<PairRecord>& records) {
    std::vector<EvalPair> pairs;
    pairs.reserve(records.size());
    for (const PairRecord& record : records) {
        pairs.push_back(EvalPair{record.query, record.gold_doc_id});
    }
    return pairs;
}

std::unique_ptr<Retriever> load_retriever(const fs::path& path) {
    require_input(path);
    std::ifstream in(path, std::ios::binary);
    char magic[8] = {0};
    in.read(magic, sizeof(magic));
    if (in && std::string_view(magic, 8) == "SNIPDIX1") {
        return std::make_unique<DenseRetriever>(load_vector_index(path), "dense");
    }
    return std::make_unique<Bm25Retriever>(Bm25Index::load(path), "bm25");
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string posts, links, out;
};

int run_ingest(const IngestArgs& args) {
    require_input(args.posts);
    require_input(args.links);
    fs::create_directories(args.out);

    std::ifstream posts_in(args.posts, std::ios::binary);
    SkipReport posts_report;
    std::vector<RawPostRow> posts = parse_posts(posts_in, &posts_report);

    std::ifstream links_in(args.links, std::ios::binary);
    SkipReport links_report;
    std::vector<RawLinkRow> links = parse_links(links_in, &links_report);

    atomic_write_file(fs::path(args.out) / "posts.jsonl", raw_posts_to_jsonl(posts));
    atomic_write_file(fs::path(args.out) / "links.jsonl", raw_links_to_jsonl(links));

    std::cout << "posts: " << posts_report.rows_yielded << " rows, "
              << posts_report.total_skipped() << " skipped (missing id "
              << posts_report.missing_id << ", missing type "
              << posts_report.missing_post_type << ", invalid "
              << posts_report.invariant_violation << ")\n";
    std::cout << "links: " << links_report.rows_yielded << " rows, "
              << links_report.total_skipped() << " skipped\n";
    return 0;
}

struct BuildCorpusArgs {
    std::string in, out, tag = "python";
};

int run_build_corpus(const BuildCorpusArgs& args) {
    std::vector<RawPostRow> posts = raw_posts_from_jsonl(fs::path(args.in) / "posts.jsonl");
    std::vector<RawLinkRow> links = raw_links_from_jsonl(fs::path(args.in) / "links.jsonl");

    std::unordered_map<int64_t, const RawPostRow*> answers;
    for (const RawPostRow& row : posts) {
        if (row.post_type == PostType::answer) answers.emplace(row.id, &row);
    }
    std::unordered_map<int64_t, int64_t> duplicate_of;
    for (const RawLinkRow& link : links) {
        if (link.link_type == LinkType::duplicate) {
            duplicate_of.emplace(link.post_id, link.related_post_id);  // first link wins
        }
    }

    AssembleReport report;
    Corpus corpus;
    for (const RawPostRow& row : filter_tagged_questions(posts, args.tag)) {
        corpus.push_back(assemble_question(row, answers, duplicate_of, &report));
    }
    persist_corpus(corpus, args.out);

    CorpusFieldStats stats = corpus_field_stats(corpus);
    std::cout << "questions:        " << stats.total << "\n";
    std::cout << "with code:        " << stats.with_code << "\n";
    std::cout << "with error:       " << stats.with_error << "\n";
    std::cout << "with both:        " << stats.with_both << "\n";
    std::cout << "with either:      " << stats.with_either << "\n";
    std::cout << "with best_answer: " << stats.with_best_answer << "\n";
    if (report.missing_best_answer > 0) {
        std::cout << "accepted answers missing from dump: " << report.missing_best_answer
                  << "\n";
    }
    return 0;
}

struct BuildPairsArgs {
    std::string in, links, out;
    size_t max_query_len = 512;
    std::string cut = "middle";
};

int run_build_pairs(const BuildPairsArgs& args, bool pretrain) {
    require_input(args.in);
    Corpus corpus = load_corpus(args.in);
    std::vector<RawLinkRow> links = raw_links_from_jsonl(args.links);
    QueryBuildOptions options;
    options.max_query_len = args.max_query_len;
    options.cut_mode = args.cut == "head" ? CutMode::head : CutMode::middle;
    if (pretrain) {
        std::vector<PretrainPair> pairs = build_pretraining_pairs(corpus, links, options);
        persist_pairs(to_pair_records(pairs), args.out);
        std::cout << "pretraining pairs: " << pairs.size() << "\n";
    } else {
        std::vector<EvalPair> pairs = build_eval_set(corpus, links, options);
        persist_pairs(to_pair_records(pairs), args.out);
        std::cout << "eval pairs: " << pairs.size() << "\n";
    }
    return 0;
}

struct IndexBm25Args {
    std::string corpus, out;
    double k1 = Bm25Index::kDefaultK1;
    double b = Bm25Index::kDefaultB;
    std::string policy = "inference_full";
};

int run_index_bm25(const IndexBm25Args& args) {
    require_input(args.corpus);
    Corpus corpus = load_corpus(args.corpus);
    std::vector<DocumentRecord> docs =
        compose_corpus_documents(corpus, composition_policy_from_string(args.policy));
    Bm25Index index = Bm25Index::build(docs, args.k1, args.b);
    index.save(args.out);
    std::cout << "indexed " << index.doc_count() << " documents\n";
    return 0;
}

struct InitParamsArgs {
    std::string out;
    uint32_t dim = 64;
    uint32_t buckets = 1u << 15;
    uint64_t seed = 0;
};

int run_init_params(const InitParamsArgs& args) {
    EncoderParams params = EncoderParams::random_init(args.dim, args.buckets, args.seed);
    params.save(args.out);
    std::cout << "params: dim " << args.dim << ", buckets " << args.buckets << ", seed "
              << args.seed << "\n";
    return 0;
}

struct IndexDenseArgs {
    std::string corpus, params, out;
    std::string policy = "inference_full";
    unsigned workers = 1;
};

int run_index_dense(const IndexDenseArgs& args) {
    require_input(args.corpus);
    require_input(args.params);
    Corpus corpus = load_corpus(args.corpus);
    std::vector<DocumentRecord> docs =
        compose_corpus_documents(corpus, composition_policy_from_string(args.policy));
    EncoderParams params = EncoderParams::load(args.params);
    VectorIndex index = build_vector_index(params, docs, args.workers);
    save_vector_index(index, args.out);
    std::cout << "indexed " << index.doc_ids.size() << " documents\n";
    return 0;
}

struct TrainArgs {
    std::string corpus, pairs, config, out_params;
    std::string in_params;  // optional; fresh init when empty
};

int run_train(const TrainArgs& args, bool pretrain_mode) {
    require_input(args.corpus);
    require_input(args.pairs);
    require_input(args.config);
    Corpus corpus = load_corpus(args.corpus);
    TrainerConfig config = load_trainer_config(args.config);
    if (pretrain_mode) {
        // pretraining targets keep their bodies; it is a data-source switch
        config.composition_policy = CompositionPolicy::inference_full;
    }
    std::vector<TrainingExample> examples = to_training_examples(load_pairs(args.pairs));

    EncoderParams params =
        args.in_params.empty()
            ? EncoderParams::random_init(config.embedding_dim, config.feature_buckets,
                                         config.seed)
            : EncoderParams::load(args.in_params);

    TrainLog log = train(params, examples, corpus, config);
    params.save(args.out_params);

    std::cout << "optimizer steps: " << log.optimizer_steps << "\n";
    if (!log.epoch_mean_losses.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f -> %.6f", log.epoch_mean_losses.front(),
                      log.epoch_mean_losses.back());
        std::cout << "epoch mean loss: " << buf << "\n";
    }
    return 0;
}

struct MineArgs {
    std::string params, corpus, pairs, out;
    size_t k = 10;
    std::string policy = "inference_full";
    unsigned workers = 1;
};

int run_mine(const MineArgs& args) {
    require_input(args.params);
    require_input(args.corpus);
    require_input(args.pairs);
    Corpus corpus = load_corpus(args.corpus);
    EncoderParams params = EncoderParams::load(args.params);
    std::vector<DocumentRecord> docs =
        compose_corpus_documents(corpus, composition_policy_from_string(args.policy));
    VectorIndex index = build_vector_index(params, docs, args.workers);
    std::vector<PairRecord> pairs = load_pairs(args.pairs);
    std::vector<TrainingExample> mined = mine_hard_negatives(params, index, pairs, args.k);

    std::vector<PairRecord> out;
    out.reserve(mined.size());
    for (const TrainingExample& example : mined) {
        out.push_back(PairRecord{example.query, example.positive_doc_id,
                                 example.hard_negative_doc_ids});
    }
    persist_pairs(out, args.out);
    std::cout << "mined negatives for " << mined.size() << " queries (k=" << args.k
              << ")\n";
    return 0;
}

struct EvaluateArgs {
    std::string index, eval_pairs, report;
    std::string ks = "5,10,20,50";
};

std::vector<size_t> parse_ks(const std::string& text) {
    std::vector<size_t> ks;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string piece = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!piece.empty()) ks.push_back(std::stoul(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (ks.empty()) throw std::runtime_error("no k values in --ks");
    return ks;
}

int run_evaluate(const EvaluateArgs& args) {
    require_input(args.eval_pairs);
    std::unique_ptr<Retriever> retriever = load_retriever(args.index);
    std::vector<EvalPair> pairs = eval_pairs_from_records(load_pairs(args.eval_pairs));
    EvalReport report = evaluate(*retriever, pairs, parse_ks(args.ks));
    if (!args.report.empty()) {
        atomic_write_file(args.report, report_to_json(report));
    }
    std::cout << format_report(report);
    return 0;
}

struct SearchArgs {
    std::string index, query_file;
    size_t k = 10;
    size_t max_query_len = 512;
    std::string cut = "middle";
};

int run_search(const SearchArgs& args) {
    require_input(args.query_file);
    std::unique_ptr<Retriever> retriever = load_retriever(args.index);
    TokenSeq tokens = tokenize(read_file(args.query_file));
    if (args.cut == "head") {
        if (tokens.size() > args.max_query_len) tokens.resize(args.max_query_len);
    } else {
        tokens = truncate_middle(std::move(tokens), args.max_query_len);
    }
    size_t rank = 1;
    for (const auto& [doc_id, score] : retriever->search(tokens, args.k)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", score);
        std::cout << rank << " " << doc_id << " " << buf << "\n";
        ++rank;
    }
    return 0;
}

struct DemoArgs {
    std::string out;
    uint64_t seed = 0;
    unsigned workers = 1;
};

int run_demo(const DemoArgs& args) {
    auto started = std::chrono::steady_clock::now();
    DemoConfig config;
    config.seed = args.seed;
    config.workers = args.workers;
    DemoResult result = demo_pipeline(config);
    if (!args.out.empty()) {
        write_demo_outputs(result, args.out);
    }
    std::cout << format_report(result.bm25) << "\n"
              << format_report(result.dense_initial) << "\n"
              << format_report(result.dense_trained) << "\n"
              << format_report(result.dense_self_trained) << "\n"
              << result.delta_table;
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    log_line("demo completed in " + std::to_string(elapsed) + " ms");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"search forum answers by code snippet / traceback"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    CLI::App* ingest = app.add_subcommand("ingest", "parse dump XML into raw JSONL rows");
    ingest->add_option("--posts", ingest_args.posts, "Posts XML file")->required();
    ingest->add_option("--links", ingest_args.links, "PostLinks XML file")->required();
    ingest->add_option("--out", ingest_args.out, "output directory")->required();

    BuildCorpusArgs corpus_args;
    CLI::App* build_corpus =
        app.add_subcommand("build-corpus", "assemble the processed question corpus");
    build_corpus->add_option("--in", corpus_args.in, "ingest output directory")->required();
    build_corpus->add_option("--out", corpus_args.out, "corpus JSONL path")->required();
    build_corpus->add_option("--tag", corpus_args.tag, "question tag filter");

    BuildPairsArgs eval_pairs_args;
    CLI::App* build_eval =
        app.add_subcommand("build-eval", "build evaluation pairs from duplicate links");
    build_eval->add_option("--in", eval_pairs_args.in, "corpus JSONL")->required();
    build_eval->add_option("--links", eval_pairs_args.links, "links JSONL")->required();
    build_eval->add_option("--out", eval_pairs_args.out, "pairs JSONL")->required();
    build_eval->add_option("--max-query-len", eval_pairs_args.max_query_len);
    build_eval->add_option("--cut", eval_pairs_args.cut, "middle|head");

    BuildPairsArgs pretrain_pairs_args;
    CLI::App* build_pretrain =
        app.add_subcommand("build-pretrain", "build pretraining pairs (bodies included)");
    build_pretrain->add_option("--in", pretrain_pairs_args.in, "corpus JSONL")->required();
    build_pretrain->add_option("--links", pretrain_pairs_args.links, "links JSONL")
        ->required();
    build_pretrain->add_option("--out", pretrain_pairs_args.out, "pairs JSONL")->required();
    build_pretrain->add_option("--max-query-len", pretrain_pairs_args.max_query_len);
    build_pretrain->add_option("--cut", pretrain_pairs_args.cut, "middle|head");

    IndexBm25Args bm25_args;
    CLI::App* index_bm25 = app.add_subcommand("index-bm25", "build the BM25 index");
    index_bm25->add_option("--corpus", bm25_args.corpus, "corpus JSONL")->required();
    index_bm25->add_option("--out", bm25_args.out, "index path")->required();
    index_bm25->add_option("--k1", bm25_args.k1, "saturation parameter");
    index_bm25->add_option("--b", bm25_args.b, "length normalization parameter");
    index_bm25->add_option("--policy", bm25_args.policy, "document composition policy");

    InitParamsArgs init_args;
    CLI::App* init_params = app.add_subcommand("init-params", "random encoder parameters");
    init_params->add_option("--out", init_args.out, "params path")->required();
    init_params->add_option("--dim", init_args.dim, "embedding dimension");
    init_params->add_option("--buckets", init_args.buckets, "feature buckets (power of 2)");
    init_params->add_option("--seed", init_args.seed, "init seed");

    IndexDenseArgs dense_args;
    CLI::App* index_dense = app.add_subcommand("index-dense", "build the dense index");
    index_dense->add_option("--corpus", dense_args.corpus, "corpus JSONL")->required();
    index_dense->add_option("--params", dense_args.params, "encoder params")->required();
    index_dense->add_option("--out", dense_args.out, "index path")->required();
    index_dense->add_option("--policy", dense_args.policy, "document composition policy");
    index_dense->add_option("--workers", dense_args.workers, "encoding threads");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "contrastive training");
    train_cmd->add_option("--corpus", train_args.corpus, "corpus JSONL")->required();
    train_cmd->add_option("--pairs", train_args.pairs, "training pairs JSONL")->required();
    train_cmd->add_option("--config", train_args.config, "trainer config file")->required();
    train_cmd->add_option("--out-params", train_args.out_params, "output params")
        ->required();
    train_cmd->add_option("--in-params", train_args.in_params,
                          "continue from these params (default: fresh init)");

    TrainArgs pretrain_args;
    CLI::App* pretrain_cmd =
        app.add_subcommand("pretrain", "training on duplicate pairs, bodies included");
    pretrain_cmd->add_option("--corpus", pretrain_args.corpus, "corpus JSONL")->required();
    pretrain_cmd->add_option("--pairs", pretrain_args.pairs, "pretraining pairs JSONL")
        ->required();
    pretrain_cmd->add_option("--config", pretrain_args.config, "trainer config file")
        ->required();
    pretrain_cmd->add_option("--out-params", pretrain_args.out_params, "output params")
        ->required();
    pretrain_cmd->add_option("--in-params", pretrain_args.in_params,
                             "continue from these params (default: fresh init)");

    MineArgs mine_args;
    CLI::App* mine_cmd =
        app.add_subcommand("mine-negatives", "mine hard negatives with the current model");
    mine_cmd->add_option("--params", mine_args.params, "encoder params")->required();
    mine_cmd->add_option("--corpus", mine_args.corpus, "corpus JSONL")->required();
    mine_cmd->add_option("--pairs", mine_args.pairs, "pairs JSONL")->required();
    mine_cmd->add_option("--out", mine_args.out, "output pairs JSONL")->required();
    mine_cmd->add_option("--k", mine_args.k, "retrieve top-k per query");
    mine_cmd->add_option("--policy", mine_args.policy, "document composition policy");
    mine_cmd->add_option("--workers", mine_args.workers, "encoding threads");

    EvaluateArgs eval_args;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Recall@k report");
    evaluate_cmd->add_option("--index", eval_args.index, "bm25 or dense index file")
        ->required();
    evaluate_cmd->add_option("--eval-pairs", eval_args.eval_pairs, "pairs JSONL")
        ->required();
    evaluate_cmd->add_option("--ks", eval_args.ks, "comma-separated k values");
    evaluate_cmd->add_option("--report", eval_args.report, "write JSON report here");

    SearchArgs search_args;
    CLI::App* search_cmd = app.add_subcommand("search", "rank documents for one query");
    search_cmd->add_option("--index", search_args.index, "bm25 or dense index file")
        ->required();
    search_cmd->add_option("--query-file", search_args.query_file,
                           "file with the code/traceback query")
        ->required();
    search_cmd->add_option("--k", search_args.k, "results to print");
    search_cmd->add_option("--max-query-len", search_args.max_query_len);
    search_cmd->add_option("--cut", search_args.cut, "middle|head");

    DemoArgs demo_args;
    CLI::App* demo_cmd =
        app.add_subcommand("demo", "end-to-end pipeline on a synthetic corpus");
    demo_cmd->add_option("--out", demo_args.out, "write reports into this directory");
    demo_cmd->add_option("--seed", demo_args.seed, "pipeline seed");
    demo_cmd->add_option("--workers", demo_args.workers, "encoding threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help();
        return 2;
    }

    try {
        if (app.got_subcommand(ingest)) return run_ingest(ingest_args);
        if (app.got_subcommand(build_corpus)) return run_build_corpus(corpus_args);
        if (app.got_subcommand(build_eval)) return run_build_pairs(eval_pairs_args, false);
        if (app.got_subcommand(build_pretrain)) {
            return run_build_pairs(pretrain_pairs_args, true);
        }
        if (app.got_subcommand(index_bm25)) return run_index_bm25(bm25_args);
        if (app.got_subcommand(init_params)) return run_init_params(init_args);
        if (app.got_subcommand(index_dense)) return run_index_dense(dense_args);
        if (app.got_subcommand(train_cmd)) return run_train(train_args, false);
        if (app.got_subcommand(pretrain_cmd)) return run_train(pretrain_args, true);
        if (app.got_subcommand(mine_cmd)) return run_mine(mine_args);
        if (app.got_subcommand(evaluate_cmd)) return run_evaluate(eval_args);
        if (app.got_subcommand(search_cmd)) return run_search(search_args);
        if (app.got_subcommand(demo_cmd)) return run_demo(demo_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 2;
}
