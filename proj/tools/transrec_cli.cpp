// Command-line front end: dataset preparation, training with grid search,
// leave-one-out evaluation, top-N retrieval, and the item-to-item workflow.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "transrec/transrec.hpp"

namespace {

using namespace transrec;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;   // bad files, bad arguments
constexpr int kExitNumeric = 3; // non-finite parameters, diverged training

using Config = std::map<std::string, std::string>;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write file: " + path);
    f << content;
    if (!f) throw InputError("failed writing file: " + path);
}

std::string config_block(const Config& cfg, const std::string& prefix) {
    std::ostringstream os;
    for (const auto& [k, v] : cfg) os << prefix << "config." << k << "=" << v << "\n";
    return os.str();
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            grid.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InputError("bad grid value: '" + tok + "'");
        }
    }
    if (grid.empty()) throw InputError("empty grid: '" + csv + "'");
    return grid;
}

char parse_delimiter(const std::string& name) {
    if (name == "tab" || name == "\t") return '\t';
    if (name == "comma" || name == ",") return ',';
    if (name.size() == 1) return name[0];
    throw InputError("unknown delimiter '" + name + "' (use tab or comma)");
}

// Shared training knobs; defaults follow the engine-wide conventions
// (lr 0.05, K 10, lambda grid {0, 0.001, 0.01, 0.1, 1}).
struct TrainFlags {
    double learning_rate = 0.05;
    std::size_t k = 10;
    double lambda = 0.0;
    std::string lambda_grid = "0,0.001,0.01,0.1,1";
    bool no_grid = false;
    std::optional<double> lambda_bias, lambda_embedding, lambda_translation;
    std::size_t max_iterations = 100;
    std::size_t patience = 10;
    std::size_t samples_per_iteration = 0;
    std::uint64_t seed = 42;
    unsigned threads = 0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--lr", learning_rate, "learning rate (default 0.05)");
        cmd.add_option("-k,--k", k, "latent dimensionality (default 10)");
        cmd.add_option("--lambda", lambda, "regularization when --no-grid is given");
        cmd.add_option("--lambda-grid", lambda_grid,
                       "comma-separated lambda grid (default 0,0.001,0.01,0.1,1)");
        cmd.add_flag("--no-grid", no_grid, "train a single point with --lambda");
        cmd.add_option("--lambda-bias", lambda_bias, "per-class override for bias terms");
        cmd.add_option("--lambda-emb", lambda_embedding, "per-class override for embeddings");
        cmd.add_option("--lambda-trans", lambda_translation,
                       "per-class override for translation vectors");
        cmd.add_option("--max-iters", max_iterations, "iteration cap (default 100)");
        cmd.add_option("--patience", patience,
                       "validation checks without improvement before stopping (default 10)");
        cmd.add_option("--samples-per-iter", samples_per_iteration,
                       "SGD samples per iteration (default: #training transitions)");
        cmd.add_option("--seed", seed, "master seed (default 42)");
        cmd.add_option("--threads", threads, "evaluation threads (default: all cores)");
    }

    TrainConfig to_config() const {
        TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.k = k;
        cfg.lambda = lambda;
        cfg.lambda_bias = lambda_bias;
        cfg.lambda_embedding = lambda_embedding;
        cfg.lambda_translation = lambda_translation;
        cfg.max_iterations = max_iterations;
        cfg.patience = patience;
        cfg.samples_per_iteration = samples_per_iteration;
        cfg.seed = seed;
        cfg.eval_threads = threads;
        return cfg;
    }

    std::vector<double> lambdas() const {
        return no_grid ? std::vector<double>{lambda} : parse_grid(lambda_grid);
    }

    void echo(Config& cfg) const {
        cfg["lr"] = fmt_double(learning_rate);
        cfg["k"] = std::to_string(k);
        cfg["lambda_grid"] = no_grid ? fmt_double(lambda) : lambda_grid;
        if (lambda_bias) cfg["lambda_bias"] = fmt_double(*lambda_bias);
        if (lambda_embedding) cfg["lambda_emb"] = fmt_double(*lambda_embedding);
        if (lambda_translation) cfg["lambda_trans"] = fmt_double(*lambda_translation);
        cfg["max_iters"] = std::to_string(max_iterations);
        cfg["patience"] = std::to_string(patience);
        cfg["samples_per_iter"] = std::to_string(samples_per_iteration);
        cfg["seed"] = std::to_string(seed);
    }
};

std::string grid_table_text(const GridSearchResult& result) {
    std::ostringstream os;
    os << "# grid summary\n";
    os << "# index\tlambda\talpha\tvalidation_auc\titerations\tbest_iteration\n";
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        const auto& p = result.table[i];
        os << "# " << i << '\t' << fmt_double(p.lambda) << '\t' << fmt_double(p.alpha) << '\t'
           << (p.diverged ? "diverged" : fmt6(p.validation_auc)) << '\t' << p.iterations_run
           << '\t' << p.best_iteration << "\n";
    }
    os << "# selected\t" << result.best_index << "\n";
    return os.str();
}

std::string report_text(const Config& cfg, const GridSearchResult& result) {
    std::ostringstream os;
    os << "# transrec training report\n";
    os << config_block(cfg, "# ");
    os << grid_table_text(result);
    os << "iteration\tmean_loglik\tvalidation_auc\tseconds\n";
    for (const auto& row : result.report.rows)
        os << row.iteration << '\t' << fmt6(row.mean_loglik) << '\t'
           << fmt6(row.validation_auc) << '\t' << fmt6(row.seconds) << "\n";
    return os.str();
}

std::string eval_report_text(const Config& cfg, const EvalReport& rep) {
    std::ostringstream os;
    os << "users_evaluated\t" << rep.users_evaluated << "\n";
    os << "auc\t" << fmt6(rep.auc) << "\n";
    os << "auc_ties_half\t" << fmt6(rep.auc_ties_half) << "\n";
    os << "hit_k\t" << rep.hit_k << "\n";
    os << "hit_rate\t" << fmt6(rep.hit_rate) << "\n";
    os << config_block(cfg, "");
    return os.str();
}

// --- prepare ----------------------------------------------------------------

struct PrepareArgs {
    std::string input, output;
    std::string delimiter = "tab";
    std::string user_col = "0", item_col = "1", time_col = "2";
    bool header = false;
    bool skip_malformed = false;
    std::size_t min_count = 5;
};

int cmd_prepare(const PrepareArgs& a) {
    LoadOptions opts;
    opts.delimiter = parse_delimiter(a.delimiter);
    opts.has_header = a.header;
    opts.user_column = a.user_col;
    opts.item_column = a.item_col;
    opts.time_column = a.time_col;
    opts.on_malformed = a.skip_malformed ? MalformedPolicy::Skip : MalformedPolicy::Fail;

    const InteractionLog raw = load_interactions(a.input, opts);
    std::cerr << "loaded " << raw.size() << " interactions (" << raw.skipped_lines
              << " malformed lines skipped)\n";
    const CoreFilterResult filtered = core_filter(raw, a.min_count);
    const SequenceDataset unsplit = build_sequences(filtered.log);
    const SequenceDataset ds = split_leave_one_out(unsplit);

    Config cfg;
    cfg["input"] = a.input;
    cfg["delimiter"] = a.delimiter;
    cfg["columns"] = a.user_col + "," + a.item_col + "," + a.time_col;
    cfg["header"] = a.header ? "1" : "0";
    cfg["on_malformed"] = a.skip_malformed ? "skip" : "fail";
    cfg["min_count"] = std::to_string(a.min_count);

    std::ostringstream manifest;
    manifest << dataset_manifest(ds);
    manifest << "skipped_lines\t" << raw.skipped_lines << "\n";
    manifest << "core_filter_passes\t" << filtered.passes << "\n";
    manifest << "train_transitions\t" << ds.train_transition_count() << "\n";
    manifest << config_block(cfg, "");

    std::filesystem::create_directories(a.output);
    save_dataset(a.output + "/dataset.txt", ds);
    write_text_file(a.output + "/manifest.txt", manifest.str());
    std::cout << manifest.str();
    return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
    std::string dataset, kind, out, report;
    TrainFlags flags;
    std::string alpha_grid = "0.2,0.5,0.8";
    bool no_bias = false;
};

int cmd_train(const TrainArgs& a) {
    const SequenceDataset ds = load_dataset(a.dataset);
    TrainConfig cfg = a.flags.to_config();

    Config echo;
    echo["dataset"] = a.dataset;
    echo["kind"] = a.kind;
    a.flags.echo(echo);
    if (a.kind == "prme") echo["alpha_grid"] = a.alpha_grid;
    if (a.kind == "bprmf") echo["use_bias"] = a.no_bias ? "0" : "1";

    const auto alphas = a.kind == "prme" ? parse_grid(a.alpha_grid) : std::vector<double>{};
    GridSearchResult result =
        grid_search(a.kind, ds, cfg, a.flags.lambdas(), alphas, !a.no_bias);

    save_model(a.out, *result.model, ds.user_ids, ds.item_ids, echo);
    const std::string report_path = a.report.empty() ? a.out + ".report.txt" : a.report;
    write_text_file(report_path, report_text(echo, result));

    const auto& best = result.table[result.best_index];
    std::cout << "kind\t" << result.model->kind() << "\n";
    std::cout << "selected_lambda\t" << fmt_double(best.lambda) << "\n";
    if (a.kind == "prme") std::cout << "selected_alpha\t" << fmt_double(best.alpha) << "\n";
    std::cout << "validation_auc\t" << fmt6(best.validation_auc) << "\n";
    std::cout << "model\t" << a.out << "\n";
    std::cout << "report\t" << report_path << "\n";
    return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string model, dataset, out, ranks;
    std::string split = "test";
    std::size_t hit_k = 50;
    unsigned threads = 0;
};

void check_model_matches_dataset(const SavedModel& saved, const SequenceDataset& ds) {
    if (saved.n_items != ds.item_count())
        throw InputError("model has " + std::to_string(saved.n_items) + " items but dataset has " +
                         std::to_string(ds.item_count()));
    if (saved.n_users != 0 && saved.n_users != ds.user_count())
        throw InputError("model has " + std::to_string(saved.n_users) + " users but dataset has " +
                         std::to_string(ds.user_count()));
    // same shapes can still be different catalogs
    if (!saved.item_ids.empty() && saved.item_ids != ds.item_ids)
        throw InputError("model and dataset item id maps differ (same counts, different catalog)");
    if (!saved.user_ids.empty() && saved.user_ids != ds.user_ids)
        throw InputError("model and dataset user id maps differ");
}

int cmd_eval(const EvalArgs& a) {
    const SavedModel saved = load_saved_model(a.model);
    const SequenceDataset ds = load_dataset(a.dataset);
    check_model_matches_dataset(saved, ds);
    const auto model = instantiate_sequential(saved);

    EvalOptions opts;
    opts.hit_k = a.hit_k;
    opts.collect_ranks = !a.ranks.empty();
    opts.threads = a.threads;
    const EvalSplit split = a.split == "validation" ? EvalSplit::Validation : EvalSplit::Test;
    const EvalReport rep = evaluate(*model, ds, split, opts);

    Config echo;
    echo["model"] = a.model;
    echo["dataset"] = a.dataset;
    echo["split"] = a.split;
    echo["hit_k"] = std::to_string(a.hit_k);
    echo["model_kind"] = saved.kind;

    const std::string text = eval_report_text(echo, rep);
    std::cout << text;
    if (!a.out.empty()) write_text_file(a.out, text);
    if (!a.ranks.empty()) {
        std::ostringstream os;
        os << "user_id\trank\tcandidates\n";
        for (const auto& r : rep.ranks)
            os << ds.user_ids[r.user] << '\t' << r.rank << '\t' << r.candidates << "\n";
        write_text_file(a.ranks, os.str());
    }
    return kExitOk;
}

// --- recommend ----------------------------------------------------------------

struct RecommendArgs {
    std::string model, dataset, user, prev_item;
    std::size_t top = 10;
    bool exclude_seen = false;
};

int cmd_recommend(const RecommendArgs& a) {
    const SavedModel saved = load_saved_model(a.model);
    if (saved.kind != "transrec-l1" && saved.kind != "transrec-l2")
        throw InputError("recommend requires a translation model, got kind '" + saved.kind + "'");
    const auto base = instantiate_sequential(saved);
    const auto* model = dynamic_cast<const TransRecModel*>(base.get());

    auto find_id = [](const std::vector<std::string>& ids, const std::string& id,
                      const char* what) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return static_cast<std::uint32_t>(i);
        throw InputError(std::string("unknown ") + what + " id: " + id);
    };
    const std::uint32_t user = find_id(saved.user_ids, a.user, "user");
    const std::uint32_t prev = find_id(saved.item_ids, a.prev_item, "item");

    std::vector<std::uint32_t> seen;
    if (a.exclude_seen) {
        if (a.dataset.empty())
            throw InputError("--exclude-seen requires --dataset (the seen-item sets live there)");
        const SequenceDataset ds = load_dataset(a.dataset);
        check_model_matches_dataset(saved, ds);
        std::uint32_t du = find_id(ds.user_ids, a.user, "user");
        seen = ds.user_items[du];
    }

    const RetrievalIndex index = build_index(*model);
    const auto recs = recommend(index, *model, user, prev, a.top, a.exclude_seen, seen);
    for (std::size_t r = 0; r < recs.size(); ++r)
        std::cout << (r + 1) << '\t' << saved.item_ids[recs[r].item] << '\t'
                  << fmt6(recs[r].score) << "\n";
    return kExitOk;
}

// --- item-to-item -------------------------------------------------------------

struct I2IFeaturesArgs {
    std::string corpus, out;
    std::size_t dim = 5000;
    bool no_bigrams = false;
};

int cmd_i2i_features(const I2IFeaturesArgs& a) {
    FeatureOptions opts;
    opts.bigrams = !a.no_bigrams;
    const auto corpus = load_corpus(a.corpus);
    const FeatureMatrix fm = extract_features(corpus, a.dim, opts);
    save_features(a.out, fm);
    std::cout << "items\t" << fm.item_count() << "\n";
    std::cout << "dim\t" << fm.dim << "\n";
    std::cout << "nnz\t" << fm.nnz() << "\n";
    std::cout << "features\t" << a.out << "\n";
    return kExitOk;
}

struct I2ITrainArgs {
    std::string edges, features, kind = "transrec", out, report;
    std::string delimiter = "tab";
    std::size_t kprime = 100;
    TrainFlags flags;
};

int cmd_i2i_train(const I2ITrainArgs& a) {
    auto features = std::make_shared<FeatureMatrix>(load_features(a.features));
    EdgeDataset edges = load_edges(a.edges, *features, parse_delimiter(a.delimiter));
    assign_edge_split(edges, a.flags.seed);

    TrainConfig cfg = a.flags.to_config();
    cfg.k = a.kprime;

    Config echo;
    echo["edges"] = a.edges;
    echo["features"] = a.features;
    echo["kind"] = a.kind;
    echo["kprime"] = std::to_string(a.kprime);
    a.flags.echo(echo);
    echo["k"] = std::to_string(a.kprime);
    echo["edge_split"] = "0.8/0.1/0.1";

    GridSearchResult result =
        grid_search_i2i(a.kind, features, edges, cfg, a.flags.lambdas());

    save_model(a.out, *result.model, {}, features->item_ids, echo);
    const std::string report_path = a.report.empty() ? a.out + ".report.txt" : a.report;
    write_text_file(report_path, report_text(echo, result));

    const auto& best = result.table[result.best_index];
    std::cout << "kind\t" << result.model->kind() << "\n";
    std::cout << "selected_lambda\t" << fmt_double(best.lambda) << "\n";
    std::cout << "validation_auc\t" << fmt6(best.validation_auc) << "\n";
    std::cout << "model\t" << a.out << "\n";
    std::cout << "report\t" << report_path << "\n";
    return kExitOk;
}

struct I2IEvalArgs {
    std::string model, edges, features, out;
    std::string delimiter = "tab";
    std::string split = "test";
    std::size_t hit_k = 10;
    std::uint64_t split_seed = 0;
    bool split_seed_given = false;
    unsigned threads = 0;
};

int cmd_i2i_eval(const I2IEvalArgs& a) {
    const SavedModel saved = load_saved_model(a.model);
    auto features = std::make_shared<FeatureMatrix>(load_features(a.features));
    const auto model = instantiate_i2i(saved, features);

    // the edge split is recomputed from the training seed recorded in the model
    std::uint64_t seed = a.split_seed;
    if (!a.split_seed_given) {
        const auto it = saved.settings.find("config.seed");
        if (it == saved.settings.end())
            throw InputError("model file records no seed; pass --split-seed");
        seed = std::stoull(it->second);
    }
    EdgeDataset edges = load_edges(a.edges, *features, parse_delimiter(a.delimiter));
    assign_edge_split(edges, seed);

    const EdgePart part = a.split == "validation" ? EdgePart::Validation : EdgePart::Test;
    const EvalReport rep = eval_i2i(*model, edges, part, a.hit_k, a.threads);

    Config echo;
    echo["model"] = a.model;
    echo["edges"] = a.edges;
    echo["features"] = a.features;
    echo["split"] = a.split;
    echo["split_seed"] = std::to_string(seed);
    echo["hit_k"] = std::to_string(a.hit_k);
    echo["model_kind"] = saved.kind;

    std::ostringstream os;
    os << "edges_evaluated\t" << rep.users_evaluated << "\n";
    os << "auc\t" << fmt6(rep.auc) << "\n";
    os << "auc_ties_half\t" << fmt6(rep.auc_ties_half) << "\n";
    os << "hit_k\t" << rep.hit_k << "\n";
    os << "hit_rate\t" << fmt6(rep.hit_rate) << "\n";
    os << config_block(echo, "");
    std::cout << os.str();
    if (!a.out.empty()) write_text_file(a.out, os.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"translation-based sequential recommendation engine"};
    app.require_subcommand(1);
    // plain-text config with command-line overrides; the path can also come
    // from TRANSREC_CONFIG
    app.set_config("--config")
        ->envname("TRANSREC_CONFIG")
        ->description("INI-style config file; flags given on the command line win");

    PrepareArgs prep;
    auto* prepare = app.add_subcommand("prepare", "ingest, 5-core filter, split a log");
    prepare->add_option("--input", prep.input, "interaction log (tsv/csv, optionally gzip)")
        ->required();
    prepare->add_option("--output", prep.output, "output directory")->required();
    prepare->add_option("--delimiter", prep.delimiter, "tab or comma (default tab)");
    prepare->add_option("--user-col", prep.user_col, "user column index or header name");
    prepare->add_option("--item-col", prep.item_col, "item column index or header name");
    prepare->add_option("--time-col", prep.time_col, "timestamp column index or header name");
    prepare->add_flag("--header", prep.header, "first line is a header row");
    prepare->add_flag("--skip-malformed", prep.skip_malformed,
                      "skip and count malformed lines instead of failing");
    prepare->add_option("--min-count", prep.min_count, "core filter threshold (default 5)");

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "fit a model with validation grid search");
    train->add_option("--dataset", tr.dataset, "prepared dataset file")->required();
    train->add_option("--model-kind", tr.kind,
                      "poprec|bprmf|fmc|fpmc|prme|hrm-avg|hrm-max|transrec-l1|transrec-l2")
        ->required();
    train->add_option("--out", tr.out, "model output file")->required();
    train->add_option("--report", tr.report, "training report path (default <out>.report.txt)");
    train->add_option("--alpha-grid", tr.alpha_grid, "PRME alpha grid (default 0.2,0.5,0.8)");
    train->add_flag("--no-bias", tr.no_bias, "disable the BPR-MF item bias term");
    tr.flags.attach(*train);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "leave-one-out AUC and Hit@K");
    eval->add_option("--model", ev.model, "model file")->required();
    eval->add_option("--dataset", ev.dataset, "prepared dataset file")->required();
    eval->add_option("--split", ev.split, "test or validation (default test)");
    eval->add_option("-K,--hit-k", ev.hit_k, "hit rate cutoff (default 50)");
    eval->add_option("--out", ev.out, "also write the report here");
    eval->add_option("--ranks", ev.ranks, "write per-user ranks here");
    eval->add_option("--threads", ev.threads, "evaluation threads");

    RecommendArgs rec;
    auto* recommend = app.add_subcommand("recommend", "top-N next items via the exact index");
    recommend->add_option("--model", rec.model, "translation model file")->required();
    recommend->add_option("--user", rec.user, "raw user id")->required();
    recommend->add_option("--prev-item", rec.prev_item, "raw id of the previous item")->required();
    recommend->add_option("--top", rec.top, "list length (default 10)");
    recommend->add_flag("--exclude-seen", rec.exclude_seen, "drop items the user already has");
    recommend->add_option("--dataset", rec.dataset, "dataset file (needed with --exclude-seen)");

    I2IFeaturesArgs i2if;
    auto* i2i_features = app.add_subcommand("i2i-features", "bag-of-words features from text");
    i2i_features->add_option("--corpus", i2if.corpus, "item_id<TAB>text lines")->required();
    i2i_features->add_option("--out", i2if.out, "feature file")->required();
    i2i_features->add_option("--dim", i2if.dim, "vocabulary size (default 5000)");
    i2i_features->add_flag("--no-bigrams", i2if.no_bigrams, "unigrams only");

    I2ITrainArgs i2it;
    auto* i2i_train = app.add_subcommand("i2i-train", "fit an item-to-item relation model");
    i2i_train->add_option("--edges", i2it.edges, "directed edges (src<TAB>dst)")->required();
    i2i_train->add_option("--features", i2it.features, "feature file")->required();
    i2i_train->add_option("--kind", i2it.kind, "transrec|wnn|lmt (default transrec)");
    i2i_train->add_option("--out", i2it.out, "model output file")->required();
    i2i_train->add_option("--report", i2it.report, "training report path");
    i2i_train->add_option("--delimiter", i2it.delimiter, "edge file delimiter (default tab)");
    i2i_train->add_option("--kprime", i2it.kprime, "relational space dimensions (default 100)");
    i2it.flags.attach(*i2i_train);

    I2IEvalArgs i2ie;
    auto* i2i_eval = app.add_subcommand("i2i-eval", "held-out edge AUC and Hit@K");
    i2i_eval->add_option("--model", i2ie.model, "model file")->required();
    i2i_eval->add_option("--edges", i2ie.edges, "directed edges file")->required();
    i2i_eval->add_option("--features", i2ie.features, "feature file")->required();
    i2i_eval->add_option("--split", i2ie.split, "test or validation (default test)");
    i2i_eval->add_option("-K,--hit-k", i2ie.hit_k, "hit rate cutoff (default 10)");
    i2i_eval->add_option("--delimiter", i2ie.delimiter, "edge file delimiter (default tab)");
    i2i_eval->add_option("--split-seed", i2ie.split_seed, "override the recorded split seed")
        ->each([&](const std::string&) { i2ie.split_seed_given = true; });
    i2i_eval->add_option("--out", i2ie.out, "also write the report here");
    i2i_eval->add_option("--threads", i2ie.threads, "evaluation threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (prepare->parsed()) return cmd_prepare(prep);
        if (train->parsed()) return cmd_train(tr);
        if (eval->parsed()) return cmd_eval(ev);
        if (recommend->parsed()) return cmd_recommend(rec);
        if (i2i_features->parsed()) return cmd_i2i_features(i2if);
        if (i2i_train->parsed()) return cmd_i2i_train(i2it);
        if (i2i_eval->parsed()) return cmd_i2i_eval(i2ie);
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
