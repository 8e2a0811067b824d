// c2m: command-line front end for corpus generation, training, clustering,
// scoring, ablation and evaluation.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "c2m/eval.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace c2m;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GenArgs {
    std::string family = "blobs";
    std::size_t pools = 1;
    std::size_t samples = 20;
    std::size_t points = 200;
    std::size_t pool_size = 1500;
    std::string role = "train";
    std::uint64_t seed = 0;
    std::string out = "corpus";
    FamilyParams params;
};

struct TrainArgs {
    std::string corpus;
    std::string preset = "standard";
    std::optional<std::size_t> epochs, batch_size, critic_steps, cem_population, cem_iterations, gae_epochs;
    std::optional<double> cem_elite_fraction, learning_rate, clip;
    bool no_standardize = false;
    std::uint64_t seed = 0;
    std::string tag;
    std::string out = "model.json";
    std::string report;
};

struct InferArgs {
    std::string model;
    std::string data;
    std::string corpus;
    std::string labels;
    std::string out;
    std::string csv;
    std::uint64_t seed = 0;
    std::size_t copies = 50;
    CemConfig cem = inference_cem();
};

unsigned g_threads = 1;

[[noreturn]] void usage_error(const std::string& msg) { throw CLI::ValidationError(msg); }

void add_threads(CLI::App* cmd) {
    cmd->add_option("--threads", g_threads, "Worker threads (falls back to $C2M_THREADS)")
        ->envname("C2M_THREADS")
        ->check(CLI::PositiveNumber);
}

void add_config(CLI::App* cmd) {
    // Consumed by the pre-scan in main; registered so it shows in --help.
    cmd->add_option("--config", "JSON run configuration; command-line flags override its values");
}

void add_cem_options(CLI::App* cmd, CemConfig& cem) {
    cmd->add_option("--population", cem.population, "CEM samples per iteration")->check(CLI::Range(2, 100000));
    cmd->add_option("--iterations", cem.iterations, "CEM iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--elite-fraction", cem.elite_fraction, "Fraction of samples kept as elite")
        ->check(CLI::Range(0.0, 1.0));
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) usage_error(std::string(what) + " is required");
    if (!fs::is_regular_file(path)) usage_error(std::string(what) + ": no such file '" + path + "'");
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string fmt(double x) { return json(x).dump(); }

int run_gen(const GenArgs& a) {
    CorpusSpec spec;
    spec.family = parse_family(a.family);
    spec.pools = a.pools;
    spec.samples = a.samples;
    spec.points = a.points;
    spec.pool_size = a.pool_size;
    spec.role = parse_role(a.role);
    spec.seed = a.seed;
    spec.params = a.params;
    const Corpus corpus = make_corpus(spec);
    const fs::path manifest = save_corpus(a.out, corpus, a.family);
    std::cout << "wrote " << corpus.datasets.size() << " " << a.family << " datasets (" << a.points
              << " points, d=" << corpus.dim() << ") manifest " << manifest.string() << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    require_file(a.corpus, "--corpus");
    TrainConfig cfg;
    if (a.preset == "standard") cfg = TrainConfig::standard();
    else if (a.preset == "few-shots") cfg = TrainConfig::few_shots();
    else usage_error("--preset must be standard or few-shots");
    if (a.epochs) cfg.epochs = *a.epochs;
    if (a.batch_size) cfg.batch_size = *a.batch_size;
    if (a.critic_steps) cfg.critic_steps = *a.critic_steps;
    if (a.cem_population) cfg.cem.population = *a.cem_population;
    if (a.cem_iterations) cfg.cem.iterations = *a.cem_iterations;
    if (a.cem_elite_fraction) cfg.cem.elite_fraction = *a.cem_elite_fraction;
    if (a.gae_epochs) cfg.gae.epochs = *a.gae_epochs;
    if (a.learning_rate) {
        cfg.critic_optimizer.learning_rate = *a.learning_rate;
        cfg.gae.optimizer.learning_rate = *a.learning_rate;
    }
    if (a.clip) cfg.critic.clip = *a.clip;
    cfg.standardize = !a.no_standardize;
    cfg.seed = a.seed;
    cfg.cem.threads = g_threads;
    cfg.corpus_tag = a.tag;
    if (cfg.corpus_tag.empty()) {
        const fs::path p = fs::absolute(a.corpus);
        cfg.corpus_tag = (p.stem() == "manifest" ? p.parent_path().filename() : p.stem()).string();
    }
    cfg.validate();

    const Corpus corpus = load_corpus(a.corpus);
    corpus.validate();
    TrainReport report;
    const C2mModel model = train(corpus, cfg, &report);
    save_model(a.out, model);
    const fs::path report_path =
        a.report.empty() ? fs::path(a.out).replace_extension(".report.csv") : fs::path(a.report);
    save_train_report(report_path, report);
    const TrainRecord& last = report.records.back();
    std::cout << "trained on " << corpus.datasets.size() << " datasets: " << cfg.epochs << " epochs x "
              << cfg.batch_size << " updates; last train acc " << fmt(last.train_acc) << "\n"
              << "checkpoint " << a.out << "\nreport " << report_path.string() << "\n";
    return 0;
}

int run_cluster(InferArgs a) {
    require_file(a.model, "--model");
    require_file(a.data, "--data");
    a.cem.threads = g_threads;
    a.cem.validate();
    const C2mModel model = load_model(a.model);
    const SampleDataset ds = load_dataset(a.data, false);
    const ClusterResult r = cluster(model, ds.points, a.cem, a.seed);
    fs::path out = a.out;
    if (out.empty()) out = fs::path(a.data).replace_extension(".labels.csv");
    save_labels(out, r.labels);
    std::cout << "inferred_k " << r.inferred_k << "\nscore " << fmt(r.score) << "\nlabels " << out.string() << "\n";
    return 0;
}

int run_score(const InferArgs& a) {
    require_file(a.model, "--model");
    require_file(a.data, "--data");
    const C2mModel model = load_model(a.model);
    SampleDataset ds = load_dataset(a.data, a.labels.empty());
    if (!a.labels.empty()) {
        require_file(a.labels, "--labels");
        ds.truth = load_labels(a.labels);
    }
    if (!ds.truth) usage_error("score needs --labels or a label column in --data");
    std::cout << fmt(metric(model, ds.points, *ds.truth)) << "\n";
    return 0;
}

int run_ablate(const InferArgs& a) {
    require_file(a.model, "--model");
    require_file(a.data, "--data");
    if (a.copies < 2) usage_error("--copies must be >= 2");
    const C2mModel model = load_model(a.model);
    SampleDataset ds = load_dataset(a.data, a.labels.empty());
    if (!a.labels.empty()) {
        require_file(a.labels, "--labels");
        ds.truth = load_labels(a.labels);
    }
    if (!ds.truth) usage_error("ablate needs --labels or a label column in --data");
    const AblationCurve curve = ablation(model, ds, a.copies, a.seed, g_threads);
    fs::path out = a.out;
    if (out.empty()) out = fs::path(a.data).replace_extension(".ablation.csv");
    emit_plot_data(curve, out);
    std::cout << "spearman " << fmt(ablation_spearman(curve)) << "\ncurve " << out.string() << "\n";
    return 0;
}

int run_eval(InferArgs a) {
    require_file(a.model, "--model");
    require_file(a.corpus, "--corpus");
    a.cem.threads = g_threads;
    a.cem.validate();
    const C2mModel model = load_model(a.model);
    Corpus corpus = load_corpus(a.corpus);
    corpus.validate();
    const EvalReport report = evaluate_corpus(model, corpus, a.cem, a.seed);
    const std::string text = eval_report_json(report);
    if (a.out.empty()) std::cout << text;
    else write_text(a.out, text);
    if (!a.csv.empty()) emit_plot_data(report, a.csv);
    if (!a.out.empty()) {
        std::cout << "datasets " << report.datasets.size() << "\nmean_acc " << fmt(report.mean_acc)
                  << "\nmean_nmi " << fmt(report.mean_nmi) << "\nreport " << a.out << "\n";
    }
    return 0;
}

// Turns a JSON config object into flag tokens for `cmd`. Unknown keys and
// non-scalar values are usage errors.
std::vector<std::string> config_tokens(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) usage_error("--config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        usage_error("--config: invalid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) usage_error("--config: top level must be an object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        for (char& ch : flag)
            if (ch == '_') ch = '-';
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        if (!opt || key == "config" || key == "help")
            usage_error("--config: unknown key '" + key + "' for " + cmd->get_name());
        if (opt->get_type_size_max() == 0) {
            if (!value.is_boolean()) usage_error("--config: key '" + key + "' must be true or false");
            if (value.get<bool>()) tokens.push_back(flag);
            continue;
        }
        if (value.is_string()) tokens.push_back(flag + "=" + value.get<std::string>());
        else if (value.is_number()) tokens.push_back(flag + "=" + value.dump());
        else usage_error("--config: key '" + key + "' must be a string or number");
    }
    return tokens;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"c2m: learn a transferable clustering metric and cluster new datasets with it"};
    app.name("c2m");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic corpus (CSV datasets plus manifest)");
    gen_cmd->add_option("--family", gen.family, "blobs, anisotropic, moons or circles")
        ->check(CLI::IsMember({"blobs", "anisotropic", "moons", "circles"}));
    gen_cmd->add_option("--pools", gen.pools, "Labelled pools to draw from")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--samples", gen.samples, "Sample datasets to write")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--points", gen.points, "Points per sample dataset")->check(CLI::Range(2, 1000000));
    gen_cmd->add_option("--pool-size", gen.pool_size, "Points per pool")->check(CLI::Range(2, 10000000));
    gen_cmd->add_option("--role", gen.role, "train or test")->check(CLI::IsMember({"train", "test"}));
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Output directory");
    gen_cmd->add_option("--blob-spread", gen.params.blob_spread, "Blob standard deviation");
    gen_cmd->add_option("--min-clusters", gen.params.min_clusters, "Fewest blobs per pool");
    gen_cmd->add_option("--max-clusters", gen.params.max_clusters, "Most blobs per pool");
    gen_cmd->add_option("--moons-noise", gen.params.moons_noise, "Noise of the moons family");
    gen_cmd->add_option("--circles-noise", gen.params.circles_noise, "Noise of the circles family");
    gen_cmd->add_option("--circles-ratio", gen.params.circles_ratio, "Inner radius of the circles family");

    TrainArgs tr;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a metric on a labelled corpus");
    train_cmd->add_option("--corpus", tr.corpus, "Corpus manifest (JSON)");
    train_cmd->add_option("--preset", tr.preset, "standard (20 datasets x 10 epochs) or few-shots (5 x 1)")
        ->check(CLI::IsMember({"standard", "few-shots"}));
    train_cmd->add_option("--epochs", tr.epochs, "Override the preset's epoch count");
    train_cmd->add_option("--batch-size", tr.batch_size, "Override the preset's datasets per epoch");
    train_cmd->add_option("--critic-steps", tr.critic_steps, "Critic updates per visited dataset");
    train_cmd->add_option("--cem-population", tr.cem_population, "CEM samples per iteration during training");
    train_cmd->add_option("--cem-iterations", tr.cem_iterations, "CEM iterations during training");
    train_cmd->add_option("--cem-elite-fraction", tr.cem_elite_fraction, "CEM elite fraction during training");
    train_cmd->add_option("--gae-epochs", tr.gae_epochs, "Autoencoder pretraining epochs");
    train_cmd->add_option("--learning-rate", tr.learning_rate, "RMSprop learning rate");
    train_cmd->add_option("--clip", tr.clip, "Critic weight clip constant");
    train_cmd->add_flag("--no-standardize", tr.no_standardize, "Feed raw coordinates to the model");
    train_cmd->add_option("--seed", tr.seed, "Random seed");
    train_cmd->add_option("--tag", tr.tag, "Corpus tag stored in the checkpoint");
    train_cmd->add_option("--out", tr.out, "Checkpoint path");
    train_cmd->add_option("--report", tr.report, "Training report CSV (default: next to the checkpoint)");

    InferArgs cl;
    CLI::App* cluster_cmd = app.add_subcommand("cluster", "Cluster an unlabelled dataset");
    cluster_cmd->add_option("--model", cl.model, "Checkpoint");
    cluster_cmd->add_option("--data", cl.data, "Dataset CSV (any label column is ignored)");
    cluster_cmd->add_option("--seed", cl.seed, "Random seed");
    cluster_cmd->add_option("--out", cl.out, "Labels CSV (default: <data>.labels.csv)");
    add_cem_options(cluster_cmd, cl.cem);

    InferArgs sc;
    CLI::App* score_cmd = app.add_subcommand("score", "Print the metric value of one labeling");
    score_cmd->add_option("--model", sc.model, "Checkpoint");
    score_cmd->add_option("--data", sc.data, "Dataset CSV");
    score_cmd->add_option("--labels", sc.labels, "Labels CSV (default: the label column of --data)");

    InferArgs ab;
    CLI::App* ablate_cmd = app.add_subcommand("ablate", "Score corrupted copies of a labelled dataset");
    ablate_cmd->add_option("--model", ab.model, "Checkpoint");
    ablate_cmd->add_option("--data", ab.data, "Labelled dataset CSV");
    ablate_cmd->add_option("--labels", ab.labels, "Labels CSV (default: the label column of --data)");
    ablate_cmd->add_option("--copies", ab.copies, "Corrupted copies to score");
    ablate_cmd->add_option("--seed", ab.seed, "Random seed");
    ablate_cmd->add_option("--out", ab.out, "Curve CSV (default: <data>.ablation.csv)");

    InferArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Cluster every dataset of a labelled corpus and report ACC/NMI");
    eval_cmd->add_option("--model", ev.model, "Checkpoint");
    eval_cmd->add_option("--corpus", ev.corpus, "Labelled corpus manifest");
    eval_cmd->add_option("--seed", ev.seed, "Random seed");
    eval_cmd->add_option("--out", ev.out, "Report JSON (default: stdout)");
    eval_cmd->add_option("--csv", ev.csv, "Also write per-dataset rows as CSV");
    add_cem_options(eval_cmd, ev.cem);

    for (CLI::App* cmd : {gen_cmd, train_cmd, cluster_cmd, score_cmd, ablate_cmd, eval_cmd}) {
        add_threads(cmd);
        add_config(cmd);
    }

    CLI::App* active = nullptr;
    try {
        // Config values are spliced in right after the subcommand so that
        // later command-line occurrences win.
        std::vector<std::string> args(argv + 1, argv + argc);
        std::vector<std::string> merged;
        std::string config_path;
        std::size_t sub_pos = args.size();
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (sub_pos == args.size() && !args[i].empty() && args[i][0] != '-') sub_pos = i;
            if (args[i] == "--config" && i + 1 < args.size()) {
                config_path = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
            } else {
                merged.push_back(args[i]);
            }
        }
        if (!config_path.empty()) {
            if (sub_pos == args.size()) usage_error("--config needs a subcommand");
            CLI::App* cmd = app.get_subcommand_no_throw(args[sub_pos]);
            if (!cmd) usage_error("unknown subcommand '" + args[sub_pos] + "'");
            active = cmd;
            const auto tokens = config_tokens(cmd, config_path);
            const auto at = std::find(merged.begin(), merged.end(), args[sub_pos]);
            merged.insert(at + 1, tokens.begin(), tokens.end());
        }
        std::reverse(merged.begin(), merged.end());
        app.parse(merged);
    } catch (const CLI::CallForHelp&) {
        std::cout << (active ? active->help() : app.help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        for (CLI::App* cmd : app.get_subcommands()) active = cmd;
        std::cerr << "c2m: error[usage]: " << e.what() << "\n" << (active ? active->help() : app.help());
        return kExitUsage;
    }

    active = app.get_subcommands().front();
    try {
        if (active == gen_cmd) return run_gen(gen);
        if (active == train_cmd) return run_train(tr);
        if (active == cluster_cmd) return run_cluster(cl);
        if (active == score_cmd) return run_score(sc);
        if (active == ablate_cmd) return run_ablate(ab);
        return run_eval(ev);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "c2m: error[usage]: " << e.what() << "\n"
                  << "run 'c2m " << active->get_name() << " --help' for usage\n";
        return kExitUsage;
    } catch (const c2m::ValidationError& e) {
        std::cerr << "c2m: error[" << e.category() << "]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ShapeError& e) {
        std::cerr << "c2m: error[" << e.category() << "]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const c2m::ParseError& e) {
        std::cerr << "c2m: error[" << e.category() << "]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CheckpointError& e) {
        std::cerr << "c2m: error[" << e.category() << "]: " << e.what() << "\n";
        return kExitUsage;
    } catch (const c2m::Error& e) {
        std::cerr << "c2m: error[" << e.category() << "]: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "c2m: error[runtime]: " << e.what() << "\n";
        return kExitRuntime;
    }
}
