#include "c2m/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "c2m/config_json.hpp"
#include "c2m/metrics.hpp"

namespace c2m {

namespace fs = std::filesystem;
using json = nlohmann::json;

TrainConfig TrainConfig::standard() {
    TrainConfig c;
    c.epochs = 10;
    c.batch_size = 20;
    return c;
}

TrainConfig TrainConfig::few_shots() {
    TrainConfig c;
    c.epochs = 1;
    c.batch_size = 5;
    return c;
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || critic_steps < 1)
        throw ValidationError("train config: epochs, batch_size and critic_steps must be >= 1");
    cem.validate();
    if (gae.epochs < 1) throw ValidationError("train config: gae.epochs must be >= 1");
    if (net.hidden < 1 || net.clusters < 2) throw ValidationError("train config: bad cluster net shape");
}

ClusterNetShape C2mModel::net_shape() const {
    ClusterNetShape s = meta.config.net;
    s.input_dim = meta.d;
    s.clusters = meta.k;
    return s;
}

PointSet prepare_points(const C2mModel& model, const PointSet& raw) {
    if (raw.d() != model.meta.d) {
        throw ShapeError("model expects d=" + std::to_string(model.meta.d) + " but data has d=" +
                         std::to_string(raw.d()));
    }
    return model.meta.standardize ? standardize(raw) : raw;
}

namespace {

// Scores labelings of already-prepared points.
LabelingScorer prepared_scorer(const GaeModel& gae, const CriticModel& critic, unsigned threads) {
    return [&gae, &critic, threads](const PointSet& x, std::span<const Labeling> ys) {
        std::vector<Embedding> zs(ys.size());
        parallel_for(ys.size(), threads, [&](std::size_t i) { zs[i] = embed(gae, x, ys[i]); });
        return score_batch(critic, stack_embeddings(zs));
    };
}

}  // namespace

double metric(const C2mModel& model, const PointSet& raw, const Labeling& y) {
    return score(model.critic, embed(model.gae, prepare_points(model, raw), y));
}

std::vector<double> metric_batch(const C2mModel& model, const PointSet& raw, std::span<const Labeling> ys,
                                 unsigned threads) {
    if (ys.empty()) return {};
    return prepared_scorer(model.gae, model.critic, threads)(prepare_points(model, raw), ys);
}

C2mModel train(const Corpus& corpus, const TrainConfig& cfg, TrainReport* report) {
    cfg.validate();
    corpus.validate();
    if (corpus.role != Role::Train) throw ValidationError("train: corpus role must be 'train'");

    Corpus prepared = corpus;
    if (cfg.standardize)
        for (auto& ds : prepared.datasets) ds.points = standardize(ds.points);

    Rng rng(cfg.seed);
    TrainReport local;
    TrainReport& rep = report ? *report : local;
    rep = {};

    C2mModel model;
    model.meta.d = corpus.dim();
    model.meta.m = cfg.gae.latent;
    model.meta.k = cfg.net.clusters;
    model.meta.corpus_tag = cfg.corpus_tag;
    model.meta.seed = cfg.seed;
    model.meta.standardize = cfg.standardize;
    model.meta.config = cfg;

    GaeTrainConfig gae_cfg = cfg.gae;
    gae_cfg.seed = rng.next_seed();
    model.gae = train_gae(prepared, gae_cfg, &rep.gae);
    model.critic = CriticModel(embedding_length(model.gae.latent()), cfg.critic, rng.next_seed());
    RmspropState opt(model.critic.params(), cfg.critic_optimizer);
    const ClusterNetShape shape = model.net_shape();

    std::vector<std::size_t> order(prepared.datasets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        std::vector<Embedding> real, fake;
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            const std::size_t idx = order[b % order.size()];
            const SampleDataset& ds = prepared.datasets[idx];
            const Labeling& truth = *ds.truth;

            const CriticModel snapshot = model.critic;
            const CemResult found = cem_optimize(ds.points, prepared_scorer(model.gae, snapshot, cfg.cem.threads),
                                                 cfg.cem, rng.next_seed(), shape);
            real.push_back(embed(model.gae, ds.points, truth));
            fake.push_back(embed(model.gae, ds.points, found.labels));

            const Matrix real_batch = stack_embeddings(real);
            const Matrix fake_batch = stack_embeddings(fake);
            double objective = 0.0;
            for (std::size_t s = 0; s < cfg.critic_steps; ++s) {
                objective = wgan_step(model.critic, real_batch, fake_batch, opt).objective;
                rep.max_abs_weight_any_step = std::max(rep.max_abs_weight_any_step, model.critic.params().max_abs());
            }
            rep.records.push_back({epoch, step++, idx, objective, acc(found.labels, truth),
                                   distinct_count(found.labels), model.critic.params().max_abs()});
        }
        opt.end_epoch();
    }
    return model;
}

CemConfig inference_cem() {
    CemConfig c;
    c.population = 50;
    c.iterations = 30;
    return c;
}

ClusterResult cluster(const C2mModel& model, const PointSet& raw, const CemConfig& cfg, std::uint64_t seed) {
    const PointSet x = prepare_points(model, raw);
    CemResult r = cem_optimize(x, prepared_scorer(model.gae, model.critic, cfg.threads), cfg, seed, model.net_shape());
    ClusterResult out;
    out.inferred_k = distinct_count(r.labels);
    out.labels = std::move(r.labels);
    out.score = r.score;
    out.state = std::move(r.state);
    return out;
}

namespace {

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw CheckpointError(CheckpointError::Kind::Shape, "matrix declared " + std::to_string(rows) + "x" +
                                                                std::to_string(cols) + " holds " +
                                                                std::to_string(data.size()) + " values");
    }
    return Matrix(rows, cols, std::move(data));
}

}  // namespace

std::string model_to_json(const C2mModel& model) {
    json params = json::array();
    for (const auto& e : model.critic.params())
        params.push_back({{"name", e.name}, {"value", matrix_json(e.value)}});
    json j = {
        {"version", kCheckpointVersion},
        {"metadata",
         {{"d", model.meta.d},
          {"m", model.meta.m},
          {"k", model.meta.k},
          {"corpus_tag", model.meta.corpus_tag},
          {"seed", model.meta.seed},
          {"standardize", model.meta.standardize},
          {"config", model.meta.config}}},
        {"gae", {{"W0", matrix_json(model.gae.w0())}, {"W1", matrix_json(model.gae.w1())}}},
        {"critic", {{"leaky_alpha", model.critic.leaky_alpha()}, {"clip", model.critic.clip()}, {"params", params}}},
    };
    return j.dump(1) + "\n";
}

void save_model(const fs::path& path, const C2mModel& model) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << model_to_json(model);
    if (!out) throw IoError("write failed for " + path.string());
}

C2mModel model_from_json(const std::string& text) {
    using Kind = CheckpointError::Kind;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CheckpointError(Kind::Corrupt, std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("version") || !j["version"].is_string())
        throw CheckpointError(Kind::Version, "checkpoint has no version tag");
    if (j["version"].get<std::string>() != kCheckpointVersion) {
        throw CheckpointError(Kind::Version, "checkpoint version '" + j["version"].get<std::string>() +
                                                 "' is not " + kCheckpointVersion);
    }
    C2mModel model;
    try {
        const json& meta = j.at("metadata");
        model.meta.d = meta.at("d").get<std::size_t>();
        model.meta.m = meta.at("m").get<std::size_t>();
        model.meta.k = meta.at("k").get<std::size_t>();
        model.meta.corpus_tag = meta.at("corpus_tag").get<std::string>();
        model.meta.seed = meta.at("seed").get<std::uint64_t>();
        model.meta.standardize = meta.at("standardize").get<bool>();
        from_json(meta.at("config"), model.meta.config);

        model.gae = GaeModel(matrix_from(j.at("gae").at("W0")), matrix_from(j.at("gae").at("W1")));
        const json& cj = j.at("critic");
        ParameterSet params;
        for (const auto& p : cj.at("params")) params.add(p.at("name").get<std::string>(), matrix_from(p.at("value")));
        model.critic = CriticModel(std::move(params), cj.at("leaky_alpha").get<double>(), cj.at("clip").get<double>());
    } catch (const CheckpointError&) {
        throw;
    } catch (const ShapeError& e) {
        throw CheckpointError(Kind::Shape, e.what());
    } catch (const json::exception& e) {
        throw CheckpointError(Kind::Corrupt, std::string("checkpoint is missing fields: ") + e.what());
    } catch (const Error& e) {
        throw CheckpointError(Kind::Corrupt, e.what());
    }

    if (model.gae.input_dim() != model.meta.d)
        throw CheckpointError(Kind::Shape, "encoder input width does not match metadata d");
    if (model.gae.latent() != model.meta.m)
        throw CheckpointError(Kind::Shape, "encoder latent width does not match metadata m");
    if (model.critic.input_dim() != embedding_length(model.meta.m))
        throw CheckpointError(Kind::Shape, "critic input width is not m(m+1)/2");
    if (model.meta.k < 2) throw CheckpointError(Kind::Shape, "cluster count k must be >= 2");
    return model;
}

C2mModel load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

void save_train_report(const fs::path& path, const TrainReport& report) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "epoch,dataset_index,critic_loss,train_acc,inferred_k\n";
    for (const auto& r : report.records) {
        out << r.epoch << ',' << r.dataset_index << ',' << json(r.critic_objective).dump() << ','
            << json(r.train_acc).dump() << ',' << r.inferred_k << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace c2m
