#include "c2m/config_json.hpp"

#include <initializer_list>
#include <string_view>

namespace c2m {

using json = nlohmann::json;

namespace {

void require_known(const json& j, std::string_view what, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto k : keys) ok = ok || key == k;
        if (!ok) throw ValidationError("unknown key '" + key + "' in " + std::string(what));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

void to_json(json& j, const RmspropConfig& c) {
    j = {{"learning_rate", c.learning_rate}, {"rho", c.rho}, {"epsilon", c.epsilon}, {"epoch_decay", c.epoch_decay}};
}

void from_json(const json& j, RmspropConfig& c) {
    require_known(j, "optimizer config", {"learning_rate", "rho", "epsilon", "epoch_decay"});
    read(j, "learning_rate", c.learning_rate);
    read(j, "rho", c.rho);
    read(j, "epsilon", c.epsilon);
    read(j, "epoch_decay", c.epoch_decay);
}

void to_json(json& j, const CemConfig& c) {
    j = {{"population", c.population}, {"elite_fraction", c.elite_fraction}, {"iterations", c.iterations},
         {"init_mean", c.init_mean},   {"init_stddev", c.init_stddev},       {"sigma_floor", c.sigma_floor}};
}

void from_json(const json& j, CemConfig& c) {
    require_known(j, "cem config",
                  {"population", "elite_fraction", "iterations", "init_mean", "init_stddev", "sigma_floor"});
    read(j, "population", c.population);
    read(j, "elite_fraction", c.elite_fraction);
    read(j, "iterations", c.iterations);
    read(j, "init_mean", c.init_mean);
    read(j, "init_stddev", c.init_stddev);
    read(j, "sigma_floor", c.sigma_floor);
}

void to_json(json& j, const CriticConfig& c) {
    j = {{"hidden", c.hidden}, {"leaky_alpha", c.leaky_alpha}, {"clip", c.clip}};
}

void from_json(const json& j, CriticConfig& c) {
    require_known(j, "critic config", {"hidden", "leaky_alpha", "clip"});
    read(j, "hidden", c.hidden);
    read(j, "leaky_alpha", c.leaky_alpha);
    read(j, "clip", c.clip);
}

void to_json(json& j, const GaeTrainConfig& c) {
    j = {{"hidden", c.hidden}, {"latent", c.latent}, {"epochs", c.epochs},
         {"optimizer", c.optimizer}, {"max_random_clusters", c.max_random_clusters}};
}

void from_json(const json& j, GaeTrainConfig& c) {
    require_known(j, "gae config", {"hidden", "latent", "epochs", "optimizer", "max_random_clusters"});
    read(j, "hidden", c.hidden);
    read(j, "latent", c.latent);
    read(j, "epochs", c.epochs);
    if (j.contains("optimizer")) from_json(j.at("optimizer"), c.optimizer);
    read(j, "max_random_clusters", c.max_random_clusters);
}

void to_json(json& j, const ClusterNetShape& c) {
    j = {{"hidden", c.hidden}, {"clusters", c.clusters}};
}

void from_json(const json& j, ClusterNetShape& c) {
    require_known(j, "cluster net config", {"hidden", "clusters"});
    read(j, "hidden", c.hidden);
    read(j, "clusters", c.clusters);
}

void to_json(json& j, const TrainConfig& c) {
    j = {{"epochs", c.epochs},
         {"batch_size", c.batch_size},
         {"critic_steps", c.critic_steps},
         {"cem", c.cem},
         {"critic_optimizer", c.critic_optimizer},
         {"critic", c.critic},
         {"gae", c.gae},
         {"net", c.net},
         {"standardize", c.standardize},
         {"seed", c.seed},
         {"corpus_tag", c.corpus_tag}};
}

void from_json(const json& j, TrainConfig& c) {
    require_known(j, "train config",
                  {"epochs", "batch_size", "critic_steps", "cem", "critic_optimizer", "critic", "gae", "net",
                   "standardize", "seed", "corpus_tag"});
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "critic_steps", c.critic_steps);
    if (j.contains("cem")) from_json(j.at("cem"), c.cem);
    if (j.contains("critic_optimizer")) from_json(j.at("critic_optimizer"), c.critic_optimizer);
    if (j.contains("critic")) from_json(j.at("critic"), c.critic);
    if (j.contains("gae")) from_json(j.at("gae"), c.gae);
    if (j.contains("net")) from_json(j.at("net"), c.net);
    read(j, "standardize", c.standardize);
    read(j, "seed", c.seed);
    read(j, "corpus_tag", c.corpus_tag);
}

}  // namespace c2m
