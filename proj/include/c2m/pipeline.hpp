#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "c2m/cem.hpp"
#include "c2m/critic.hpp"
#include "c2m/datasets.hpp"
#include "c2m/gae.hpp"

namespace c2m {

inline constexpr const char* kCheckpointVersion = "c2m-v1";

struct TrainConfig {
    std::size_t epochs = 10;
    // Sample datasets visited per epoch; each yields one critic update.
    std::size_t batch_size = 20;
    // Critic RMSprop steps per update.
    std::size_t critic_steps = 5;
    CemConfig cem{.population = 30, .elite_fraction = 0.1, .iterations = 15};
    RmspropConfig critic_optimizer;
    CriticConfig critic;
    GaeTrainConfig gae;
    ClusterNetShape net;
    // Center and rescale every point set before it is embedded or clustered.
    bool standardize = true;
    std::uint64_t seed = 0;
    std::string corpus_tag;

    // 20 datasets, 10 epochs.
    static TrainConfig standard();
    // 5 datasets, 1 epoch.
    static TrainConfig few_shots();
    void validate() const;
};

struct ModelMetadata {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t k = 50;
    std::string corpus_tag;
    std::uint64_t seed = 0;
    bool standardize = true;
    TrainConfig config;
};

/// The learned metric r = critic o embed, plus what is needed to apply it.
struct C2mModel {
    GaeModel gae;
    CriticModel critic;
    ModelMetadata meta;

    ClusterNetShape net_shape() const;
};

struct TrainRecord {
    std::size_t epoch = 0;
    std::size_t step = 0;
    std::size_t dataset_index = 0;
    // E[f(real)] - E[f(fake)] before the last critic step of this update.
    double critic_objective = 0.0;
    double train_acc = 0.0;
    std::size_t inferred_k = 0;
    // Largest |theta| after the update.
    double max_abs_weight = 0.0;
};

struct TrainReport {
    std::vector<TrainRecord> records;
    GaeTrainReport gae;
    // Largest |theta| observed after any single critic step.
    double max_abs_weight_any_step = 0.0;
};

// GAE pretraining on the corpus, then `epochs` rounds of: for each of
// batch_size sampled datasets, CEM clustering against a frozen snapshot of
// the critic, embedding of the truth and of the CEM labeling, and
// critic_steps WGAN updates on every (truth, CEM) pair gathered so far in
// the epoch. The critic learning rate decays at each epoch boundary.
C2mModel train(const Corpus& corpus, const TrainConfig& cfg, TrainReport* report = nullptr);

// Applies the model's preprocessing to raw points.
PointSet prepare_points(const C2mModel& model, const PointSet& raw);

// r(X, y) on raw points.
double metric(const C2mModel& model, const PointSet& raw, const Labeling& y);
// r for several labelings of the same raw points.
std::vector<double> metric_batch(const C2mModel& model, const PointSet& raw, std::span<const Labeling> ys,
                                 unsigned threads = 1);

struct ClusterResult {
    Labeling labels;
    double score = 0.0;
    std::size_t inferred_k = 0;
    CemState state;
};

// CEM search for the labeling maximizing the metric. Never sees labels.
ClusterResult cluster(const C2mModel& model, const PointSet& raw, const CemConfig& cfg, std::uint64_t seed);

// Inference-time CEM budget.
CemConfig inference_cem();

void save_model(const std::filesystem::path& path, const C2mModel& model);
std::string model_to_json(const C2mModel& model);
// Throws CheckpointError of kind Version, Shape or Corrupt.
C2mModel load_model(const std::filesystem::path& path);
C2mModel model_from_json(const std::string& text);

void save_train_report(const std::filesystem::path& path, const TrainReport& report);

}  // namespace c2m
