#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "c2m/metrics.hpp"
#include "c2m/pipeline.hpp"

namespace c2m {

struct DatasetEval {
    std::size_t index = 0;
    std::string family;
    std::size_t n = 0;
    std::size_t true_k = 0;
    std::size_t inferred_k = 0;
    double acc = 0.0;
    double nmi = 0.0;
    double score = 0.0;
};

struct EvalReport {
    std::vector<DatasetEval> datasets;
    double mean_acc = 0.0;
    double median_acc = 0.0;
    double mean_nmi = 0.0;
    double median_nmi = 0.0;
    CemConfig cem;
    std::uint64_t seed = 0;
    std::string model_tag;
};

// Clusters every dataset of a labelled corpus with the model and compares
// against the truth. Dataset i uses the i-th seed drawn from Rng(seed).
EvalReport evaluate_corpus(const C2mModel& model, const Corpus& corpus, const CemConfig& cem, std::uint64_t seed);

// Fills the aggregate fields from `datasets`.
void summarize(EvalReport& report);

std::string eval_report_json(const EvalReport& report);

struct AblationPoint {
    std::size_t mislabels = 0;
    std::size_t corrected = 0;
    double score = 0.0;
};

struct AblationCurve {
    std::vector<AblationPoint> points;
};

// `copies` corrupted copies of ds scored by the model. The first copy is
// uncorrupted, the second has every point relabeled, the rest draw their
// mislabel count uniformly from [0, n].
AblationCurve ablation(const C2mModel& model, const SampleDataset& ds, std::size_t copies, std::uint64_t seed,
                       unsigned threads = 1);

// Spearman correlation between corrected mislabel count and score.
double ablation_spearman(const AblationCurve& curve);

// Alternative labelings for the ranking protocol: the final elite of one
// CEM run against the model, then random labelings until `count` are
// available.
std::vector<Labeling> make_candidates(const C2mModel& model, const SampleDataset& ds, std::size_t count,
                                      const CemConfig& cem, std::uint64_t seed);

struct RankEntry {
    std::size_t index = 0;
    // 1-based rank of the truth; ties with alternatives count in its favor.
    std::size_t rank = 0;
    std::size_t candidates = 0;
    double truth_score = 0.0;
};

struct RankReport {
    std::vector<RankEntry> datasets;
    double best = 0.0;
    double top3 = 0.0;
};

// Ranks each dataset's truth among itself plus alternatives[i].
RankReport rank_report(const C2mModel& model, const Corpus& corpus,
                       const std::vector<std::vector<Labeling>>& alternatives, unsigned threads = 1);

void emit_plot_data(const AblationCurve& curve, const std::filesystem::path& path);
void emit_plot_data(const EvalReport& report, const std::filesystem::path& path);
void emit_plot_data(const RankReport& report, const std::filesystem::path& path);

}  // namespace c2m
