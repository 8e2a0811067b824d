#include "c2m/eval.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "c2m/config_json.hpp"

namespace c2m {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Shortest round-trip text for a double, shared by every CSV writer here.
std::string num(double x) { return json(x).dump(); }

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void summarize(EvalReport& report) {
    std::vector<double> accs, nmis;
    for (const auto& d : report.datasets) {
        accs.push_back(d.acc);
        nmis.push_back(d.nmi);
    }
    report.mean_acc = mean(accs);
    report.median_acc = median(accs);
    report.mean_nmi = mean(nmis);
    report.median_nmi = median(nmis);
}

EvalReport evaluate_corpus(const C2mModel& model, const Corpus& corpus, const CemConfig& cem, std::uint64_t seed) {
    corpus.validate();
    EvalReport report;
    report.cem = cem;
    report.seed = seed;
    report.model_tag = model.meta.corpus_tag;
    Rng rng(seed);
    for (std::size_t i = 0; i < corpus.datasets.size(); ++i) {
        const SampleDataset& ds = corpus.datasets[i];
        const ClusterResult r = cluster(model, ds.points, cem, rng.next_seed());
        DatasetEval e;
        e.index = i;
        e.family = ds.origin.family;
        e.n = ds.points.n();
        e.true_k = distinct_count(*ds.truth);
        e.inferred_k = r.inferred_k;
        e.acc = acc(r.labels, *ds.truth);
        e.nmi = nmi(r.labels, *ds.truth);
        e.score = r.score;
        report.datasets.push_back(std::move(e));
    }
    summarize(report);
    return report;
}

std::string eval_report_json(const EvalReport& report) {
    json rows = json::array();
    for (const auto& d : report.datasets) {
        rows.push_back({{"index", d.index},
                        {"family", d.family},
                        {"n", d.n},
                        {"true_k", d.true_k},
                        {"inferred_k", d.inferred_k},
                        {"acc", d.acc},
                        {"nmi", d.nmi},
                        {"score", d.score}});
    }
    const json j = {{"datasets", rows},
                    {"count", report.datasets.size()},
                    {"mean_acc", report.mean_acc},
                    {"median_acc", report.median_acc},
                    {"mean_nmi", report.mean_nmi},
                    {"median_nmi", report.median_nmi},
                    {"config", {{"cem", report.cem}, {"seed", report.seed}, {"model_tag", report.model_tag}}}};
    return j.dump(1) + "\n";
}

AblationCurve ablation(const C2mModel& model, const SampleDataset& ds, std::size_t copies, std::uint64_t seed,
                       unsigned threads) {
    if (!ds.truth) throw ValidationError("ablation: dataset has no labels");
    const std::size_t n = ds.points.n();
    Rng rng(seed);
    std::vector<Labeling> labelings;
    AblationCurve curve;
    for (std::size_t c = 0; c < copies; ++c) {
        const std::size_t count = c == 0 ? 0 : c == 1 ? n : rng.uniform_index(0, n);
        SampleDataset copy = corrupt(ds, count, rng.next_seed());
        curve.points.push_back({count, corrected_mislabels(*copy.truth, *ds.truth), 0.0});
        labelings.push_back(std::move(*copy.truth));
    }
    const std::vector<double> scores = metric_batch(model, ds.points, labelings, threads);
    for (std::size_t c = 0; c < copies; ++c) curve.points[c].score = scores[c];
    return curve;
}

double ablation_spearman(const AblationCurve& curve) {
    std::vector<double> counts, scores;
    for (const auto& p : curve.points) {
        counts.push_back(static_cast<double>(p.corrected));
        scores.push_back(p.score);
    }
    return spearman(counts, scores);
}

std::vector<Labeling> make_candidates(const C2mModel& model, const SampleDataset& ds, std::size_t count,
                                      const CemConfig& cem, std::uint64_t seed) {
    Rng rng(seed);
    const ClusterResult r = cluster(model, ds.points, cem, rng.next_seed());
    const PointSet x = prepare_points(model, ds.points);
    std::vector<Labeling> out;
    for (const auto& w : r.state.final_elite) {
        if (out.size() == count) break;
        out.push_back(assign_clusters(model.net_shape(), w, x));
    }
    while (out.size() < count) out.push_back(random_labeling(ds.points, 9, rng));
    return out;
}

RankReport rank_report(const C2mModel& model, const Corpus& corpus,
                       const std::vector<std::vector<Labeling>>& alternatives, unsigned threads) {
    if (alternatives.size() != corpus.datasets.size()) {
        throw ShapeError("rank_report: " + std::to_string(alternatives.size()) + " candidate lists for " +
                         std::to_string(corpus.datasets.size()) + " datasets");
    }
    RankReport report;
    std::size_t best = 0, top3 = 0;
    for (std::size_t i = 0; i < corpus.datasets.size(); ++i) {
        const SampleDataset& ds = corpus.datasets[i];
        if (!ds.truth) throw ValidationError("rank_report: dataset " + std::to_string(i) + " has no labels");
        std::vector<Labeling> all{*ds.truth};
        all.insert(all.end(), alternatives[i].begin(), alternatives[i].end());
        const std::vector<double> s = metric_batch(model, ds.points, all, threads);
        RankEntry e;
        e.index = i;
        e.candidates = all.size();
        e.truth_score = s[0];
        e.rank = 1 + static_cast<std::size_t>(std::count_if(s.begin() + 1, s.end(), [&](double v) { return v > s[0]; }));
        best += e.rank == 1;
        top3 += e.rank <= 3;
        report.datasets.push_back(e);
    }
    if (!report.datasets.empty()) {
        const double n = static_cast<double>(report.datasets.size());
        report.best = static_cast<double>(best) / n;
        report.top3 = static_cast<double>(top3) / n;
    }
    return report;
}

void emit_plot_data(const AblationCurve& curve, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "# one row per corrupted copy: raw mislabel count, permutation-corrected count n(1-acc), critic score\n";
    out << "copy,mislabels,corrected,score\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        out << i << ',' << p.mislabels << ',' << p.corrected << ',' << num(p.score) << '\n';
    }
    finish(out, path);
}

void emit_plot_data(const EvalReport& report, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "# one row per evaluated dataset: clustering accuracy, NMI and cluster counts\n";
    out << "index,family,n,true_k,inferred_k,acc,nmi,score\n";
    for (const auto& d : report.datasets) {
        out << d.index << ',' << d.family << ',' << d.n << ',' << d.true_k << ',' << d.inferred_k << ','
            << num(d.acc) << ',' << num(d.nmi) << ',' << num(d.score) << '\n';
    }
    finish(out, path);
}

void emit_plot_data(const RankReport& report, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "# one row per dataset: rank of the true labeling among all candidates (1 = best, ties favor truth)\n";
    out << "index,rank,candidates,truth_score\n";
    for (const auto& e : report.datasets)
        out << e.index << ',' << e.rank << ',' << e.candidates << ',' << num(e.truth_score) << '\n';
    finish(out, path);
}

}  // namespace c2m
