// Acceptance harness: one PASS/FAIL line per criterion, thresholds pinned
// below. Criteria 5-9 are exact or property checks; 1-4 are end-to-end
// measurements that train real models and take several minutes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "c2m/eval.hpp"
#include "c2m/graphs.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace c2m;

namespace {

namespace limits {
// Criterion 1: median over seeds of the per-family mean ACC / NMI.
constexpr double kAccLinear = 0.85;     // blobs, anisotropic
constexpr double kAccNonLinear = 0.75;  // circles, moons
constexpr double kNmiLinear = 0.75;
constexpr double kNmiNonLinear = 0.60;
constexpr std::size_t kSeeds = 3;
constexpr std::size_t kTrainDatasets = 20;
constexpr std::size_t kPoints = 200;
constexpr std::size_t kTestDatasets = 50;
// Criterion 2
constexpr double kFewShotGap = 0.10;
constexpr std::size_t kFewShotDatasets = 5;
// Criterion 3
constexpr std::size_t kAblationDatasets = 10;
constexpr std::size_t kAblationCopies = 50;
constexpr double kAblationRho = -0.8;
constexpr std::size_t kAblationMinPassing = 8;
constexpr double kSwapRangeFraction = 0.05;
// Criterion 4
constexpr std::size_t kCandidates = 10;
constexpr double kBest = 0.70;
constexpr double kTop3 = 0.85;
// Criterion 5
constexpr std::size_t kAccInstances = 1000;
constexpr double kNmiTol = 1e-12;
// Criterion 6
constexpr std::size_t kGradConfigs = 20;
constexpr double kGradTol = 1e-4;
// Criterion 7
constexpr std::size_t kInvarianceGraphs = 100;
// Criterion 8
constexpr double kCemTol = 1e-2;
constexpr std::size_t kCemIterations = 50;
}  // namespace limits

struct Outcome {
    int id = 0;
    bool pass = false;
    std::string title;
    std::string detail;
};

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

const std::vector<Family> kFamilies{Family::Blobs, Family::Anisotropic, Family::Moons, Family::Circles};

Corpus train_corpus(std::uint64_t seed, std::size_t datasets) {
    CorpusSpec spec;
    spec.family = Family::Blobs;
    spec.pools = datasets;
    spec.samples = datasets;
    spec.points = limits::kPoints;
    spec.seed = seed;
    return make_corpus(spec);
}

Corpus test_corpus(Family family, std::uint64_t seed) {
    CorpusSpec spec;
    spec.family = family;
    spec.pools = limits::kTestDatasets;
    spec.samples = limits::kTestDatasets;
    spec.points = limits::kPoints;
    spec.role = Role::Test;
    spec.seed = 1000 + seed;
    return make_corpus(spec);
}

// Trained models are shared between the end-to-end criteria.
struct Lab {
    unsigned threads = 1;
    std::map<std::uint64_t, C2mModel> standard;
    std::map<std::uint64_t, TrainReport> standard_reports;
    std::map<std::pair<Family, std::uint64_t>, EvalReport> evals;

    const C2mModel& standard_model(std::uint64_t seed) {
        auto it = standard.find(seed);
        if (it != standard.end()) return it->second;
        TrainConfig cfg = TrainConfig::standard();
        cfg.seed = seed;
        cfg.cem.threads = threads;
        cfg.corpus_tag = "blobs-" + std::to_string(seed);
        const auto t0 = std::chrono::steady_clock::now();
        TrainReport rep;
        C2mModel m = train(train_corpus(seed, limits::kTrainDatasets), cfg, &rep);
        std::cerr << "  trained standard model seed " << seed << " in "
                  << fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1) << " s\n";
        standard_reports[seed] = std::move(rep);
        return standard.emplace(seed, std::move(m)).first->second;
    }

    const EvalReport& evaluation(Family f, std::uint64_t seed) {
        const auto key = std::make_pair(f, seed);
        auto it = evals.find(key);
        if (it != evals.end()) return it->second;
        CemConfig cem = inference_cem();
        cem.threads = threads;
        EvalReport r = evaluate_corpus(standard_model(seed), test_corpus(f, seed), cem, seed);
        return evals.emplace(key, std::move(r)).first->second;
    }
};

Outcome criterion1(Lab& lab) {
    Outcome o{1, true, "synthetic transfer: blobs-trained metric clusters all four families", ""};
    std::ostringstream d;
    for (Family f : kFamilies) {
        std::vector<double> accs, nmis;
        for (std::uint64_t s = 1; s <= limits::kSeeds; ++s) {
            const EvalReport& r = lab.evaluation(f, s);
            accs.push_back(r.mean_acc);
            nmis.push_back(r.mean_nmi);
        }
        const bool linear = f == Family::Blobs || f == Family::Anisotropic;
        const double acc_min = linear ? limits::kAccLinear : limits::kAccNonLinear;
        const double nmi_min = linear ? limits::kNmiLinear : limits::kNmiNonLinear;
        const double acc_med = median(accs), nmi_med = median(nmis);
        o.pass = o.pass && acc_med >= acc_min && nmi_med >= nmi_min;
        d << family_name(f) << " ACC " << fixed(acc_med) << " (>=" << fixed(acc_min, 2) << ") NMI " << fixed(nmi_med)
          << " (>=" << fixed(nmi_min, 2) << "); ";
    }
    o.detail = d.str();
    return o;
}

Outcome criterion2(Lab& lab) {
    Outcome o{2, false, "few-shots parity: 5 datasets x 1 epoch within 0.10 blobs ACC of standard", ""};
    std::vector<double> few, standard;
    for (std::uint64_t s = 1; s <= limits::kSeeds; ++s) {
        TrainConfig cfg = TrainConfig::few_shots();
        cfg.seed = s;
        cfg.cem.threads = lab.threads;
        const C2mModel m = train(train_corpus(s, limits::kFewShotDatasets), cfg);
        CemConfig cem = inference_cem();
        cem.threads = lab.threads;
        few.push_back(evaluate_corpus(m, test_corpus(Family::Blobs, s), cem, s).mean_acc);
        standard.push_back(lab.evaluation(Family::Blobs, s).mean_acc);
    }
    const double gap = std::abs(median(few) - median(standard));
    o.pass = gap <= limits::kFewShotGap;
    o.detail = "few-shots ACC " + fixed(median(few)) + ", standard ACC " + fixed(median(standard)) + ", gap " +
               fixed(gap) + " (<=" + fixed(limits::kFewShotGap, 2) + ")";
    return o;
}

Outcome criterion3(Lab& lab) {
    Outcome o{3, false, "ablation ordering: score falls with corrected mislabels; label swap is a plateau", ""};
    const C2mModel& model = lab.standard_model(1);
    Rng rng(31);

    std::size_t ordered = 0, used = 0;
    std::vector<std::string> rhos;
    for (std::uint64_t seed = 5000; used < limits::kAblationDatasets; ++seed) {
        SampleDataset ds = gen_family(Family::Blobs, limits::kPoints, seed);
        if (distinct_count(*ds.truth) < 3) continue;
        const AblationCurve c = ablation(model, ds, limits::kAblationCopies, rng.next_seed(), lab.threads);
        const double rho = ablation_spearman(c);
        ordered += rho <= limits::kAblationRho;
        rhos.push_back(fixed(rho, 2));
        ++used;
    }

    std::size_t plateaus = 0;
    const std::size_t moons = limits::kAblationDatasets;
    double worst = 0.0;
    for (std::uint64_t seed = 6000; seed < 6000 + moons; ++seed) {
        const SampleDataset ds = gen_family(Family::Moons, limits::kPoints, seed);
        const AblationCurve c = ablation(model, ds, limits::kAblationCopies, rng.next_seed(), lab.threads);
        double lo = c.points[0].score, hi = lo;
        for (const auto& p : c.points) {
            lo = std::min(lo, p.score);
            hi = std::max(hi, p.score);
        }
        // copy 1 relabels every point, which on two clusters is the full swap
        const double gap = std::abs(c.points[1].score - c.points[0].score);
        const double frac = hi > lo ? gap / (hi - lo) : 0.0;
        worst = std::max(worst, frac);
        plateaus += frac <= limits::kSwapRangeFraction;
    }

    o.pass = ordered >= limits::kAblationMinPassing && plateaus == moons;
    std::string joined;
    for (const auto& r : rhos) joined += (joined.empty() ? "" : " ") + r;
    o.detail = "rho<=-0.8 on " + std::to_string(ordered) + "/" + std::to_string(used) + " blobs datasets (need " +
               std::to_string(limits::kAblationMinPassing) + "; rho: " + joined + "); moons swap plateau " +
               std::to_string(plateaus) + "/" + std::to_string(moons) + " (worst gap " + fixed(100 * worst, 2) +
               "% of range)";
    return o;
}

Outcome criterion4(Lab& lab) {
    Outcome o{4, false, "critic ranking: truth among 10 candidates, Best >= 70% and Top-3 >= 85%", ""};
    const C2mModel& model = lab.standard_model(1);
    const Corpus corpus = test_corpus(Family::Blobs, 1);
    CemConfig cem = inference_cem();
    cem.threads = lab.threads;
    Rng rng(41);
    std::vector<std::vector<Labeling>> alternatives;
    for (const auto& ds : corpus.datasets)
        alternatives.push_back(make_candidates(model, ds, limits::kCandidates - 1, cem, rng.next_seed()));
    const RankReport r = rank_report(model, corpus, alternatives, lab.threads);
    o.pass = r.best >= limits::kBest && r.top3 >= limits::kTop3;
    o.detail = "Best " + fixed(100 * r.best, 1) + "%, Top-3 " + fixed(100 * r.top3, 1) + "% over " +
               std::to_string(r.datasets.size()) + " blobs datasets";
    return o;
}

Outcome criterion5() {
    Outcome o{5, true, "acc equals exhaustive permutation search; nmi self-tests", ""};
    Rng rng(51);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < limits::kAccInstances; ++t) {
        const std::size_t n = rng.uniform_index(1, 12);
        const std::size_t kp = rng.uniform_index(1, 6), kt = rng.uniform_index(1, 6);
        Labeling pred(n), truth(n);
        for (auto& l : pred) l = static_cast<Label>(rng.uniform_index(0, kp - 1));
        for (auto& l : truth) l = static_cast<Label>(rng.uniform_index(0, kt - 1));
        mismatches += acc(pred, truth) != oracle::brute_force_acc(pred, truth);
    }

    double identity_dev = 0.0, independent_dev = 0.0;
    std::size_t perm_breaks = 0;
    for (std::size_t t = 0; t < 200; ++t) {
        const std::size_t n = rng.uniform_index(4, 60);
        const std::size_t k = rng.uniform_index(2, 6);
        Labeling a(n), b(n);
        for (auto& l : a) l = static_cast<Label>(rng.uniform_index(0, k - 1));
        for (auto& l : b) l = static_cast<Label>(rng.uniform_index(0, k - 1));
        if (distinct_count(a) < 2) a[0] = a[0] == 0 ? 1 : 0;
        identity_dev = std::max(identity_dev, std::abs(nmi(a, a) - 1.0));
        std::vector<Label> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        Labeling pa = a;
        for (auto& l : pa) l = perm[static_cast<std::size_t>(l)];
        perm_breaks += nmi(pa, b) != nmi(a, b) || nmi(pa, a) != nmi(a, a);

        // a product partition: every (row, column) cell holds the same count
        const std::size_t p = rng.uniform_index(2, 5), q = rng.uniform_index(2, 5), rep = rng.uniform_index(1, 4);
        Labeling u, v;
        for (std::size_t i = 0; i < p * q * rep; ++i) {
            u.push_back(static_cast<Label>(i % p));
            v.push_back(static_cast<Label>((i / p) % q));
        }
        independent_dev = std::max(independent_dev, std::abs(nmi(u, v)));
    }
    o.pass = mismatches == 0 && perm_breaks == 0 && identity_dev <= limits::kNmiTol &&
             independent_dev <= limits::kNmiTol;
    o.detail = std::to_string(mismatches) + " acc mismatches in " + std::to_string(limits::kAccInstances) +
               " instances; nmi identity dev " + sci(identity_dev) + ", permutation breaks " +
               std::to_string(perm_breaks) + ", independent dev " + sci(independent_dev);
    return o;
}

Outcome criterion6(Lab& lab) {
    Outcome o{6, false, "finite-difference gradients and the critic weight box", ""};
    Rng rng(61);
    double gae_worst = 0.0, critic_worst = 0.0;
    for (std::size_t t = 0; t < limits::kGradConfigs; ++t) {
        const std::size_t n = rng.uniform_index(3, 9), d = rng.uniform_index(1, 4);
        const std::size_t h = rng.uniform_index(2, 8), m = rng.uniform_index(1, 5);
        Matrix x(n, d);
        for (double& v : x.data()) v = rng.normal(0, 1.5);
        Labeling y(n);
        for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, 3));
        const ClusterGraph g = build_graph(PointSet(x), y);
        const GaeModel gae(d, h, m, rng.next_seed());
        auto loss = [&](const ParameterSet& p) { return reconstruction_loss(GaeModel(p[0], p[1]), g); };
        gae_worst = std::max(
            gae_worst, finite_diff_check(gae.params(), loss, reconstruction_backward(gae, g).grads).max_deviation);

        // The critic objective E[f(fake)] - E[f(real)] on random batches.
        const std::size_t e = rng.uniform_index(2, 10);
        CriticConfig cc;
        cc.hidden = {rng.uniform_index(2, 8), rng.uniform_index(2, 8), rng.uniform_index(2, 8)};
        cc.clip = 0.5;
        const CriticModel critic(e, cc, rng.next_seed());
        const std::size_t br = rng.uniform_index(1, 5), bf = rng.uniform_index(1, 5);
        Matrix real(br, e), fake(bf, e);
        for (double& v : real.data()) v = rng.normal(0, 2);
        for (double& v : fake.data()) v = rng.normal(0, 2);
        auto wgan = [&](const ParameterSet& p) {
            const CriticModel c(p, critic.leaky_alpha(), critic.clip());
            const auto sr = score_batch(c, real), sf = score_batch(c, fake);
            return std::accumulate(sf.begin(), sf.end(), 0.0) / static_cast<double>(bf) -
                   std::accumulate(sr.begin(), sr.end(), 0.0) / static_cast<double>(br);
        };
        ParameterSet grads = critic_backward(critic, real, Matrix(br, 1, -1.0 / static_cast<double>(br)));
        const ParameterSet gf = critic_backward(critic, fake, Matrix(bf, 1, 1.0 / static_cast<double>(bf)));
        for (std::size_t i = 0; i < grads.size(); ++i) grads[i] = add(grads[i], gf[i]);
        critic_worst = std::max(critic_worst, finite_diff_check(critic.params(), wgan, grads).max_deviation);
    }

    const C2mModel& model = lab.standard_model(1);
    const TrainReport& rep = lab.standard_reports.at(1);
    const double clip = model.critic.clip();
    const bool boxed = rep.max_abs_weight_any_step <= clip && model.critic.params().max_abs() <= clip;
    o.pass = gae_worst <= limits::kGradTol && critic_worst <= limits::kGradTol && boxed;
    o.detail = "worst relative deviation GAE " + sci(gae_worst) + ", critic " +
               sci(critic_worst) + " (<=1e-4, " + std::to_string(limits::kGradConfigs) +
               " configs each); max |theta| over " + std::to_string(rep.records.size() * 5) + " steps " +
               sci(rep.max_abs_weight_any_step) + " (c=" + sci(clip) + ")";
    return o;
}

Outcome criterion7() {
    Outcome o{7, true, "embedding invariance is bitwise; length is m(m+1)/2", ""};
    Rng rng(71);
    std::size_t broken = 0;
    for (std::size_t t = 0; t < limits::kInvarianceGraphs; ++t) {
        const std::size_t n = rng.uniform_index(2, 40), d = rng.uniform_index(1, 4), k = rng.uniform_index(1, 7);
        Matrix x(n, d);
        for (double& v : x.data()) v = rng.normal(0, 2);
        Labeling y(n);
        for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, k - 1));
        const GaeModel gae(d, 8, 5, rng.next_seed());

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        std::vector<Label> relabel(k);
        std::iota(relabel.begin(), relabel.end(), 0);
        std::shuffle(relabel.begin(), relabel.end(), rng.engine());
        Matrix px(n, d);
        Labeling py(n), ry(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) px(i, j) = x(order[i], j);
            py[i] = y[order[i]];
            ry[i] = relabel[static_cast<std::size_t>(y[i])];
        }
        const PointSet pts(x), ppts(px);
        const Embedding base = embed(gae, build_graph(pts, y));
        broken += embed(gae, build_graph(ppts, py)) != base;
        broken += embed(gae, build_graph(pts, ry)) != base;
        broken += embed(gae, pts, y) != base;
        broken += embed(gae, ppts, py) != base;
    }
    std::string lengths;
    for (std::size_t m : {2, 16, 50}) {
        const GaeModel gae(3, 8, m, 7);
        const PointSet pts(Matrix{{0.0, 1.0, 2.0}, {1.0, -1.0, 0.5}, {2.0, 0.0, -1.0}});
        const std::size_t len = embed(gae, pts, {0, 1, 1}).size();
        o.pass = o.pass && len == m * (m + 1) / 2;
        lengths += " m=" + std::to_string(m) + ":" + std::to_string(len);
    }
    o.pass = o.pass && broken == 0;
    o.detail = std::to_string(broken) + " non-identical embeddings over " +
               std::to_string(limits::kInvarianceGraphs) + " graphs; lengths" + lengths;
    return o;
}

bool monotone(const CemState& s) {
    for (std::size_t i = 1; i < s.history.size(); ++i)
        if (s.history[i].best_score < s.history[i - 1].best_score) return false;
    return true;
}

Outcome criterion8(Lab& lab) {
    Outcome o{8, true, "CEM converges on the quadratic oracle; best score never decreases", ""};
    Rng rng(81);
    CemConfig cfg;
    cfg.population = 100;
    cfg.elite_fraction = 0.1;
    cfg.iterations = limits::kCemIterations;
    double worst = 0.0;
    std::size_t runs = 0, non_monotone = 0;
    // r(w) = -|w - w0|^2: w0 = 0 is the reference oracle; the shifted
    // optima stay within one initial standard deviation of the start.
    const std::vector<std::size_t> dims{2, 10, 5, 10, 12};
    for (std::size_t t = 0; t < dims.size(); ++t) {
        const std::size_t dim = dims[t];
        std::vector<double> optimum(dim);
        for (double& v : optimum) v = t < 2 ? 0.0 : rng.uniform(-1, 1);
        const CemState s = cem_search(
            dim,
            [&](const std::vector<std::vector<double>>& pop) {
                std::vector<double> out;
                for (const auto& w : pop) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < dim; ++i) q -= (w[i] - optimum[i]) * (w[i] - optimum[i]);
                    out.push_back(q);
                }
                return out;
            },
            cfg, rng.next_seed());
        for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(s.mean[i] - optimum[i]));
        ++runs;
        non_monotone += !monotone(s);
    }

    // Every clustering run against a trained metric is logged too.
    const C2mModel& model = lab.standard_model(1);
    CemConfig icem = inference_cem();
    icem.threads = lab.threads;
    const Corpus corpus = test_corpus(Family::Moons, 1);
    for (std::size_t i = 0; i < 10; ++i) {
        non_monotone += !monotone(cluster(model, corpus.datasets[i].points, icem, rng.next_seed()).state);
        ++runs;
    }
    o.pass = worst <= limits::kCemTol && non_monotone == 0;
    o.detail = "max |mu - optimum| " + sci(worst) + " after " + std::to_string(limits::kCemIterations) +
               " iterations (<=1e-2); " + std::to_string(non_monotone) + "/" + std::to_string(runs) +
               " runs with a decreasing best score";
    return o;
}

Outcome criterion9(unsigned threads) {
    Outcome o{9, false, "image corpora are out of scope; any tabular feature CSV is accepted end to end", ""};
    test::TempDir dir;
    Rng rng(91);
    const std::size_t d = 64, n = 90;
    auto features = [&](std::size_t k, bool labelled, bool header, const fs::path& path) {
        std::ostringstream csv;
        if (header) {
            for (std::size_t j = 0; j < d; ++j) csv << (j ? "," : "") << "feat_" << j;
            csv << (labelled ? ",label\n" : "\n");
        }
        std::vector<std::vector<double>> centers(k, std::vector<double>(d));
        for (auto& c : centers)
            for (double& v : c) v = rng.normal(0, 3);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = i % k;
            for (std::size_t j = 0; j < d; ++j) csv << (j ? "," : "") << centers[c][j] + rng.normal(0, 0.5);
            if (labelled) csv << ',' << c;
            csv << '\n';
        }
        test::write_file(path, csv.str());
    };
    try {
        std::vector<ManifestEntry> entries;
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string name = "features_" + std::to_string(i) + ".csv";
            features(2 + i % 3, true, true, dir.path() / name);
            entries.push_back({name, Role::Train, {"file", i, 0}});
        }
        save_manifest(dir.path() / "manifest.json", entries);
        features(3, false, false, dir.path() / "query.csv");

        TrainConfig cfg = TrainConfig::few_shots();
        cfg.batch_size = 2;
        cfg.critic_steps = 2;
        cfg.cem = CemConfig{.population = 10, .elite_fraction = 0.2, .iterations = 2};
        cfg.cem.threads = threads;
        cfg.critic.hidden = {16, 16};
        cfg.gae.epochs = 2;
        save_model(dir.path() / "model.json", train(load_corpus(dir.path() / "manifest.json"), cfg));
        const C2mModel model = load_model(dir.path() / "model.json");
        const SampleDataset query = load_dataset(dir.path() / "query.csv", false);
        const ClusterResult r = cluster(model, query.points, cfg.cem, 3);
        const double s = metric(model, query.points, r.labels);
        o.pass = model.meta.d == d && r.labels.size() == n && std::isfinite(s);
        o.detail = "trained on four " + std::to_string(d) + "-column feature tables with free-form headers, " +
                   "clustered a headerless one (" + std::to_string(r.labels.size()) + " labels, k " +
                   std::to_string(r.inferred_k) + ")";
    } catch (const std::exception& e) {
        o.detail = std::string("pipeline rejected a tabular CSV: ") + e.what();
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"c2m acceptance harness"};
    std::vector<int> only;
    bool report_only = false;
    std::string results;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_flag("--report-only", report_only,
                 "Exit 0 once every selected criterion was measured, even if some fail");
    app.add_option("--results", results, "Also write the PASS/FAIL lines to this file");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    if (only.empty()) only = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::sort(only.begin(), only.end());
    only.erase(std::unique(only.begin(), only.end()), only.end());

    std::ofstream results_file;
    if (!results.empty()) results_file.open(results, std::ios::trunc);
    Lab lab;
    lab.threads = threads;
    std::vector<Outcome> outcomes;
    std::size_t aborted = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int id : only) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            switch (id) {
            case 1: o = criterion1(lab); break;
            case 2: o = criterion2(lab); break;
            case 3: o = criterion3(lab); break;
            case 4: o = criterion4(lab); break;
            case 5: o = criterion5(); break;
            case 6: o = criterion6(lab); break;
            case 7: o = criterion7(); break;
            case 8: o = criterion8(lab); break;
            default: o = criterion9(threads); break;
            }
        } catch (const std::exception& e) {
            o = {id, false, "criterion " + std::to_string(id), std::string("aborted: ") + e.what()};
            ++aborted;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << " criterion " << o.id << ": " << o.title << " | " << o.detail << " ["
             << fixed(secs, 1) << " s]";
        std::cout << line.str() << std::endl;
        if (results_file) results_file << line.str() << std::endl;
        outcomes.push_back(o);
    }
    const auto failed = std::count_if(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return !o.pass; });
    std::cout << outcomes.size() - static_cast<std::size_t>(failed) << "/" << outcomes.size() << " criteria passed in "
              << fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1) << " s\n";
    if (aborted) return 2;
    return failed && !report_only ? 1 : 0;
}
