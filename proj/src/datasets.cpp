#include "c2m/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace c2m {

namespace fs = std::filesystem;
using json = nlohmann::json;

PointSet::PointSet(Matrix x) : x_(std::move(x)) {
    if (x_.rows() < 2) throw ValidationError("a point set needs at least 2 points");
    if (x_.cols() < 1) throw ValidationError("a point set needs at least 1 feature");
    if (!all_finite(x_)) throw NonFiniteError("point set contains non-finite coordinates");
}

void validate_labeling(const Labeling& y, std::size_t n) {
    if (y.size() != n) {
        throw ShapeError("labeling has " + std::to_string(y.size()) + " entries for " +
                         std::to_string(n) + " points");
    }
    for (Label l : y)
        if (l < 0) throw ValidationError("negative cluster label " + std::to_string(l));
}

std::size_t distinct_count(const Labeling& y) {
    return std::set<Label>(y.begin(), y.end()).size();
}

Labeling canonical_labels(const Labeling& y) {
    Labeling out(y.size());
    std::vector<std::pair<Label, Label>> seen;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto it = std::find_if(seen.begin(), seen.end(), [&](auto& p) { return p.first == y[i]; });
        if (it == seen.end()) {
            seen.emplace_back(y[i], static_cast<Label>(seen.size()));
            out[i] = seen.back().second;
        } else {
            out[i] = it->second;
        }
    }
    return out;
}

std::string family_name(Family f) {
    switch (f) {
    case Family::Blobs: return "blobs";
    case Family::Anisotropic: return "anisotropic";
    case Family::Moons: return "moons";
    case Family::Circles: break;
    }
    return "circles";
}

Family parse_family(const std::string& name) {
    if (name == "blobs") return Family::Blobs;
    if (name == "anisotropic") return Family::Anisotropic;
    if (name == "moons") return Family::Moons;
    if (name == "circles") return Family::Circles;
    throw ValidationError("unknown dataset family '" + name +
                          "' (expected blobs, anisotropic, moons or circles)");
}

std::string role_name(Role r) { return r == Role::Train ? "train" : "test"; }

Role parse_role(const std::string& name) {
    if (name == "train") return Role::Train;
    if (name == "test") return Role::Test;
    throw ValidationError("unknown corpus role '" + name + "'");
}

void Corpus::validate() const {
    if (datasets.empty()) throw ValidationError("corpus is empty");
    const std::size_t d = datasets.front().points.d();
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto& ds = datasets[i];
        if (!ds.truth) throw ValidationError("corpus dataset " + std::to_string(i) + " has no labels");
        validate_labeling(*ds.truth, ds.points.n());
        if (ds.points.d() != d) {
            throw ShapeError("corpus dataset " + std::to_string(i) + " has d=" +
                             std::to_string(ds.points.d()) + ", expected d=" + std::to_string(d));
        }
    }
}

SampleDataset gen_blobs(std::size_t n, std::size_t k, double spread, std::uint64_t seed,
                        const std::optional<Matrix>& centers, std::size_t dim) {
    if (k == 0) throw ValidationError("gen_blobs: k must be >= 1");
    if (k > n) throw ValidationError("gen_blobs: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    if (!(spread >= 0.0)) throw ValidationError("gen_blobs: spread must be >= 0");
    Rng rng(seed);

    Matrix c;
    if (centers) {
        if (centers->rows() != k) {
            throw ShapeError("gen_blobs: " + std::to_string(centers->rows()) + " centers given for k=" +
                             std::to_string(k));
        }
        c = *centers;
    } else {
        if (k > 9) throw ValidationError("gen_blobs: random centers support k <= 9");
        c = Matrix(k, dim);
        for (double& v : c.data()) v = rng.uniform(-10.0, 10.0);
    }

    Matrix x(n, c.cols());
    Labeling y(n);
    std::size_t row = 0;
    for (std::size_t cl = 0; cl < k; ++cl) {
        const std::size_t count = n / k + (cl < n % k ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i, ++row) {
            for (std::size_t j = 0; j < c.cols(); ++j) {
                x(row, j) = spread > 0.0 ? rng.normal(c(cl, j), spread) : c(cl, j);
            }
            y[row] = static_cast<Label>(cl);
        }
    }
    return {PointSet(std::move(x)), std::move(y), {"blobs", seed, 0}};
}

Matrix default_anisotropic_transform() { return Matrix{{0.6, -0.6}, {-0.4, 0.8}}; }

SampleDataset gen_anisotropic(std::size_t n, std::size_t k, double spread, const Matrix& transform,
                              std::uint64_t seed) {
    if (transform.rows() != 2 || transform.cols() != 2)
        throw ShapeError("gen_anisotropic: transform must be 2x2, got " + transform.shape_str());
    const double det = transform(0, 0) * transform(1, 1) - transform(0, 1) * transform(1, 0);
    if (std::abs(det) < 1e-12) throw ValidationError("gen_anisotropic: transform is singular");
    SampleDataset ds = gen_blobs(n, k, spread, seed);
    ds.points = PointSet(matmul(ds.points.matrix(), transform));
    ds.origin.family = "anisotropic";
    return ds;
}

SampleDataset gen_moons(std::size_t n, double noise, std::uint64_t seed) {
    if (!(noise >= 0.0)) throw ValidationError("gen_moons: noise must be >= 0");
    if (n < 2) throw ValidationError("gen_moons: need at least 2 points");
    Rng rng(seed);
    const std::size_t upper = n / 2;
    Matrix x(n, 2);
    Labeling y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, std::numbers::pi);
        if (i < upper) {
            x(i, 0) = std::cos(t);
            x(i, 1) = std::sin(t);
            y[i] = 0;
        } else {
            x(i, 0) = 1.0 - std::cos(t);
            x(i, 1) = 0.5 - std::sin(t);
            y[i] = 1;
        }
    }
    if (noise > 0.0)
        for (double& v : x.data()) v += rng.normal(0.0, noise);
    return {PointSet(std::move(x)), std::move(y), {"moons", seed, 0}};
}

SampleDataset gen_circles(std::size_t n, double noise, double radius_ratio, std::uint64_t seed) {
    if (!(noise >= 0.0)) throw ValidationError("gen_circles: noise must be >= 0");
    if (!(radius_ratio > 0.0 && radius_ratio < 1.0))
        throw ValidationError("gen_circles: radius_ratio must lie in (0, 1)");
    if (n < 2) throw ValidationError("gen_circles: need at least 2 points");
    Rng rng(seed);
    const std::size_t outer = n / 2;
    Matrix x(n, 2);
    Labeling y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = i < outer ? 1.0 : radius_ratio;
        x(i, 0) = r * std::cos(t);
        x(i, 1) = r * std::sin(t);
        y[i] = i < outer ? 0 : 1;
    }
    if (noise > 0.0)
        for (double& v : x.data()) v += rng.normal(0.0, noise);
    return {PointSet(std::move(x)), std::move(y), {"circles", seed, 0}};
}

SampleDataset gen_family(Family family, std::size_t n, std::uint64_t seed, const FamilyParams& params) {
    switch (family) {
    case Family::Blobs:
    case Family::Anisotropic: {
        if (params.min_clusters < 1 || params.min_clusters > params.max_clusters)
            throw ValidationError("gen_family: bad cluster-count range");
        Rng rng(seed);
        const std::size_t k = rng.uniform_index(params.min_clusters, params.max_clusters);
        const std::uint64_t inner = rng.next_seed();
        SampleDataset ds = family == Family::Blobs
                               ? gen_blobs(n, k, params.blob_spread, inner)
                               : gen_anisotropic(n, k, params.blob_spread,
                                                 default_anisotropic_transform(), inner);
        ds.origin.seed = seed;
        return ds;
    }
    case Family::Moons: return gen_moons(n, params.moons_noise, seed);
    case Family::Circles: break;
    }
    return gen_circles(n, params.circles_noise, params.circles_ratio, seed);
}

SampleDataset subsample(const SampleDataset& pool, std::size_t size, std::uint64_t seed) {
    const std::size_t n = pool.points.n();
    if (size > n) {
        throw ValidationError("subsample: size " + std::to_string(size) + " exceeds pool of " +
                              std::to_string(n));
    }
    if (size < 2) throw ValidationError("subsample: size must be >= 2");
    if (pool.truth && distinct_count(*pool.truth) < 2)
        throw ValidationError("subsample: pool has fewer than 2 distinct labels");

    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Partial Fisher-Yates: the first `size` slots are the sample.
        for (std::size_t i = 0; i < size; ++i) std::swap(idx[i], idx[rng.uniform_index(i, n - 1)]);

        Matrix x(size, pool.points.d());
        for (std::size_t i = 0; i < size; ++i) {
            auto src = pool.points.matrix().row(idx[i]);
            std::copy(src.begin(), src.end(), x.row(i).begin());
        }
        SampleDataset out{PointSet(std::move(x)), std::nullopt, pool.origin};
        if (!pool.truth) return out;
        Labeling y(size);
        for (std::size_t i = 0; i < size; ++i) y[i] = (*pool.truth)[idx[i]];
        if (distinct_count(y) >= 2) {
            out.truth = std::move(y);
            return out;
        }
    }
    throw ValidationError("subsample: could not draw 2 distinct labels in " +
                          std::to_string(kMaxAttempts) + " attempts");
}

SampleDataset corrupt(const SampleDataset& ds, std::size_t mislabel_count, std::uint64_t seed) {
    if (!ds.truth) throw ValidationError("corrupt: dataset has no labels");
    const Labeling& truth = *ds.truth;
    const std::size_t n = truth.size();
    if (mislabel_count > n) {
        throw ValidationError("corrupt: cannot mislabel " + std::to_string(mislabel_count) + " of " +
                              std::to_string(n) + " points");
    }
    const Label k_max = *std::max_element(truth.begin(), truth.end()) + 1;
    if (k_max < 2) throw ValidationError("corrupt: label alphabet has a single label");

    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < mislabel_count; ++i) std::swap(idx[i], idx[rng.uniform_index(i, n - 1)]);

    SampleDataset out = ds;
    Labeling& y = *out.truth;
    for (std::size_t i = 0; i < mislabel_count; ++i) {
        const std::size_t p = idx[i];
        // Uniform over the k_max - 1 other labels.
        Label l = static_cast<Label>(rng.uniform_index(0, static_cast<std::size_t>(k_max - 2)));
        if (l >= y[p]) ++l;
        y[p] = l;
    }
    out.origin.mislabeled = mislabel_count;
    return out;
}

Corpus make_corpus(const CorpusSpec& spec) {
    if (spec.pools == 0 || spec.samples == 0 || spec.points == 0)
        throw ValidationError("make_corpus: pools, samples and points must be > 0");
    if (spec.points > spec.pool_size)
        throw ValidationError("make_corpus: points per sample exceed the pool size");
    Rng rng(spec.seed);
    std::vector<SampleDataset> pools;
    pools.reserve(spec.pools);
    for (std::size_t p = 0; p < spec.pools; ++p)
        pools.push_back(gen_family(spec.family, spec.pool_size, rng.next_seed(), spec.params));

    Corpus corpus;
    corpus.role = spec.role;
    for (std::size_t s = 0; s < spec.samples; ++s) {
        const std::uint64_t sample_seed = rng.next_seed();
        SampleDataset ds = subsample(pools[s % spec.pools], spec.points, sample_seed);
        ds.origin.seed = sample_seed;
        corpus.datasets.push_back(std::move(ds));
    }
    return corpus;
}

PointSet standardize(const PointSet& points) {
    const Matrix& x = points.matrix();
    Matrix out = x;
    const std::size_t n = x.rows(), d = x.cols();
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            out(i, j) -= mean;
            sq += out(i, j) * out(i, j);
        }
    }
    const double rms = std::sqrt(sq / static_cast<double>(n * d));
    if (rms > 0.0)
        for (double& v : out.data()) v /= rms;
    return PointSet(std::move(out));
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError("not a finite number: '" + std::string(field) + "'", line);
    return v;
}

Label parse_label(std::string_view field, std::size_t line) {
    field = trim(field);
    long long v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || v < 0 ||
        v > std::numeric_limits<Label>::max())
        throw ParseError("not a non-negative integer label: '" + std::string(field) + "'", line);
    return static_cast<Label>(v);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

json origin_to_json(const Origin& o) {
    return {{"family", o.family}, {"seed", o.seed}, {"mislabeled", o.mislabeled}};
}

Origin origin_from_json(const json& j) {
    Origin o;
    o.family = j.at("family").get<std::string>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.mislabeled = j.value("mislabeled", std::size_t{0});
    return o;
}

}  // namespace

void save_dataset(const fs::path& path, const SampleDataset& ds) {
    std::ofstream out = open_out(path);
    const Matrix& x = ds.points.matrix();
    for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? ",f" : "f") << j;
    if (ds.truth) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? "," : "") << format_double(x(i, j));
        if (ds.truth) out << ',' << (*ds.truth)[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

SampleDataset load_dataset(const fs::path& path, bool read_labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file " + path.string(), 1);
    // A first row made only of numbers is data, not a header. Header names are
    // free-form; a trailing column named "label" holds the labels.
    const auto header = split_commas(line);
    const bool headerless = std::all_of(header.begin(), header.end(), [](std::string_view f) {
        f = trim(f);
        double v = 0.0;
        auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        return !f.empty() && res.ec == std::errc{} && res.ptr == f.data() + f.size();
    });
    bool has_label = false;
    if (!headerless) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            const auto name = trim(header[c]);
            if (name.empty()) throw ParseError("empty header column " + std::to_string(c), 1);
            if (name == "label" && c + 1 != header.size())
                throw ParseError("feature column after the label column", 1);
        }
        has_label = trim(header.back()) == "label";
    }
    const std::size_t d = header.size() - (has_label ? 1 : 0);
    if (d == 0) throw ParseError("no feature columns", 1);
    const std::size_t width = d + (has_label ? 1 : 0);

    std::vector<double> values;
    Labeling labels;
    std::size_t lineno = 1;
    bool pending = headerless;
    while (pending || std::getline(in, line)) {
        if (pending) pending = false;
        else ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        for (std::size_t j = 0; j < d; ++j) values.push_back(parse_double(fields[j], lineno));
        if (has_label && read_labels) labels.push_back(parse_label(fields[d], lineno));
    }
    const std::size_t n = values.size() / d;
    if (n < 2) throw ParseError("a dataset needs at least 2 rows in " + path.string(), lineno);
    SampleDataset ds{PointSet(Matrix(n, d, std::move(values))), std::nullopt, {"file", 0, 0}};
    if (has_label && read_labels) ds.truth = std::move(labels);
    return ds;
}

void save_labels(const fs::path& path, const Labeling& y) {
    std::ofstream out = open_out(path);
    out << "label\n";
    for (Label l : y) out << l << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

Labeling load_labels(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "label")
        throw ParseError("expected header 'label'", 1);
    Labeling y;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        y.push_back(parse_label(line, lineno));
    }
    return y;
}

void save_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
    json arr = json::array();
    for (const auto& e : entries)
        arr.push_back({{"path", e.path}, {"role", role_name(e.role)}, {"origin", origin_to_json(e.origin)}});
    std::ofstream out = open_out(path);
    out << arr.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json arr;
    try {
        arr = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0);
    }
    if (!arr.is_array()) throw ParseError("manifest must be a JSON array", 0);
    std::vector<ManifestEntry> entries;
    for (const auto& j : arr) {
        try {
            entries.push_back({j.at("path").get<std::string>(), parse_role(j.at("role").get<std::string>()),
                               origin_from_json(j.at("origin"))});
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad manifest entry: ") + e.what(), 0);
        }
    }
    return entries;
}

Corpus load_corpus(const fs::path& manifest_path) {
    const auto entries = load_manifest(manifest_path);
    Corpus corpus;
    if (!entries.empty()) corpus.role = entries.front().role;
    const fs::path base = manifest_path.parent_path();
    for (const auto& e : entries) {
        fs::path p(e.path);
        if (p.is_relative()) p = base / p;
        SampleDataset ds = load_dataset(p);
        ds.origin = e.origin;
        corpus.datasets.push_back(std::move(ds));
    }
    return corpus;
}

fs::path save_corpus(const fs::path& dir, const Corpus& corpus, const std::string& stem) {
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 0; i < corpus.datasets.size(); ++i) {
        std::string index = std::to_string(i);
        if (index.size() < 3) index.insert(0, 3 - index.size(), '0');
        const std::string name = stem + "_" + index + ".csv";
        save_dataset(dir / name, corpus.datasets[i]);
        entries.push_back({name, corpus.role, corpus.datasets[i].origin});
    }
    const fs::path manifest = dir / "manifest.json";
    save_manifest(manifest, entries);
    return manifest;
}

}  // namespace c2m
