#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "c2m/numerics.hpp"

namespace c2m {

using Label = std::int32_t;
// One cluster index per point.
using Labeling = std::vector<Label>;

/// n points in d dimensions, stored as an n x d matrix. Always n >= 2,
/// d >= 1 and every coordinate finite.
class PointSet {
public:
    explicit PointSet(Matrix x);

    std::size_t n() const noexcept { return x_.rows(); }
    std::size_t d() const noexcept { return x_.cols(); }
    const Matrix& matrix() const noexcept { return x_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    Matrix x_;
};

// Throws ShapeError if y does not have exactly n entries and
// ValidationError on a negative label.
void validate_labeling(const Labeling& y, std::size_t n);
// Number of distinct values in y.
std::size_t distinct_count(const Labeling& y);
// Relabels to 0..k-1 in order of first appearance.
Labeling canonical_labels(const Labeling& y);

enum class Family { Blobs, Anisotropic, Moons, Circles };

std::string family_name(Family f);
// Throws ValidationError for anything but blobs/anisotropic/moons/circles.
Family parse_family(const std::string& name);

struct Origin {
    std::string family;
    std::uint64_t seed = 0;
    std::size_t mislabeled = 0;

    friend bool operator==(const Origin&, const Origin&) = default;
};

struct SampleDataset {
    PointSet points;
    std::optional<Labeling> truth;
    Origin origin;
};

enum class Role { Train, Test };
std::string role_name(Role r);
Role parse_role(const std::string& name);

struct Corpus {
    std::vector<SampleDataset> datasets;
    Role role = Role::Train;

    // Throws unless non-empty, every member labelled, all sharing d.
    void validate() const;
    std::size_t dim() const { return datasets.at(0).points.d(); }
};

// Isotropic Gaussian blobs. Without explicit centers, k centers are drawn
// uniformly in [-10, 10]^dim. Points are split as evenly as possible and
// emitted cluster by cluster, so labels are sorted.
SampleDataset gen_blobs(std::size_t n, std::size_t k, double spread, std::uint64_t seed,
                        const std::optional<Matrix>& centers = std::nullopt, std::size_t dim = 2);

// The default shear used for the anisotropic family.
Matrix default_anisotropic_transform();

// gen_blobs in two dimensions followed by x <- x * transform.
SampleDataset gen_anisotropic(std::size_t n, std::size_t k, double spread, const Matrix& transform,
                              std::uint64_t seed);

// Two interleaving half circles: (cos t, sin t) and (1 - cos t, 0.5 - sin t)
// for t in [0, pi], plus Gaussian noise. Label 0 is the upper arc.
SampleDataset gen_moons(std::size_t n, double noise, std::uint64_t seed);

// Concentric circles of radius 1 (label 0) and radius_ratio (label 1).
SampleDataset gen_circles(std::size_t n, double noise, double radius_ratio, std::uint64_t seed);

struct FamilyParams {
    double blob_spread = 1.0;
    std::size_t min_clusters = 2;
    std::size_t max_clusters = 9;
    double moons_noise = 0.05;
    double circles_noise = 0.05;
    double circles_ratio = 0.5;
};

// One dataset of the family. Blob-like families draw k uniformly in
// [min_clusters, max_clusters] from the seed.
SampleDataset gen_family(Family family, std::size_t n, std::uint64_t seed,
                         const FamilyParams& params = {});

// Uniform sample without replacement. Resamples (bounded) until at least
// two distinct labels are present when truth is available.
SampleDataset subsample(const SampleDataset& pool, std::size_t size, std::uint64_t seed);

// Exactly `mislabel_count` points receive a uniformly drawn label different
// from their own, from the alphabet [0, max label]. origin.mislabeled
// records the count.
SampleDataset corrupt(const SampleDataset& ds, std::size_t mislabel_count, std::uint64_t seed);

struct CorpusSpec {
    Family family = Family::Blobs;
    std::size_t pools = 1;
    std::size_t samples = 20;
    std::size_t points = 200;
    std::size_t pool_size = 1500;
    Role role = Role::Train;
    std::uint64_t seed = 0;
    FamilyParams params;
};

// `pools` labelled pools of pool_size points, then `samples` sample
// datasets drawn round-robin from them.
Corpus make_corpus(const CorpusSpec& spec);

// Centers every column and divides by the root-mean-square coordinate
// deviation (one scale for all columns, so shapes are preserved).
PointSet standardize(const PointSet& points);

// CSV: header f0,...,f{d-1}[,label]; one row per point. The loader also
// takes other tables of numeric features: any header names, or no header
// at all. Only a last column named "label" is read as labels.
void save_dataset(const std::filesystem::path& path, const SampleDataset& ds);
// read_labels = false ignores any label column.
SampleDataset load_dataset(const std::filesystem::path& path, bool read_labels = true);

// Single-column CSV with header "label".
void save_labels(const std::filesystem::path& path, const Labeling& y);
Labeling load_labels(const std::filesystem::path& path);

struct ManifestEntry {
    std::string path;
    Role role = Role::Train;
    Origin origin;
};

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
// Loads every dataset of a manifest; relative paths resolve against the
// manifest's directory.
Corpus load_corpus(const std::filesystem::path& manifest_path);
// Writes one CSV per dataset into dir plus dir/manifest.json. Returns the
// manifest path.
std::filesystem::path save_corpus(const std::filesystem::path& dir, const Corpus& corpus,
                                  const std::string& stem);

}  // namespace c2m
