#pragma once

#include <cstddef>
#include <vector>

#include "c2m/datasets.hpp"
#include "c2m/numerics.hpp"

namespace c2m {

// A clustered dataset as a graph: one node per point, and an edge between
// two distinct nodes exactly when they share a cluster, so every cluster
// is a clique. The adjacency is symmetric, 0/1 valued, with a zero diagonal.
struct ClusterGraph {
    Matrix features;
    Matrix adjacency;

    std::size_t nodes() const noexcept { return adjacency.rows(); }
};

// D^{-1/2} (A + I) D^{-1/2}, D the degree matrix of A + I.
struct NormalizedAdjacency {
    Matrix matrix;
};

ClusterGraph build_graph(const PointSet& points, const Labeling& y);

NormalizedAdjacency normalize(const ClusterGraph& g);

// Number of nonzero adjacency entries (each undirected edge counts twice).
std::size_t edge_count(const ClusterGraph& g);

// Node indices of each clique (connected component), components ordered by
// their smallest member, members ascending. Throws ValidationError if the
// adjacency is not a disjoint union of cliques.
std::vector<std::vector<std::size_t>> cliques(const ClusterGraph& g);

// Same grouping computed straight from a labeling.
std::vector<std::vector<std::size_t>> groups_of(const Labeling& y);

}  // namespace c2m
