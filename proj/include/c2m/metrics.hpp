#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "c2m/datasets.hpp"

namespace c2m {

// Minimum-cost perfect assignment on a square cost matrix (row-major,
// n x n). Returns the column assigned to each row.
std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t n);

// Rows: distinct predicted labels, columns: distinct true labels, both in
// ascending label order.
std::vector<std::vector<std::size_t>> contingency(const Labeling& pred, const Labeling& truth);

// Fraction of points matched under the best one-to-one map between
// predicted and true labels (optimal assignment on the contingency table,
// zero-padded to square).
double acc(const Labeling& pred, const Labeling& truth);

// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. Two single-cluster
// partitions give 1; exactly one zero entropy gives 0.
double nmi(const Labeling& pred, const Labeling& truth);

// Spearman rank correlation with average ranks for ties. NaN when either
// side has zero variance.
double spearman(std::span<const double> a, std::span<const double> b);

// Hamming distance after the best relabeling: n (1 - acc).
std::size_t corrected_mislabels(const Labeling& pred, const Labeling& truth);

std::size_t hamming(const Labeling& a, const Labeling& b);

}  // namespace c2m
