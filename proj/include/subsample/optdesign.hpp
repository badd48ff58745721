#pragma once

#include "subsample/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace subsample {

/// Optimality criteria on the inverse information matrix (X*^T X*)^{-1}.
/// Smaller is better for all three.
enum class Criterion {
  kA,  // trace
  kD,  // determinant
  kE,  // largest eigenvalue
};

enum class SelectionRule { kA, kD, kE, kIboss };

std::string_view criterion_name(Criterion c) noexcept;
Criterion parse_criterion(std::string_view name);
std::string_view selection_rule_name(SelectionRule rule) noexcept;

struct SubsetSelection {
  /// Distinct row indices, ascending.
  std::vector<RowIndex> indices;
  SelectionRule rule = SelectionRule::kD;
  /// Criterion value of (X*^T X*)^{-1}; IBOSS reports the D value.
  /// +infinity when the selected rows are rank deficient.
  double value = 0.0;
};

/// Criterion value of the subset design. Throws RankError (distinct from an
/// overflowing but finite-rank result, which returns +infinity) when the
/// subset design is rank deficient.
double criterion_value(const Dataset& data, std::span<const RowIndex> indices, Criterion criterion);

/// Natural log of criterion_value, computed without forming the determinant
/// for D. Throws RankError like criterion_value.
double log_criterion_value(const Matrix& design, std::span<const RowIndex> indices,
                           Criterion criterion);

/// Per-column extreme-value selection: for each column in order, take the
/// r/(2p) not-yet-selected rows with the smallest values, then the r/(2p)
/// with the largest. Ties go to the lowest row index. r must be a positive
/// multiple of 2p and at most n.
SubsetSelection iboss_select(const Dataset& data, std::size_t r);

/// Greedy construction: p rows by maximal orthogonal residual, then one row
/// at a time, each the best improvement of `criterion`.
SubsetSelection greedy_select(const Dataset& data, std::size_t r, Criterion criterion);

/// Best-single-swap descent until no swap improves the criterion by a
/// relative 1e-10.
SubsetSelection exchange_improve(const Dataset& data, const SubsetSelection& selection);

}  // namespace subsample
