#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subsample {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowIndex = std::size_t;

/// An n x p design matrix paired with its n responses.
///
/// The constructor validates shape and finiteness, so every Dataset in the
/// program satisfies n >= 1, p >= 1, matching lengths and finite entries.
/// No intercept column is ever added implicitly.
class Dataset {
 public:
  Dataset(Matrix design, Vector response);

  const Matrix& design() const noexcept { return design_; }
  const Vector& response() const noexcept { return response_; }
  Eigen::Index n() const noexcept { return design_.rows(); }
  Eigen::Index p() const noexcept { return design_.cols(); }

  /// Rows in the given order; repeated indices produce repeated rows.
  Dataset select_rows(std::span<const RowIndex> rows) const;

 private:
  Matrix design_;
  Vector response_;
};

struct EstimateResult {
  Vector beta;
  std::string method;
  Eigen::Index rank = 0;
  double residual_ss = 0.0;
  /// Set when the fitted design had rank < p and the minimum-norm solution
  /// was returned.
  bool reduced_rank = false;
};

struct LeverageVector {
  Vector scores;
  Eigen::Index rank = 0;
};

/// Thin SVD X = U diag(s) V^T restricted to the numerical rank.
struct ThinSvd {
  Matrix u;                 // n x rank
  Vector singular_values;   // rank, descending
  Matrix v;                 // p x rank
  Eigen::Index rank = 0;
  double sigma_max = 0.0;
};

/// Singular values at or below this are treated as zero:
/// max(rows, cols) * machine epsilon * sigma_max.
double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max);

ThinSvd thin_svd(const Matrix& x);

/// Minimum-norm least-squares solution of design * beta ~ response.
EstimateResult ols_fit(const Dataset& data);

/// argmin_beta sum_i w_i (y_i - x_i^T beta)^2 for strictly positive weights.
EstimateResult weighted_ls_fit(const Dataset& data, const Vector& weights);

/// Diagonal of the hat matrix, h_ii = ||U_i||^2 for the thin left singular
/// vectors spanning the column space.
LeverageVector leverage_scores(const Dataset& data);
LeverageVector leverage_scores(const Matrix& design);

/// Throws InputError unless every entry is finite.
void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace subsample
