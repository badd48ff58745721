#include "subsample/core.hpp"

#include "subsample/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace subsample {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + " contains a non-finite entry");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InputError(std::string(what) + " contains a non-finite entry");
  }
}

Dataset::Dataset(Matrix design, Vector response)
    : design_(std::move(design)), response_(std::move(response)) {
  if (design_.rows() < 1) throw InputError("dataset needs at least one observation");
  if (design_.cols() < 1) throw InputError("dataset needs at least one predictor");
  if (response_.size() != design_.rows()) {
    throw InputError("response length " + std::to_string(response_.size()) +
                     " does not match design rows " + std::to_string(design_.rows()));
  }
  require_finite(design_, "design");
  require_finite(response_, "response");
}

Dataset Dataset::select_rows(std::span<const RowIndex> rows) const {
  if (rows.empty()) throw InputError("row selection is empty");
  Matrix x(static_cast<Eigen::Index>(rows.size()), p());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= static_cast<RowIndex>(n())) {
      throw InputError("row index " + std::to_string(rows[k]) + " out of range");
    }
    const auto i = static_cast<Eigen::Index>(rows[k]);
    const auto kk = static_cast<Eigen::Index>(k);
    x.row(kk) = design_.row(i);
    y(kk) = response_(i);
  }
  return Dataset(std::move(x), std::move(y));
}

double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

ThinSvd thin_svd(const Matrix& x) {
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
      x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  ThinSvd out;
  out.sigma_max = s.size() > 0 ? s(0) : 0.0;
  const double tol = rank_tolerance(x.rows(), x.cols(), out.sigma_max);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  out.rank = rank;
  out.singular_values = s.head(rank);
  out.u = svd.matrixU().leftCols(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

namespace {

EstimateResult solve_min_norm(const Matrix& x, const Vector& y, std::string method) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(static_cast<double>(std::max(x.rows(), x.cols())) *
                   std::numeric_limits<double>::epsilon());
  cod.compute(x);
  EstimateResult out;
  out.beta = cod.solve(y);
  out.method = std::move(method);
  out.rank = cod.rank();
  out.reduced_rank = out.rank < x.cols();
  out.residual_ss = (y - x * out.beta).squaredNorm();
  return out;
}

}  // namespace

EstimateResult ols_fit(const Dataset& data) {
  return solve_min_norm(data.design(), data.response(), "OLS");
}

EstimateResult weighted_ls_fit(const Dataset& data, const Vector& weights) {
  if (weights.size() != data.n()) {
    throw InputError("weight vector length does not match observation count");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights(i)) || weights(i) <= 0.0) {
      throw InputError("weight " + std::to_string(i) + " is not strictly positive and finite");
    }
  }
  const Vector root = weights.cwiseSqrt();
  const Matrix xw = root.asDiagonal() * data.design();
  const Vector yw = root.cwiseProduct(data.response());
  EstimateResult out = solve_min_norm(xw, yw, "WLS");
  // Report the unweighted residual sum of squares on the rows used.
  out.residual_ss = (data.response() - data.design() * out.beta).squaredNorm();
  return out;
}

LeverageVector leverage_scores(const Matrix& design) {
  require_finite(design, "design");
  const ThinSvd svd = thin_svd(design);
  LeverageVector out;
  out.rank = svd.rank;
  out.scores = svd.u.rowwise().squaredNorm();
  return out;
}

LeverageVector leverage_scores(const Dataset& data) { return leverage_scores(data.design()); }

}  // namespace subsample
