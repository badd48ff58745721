#include "subsample/asymptotics.hpp"

#include "subsample/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace subsample {

namespace {

/// (X^T X)^{-1} = V S^{-2} V^T from the thin SVD; throws on rank deficiency.
struct InverseGram {
  ThinSvd svd;
  Matrix inverse;
};

InverseGram inverse_gram(const Dataset& data) {
  InverseGram out{thin_svd(data.design()), {}};
  if (out.svd.rank < data.p()) {
    throw RankError("asymptotic variance needs a full-column-rank design");
  }
  const Vector inv_sq = out.svd.singular_values.array().square().inverse();
  out.inverse = out.svd.v * inv_sq.asDiagonal() * out.svd.v.transpose();
  return out;
}

void check_probs(const Dataset& data, const Vector& probs, std::size_t r, double sigma2) {
  if (probs.size() != data.n()) throw InputError("probability vector length does not match n");
  validate_probabilities(probs);
  if ((probs.array() <= 0.0).any()) {
    throw InputError("asymptotic variance needs every sampling probability strictly positive");
  }
  if (r < 1) throw InputError("subsample size r must be at least 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InputError("sigma2 must be positive and finite");
}

/// Per-row ||g_i||^2 and the trace of the target's fixed covariance.
std::pair<Vector, double> target_terms(const Dataset& data, AmseTarget target) {
  switch (target) {
    case AmseTarget::kBeta: {
      const InverseGram g = inverse_gram(data);
      // (X^T X)^{-1} x_i = V S^{-1} u_i
      const Vector inv_s = g.svd.singular_values.cwiseInverse();
      return {(g.svd.u * inv_s.asDiagonal()).rowwise().squaredNorm(), g.inverse.trace()};
    }
    case AmseTarget::kXBeta: {
      const InverseGram g = inverse_gram(data);
      return {g.svd.u.rowwise().squaredNorm(), static_cast<double>(g.svd.rank)};
    }
    case AmseTarget::kXtXBeta: {
      (void)inverse_gram(data);
      const Vector norms = data.design().rowwise().squaredNorm();
      return {norms, norms.sum()};
    }
  }
  throw InputError("unhandled AMSE target");
}

}  // namespace

std::string_view amse_target_name(AmseTarget t) noexcept {
  switch (t) {
    case AmseTarget::kBeta:
      return "beta";
    case AmseTarget::kXBeta:
      return "Xbeta";
    case AmseTarget::kXtXBeta:
      return "XtXbeta";
  }
  return "?";
}

AmseTarget parse_amse_target(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "beta") return AmseTarget::kBeta;
  if (key == "xbeta") return AmseTarget::kXBeta;
  if (key == "xtxbeta") return AmseTarget::kXtXBeta;
  throw InputError("unknown AMSE target '" + std::string(name) + "' (expected beta, Xbeta or XtXbeta)");
}

AsymptoticVariance avar_matrix(const Dataset& data, const Vector& probs, std::size_t r, double sigma2) {
  check_probs(data, probs, r, sigma2);
  const InverseGram g = inverse_gram(data);
  const Vector omega = (static_cast<double>(r) * probs).cwiseInverse();
  const Matrix middle = data.design().transpose() * omega.asDiagonal() * data.design();
  AsymptoticVariance out;
  out.sigma2 = sigma2;
  out.r = r;
  out.matrix = sigma2 * (g.inverse + g.inverse * middle * g.inverse);
  // Symmetrize away rounding asymmetry of the triple product.
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

double amse_sampling_term(const Dataset& data, const Vector& probs, AmseTarget target) {
  if (probs.size() != data.n()) throw InputError("probability vector length does not match n");
  if ((probs.array() <= 0.0).any()) {
    throw InputError("AMSE needs every sampling probability strictly positive");
  }
  const auto [norms, trace] = target_terms(data, target);
  (void)trace;
  return (norms.array() / probs.array()).sum();
}

double trace_amse(const Dataset& data, const Vector& probs, std::size_t r, double sigma2,
                  AmseTarget target) {
  check_probs(data, probs, r, sigma2);
  const auto [norms, trace] = target_terms(data, target);
  return sigma2 * trace + sigma2 / static_cast<double>(r) * (norms.array() / probs.array()).sum();
}

double sigma2_estimate(const Dataset& data) {
  if (data.n() <= data.p()) {
    throw InputError("sigma2 estimate needs n > p (n = " + std::to_string(data.n()) +
                     ", p = " + std::to_string(data.p()) + ")");
  }
  const EstimateResult fit = ols_fit(data);
  if (fit.reduced_rank) throw RankError("sigma2 estimate needs a full-column-rank design");
  return fit.residual_ss / static_cast<double>(data.n() - data.p());
}

RegularityDiagnostics regularity_diagnostics(const Dataset& data, const Vector& probs, std::size_t r) {
  if (probs.size() != data.n()) throw InputError("probability vector length does not match n");
  const ThinSvd svd = thin_svd(data.design());
  const auto n = static_cast<double>(data.n());
  RegularityDiagnostics out;
  out.r = r;
  out.pi_min = probs.minCoeff();
  out.lambda_max = svd.sigma_max * svd.sigma_max / n;
  if (svd.rank < data.p()) {
    out.lambda_min = 0.0;
    out.condition_ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  const double smin = svd.singular_values(svd.rank - 1);
  out.lambda_min = smin * smin / n;
  out.condition_ratio = (svd.sigma_max / smin) * (svd.sigma_max / smin);
  return out;
}

}  // namespace subsample
