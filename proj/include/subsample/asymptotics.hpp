#pragma once

#include "subsample/core.hpp"
#include "subsample/probs.hpp"

#include <string_view>

namespace subsample {

/// sigma^2 (X^T X)^{-1} + sigma^2 (X^T X)^{-1} X^T Omega X (X^T X)^{-1},
/// Omega = diag(1 / (r pi_i)).
struct AsymptoticVariance {
  Matrix matrix;
  double sigma2 = 0.0;
  std::size_t r = 0;
};

/// Finite-sample quantities named by the regularity conditions of the
/// asymptotic normality result. No pass/fail ruling is made.
struct RegularityDiagnostics {
  double lambda_min = 0.0;  // of X^T X / n
  double lambda_max = 0.0;
  double pi_min = 0.0;
  double condition_ratio = 0.0;  // lambda_max / lambda_min, +inf if singular
  std::size_t r = 0;
};

/// Which linear functional of beta the trace-AMSE is measured on.
enum class AmseTarget {
  kBeta,      // beta_0
  kXBeta,     // X beta_0
  kXtXBeta,   // X^T X beta_0
};

std::string_view amse_target_name(AmseTarget t) noexcept;
AmseTarget parse_amse_target(std::string_view name);

AsymptoticVariance avar_matrix(const Dataset& data, const Vector& probs, std::size_t r, double sigma2);

/// sigma^2 tr(C) + (sigma^2 / r) sum_i ||g_i||^2 / pi_i where, by target,
///   beta:     C = (X^T X)^{-1},  g_i = (X^T X)^{-1} x_i
///   Xbeta:    C = H,             g_i = X (X^T X)^{-1} x_i  (||g_i||^2 = h_ii)
///   XtXbeta:  C = X^T X,         g_i = x_i
double trace_amse(const Dataset& data, const Vector& probs, std::size_t r, double sigma2,
                  AmseTarget target);

/// The pi-dependent part alone, sum_i ||g_i||^2 / pi_i.
double amse_sampling_term(const Dataset& data, const Vector& probs, AmseTarget target);

/// Residual sum of squares over n - p from the full-sample OLS fit.
double sigma2_estimate(const Dataset& data);

RegularityDiagnostics regularity_diagnostics(const Dataset& data, const Vector& probs, std::size_t r);

}  // namespace subsample
