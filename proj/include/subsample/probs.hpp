#pragma once

#include "subsample/core.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace subsample {

/// Per-row randomized subsampling schemes.
enum class Scheme {
  kRand,  // uniform 1/n
  kBlev,  // h_ii / p
  kSlev,  // alpha h_ii / p + (1 - alpha) / n
  kIc,    // proportional to ||(X^T X)^{-1} x_i||
  kRl,    // proportional to sqrt(h_ii)
  kPl,    // proportional to ||x_i||
};

inline constexpr double kDefaultSlevAlpha = 0.9;

std::string_view scheme_name(Scheme scheme) noexcept;
/// Case-insensitive; throws InputError for an unknown name.
Scheme parse_scheme(std::string_view name);

struct ProbabilityVector {
  Vector probs;
  Scheme scheme = Scheme::kRand;
  /// Only set for kSlev.
  std::optional<double> alpha;
};

/// Sampling probabilities for `scheme`. `alpha` is required for kSlev (use
/// kDefaultSlevAlpha when unsure) and rejected for every other scheme.
///
/// Schemes that involve (X^T X)^{-1} throw RankError on a rank-deficient
/// design. PL throws DegenerateError if every row is zero.
ProbabilityVector compute_probabilities(const Dataset& data, Scheme scheme,
                                        std::optional<double> alpha = std::nullopt);
ProbabilityVector compute_probabilities(const Matrix& design, Scheme scheme,
                                        std::optional<double> alpha = std::nullopt);

/// Checks the simplex invariant (entries >= 0, sum 1 within 1e-10).
void validate_probabilities(const Vector& probs);

}  // namespace subsample
