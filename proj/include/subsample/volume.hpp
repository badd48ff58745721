#pragma once

#include "subsample/core.hpp"
#include "subsample/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subsample {

/// Standard volume enumeration is limited to n <= 20 rows.
inline constexpr Eigen::Index kMaxVolumeEnumerationRows = 20;
/// Leveraged volume enumerates all n^r sequences only up to this many.
inline constexpr double kMaxLeveragedEnumerationStates = 2e6;

/// An explicit distribution over index sets (standard volume sampling: sorted,
/// distinct) or index sequences (leveraged volume sampling: ordered, with
/// repeats).
struct SubsetDistribution {
  std::vector<std::vector<RowIndex>> subsets;
  std::vector<double> masses;
};

enum class VolumeVariant { kStandard, kLeveraged };

enum class LeveragedMethod {
  kAuto,        // enumerate when n^r is small enough, otherwise rejection
  kEnumerate,
  kRejection,
};

/// Every size-r subset S with Pr(S) = det(X_S^T X_S) / (C(n-p, r-p) det(X^T X)).
/// The masses are the closed form itself, not renormalized.
SubsetDistribution standard_volume_distribution(const Dataset& data, std::size_t r);

/// Every sequence tau in {0..n-1}^r with
/// Pr(tau) proportional to det(sum_k x_{tau_k} x_{tau_k}^T / q_{tau_k}) prod_k q_{tau_k},
/// q_i = h_ii / p, normalized numerically.
SubsetDistribution leveraged_volume_distribution(const Dataset& data, std::size_t r);

struct VolumeDraw {
  std::vector<RowIndex> indices;
  /// q of each drawn row (leveraged variant only).
  std::vector<double> proposal_probs;
  /// Proposals consumed by the rejection sampler; 1 for the enumerated path.
  std::uint64_t attempts = 1;
};

/// Reusable exact volume sampler: precomputes the enumerated distribution or
/// the whitened rows used by the rejection sampler once per dataset.
///
/// The rejection sampler proposes tau i.i.d. from q and accepts with
/// probability det(sum u_k u_k^T / q_k) / r^p, where u_i are the rows of the
/// thin left singular factor. Since ||u_i||^2 / q_i = p, the trace of the
/// proposal's matrix is exactly r p and AM-GM bounds its determinant by r^p.
class VolumeSampler {
 public:
  VolumeSampler(const Dataset& data, std::size_t r, VolumeVariant variant,
                LeveragedMethod method = LeveragedMethod::kAuto);

  VolumeDraw sample(Rng& rng) const;

  VolumeVariant variant() const noexcept { return variant_; }
  bool enumerated() const noexcept { return table_.has_value(); }
  /// Non-fatal conditions, e.g. leveraged r <= 4 p^2.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// q_i = h_ii / p for the leveraged variant, empty otherwise.
  const Vector& proposal() const noexcept { return q_; }

 private:
  VolumeDraw sample_rejection(Rng& rng) const;

  VolumeVariant variant_;
  std::size_t r_;
  SubsetDistribution distribution_;
  std::optional<AliasTable> table_;
  std::optional<AliasTable> proposal_table_;
  Matrix whitened_;
  Vector q_;
  std::vector<std::string> warnings_;
};

struct VolumeSampleResult {
  VolumeDraw draw;
  std::vector<std::string> warnings;
};

/// One seeded draw.
VolumeSampleResult volume_sample(const Dataset& data, std::size_t r, VolumeVariant variant,
                                 std::uint64_t seed,
                                 LeveragedMethod method = LeveragedMethod::kAuto);

}  // namespace subsample
