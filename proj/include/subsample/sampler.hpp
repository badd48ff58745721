#pragma once

#include "subsample/core.hpp"
#include "subsample/probs.hpp"

#include <cstdint>
#include <vector>

namespace subsample {

/// r row indices drawn i.i.d. with replacement, in draw order, together with
/// the sampling probability of each drawn row.
struct SubsampleDraw {
  std::vector<RowIndex> indices;
  std::vector<double> draw_probs;
  std::uint64_t seed = 0;
  bool with_replacement = true;

  std::size_t size() const noexcept { return indices.size(); }
  bool operator==(const SubsampleDraw&) const = default;
};

enum class EstimateMode {
  kPlain,     // OLS on the drawn rows
  kWeighted,  // WLS with weights 1 / pi_i*
};

/// r i.i.d. categorical draws from `probs`. Bit-identical for identical
/// (probs, r, seed).
SubsampleDraw draw(const ProbabilityVector& probs, std::size_t r, std::uint64_t seed);
SubsampleDraw draw(const Vector& probs, std::size_t r, std::uint64_t seed);

/// Fits the subsample. A rank-deficient subsample design yields the
/// minimum-norm solution with `reduced_rank` set instead of an error.
EstimateResult subsample_estimate(const Dataset& data, const SubsampleDraw& draw,
                                  EstimateMode mode);

}  // namespace subsample
