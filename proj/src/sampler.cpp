#include "subsample/sampler.hpp"

#include "subsample/errors.hpp"
#include "subsample/rng.hpp"

#include <span>
#include <string>

namespace subsample {

SubsampleDraw draw(const Vector& probs, std::size_t r, std::uint64_t seed) {
  if (r < 1) throw InputError("subsample size r must be at least 1");
  validate_probabilities(probs);
  const AliasTable table(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())));
  Rng rng(seed);
  SubsampleDraw out;
  out.seed = seed;
  out.indices.reserve(r);
  out.draw_probs.reserve(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t i = table.sample(rng);
    out.indices.push_back(i);
    out.draw_probs.push_back(probs(static_cast<Eigen::Index>(i)));
  }
  return out;
}

SubsampleDraw draw(const ProbabilityVector& probs, std::size_t r, std::uint64_t seed) {
  return draw(probs.probs, r, seed);
}

EstimateResult subsample_estimate(const Dataset& data, const SubsampleDraw& draw,
                                  EstimateMode mode) {
  if (draw.indices.empty()) throw InputError("subsample draw is empty");
  if (draw.indices.size() != draw.draw_probs.size()) {
    throw InputError("subsample draw has mismatched index and probability lengths");
  }
  const Dataset sub = data.select_rows(draw.indices);
  if (mode == EstimateMode::kPlain) {
    EstimateResult fit = ols_fit(sub);
    fit.method = "subsample-plain";
    return fit;
  }
  Vector weights(static_cast<Eigen::Index>(draw.size()));
  for (std::size_t k = 0; k < draw.size(); ++k) {
    const double pi = draw.draw_probs[k];
    if (!(pi > 0.0 && pi <= 1.0)) {
      throw InputError("weighted subsample estimate needs draw probabilities in (0, 1]; entry " +
                       std::to_string(k) + " is " + std::to_string(pi));
    }
    weights(static_cast<Eigen::Index>(k)) = 1.0 / pi;
  }
  EstimateResult fit = weighted_ls_fit(sub, weights);
  fit.method = "subsample-weighted";
  return fit;
}

}  // namespace subsample
