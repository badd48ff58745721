#pragma once

#include "subsample/core.hpp"
#include "subsample/optdesign.hpp"
#include "subsample/probs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace subsample {

enum class DesignFamily {
  kGaussian,  // every column i.i.d. N(0, 1)
  kStudentT,  // every column i.i.d. t(df)
  kFig2,      // intercept column plus one t(5) column, beta0 = (1, 1)
};

std::string_view design_family_name(DesignFamily f) noexcept;
DesignFamily parse_design_family(std::string_view name);

struct SyntheticSpec {
  Eigen::Index n = 1000;
  Eigen::Index p = 2;
  DesignFamily family = DesignFamily::kFig2;
  double df = 5.0;
  /// Empty means all ones.
  Vector beta0;
  double noise_sd = 1.0;
};

/// The heavy-tailed toy model y = x + 1 + eps, x ~ t(5), eps ~ N(0, 1).
SyntheticSpec fig2_spec(Eigen::Index n = 1000);

/// Throws InputError on inconsistent dimensions or df <= 2.
void validate(const SyntheticSpec& spec);

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Estimators the EMSE protocol can run on a bootstrap sample.
enum class MethodKind {
  kFull,            // OLS on the whole bootstrap sample (control)
  kRandomized,      // probability scheme; RAND plain, others weighted
  kIboss,
  kGreedy,          // greedy optimal-design selection + OLS
  kExchange,        // greedy followed by exchange refinement + OLS
  kVolume,          // standard volume sampling + OLS (n <= 20)
  kLeveragedVolume, // leveraged volume sampling + 1/q weighted LS
};

struct Method {
  std::string name;
  MethodKind kind = MethodKind::kFull;
  Scheme scheme = Scheme::kRand;
};

/// Case-insensitive: FULL, RAND, BLEV, SLEV, IC, RL, PL, IBOSS, GREEDY,
/// EXCHANGE, VOLUME, LVOLUME.
Method parse_method(std::string_view name);
std::vector<std::string> registered_methods();

/// {5p, 10p, 15p, 20p}.
std::vector<std::size_t> default_r_grid(Eigen::Index p);

inline constexpr std::size_t kDefaultReps = 100;

struct EmseOptions {
  std::vector<std::string> methods;
  std::vector<std::size_t> r_values;
  std::size_t reps = kDefaultReps;
  std::uint64_t seed = 0;
  double alpha = kDefaultSlevAlpha;
  Criterion criterion = Criterion::kD;
  std::size_t threads = 1;
  bool timing = false;
};

struct EmseRecord {
  std::string method;
  std::size_t r = 0;
  /// Subset size actually used (IBOSS rounds r down to a multiple of 2p).
  std::size_t effective_r = 0;
  double emse = 0.0;
  double emse_sd = 0.0;
  /// Mean wall-clock milliseconds per call; 0 unless timing was requested.
  double mean_time_ms = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  /// More than half of the replicates failed.
  bool failed = false;
  std::string first_error;
};

struct BenchmarkReport {
  std::vector<EmseRecord> records;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string dataset_fingerprint;
  Vector beta_ols;
};

/// 64-bit FNV-1a of the dataset's shape and raw values, as 16 hex digits.
std::string dataset_fingerprint(const Dataset& data);

/// Bootstrap EMSE protocol. For replicate i a bootstrap sample of n rows is
/// drawn with replacement, every (method, r) estimate is computed on it, and
/// ||beta_i - beta_OLS||^2 is accumulated against the full-data OLS fit.
/// Every random stream is keyed by (seed, replicate, method, r), so the
/// report does not depend on method order or thread count.
BenchmarkReport run_emse(const Dataset& data, const EmseOptions& options);

}  // namespace subsample
