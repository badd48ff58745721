#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace subsample::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20210917;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericalError = 2;

/// Every setting that can influence a command's results. The resolved
/// values are echoed under "config" in each JSON document, and
/// `--config FILE` accepts that object back.
struct RunConfig {
  std::string command;

  // Data source: a CSV file, or synthetic data when `input` is empty.
  std::string input;
  std::string response;
  std::vector<std::string> predictors;
  std::vector<std::string> log_columns;
  std::size_t drop_head_rows = 0;
  bool intercept = false;

  std::string family = "fig2";
  long long n = 1000;
  long long p = 2;
  double df = 5.0;
  double noise_sd = 1.0;
  std::vector<double> beta0;

  std::vector<std::string> scheme;
  std::optional<double> alpha;
  std::vector<std::size_t> r;
  std::size_t reps = 100;
  std::uint64_t seed = kDefaultSeed;
  std::string mode = "weighted";
  std::string criterion = "D";
  std::optional<double> sigma2;
};

/// Full command-line entry point: argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subsample::cli
