#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subsample/bench.hpp"
#include "subsample/errors.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace subsample;
using namespace subsample::testing;

namespace {

bool same_records(const BenchmarkReport& a, const BenchmarkReport& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const EmseRecord& x = a.records[k];
    const EmseRecord& y = b.records[k];
    if (x.method != y.method || x.r != y.r || x.emse != y.emse || x.emse_sd != y.emse_sd ||
        x.successes != y.successes || x.effective_r != y.effective_r) {
      return false;
    }
  }
  return a.dataset_fingerprint == b.dataset_fingerprint;
}

const EmseRecord& find(const BenchmarkReport& report, const std::string& method, std::size_t r) {
  return *std::find_if(report.records.begin(), report.records.end(),
                       [&](const EmseRecord& rec) { return rec.method == method && rec.r == r; });
}

}  // namespace

TEST_CASE("synthetic generation is seeded and validated") {
  const SyntheticSpec spec = fig2_spec(500);
  const Dataset a = generate_synthetic(spec, 1);
  const Dataset b = generate_synthetic(spec, 1);
  CHECK(a.design() == b.design());
  CHECK(a.response() == b.response());
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
  CHECK(dataset_fingerprint(a) != dataset_fingerprint(generate_synthetic(spec, 2)));
  CHECK(dataset_fingerprint(a).size() == 16);
  CHECK((a.design().col(0).array() == 1.0).all());

  SyntheticSpec bad = spec;
  bad.df = 2.0;
  bad.family = DesignFamily::kStudentT;
  CHECK_THROWS_AS(generate_synthetic(bad, 1), InputError);
  bad = spec;
  bad.p = 3;
  CHECK_THROWS_AS(validate(bad), InputError);
  bad = spec;
  bad.noise_sd = -1.0;
  CHECK_THROWS_AS(validate(bad), InputError);
  CHECK(parse_design_family("Student_T") == DesignFamily::kStudentT);
}

TEST_CASE("noiseless data recovers beta0") {
  for (const DesignFamily family : {DesignFamily::kGaussian, DesignFamily::kStudentT}) {
    SyntheticSpec spec;
    spec.n = 200;
    spec.p = 4;
    spec.family = family;
    spec.beta0 = Vector{{0.5, -1.0, 2.0, 3.0}};
    spec.noise_sd = 0.0;
    const Dataset d = generate_synthetic(spec, 9);
    CHECK((ols_fit(d).beta - spec.beta0).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("toy model t column is centered") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = generate_synthetic(fig2_spec(1000), seed);
    CHECK(std::abs(d.design().col(1).mean()) < 0.2);
  }
}

TEST_CASE("method registry and r grid") {
  CHECK(default_r_grid(3) == std::vector<std::size_t>{15, 30, 45, 60});
  for (const auto& name : registered_methods()) CHECK(parse_method(name).name == name);
  CHECK(parse_method("blev").kind == MethodKind::kRandomized);
  CHECK(parse_method("lvolume").kind == MethodKind::kLeveragedVolume);
  CHECK_THROWS_AS(parse_method("UNIF"), InputError);
}

TEST_CASE("bootstrap EMSE report") {
  const Dataset d = generate_synthetic(fig2_spec(1000), 3);
  EmseOptions options;
  options.methods = {"FULL", "RAND", "BLEV", "SLEV", "IC", "RL", "PL", "IBOSS", "GREEDY", "EXCHANGE"};
  options.reps = 30;
  options.seed = 11;
  const BenchmarkReport report = run_emse(d, options);
  CHECK(report.records.size() == options.methods.size() * 4);
  CHECK(report.reps == 30);
  CHECK((report.beta_ols - ols_fit(d).beta).norm() == 0.0);

  for (const std::size_t r : default_r_grid(2)) {
    const double control = find(report, "FULL", r).emse;
    for (const auto& rec : report.records) {
      CHECK(rec.emse >= 0.0);
      CHECK_FALSE(rec.failed);
      if (rec.r == r && rec.method != "FULL") CHECK(control < rec.emse);
    }
  }
  CHECK(find(report, "IBOSS", 10).effective_r == 8);
  CHECK(find(report, "IBOSS", 20).effective_r == 20);
  CHECK(find(report, "FULL", 10).effective_r == 1000);
  CHECK(find(report, "RAND", 10).mean_time_ms == 0.0);
}

TEST_CASE("report is invariant to thread count and method order") {
  const Dataset d = generate_synthetic(fig2_spec(400), 4);
  EmseOptions options;
  options.methods = {"RAND", "BLEV", "IBOSS", "EXCHANGE"};
  options.r_values = {10, 40};
  options.reps = 12;
  options.seed = 5;
  const BenchmarkReport serial = run_emse(d, options);
  options.threads = 4;
  CHECK(same_records(serial, run_emse(d, options)));

  options.methods = {"EXCHANGE", "IBOSS", "BLEV", "RAND"};
  const BenchmarkReport reordered = run_emse(d, options);
  for (const auto& rec : serial.records) {
    const EmseRecord& other = find(reordered, rec.method, rec.r);
    CHECK(other.emse == rec.emse);
    CHECK(other.emse_sd == rec.emse_sd);
  }
}

TEST_CASE("single replicate is reproducible") {
  const Dataset d = generate_synthetic(fig2_spec(300), 6);
  EmseOptions options;
  options.methods = {"RAND", "SLEV"};
  options.reps = 1;
  options.seed = 99;
  const BenchmarkReport a = run_emse(d, options);
  CHECK(same_records(a, run_emse(d, options)));
  CHECK(a.records.front().emse_sd == 0.0);
}

TEST_CASE("persistent failures mark the record instead of aborting") {
  const Dataset d = generate_synthetic(fig2_spec(1000), 7);
  EmseOptions options;
  options.methods = {"VOLUME", "RAND"};
  options.r_values = {20};
  options.reps = 3;
  const BenchmarkReport report = run_emse(d, options);
  const EmseRecord& vol = find(report, "VOLUME", 20);
  CHECK(vol.failed);
  CHECK(vol.failures == 3);
  CHECK(std::isnan(vol.emse));
  CHECK_FALSE(vol.first_error.empty());
  CHECK_FALSE(find(report, "RAND", 20).failed);

  options.r_values = {1};
  CHECK_THROWS_AS(run_emse(d, options), InputError);
}

TEST_CASE("volume methods run at desk scale") {
  SyntheticSpec spec;
  spec.n = 12;
  spec.p = 2;
  spec.family = DesignFamily::kGaussian;
  const Dataset d = generate_synthetic(spec, 8);
  EmseOptions options;
  options.methods = {"VOLUME", "LVOLUME"};
  options.r_values = {4, 10};
  options.reps = 10;
  const BenchmarkReport report = run_emse(d, options);
  for (const auto& rec : report.records) {
    CHECK(rec.successes >= 8);
    CHECK(std::isfinite(rec.emse));
  }
}

TEST_CASE("EMSE shrinks with r on the toy model") {
  std::vector<double> at5(3, 0.0), at20(3, 0.0);
  const std::vector<std::string> methods{"RAND", "BLEV", "SLEV"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset d = generate_synthetic(fig2_spec(1000), derive_seed(seed, hash_name("data")));
    EmseOptions options;
    options.methods = methods;
    options.r_values = {10, 40};
    options.reps = 50;
    options.seed = seed;
    const BenchmarkReport report = run_emse(d, options);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      at5[m] += find(report, methods[m], 10).emse;
      at20[m] += find(report, methods[m], 40).emse;
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) CHECK(at20[m] < at5[m]);
}
