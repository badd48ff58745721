#include "subsample/bench.hpp"

#include "subsample/errors.hpp"
#include "subsample/rng.hpp"
#include "subsample/sampler.hpp"
#include "subsample/volume.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <thread>

namespace subsample {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

struct Outcome {
  bool ok = false;
  double error = 0.0;
  double millis = 0.0;
  std::size_t effective_r = 0;
  std::string message;
};

Vector fit_method(const Dataset& boot, const Method& method, std::size_t r, std::uint64_t seed,
                  const EmseOptions& options, std::size_t& effective_r) {
  effective_r = r;
  switch (method.kind) {
    case MethodKind::kFull:
      effective_r = static_cast<std::size_t>(boot.n());
      return ols_fit(boot).beta;
    case MethodKind::kRandomized: {
      const std::optional<double> alpha =
          method.scheme == Scheme::kSlev ? std::optional<double>(options.alpha) : std::nullopt;
      const ProbabilityVector probs = compute_probabilities(boot, method.scheme, alpha);
      const SubsampleDraw d = draw(probs, r, seed);
      const EstimateMode mode = method.scheme == Scheme::kRand ? EstimateMode::kPlain : EstimateMode::kWeighted;
      return subsample_estimate(boot, d, mode).beta;
    }
    case MethodKind::kIboss: {
      const auto block = 2 * static_cast<std::size_t>(boot.p());
      effective_r = (r / block) * block;
      if (effective_r == 0) throw InputError("IBOSS needs r >= 2p");
      const SubsetSelection sel = iboss_select(boot, effective_r);
      return ols_fit(boot.select_rows(sel.indices)).beta;
    }
    case MethodKind::kGreedy: {
      const SubsetSelection sel = greedy_select(boot, r, options.criterion);
      return ols_fit(boot.select_rows(sel.indices)).beta;
    }
    case MethodKind::kExchange: {
      const SubsetSelection sel = exchange_improve(boot, greedy_select(boot, r, options.criterion));
      return ols_fit(boot.select_rows(sel.indices)).beta;
    }
    case MethodKind::kVolume: {
      const VolumeSampleResult v = volume_sample(boot, r, VolumeVariant::kStandard, seed);
      return ols_fit(boot.select_rows(v.draw.indices)).beta;
    }
    case MethodKind::kLeveragedVolume: {
      const VolumeSampleResult v = volume_sample(boot, r, VolumeVariant::kLeveraged, seed);
      Vector weights(static_cast<Eigen::Index>(v.draw.indices.size()));
      for (std::size_t k = 0; k < v.draw.proposal_probs.size(); ++k) {
        weights(static_cast<Eigen::Index>(k)) = 1.0 / v.draw.proposal_probs[k];
      }
      return weighted_ls_fit(boot.select_rows(v.draw.indices), weights).beta;
    }
  }
  throw InputError("unhandled method");
}

std::vector<RowIndex> bootstrap_rows(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RowIndex> rows(static_cast<std::size_t>(n));
  for (auto& i : rows) i = static_cast<RowIndex>(rng.below(static_cast<std::uint64_t>(n)));
  return rows;
}

}  // namespace

std::string_view design_family_name(DesignFamily f) noexcept {
  switch (f) {
    case DesignFamily::kGaussian:
      return "gaussian";
    case DesignFamily::kStudentT:
      return "student_t";
    case DesignFamily::kFig2:
      return "fig2";
  }
  return "?";
}

DesignFamily parse_design_family(std::string_view name) {
  const std::string key = upper(name);
  if (key == "GAUSSIAN") return DesignFamily::kGaussian;
  if (key == "STUDENT_T" || key == "T") return DesignFamily::kStudentT;
  if (key == "FIG2") return DesignFamily::kFig2;
  throw InputError("unknown design family '" + std::string(name) + "' (expected gaussian, student_t or fig2)");
}

SyntheticSpec fig2_spec(Eigen::Index n) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = 2;
  spec.family = DesignFamily::kFig2;
  spec.df = 5.0;
  spec.beta0 = Vector::Ones(2);
  spec.noise_sd = 1.0;
  return spec;
}

void validate(const SyntheticSpec& spec) {
  if (spec.n < 1) throw InputError("synthetic n must be at least 1");
  if (spec.p < 1) throw InputError("synthetic p must be at least 1");
  if (spec.family == DesignFamily::kFig2 && spec.p != 2) {
    throw InputError("fig2 family has exactly p = 2 (intercept and one t column)");
  }
  if (spec.beta0.size() != 0 && spec.beta0.size() != spec.p) {
    throw InputError("beta0 length does not match p");
  }
  if (spec.beta0.size() != 0 && !spec.beta0.allFinite()) throw InputError("beta0 must be finite");
  if (spec.family != DesignFamily::kGaussian && !(spec.df > 2.0 && std::isfinite(spec.df))) {
    throw InputError("student t degrees of freedom must exceed 2");
  }
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw InputError("noise_sd must be finite and non-negative");
  }
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  const Vector beta0 = spec.beta0.size() == 0 ? Vector::Ones(spec.p) : spec.beta0;
  Rng rng(seed);
  Matrix x(spec.n, spec.p);
  Vector y(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.p; ++j) {
      switch (spec.family) {
        case DesignFamily::kGaussian:
          x(i, j) = rng.normal();
          break;
        case DesignFamily::kStudentT:
          x(i, j) = rng.student_t(spec.df);
          break;
        case DesignFamily::kFig2:
          x(i, j) = j == 0 ? 1.0 : rng.student_t(spec.df);
          break;
      }
    }
    y(i) = x.row(i).dot(beta0) + spec.noise_sd * rng.normal();
  }
  return Dataset(std::move(x), std::move(y));
}

Method parse_method(std::string_view name) {
  const std::string key = upper(name);
  Method m;
  m.name = key;
  if (key == "FULL") return m;
  if (key == "IBOSS") {
    m.kind = MethodKind::kIboss;
    return m;
  }
  if (key == "GREEDY") {
    m.kind = MethodKind::kGreedy;
    return m;
  }
  if (key == "EXCHANGE") {
    m.kind = MethodKind::kExchange;
    return m;
  }
  if (key == "VOLUME") {
    m.kind = MethodKind::kVolume;
    return m;
  }
  if (key == "LVOLUME") {
    m.kind = MethodKind::kLeveragedVolume;
    return m;
  }
  try {
    m.scheme = parse_scheme(key);
  } catch (const InputError&) {
    throw InputError("unknown method '" + std::string(name) + "'");
  }
  m.kind = MethodKind::kRandomized;
  return m;
}

std::vector<std::string> registered_methods() {
  return {"FULL", "RAND", "BLEV", "SLEV", "IC", "RL", "PL", "IBOSS", "GREEDY", "EXCHANGE", "VOLUME", "LVOLUME"};
}

std::vector<std::size_t> default_r_grid(Eigen::Index p) {
  const auto q = static_cast<std::size_t>(p);
  return {5 * q, 10 * q, 15 * q, 20 * q};
}

std::string dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* bytes, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(bytes);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= c[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t dims[2] = {data.n(), data.p()};
  feed(dims, sizeof dims);
  feed(data.design().data(), sizeof(double) * static_cast<std::size_t>(data.design().size()));
  feed(data.response().data(), sizeof(double) * static_cast<std::size_t>(data.response().size()));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BenchmarkReport run_emse(const Dataset& data, const EmseOptions& options) {
  if (options.reps < 1) throw InputError("reps must be at least 1");
  if (options.methods.empty()) throw InputError("no methods requested");
  const std::vector<std::size_t> r_values =
      options.r_values.empty() ? default_r_grid(data.p()) : options.r_values;
  for (const std::size_t r : r_values) {
    if (r < static_cast<std::size_t>(data.p())) {
      throw InputError("every r must be at least p (got r = " + std::to_string(r) + ")");
    }
  }
  std::vector<Method> methods;
  for (const auto& name : options.methods) methods.push_back(parse_method(name));
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");

  BenchmarkReport report;
  report.reps = options.reps;
  report.seed = options.seed;
  report.dataset_fingerprint = dataset_fingerprint(data);
  report.beta_ols = ols_fit(data).beta;

  const std::size_t cells = methods.size() * r_values.size();
  // outcomes[rep * cells + m * |r| + k]
  std::vector<Outcome> outcomes(options.reps * cells);

  auto run_replicate = [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(options.seed, rep);
    const Dataset boot = data.select_rows(bootstrap_rows(data.n(), rep_seed));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const std::uint64_t method_seed = derive_seed(rep_seed, hash_name(methods[m].name));
      for (std::size_t k = 0; k < r_values.size(); ++k) {
        Outcome& out = outcomes[rep * cells + m * r_values.size() + k];
        const auto start = std::chrono::steady_clock::now();
        try {
          const Vector beta = fit_method(boot, methods[m], r_values[k], derive_seed(method_seed, r_values[k]),
                                         options, out.effective_r);
          out.error = (beta - report.beta_ols).squaredNorm();
          out.ok = std::isfinite(out.error);
          if (!out.ok) out.message = "non-finite estimate";
        } catch (const Error& e) {
          out.ok = false;
          out.message = e.what();
        }
        if (options.timing) {
          out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, options.reps));
  if (threads == 1) {
    for (std::size_t rep = 0; rep < options.reps; ++rep) run_replicate(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t rep = next++; rep < options.reps; rep = next++) run_replicate(rep);
      });
    }
  }

  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t k = 0; k < r_values.size(); ++k) {
      EmseRecord rec;
      rec.method = methods[m].name;
      rec.r = r_values[k];
      rec.effective_r = r_values[k];
      double sum = 0.0;
      double time_sum = 0.0;
      for (std::size_t rep = 0; rep < options.reps; ++rep) {
        const Outcome& o = outcomes[rep * cells + m * r_values.size() + k];
        time_sum += o.millis;
        if (o.ok) {
          ++rec.successes;
          sum += o.error;
          rec.effective_r = o.effective_r;
        } else {
          ++rec.failures;
          if (rec.first_error.empty()) rec.first_error = o.message;
        }
      }
      rec.failed = 2 * rec.failures > options.reps;
      rec.mean_time_ms = time_sum / static_cast<double>(options.reps);
      if (rec.successes == 0) {
        rec.emse = std::numeric_limits<double>::quiet_NaN();
        rec.emse_sd = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.emse = sum / static_cast<double>(rec.successes);
        double ss = 0.0;
        for (std::size_t rep = 0; rep < options.reps; ++rep) {
          const Outcome& o = outcomes[rep * cells + m * r_values.size() + k];
          if (o.ok) ss += (o.error - rec.emse) * (o.error - rec.emse);
        }
        rec.emse_sd = rec.successes > 1 ? std::sqrt(ss / static_cast<double>(rec.successes - 1)) : 0.0;
      }
      report.records.push_back(std::move(rec));
    }
  }
  return report;
}

}  // namespace subsample
