#include "subsample/probs.hpp"

#include "subsample/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace subsample {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 6> kNames{{
    {Scheme::kRand, "RAND"},
    {Scheme::kBlev, "BLEV"},
    {Scheme::kSlev, "SLEV"},
    {Scheme::kIc, "IC"},
    {Scheme::kRl, "RL"},
    {Scheme::kPl, "PL"},
}};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

ThinSvd full_rank_svd(const Matrix& design, Scheme scheme) {
  ThinSvd svd = thin_svd(design);
  if (svd.rank < design.cols()) {
    throw RankError(std::string(scheme_name(scheme)) + " probabilities need a full-column-rank design (rank " +
                    std::to_string(svd.rank) + " < p = " + std::to_string(design.cols()) + ")");
  }
  return svd;
}

Vector leverage_from(const ThinSvd& svd, Scheme scheme) {
  Vector h = svd.u.rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (!(h(i) > 0.0)) {
      throw DegenerateError(std::string(scheme_name(scheme)) + ": row " + std::to_string(i) +
                            " has zero leverage");
    }
  }
  return h;
}

Vector normalized(Vector v) {
  const double total = v.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateError("probability weights sum to zero");
  v /= total;
  return v;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) noexcept {
  for (const auto& [s, name] : kNames) {
    if (s == scheme) return name;
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  const std::string key = upper(name);
  for (const auto& [s, n] : kNames) {
    if (n == key) return s;
  }
  throw InputError("unknown sampling scheme '" + std::string(name) + "'");
}

void validate_probabilities(const Vector& probs) {
  if (probs.size() < 1) throw InputError("probability vector is empty");
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs(i)) || probs(i) < 0.0) {
      throw InputError("probability " + std::to_string(i) + " is negative or non-finite");
    }
  }
  if (std::abs(probs.sum() - 1.0) > 1e-10) throw InputError("probabilities do not sum to 1");
}

ProbabilityVector compute_probabilities(const Matrix& design, Scheme scheme,
                                        std::optional<double> alpha) {
  require_finite(design, "design");
  if (scheme == Scheme::kSlev) {
    if (!alpha) throw InputError("SLEV requires alpha");
    if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw InputError("SLEV alpha must lie in [0, 1]");
  } else if (alpha) {
    throw InputError("alpha applies to SLEV only");
  }

  const Eigen::Index n = design.rows();
  const auto p = static_cast<double>(design.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  ProbabilityVector out;
  out.scheme = scheme;

  switch (scheme) {
    case Scheme::kRand:
      out.probs = Vector::Constant(n, inv_n);
      return out;
    case Scheme::kBlev: {
      const Vector h = leverage_from(full_rank_svd(design, scheme), scheme);
      out.probs = normalized(h / p);
      return out;
    }
    case Scheme::kSlev: {
      const double a = *alpha;
      out.alpha = a;
      if (a == 0.0) {
        out.probs = Vector::Constant(n, inv_n);
        return out;
      }
      const Vector h = leverage_from(full_rank_svd(design, scheme), scheme);
      // h sums to p up to rounding; normalizing the leverage part alone keeps
      // the uniform floor (1 - alpha)/n exact.
      const Vector blev = normalized(h / p);
      out.probs = (a * blev).array() + (1.0 - a) * inv_n;
      return out;
    }
    case Scheme::kIc: {
      // With X = U S V^T, (X^T X)^{-1} x_i = V S^{-1} u_i, so the norm is ||S^{-1} u_i||.
      const ThinSvd svd = full_rank_svd(design, scheme);
      const Vector inv_s = svd.singular_values.cwiseInverse();
      const Matrix scaled = svd.u * inv_s.asDiagonal();
      out.probs = normalized(scaled.rowwise().norm());
      return out;
    }
    case Scheme::kRl: {
      const Vector h = leverage_from(full_rank_svd(design, scheme), scheme);
      out.probs = normalized(h.cwiseSqrt());
      return out;
    }
    case Scheme::kPl: {
      const Vector norms = design.rowwise().norm();
      if (!(norms.sum() > 0.0)) throw DegenerateError("PL: every row of the design is zero");
      out.probs = normalized(norms);
      return out;
    }
  }
  throw InputError("unhandled scheme");
}

ProbabilityVector compute_probabilities(const Dataset& data, Scheme scheme,
                                        std::optional<double> alpha) {
  return compute_probabilities(data.design(), scheme, alpha);
}

}  // namespace subsample
