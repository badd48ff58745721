#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// factorization paths it is used to check: hat matrices come from explicit
// normal-equation inverses, subset masses from direct determinants.

#include "subsample/core.hpp"
#include "subsample/optdesign.hpp"
#include "subsample/rng.hpp"
#include "subsample/volume.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace subsample::testing {

inline Matrix gaussian_matrix(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

inline Vector gaussian_vector(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

inline Dataset gaussian_dataset(Rng& rng, Eigen::Index n, Eigen::Index p, double noise = 1.0) {
  Matrix x = gaussian_matrix(rng, n, p);
  Vector beta = Vector::LinSpaced(p, 1.0, static_cast<double>(p));
  Vector y = x * beta + noise * gaussian_vector(rng, n);
  return Dataset(std::move(x), std::move(y));
}

/// Explicit (X^T X)^{-1} by LU inverse of the normal matrix.
inline Matrix normal_inverse(const Matrix& x) { return (x.transpose() * x).inverse(); }

inline Vector hat_diagonal_oracle(const Matrix& x) {
  const Matrix h = x * normal_inverse(x) * x.transpose();
  return h.diagonal();
}

/// Random strictly positive point of the simplex (normalized Exp(1) draws).
inline Vector random_simplex(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double u;
    do u = rng.uniform(); while (u == 0.0);
    v(i) = -std::log(u);
  }
  return v / v.sum();
}

/// Visits every size-r subset of {0..n-1} in lexicographic order.
inline void for_each_subset(std::size_t n, std::size_t r,
                            const std::function<void(const std::vector<RowIndex>&)>& visit) {
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(r), true);
  std::vector<std::vector<RowIndex>> all;
  do {
    std::vector<RowIndex> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) s.push_back(i);
    }
    all.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  std::sort(all.begin(), all.end());
  for (const auto& s : all) visit(s);
}

inline Matrix rows_of(const Matrix& x, const std::vector<RowIndex>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

inline double binomial_oracle(std::size_t n, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return out;
}

/// Trace of the sample covariance of a set of vectors.
inline double trace_covariance(const std::vector<Vector>& samples) {
  const auto m = static_cast<double>(samples.size());
  Vector mean = Vector::Zero(samples.front().size());
  for (const auto& s : samples) mean += s;
  mean /= m;
  double ss = 0.0;
  for (const auto& s : samples) ss += (s - mean).squaredNorm();
  return ss / (m - 1.0);
}

/// Closed-form standard volume masses from direct determinants.
inline std::map<std::vector<RowIndex>, double> standard_oracle(const Matrix& x, std::size_t r) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  const double full = (x.transpose() * x).determinant();
  const double norm = binomial_oracle(n - p, r - p) * full;
  std::map<std::vector<RowIndex>, double> out;
  for_each_subset(n, r, [&](const std::vector<RowIndex>& s) {
    const Matrix xs = rows_of(x, s);
    out[s] = (xs.transpose() * xs).determinant() / norm;
  });
  return out;
}

/// Leveraged masses over every ordered sequence, by brute force.
inline std::map<std::vector<RowIndex>, double> leveraged_oracle(const Matrix& x, std::size_t r) {
  const auto n = static_cast<std::size_t>(x.rows());
  const Vector q = hat_diagonal_oracle(x) / static_cast<double>(x.cols());
  std::map<std::vector<RowIndex>, double> out;
  std::vector<RowIndex> tau(r, 0);
  double total = 0.0;
  while (true) {
    Matrix m = Matrix::Zero(x.cols(), x.cols());
    double prod = 1.0;
    for (const RowIndex i : tau) {
      const auto k = static_cast<Eigen::Index>(i);
      m += x.row(k).transpose() * x.row(k) / q(k);
      prod *= q(k);
    }
    out[tau] = m.determinant() * prod;
    total += out[tau];
    std::size_t pos = 0;
    while (pos < r && ++tau[pos] == n) tau[pos++] = 0;
    if (pos == r) break;
  }
  for (auto& [key, mass] : out) mass /= total;
  return out;
}

/// Criterion of (X_S^T X_S)^{-1} from an explicit inverse and eigensolver.
inline double direct_criterion(const Matrix& x, const std::vector<RowIndex>& s, Criterion c) {
  const Matrix xs = rows_of(x, s);
  const Matrix inv = (xs.transpose() * xs).inverse();
  switch (c) {
    case Criterion::kA: return inv.trace();
    case Criterion::kD: return inv.determinant();
    case Criterion::kE: return Eigen::SelfAdjointEigenSolver<Matrix>(inv).eigenvalues().maxCoeff();
  }
  return 0.0;
}

/// Literal IBOSS: per column, sort remaining rows ascending (ties by index),
/// take k; then descending (ties by index), take k.
inline std::vector<RowIndex> iboss_oracle(const Matrix& x, std::size_t r) {
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t k = r / (2 * static_cast<std::size_t>(x.cols()));
  std::set<RowIndex> chosen;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (const bool smallest : {true, false}) {
      std::vector<RowIndex> rest;
      for (RowIndex i = 0; i < n; ++i) {
        if (!chosen.contains(i)) rest.push_back(i);
      }
      std::stable_sort(rest.begin(), rest.end(), [&](RowIndex a, RowIndex b) {
        const double va = x(static_cast<Eigen::Index>(a), j);
        const double vb = x(static_cast<Eigen::Index>(b), j);
        return smallest ? va < vb : va > vb;
      });
      chosen.insert(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  return {chosen.begin(), chosen.end()};
}

inline double brute_force_optimum(const Matrix& x, std::size_t r, Criterion c) {
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(static_cast<std::size_t>(x.rows()), r, [&](const std::vector<RowIndex>& s) {
    const Matrix xs = rows_of(x, s);
    if (Eigen::FullPivLU<Matrix>(xs.transpose() * xs).rank() < x.cols()) return;
    best = std::min(best, direct_criterion(x, s, c));
  });
  return best;
}

/// TV distance between sampler frequencies and an exact mass table.
inline double empirical_tv(const VolumeSampler& sampler, const std::map<std::vector<RowIndex>, double>& oracle,
                           int draws, std::uint64_t seed) {
  std::map<std::vector<RowIndex>, double> freq;
  Rng rng(seed);
  for (int k = 0; k < draws; ++k) freq[sampler.sample(rng).indices] += 1.0 / draws;
  double tv = 0.0;
  for (const auto& [key, mass] : oracle) {
    const auto it = freq.find(key);
    tv += std::abs(mass - (it == freq.end() ? 0.0 : it->second));
  }
  for (const auto& [key, f] : freq) {
    if (!oracle.contains(key)) tv += f;
  }
  return 0.5 * tv;
}

}  // namespace subsample::testing
