#include "subsample/optdesign.hpp"

#include "subsample/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace subsample {

namespace {

constexpr double kExchangeRelativeGain = 1e-10;

Matrix information(const Matrix& design, std::span<const RowIndex> rows) {
  const Eigen::Index p = design.cols();
  Matrix info = Matrix::Zero(p, p);
  for (const RowIndex i : rows) {
    info.selfadjointView<Eigen::Lower>().rankUpdate(design.row(static_cast<Eigen::Index>(i)).transpose());
  }
  info.triangularView<Eigen::StrictlyUpper>() = info.transpose();
  return info;
}

/// log criterion of M^{-1} from the eigenvalues of the information matrix M,
/// or nullopt when M is numerically singular.
std::optional<double> log_criterion_of_information(const Matrix& info, Eigen::Index rows,
                                                   Criterion criterion) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(info, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lmax = lambda(lambda.size() - 1);
  const double tol = static_cast<double>(std::max(rows, info.cols())) *
                     std::numeric_limits<double>::epsilon() * lmax;
  if (!(lmax > 0.0) || lambda(0) <= tol) return std::nullopt;
  switch (criterion) {
    case Criterion::kA:
      return std::log(lambda.cwiseInverse().sum());
    case Criterion::kD:
      return -lambda.array().log().sum();
    case Criterion::kE:
      return -std::log(lambda(0));
  }
  return std::nullopt;
}

/// Singular values of the selected rows; throws RankError if rank < p.
Vector subset_singular_values(const Matrix& design, std::span<const RowIndex> indices) {
  const Eigen::Index p = design.cols();
  if (indices.size() < static_cast<std::size_t>(p)) {
    throw RankError("criterion needs at least p = " + std::to_string(p) + " rows, got " +
                    std::to_string(indices.size()));
  }
  Matrix sub(static_cast<Eigen::Index>(indices.size()), p);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= static_cast<RowIndex>(design.rows())) {
      throw InputError("row index " + std::to_string(indices[k]) + " out of range");
    }
    sub.row(static_cast<Eigen::Index>(k)) = design.row(static_cast<Eigen::Index>(indices[k]));
  }
  const Eigen::JacobiSVD<Matrix> svd(sub);
  const Vector& s = svd.singularValues();
  const double tol = rank_tolerance(sub.rows(), p, s(0));
  if (!(s(0) > 0.0) || s(p - 1) <= tol) {
    throw RankError("subset design is rank deficient; criterion is infinite");
  }
  return s;
}

void require_distinct(std::span<const RowIndex> indices, Eigen::Index n) {
  std::vector<RowIndex> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("selection contains a repeated row index");
  }
  if (!sorted.empty() && sorted.back() >= static_cast<RowIndex>(n)) {
    throw InputError("selection row index out of range");
  }
}

double value_or_infinity(const Dataset& data, std::span<const RowIndex> indices, Criterion c) {
  try {
    return criterion_value(data, indices, c);
  } catch (const RankError&) {
    return std::numeric_limits<double>::infinity();
  }
}

Criterion criterion_of(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kA:
      return Criterion::kA;
    case SelectionRule::kE:
      return Criterion::kE;
    case SelectionRule::kD:
    case SelectionRule::kIboss:
      return Criterion::kD;
  }
  return Criterion::kD;
}

SelectionRule rule_of(Criterion c) {
  switch (c) {
    case Criterion::kA:
      return SelectionRule::kA;
    case Criterion::kD:
      return SelectionRule::kD;
    case Criterion::kE:
      return SelectionRule::kE;
  }
  return SelectionRule::kD;
}

void check_subset_size(const Dataset& data, std::size_t r) {
  if (r < static_cast<std::size_t>(data.p())) {
    throw InputError("selection size r = " + std::to_string(r) + " is below p = " + std::to_string(data.p()));
  }
  if (r > static_cast<std::size_t>(data.n())) {
    throw InputError("selection size r = " + std::to_string(r) + " exceeds n = " + std::to_string(data.n()));
  }
}

}  // namespace

std::string_view criterion_name(Criterion c) noexcept {
  switch (c) {
    case Criterion::kA:
      return "A";
    case Criterion::kD:
      return "D";
    case Criterion::kE:
      return "E";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  if (name.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
      case 'A':
        return Criterion::kA;
      case 'D':
        return Criterion::kD;
      case 'E':
        return Criterion::kE;
      default:
        break;
    }
  }
  throw InputError("unknown optimality criterion '" + std::string(name) + "' (expected A, D or E)");
}

std::string_view selection_rule_name(SelectionRule rule) noexcept {
  return rule == SelectionRule::kIboss ? "IBOSS" : criterion_name(criterion_of(rule));
}

double log_criterion_value(const Matrix& design, std::span<const RowIndex> indices,
                           Criterion criterion) {
  const Vector s = subset_singular_values(design, indices);
  const Vector inv_sq = s.array().square().inverse();
  switch (criterion) {
    case Criterion::kA:
      return std::log(inv_sq.sum());
    case Criterion::kD:
      return -2.0 * s.array().log().sum();
    case Criterion::kE:
      return std::log(inv_sq(inv_sq.size() - 1));
  }
  return 0.0;
}

double criterion_value(const Dataset& data, std::span<const RowIndex> indices, Criterion criterion) {
  const Vector s = subset_singular_values(data.design(), indices);
  const Vector inv_sq = s.array().square().inverse();
  switch (criterion) {
    case Criterion::kA:
      return inv_sq.sum();
    case Criterion::kD:
      // Overflows to +inf rather than throwing for tiny singular values.
      return std::exp(-2.0 * s.array().log().sum());
    case Criterion::kE:
      return inv_sq(inv_sq.size() - 1);
  }
  return 0.0;
}

SubsetSelection iboss_select(const Dataset& data, std::size_t r) {
  const auto n = static_cast<std::size_t>(data.n());
  const auto p = static_cast<std::size_t>(data.p());
  if (r < 2 * p || r % (2 * p) != 0) {
    throw InputError("IBOSS needs r to be a positive multiple of 2p = " + std::to_string(2 * p) +
                     " (r = " + std::to_string(r) + ")");
  }
  if (r > n) throw InputError("IBOSS selection size r = " + std::to_string(r) + " exceeds n");
  const std::size_t quota = r / (2 * p);
  const Matrix& x = data.design();

  std::vector<bool> taken(n, false);
  std::vector<RowIndex> chosen;
  chosen.reserve(r);
  std::vector<RowIndex> pool;
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    auto value = [&](RowIndex i) { return x(static_cast<Eigen::Index>(i), col); };
    auto take = [&](auto less) {
      pool.clear();
      for (RowIndex i = 0; i < n; ++i) {
        if (!taken[i]) pool.push_back(i);
      }
      std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(quota), pool.end(), less);
      for (std::size_t k = 0; k < quota; ++k) {
        taken[pool[k]] = true;
        chosen.push_back(pool[k]);
      }
    };
    take([&](RowIndex a, RowIndex b) { return value(a) < value(b) || (value(a) == value(b) && a < b); });
    take([&](RowIndex a, RowIndex b) { return value(a) > value(b) || (value(a) == value(b) && a < b); });
  }
  std::sort(chosen.begin(), chosen.end());
  SubsetSelection out;
  out.rule = SelectionRule::kIboss;
  out.value = value_or_infinity(data, chosen, Criterion::kD);
  out.indices = std::move(chosen);
  return out;
}

SubsetSelection greedy_select(const Dataset& data, std::size_t r, Criterion criterion) {
  check_subset_size(data, r);
  const Matrix& x = data.design();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();

  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<RowIndex> chosen;
  chosen.reserve(r);

  // Maximal orthogonal residual start; each pick maximizes the Gram
  // determinant of the rows chosen so far.
  Matrix residual = x;
  const double scale = x.rowwise().squaredNorm().maxCoeff();
  for (Eigen::Index k = 0; k < p; ++k) {
    Eigen::Index best = -1;
    double best_norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double norm = residual.row(i).squaredNorm();
      if (norm > best_norm) {
        best_norm = norm;
        best = i;
      }
    }
    if (best < 0 || best_norm <= static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale) {
      throw RankError("design is rank deficient; cannot seed a full-rank selection");
    }
    taken[static_cast<std::size_t>(best)] = true;
    chosen.push_back(static_cast<RowIndex>(best));
    const Vector direction = residual.row(best).transpose() / std::sqrt(best_norm);
    residual -= (residual * direction) * direction.transpose();
  }

  Matrix info = information(x, chosen);
  while (chosen.size() < r) {
    const Eigen::LLT<Matrix> llt(info);
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const Vector xi = x.row(i).transpose();
      double score = 0.0;
      switch (criterion) {
        case Criterion::kD:
          // det(M + x x^T) = det(M) (1 + x^T M^{-1} x)
          score = xi.dot(llt.solve(xi));
          break;
        case Criterion::kA: {
          // tr((M + x x^T)^{-1}) = tr(M^{-1}) - ||M^{-1} x||^2 / (1 + x^T M^{-1} x)
          const Vector mx = llt.solve(xi);
          score = mx.squaredNorm() / (1.0 + xi.dot(mx));
          break;
        }
        case Criterion::kE: {
          const Matrix updated = info + xi * xi.transpose();
          score = Eigen::SelfAdjointEigenSolver<Matrix>(updated, Eigen::EigenvaluesOnly).eigenvalues()(0);
          break;
        }
      }
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    chosen.push_back(static_cast<RowIndex>(best));
    info.noalias() += x.row(best).transpose() * x.row(best);
  }

  std::sort(chosen.begin(), chosen.end());
  SubsetSelection out;
  out.rule = rule_of(criterion);
  out.value = value_or_infinity(data, chosen, criterion);
  out.indices = std::move(chosen);
  return out;
}

SubsetSelection exchange_improve(const Dataset& data, const SubsetSelection& selection) {
  const Criterion criterion = criterion_of(selection.rule);
  const Matrix& x = data.design();
  const Eigen::Index n = data.n();
  check_subset_size(data, selection.indices.size());
  require_distinct(selection.indices, n);

  std::vector<RowIndex> current = selection.indices;
  std::sort(current.begin(), current.end());
  // Throws RankError for a rank-deficient start.
  (void)subset_singular_values(x, current);
  const auto rows = static_cast<Eigen::Index>(current.size());
  const double log_threshold = std::log1p(-kExchangeRelativeGain);

  for (;;) {
    const Matrix info = information(x, current);
    const auto current_log = log_criterion_of_information(info, rows, criterion);
    if (!current_log) break;

    std::vector<bool> inside(static_cast<std::size_t>(n), false);
    for (const RowIndex i : current) inside[i] = true;

    double best_log = *current_log;
    std::size_t best_slot = 0;
    Eigen::Index best_row = -1;
    for (std::size_t slot = 0; slot < current.size(); ++slot) {
      const Eigen::Index out_row = static_cast<Eigen::Index>(current[slot]);
      const Matrix removed = info - x.row(out_row).transpose() * x.row(out_row);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (inside[static_cast<std::size_t>(j)]) continue;
        const Matrix swapped = removed + x.row(j).transpose() * x.row(j);
        const auto candidate = log_criterion_of_information(swapped, rows, criterion);
        if (candidate && *candidate < best_log) {
          best_log = *candidate;
          best_slot = slot;
          best_row = j;
        }
      }
    }
    if (best_row < 0 || !(best_log < *current_log + log_threshold)) break;
    current[best_slot] = static_cast<RowIndex>(best_row);
    std::sort(current.begin(), current.end());
  }

  SubsetSelection out;
  out.rule = rule_of(criterion);
  out.value = value_or_infinity(data, current, criterion);
  out.indices = std::move(current);
  return out;
}

}  // namespace subsample
