#include "subsample/volume.hpp"

#include "subsample/errors.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace subsample {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(out);
}

/// det(A^T A) for the rows of `basis` listed in `rows`, via Householder QR.
double gram_determinant(const Matrix& basis, std::span<const RowIndex> rows) {
  Matrix sub(static_cast<Eigen::Index>(rows.size()), basis.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    sub.row(static_cast<Eigen::Index>(k)) = basis.row(static_cast<Eigen::Index>(rows[k]));
  }
  const Eigen::HouseholderQR<Matrix> qr(sub);
  double det = 1.0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const double rjj = qr.matrixQR()(j, j);
    det *= rjj * rjj;
  }
  return det;
}

/// det(sum_k u_k u_k^T / q_k). PSD by construction, so negative rounding
/// is clamped to zero.
double scaled_information_determinant(const Matrix& whitened, const Vector& q,
                                      std::span<const RowIndex> tau) {
  const Eigen::Index p = whitened.cols();
  Matrix info = Matrix::Zero(p, p);
  for (const RowIndex i : tau) {
    const auto row = static_cast<Eigen::Index>(i);
    info.selfadjointView<Eigen::Lower>().rankUpdate(whitened.row(row).transpose(), 1.0 / q(row));
  }
  info.triangularView<Eigen::StrictlyUpper>() = info.transpose();
  const double det = info.determinant();
  return det > 0.0 ? det : 0.0;
}

ThinSvd full_rank_basis(const Dataset& data, const char* what) {
  ThinSvd svd = thin_svd(data.design());
  if (svd.rank < data.p()) {
    throw RankError(std::string(what) + " needs a full-column-rank design");
  }
  return svd;
}

void check_size(const Dataset& data, std::size_t r) {
  if (r < static_cast<std::size_t>(data.p())) {
    throw InputError("volume sampling needs r >= p (r = " + std::to_string(r) +
                     ", p = " + std::to_string(data.p()) + ")");
  }
}

Vector leverage_proposal(const ThinSvd& svd) {
  Vector q = svd.u.rowwise().squaredNorm() / static_cast<double>(svd.u.cols());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!(q(i) > 0.0)) {
      throw DegenerateError("leveraged volume sampling needs every leverage score positive; row " +
                            std::to_string(i) + " has zero leverage");
    }
  }
  return q;
}

double sequence_count(Eigen::Index n, std::size_t r) {
  return std::pow(static_cast<double>(n), static_cast<double>(r));
}

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

SubsetDistribution standard_volume_distribution(const Dataset& data, std::size_t r) {
  const Eigen::Index n = data.n();
  if (n > kMaxVolumeEnumerationRows) {
    throw CapacityError("standard volume enumeration supports n <= " +
                        std::to_string(kMaxVolumeEnumerationRows) + " (n = " + std::to_string(n) + ")");
  }
  check_size(data, r);
  if (r > static_cast<std::size_t>(n)) throw InputError("volume sampling needs r <= n");
  const ThinSvd svd = full_rank_basis(data, "standard volume sampling");
  const auto p = static_cast<std::size_t>(data.p());
  // det(X_S^T X_S) / det(X^T X) = det(U_S^T U_S) since X_S = U_S S V^T.
  const double normalizer = binomial(static_cast<std::size_t>(n) - p, r - p);

  SubsetDistribution out;
  std::vector<RowIndex> subset(r);
  for (std::size_t k = 0; k < r; ++k) subset[k] = k;
  for (;;) {
    out.subsets.push_back(subset);
    out.masses.push_back(gram_determinant(svd.u, subset) / normalizer);
    // Next combination in lexicographic order.
    std::size_t k = r;
    while (k > 0 && subset[k - 1] == static_cast<RowIndex>(n) - r + (k - 1)) --k;
    if (k == 0) break;
    ++subset[k - 1];
    for (std::size_t j = k; j < r; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

SubsetDistribution leveraged_volume_distribution(const Dataset& data, std::size_t r) {
  check_size(data, r);
  const Eigen::Index n = data.n();
  if (sequence_count(n, r) > kMaxLeveragedEnumerationStates) {
    throw CapacityError("leveraged volume enumeration limited to " +
                        std::to_string(static_cast<long long>(kMaxLeveragedEnumerationStates)) +
                        " sequences");
  }
  const ThinSvd svd = full_rank_basis(data, "leveraged volume sampling");
  const Vector q = leverage_proposal(svd);

  SubsetDistribution out;
  std::vector<RowIndex> tau(r, 0);
  double total = 0.0;
  for (;;) {
    double weight = scaled_information_determinant(svd.u, q, tau);
    for (const RowIndex i : tau) weight *= q(static_cast<Eigen::Index>(i));
    out.subsets.push_back(tau);
    out.masses.push_back(weight);
    total += weight;
    std::size_t k = r;
    while (k > 0 && tau[k - 1] + 1 == static_cast<RowIndex>(n)) {
      tau[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
    ++tau[k - 1];
  }
  if (!(total > 0.0)) throw DegenerateError("every leveraged volume sequence has zero determinant");
  for (double& m : out.masses) m /= total;
  return out;
}

VolumeSampler::VolumeSampler(const Dataset& data, std::size_t r, VolumeVariant variant,
                             LeveragedMethod method)
    : variant_(variant), r_(r) {
  if (variant == VolumeVariant::kStandard) {
    distribution_ = standard_volume_distribution(data, r);
    table_.emplace(as_span(distribution_.masses));
    return;
  }

  check_size(data, r);
  const auto p = static_cast<std::size_t>(data.p());
  if (r <= 4 * p * p) {
    warnings_.push_back("leveraged volume sampling with r = " + std::to_string(r) +
                        " <= 4 p^2 = " + std::to_string(4 * p * p));
  }
  const bool small = sequence_count(data.n(), r) <= kMaxLeveragedEnumerationStates;
  if (method == LeveragedMethod::kEnumerate || (method == LeveragedMethod::kAuto && small)) {
    distribution_ = leveraged_volume_distribution(data, r);
    table_.emplace(as_span(distribution_.masses));
    q_ = leverage_proposal(thin_svd(data.design()));
    return;
  }
  const ThinSvd svd = full_rank_basis(data, "leveraged volume sampling");
  q_ = leverage_proposal(svd);
  whitened_ = svd.u;
  proposal_table_.emplace(std::span<const double>(q_.data(), static_cast<std::size_t>(q_.size())));
}

VolumeDraw VolumeSampler::sample(Rng& rng) const {
  if (!table_) return sample_rejection(rng);
  VolumeDraw out;
  out.indices = distribution_.subsets[table_->sample(rng)];
  if (variant_ == VolumeVariant::kLeveraged) {
    for (const RowIndex i : out.indices) out.proposal_probs.push_back(q_(static_cast<Eigen::Index>(i)));
  }
  return out;
}

VolumeDraw VolumeSampler::sample_rejection(Rng& rng) const {
  constexpr std::uint64_t kMaxAttempts = 10'000'000;
  const double bound = std::pow(static_cast<double>(r_), static_cast<double>(whitened_.cols()));
  VolumeDraw out;
  out.indices.resize(r_);
  for (std::uint64_t attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    for (auto& i : out.indices) i = proposal_table_->sample(rng);
    const double det = scaled_information_determinant(whitened_, q_, out.indices);
    if (rng.uniform() * bound < det) {
      out.attempts = attempt;
      for (const RowIndex i : out.indices) out.proposal_probs.push_back(q_(static_cast<Eigen::Index>(i)));
      return out;
    }
  }
  throw DegenerateError("leveraged volume rejection sampler exhausted its proposal budget");
}

VolumeSampleResult volume_sample(const Dataset& data, std::size_t r, VolumeVariant variant,
                                 std::uint64_t seed, LeveragedMethod method) {
  const VolumeSampler sampler(data, r, variant, method);
  Rng rng(seed);
  return {sampler.sample(rng), sampler.warnings()};
}

}  // namespace subsample
