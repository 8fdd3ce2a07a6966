#include "bbal/prob_cov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbal/errors.hpp"
#include "bbal/normal.hpp"

namespace bbal {

double default_jitter(double trace, Eigen::Index b) {
  return 1e-10 * (1.0 + trace / static_cast<double>(std::max<Eigen::Index>(b, 1)));
}

Eigen::MatrixXd ClassProbCov::regularized(int c) const {
  Eigen::MatrixXd m = per_class.at(static_cast<std::size_t>(c));
  m.diagonal().array() += jitter_applied;
  return m;
}

void ProbSampleTensor::validate() const {
  if (points.empty()) return;
  const Eigen::Index s = points.front().rows();
  const Eigen::Index c = points.front().cols();
  for (const auto& m : points) {
    if (m.rows() != s || m.cols() != c)
      throw DomainError("probability tensor has ragged shapes");
    if ((m.array() < -1e-12).any() || (m.array() > 1.0 + 1e-12).any())
      throw DomainError("probability tensor entries must lie in [0,1]");
    const Eigen::ArrayXd rowsum = m.rowwise().sum().array();
    if ((rowsum - 1.0).abs().maxCoeff() > 1e-6)
      throw DomainError("probability tensor rows must sum to 1 within 1e-6");
  }
}

double probit_mean(double mu, double var) {
  if (!std::isfinite(mu)) throw DomainError("probit_mean: mu not finite");
  if (!(var >= 0.0) || !std::isfinite(var))
    throw DomainError("probit_mean: variance must be nonnegative");
  return std_normal_cdf(mu / std::sqrt(var + 1.0));
}

double probit_cov(const Eigen::Vector2d& mu, const Eigen::Matrix2d& S) {
  Bvn2 b;
  b.mean = mu;
  b.cov = S + Eigen::Matrix2d::Identity();
  const double joint = bvn_orthant(b);
  return joint - probit_mean(mu(0), S(0, 0)) * probit_mean(mu(1), S(1, 1));
}

ClassProbCov analytic_class_cov(const GPJointPosterior& post) {
  const Eigen::Index b = post.mu.size();
  Eigen::MatrixXd m(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = i; j < b; ++j) {
      Eigen::Vector2d mu(post.mu(i), post.mu(j));
      Eigen::Matrix2d s;
      s << post.S(i, i), post.S(i, j), post.S(i, j), post.S(j, j);
      const double cij = probit_cov(mu, s);
      m(i, j) = cij;
      m(j, i) = cij;
    }
  }
  ClassProbCov out;
  out.per_class = {m, m};
  out.jitter_applied = default_jitter(m.trace(), b);
  return out;
}

ClassProbCov sampled_class_cov(const ProbSampleTensor& t) {
  t.validate();
  const Eigen::Index s = t.num_samples();
  if (s < 2)
    throw DomainError("sampled_class_cov needs at least two samples, got " +
                      std::to_string(s));
  const int c = t.num_classes();
  const int b = t.num_points();
  ClassProbCov out;
  out.per_class.reserve(static_cast<std::size_t>(c));
  double max_trace = 0.0;
  for (int k = 0; k < c; ++k) {
    // sigma: S x B matrix of class-k probabilities across points
    Eigen::MatrixXd sigma(s, b);
    for (int p = 0; p < b; ++p) sigma.col(p) = t.points[static_cast<std::size_t>(p)].col(k);
    const Eigen::RowVectorXd mean = sigma.colwise().mean();
    Eigen::MatrixXd cov =
        (sigma.transpose() * sigma) / static_cast<double>(s) -
        mean.transpose() * mean;
    cov = 0.5 * (cov + cov.transpose()).eval();
    max_trace = std::max(max_trace, cov.trace());
    out.per_class.push_back(std::move(cov));
  }
  out.jitter_applied = default_jitter(max_trace, b);
  return out;
}

double ledoit_wolf_intensity(const Eigen::MatrixXd& factor_samples) {
  if (factor_samples.rows() < 1 || factor_samples.cols() < 1)
    throw DomainError("ledoit_wolf_intensity: empty sample matrix");
  const auto n = static_cast<double>(factor_samples.rows());
  const auto p = static_cast<double>(factor_samples.cols());

  // Samples with no covariance structure at all (e.g. identical rows) carry
  // zero evidence about off-target dispersion: shrink fully.
  Eigen::MatrixXd xc = factor_samples.rowwise() - factor_samples.colwise().mean();
  const Eigen::MatrixXd sc = (xc.transpose() * xc) / n;
  Eigen::MatrixXd devc = sc;
  devc.diagonal().array() -= sc.trace() / p;
  if (devc.squaredNorm() / p <= 1e-30) return 1.0;

  // Zero-mean-convention intensity on raw products. The centered variant is
  // identically zero at n = 2, which would leave the B >= S covariance
  // singular; the raw form stays positive there.
  const Eigen::MatrixXd m = (factor_samples.transpose() * factor_samples) / n;
  const double mu = m.trace() / p;
  Eigen::MatrixXd dev = m;
  dev.diagonal().array() -= mu;
  const double d2 = dev.squaredNorm() / p;
  if (d2 <= 0.0) return 1.0;
  // sum_k ||x_k x_k' - M||_F^2 = sum_k ||x_k||^4 - n ||M||_F^2
  const double sum4 = factor_samples.rowwise().squaredNorm().array().square().sum();
  const double b2bar = (sum4 / (n * n) - m.squaredNorm() / n) / p;
  const double b2 = std::min(std::max(b2bar, 0.0), d2);
  return b2 / d2;
}

Eigen::MatrixXd shrink_toward_identity(const Eigen::MatrixXd& cov,
                                       double lambda) {
  const double mu_t = cov.trace() / static_cast<double>(cov.rows());
  Eigen::MatrixXd out = (1.0 - lambda) * cov;
  out.diagonal().array() += lambda * mu_t;
  return out;
}

ShrinkResult ledoit_wolf_shrink(const Eigen::MatrixXd& cov,
                                const Eigen::MatrixXd& factor_samples) {
  if (cov.rows() != cov.cols())
    throw DomainError("ledoit_wolf_shrink: covariance must be square");
  ShrinkResult r;
  r.intensity = ledoit_wolf_intensity(factor_samples);
  const double mu_t = cov.trace() / static_cast<double>(cov.rows());
  if (mu_t <= 0.0 && r.intensity >= 1.0) {
    // nothing to shrink toward: degenerate samples and a zero-trace target
    r.cov = default_jitter(0.0, cov.rows()) *
            Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    r.fallback = true;
    return r;
  }
  r.cov = shrink_toward_identity(cov, r.intensity);
  return r;
}

ProbSampleTensor probit_prob_samples(const Eigen::MatrixXd& latents) {
  ProbSampleTensor t;
  const Eigen::Index b = latents.rows();
  const Eigen::Index s = latents.cols();
  t.points.reserve(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    Eigen::MatrixXd m(s, 2);
    for (Eigen::Index j = 0; j < s; ++j) {
      const double p1 = std_normal_cdf(latents(i, j));
      m(j, 0) = 1.0 - p1;
      m(j, 1) = p1;
    }
    t.points.push_back(std::move(m));
  }
  return t;
}

}  // namespace bbal
