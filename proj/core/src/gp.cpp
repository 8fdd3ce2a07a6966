#include "bbal/gp.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "bbal/errors.hpp"
#include "bbal/normal.hpp"

namespace bbal {

namespace {

constexpr int kMaxNewtonIters = 100;
constexpr double kNewtonTol = 1e-8;

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b,
                              const KernelParams& p) {
  const double inv2l2 = 1.0 / (2.0 * p.lengthscale * p.lengthscale);
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double d2 = (a.row(i) - b.row(j)).squaredNorm();
      k(i, j) = p.amplitude * std::exp(-d2 * inv2l2);
    }
  }
  return k;
}

}  // namespace

void KernelParams::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw DomainError("kernel amplitude must be positive");
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    throw DomainError("kernel lengthscale must be positive");
  if (!(jitter > 0.0) || jitter > 1e-4)
    throw DomainError("kernel jitter must be in (0, 1e-4]");
}

void Dataset::validate() const {
  if (num_classes < 2) throw DomainError("dataset needs at least two classes");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows())
    throw DomainError("dataset label count does not match input rows");
  for (int y : labels) {
    if (y < 0 || y >= num_classes)
      throw DomainError("dataset label out of range: " + std::to_string(y));
  }
  if (inputs.size() > 0 && !inputs.allFinite())
    throw DomainError("dataset inputs contain non-finite values");
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.inputs.resize(static_cast<Eigen::Index>(indices.size()), inputs.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.inputs.row(static_cast<Eigen::Index>(r)) = inputs.row(indices[r]);
    out.labels.push_back(labels[static_cast<std::size_t>(indices[r])]);
  }
  return out;
}

void Dataset::append_row(const Eigen::VectorXd& x, int label) {
  inputs.conservativeResize(inputs.rows() + 1, x.size());
  inputs.row(inputs.rows() - 1) = x.transpose();
  labels.push_back(label);
}

double rbf_kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                  const KernelParams& params) {
  params.validate();
  if (!x1.allFinite() || !x2.allFinite())
    throw DomainError("rbf_kernel inputs must be finite");
  const double d2 = (x1 - x2).squaredNorm();
  return params.amplitude *
         std::exp(-d2 / (2.0 * params.lengthscale * params.lengthscale));
}

GPJointPosterior GPJointPosterior::marginal(const std::vector<int>& keep) const {
  GPJointPosterior out;
  const auto b = static_cast<Eigen::Index>(keep.size());
  out.query_points.resize(b, query_points.cols());
  out.mu.resize(b);
  out.S.resize(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    out.query_points.row(i) = query_points.row(keep[i]);
    out.mu(i) = mu(keep[i]);
    for (Eigen::Index j = 0; j < b; ++j) out.S(i, j) = S(keep[i], keep[j]);
  }
  return out;
}

ProbitLaplaceGp::ProbitLaplaceGp(Dataset data, KernelParams params)
    : data_(std::move(data)), params_(params) {
  params_.validate();
  data_.validate();
  if (data_.num_classes != 2)
    throw DomainError("ProbitLaplaceGp requires binary labels");
  y_.resize(data_.size());
  for (Eigen::Index i = 0; i < data_.size(); ++i)
    y_(i) = data_.labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
  fit();
}

void ProbitLaplaceGp::fit() {
  const Eigen::Index n = data_.size();
  f_hat_ = Eigen::VectorXd::Zero(n);
  grad_ = Eigen::VectorXd::Zero(n);
  sqrt_w_ = Eigen::VectorXd::Zero(n);
  chol_b_ = Eigen::MatrixXd::Identity(n, n);
  if (n == 0) return;  // posterior == prior

  Eigen::MatrixXd k = kernel_matrix(data_.inputs, data_.inputs, params_);
  k.diagonal().array() += params_.jitter;

  // Newton iteration on the mode of log p(y|f) - f' K^-1 f / 2 (GPML 3.1).
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  bool converged = false;
  for (int iter = 0; iter < kMaxNewtonIters; ++iter) {
    Eigen::VectorXd grad(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = y_(i) * f(i);
      const double r = std_normal_pdf_over_cdf(t);
      grad(i) = y_(i) * r;
      w(i) = r * (r + t);
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::MatrixXd bmat = sw.asDiagonal() * k * sw.asDiagonal();
    bmat.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(bmat);
    if (llt.info() != Eigen::Success)
      throw MatrixError("Laplace fit: I + sqrtW K sqrtW not positive definite");
    const Eigen::VectorXd b = w.cwiseProduct(f) + grad;
    const Eigen::VectorXd kb = k * b;
    a = b - sw.cwiseProduct(llt.solve(sw.cwiseProduct(kb)));
    f = k * a;

    // At the mode, grad log p(y|f) equals K^-1 f = a.
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = y_(i) * f(i);
      const double g = y_(i) * std_normal_pdf_over_cdf(t);
      err = std::max(err, std::abs(g - a(i)));
    }
    newton_iters_ = iter + 1;
    if (err < kNewtonTol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw FitError("Laplace Newton iteration did not converge in " +
                   std::to_string(kMaxNewtonIters) + " steps");

  f_hat_ = f;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = y_(i) * f(i);
    const double r = std_normal_pdf_over_cdf(t);
    grad_(i) = y_(i) * r;
    sqrt_w_(i) = std::sqrt(r * (r + t));
  }
  Eigen::MatrixXd bmat = sqrt_w_.asDiagonal() * k * sqrt_w_.asDiagonal();
  bmat.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(bmat);
  if (llt.info() != Eigen::Success)
    throw MatrixError("Laplace fit: final curvature factorization failed");
  chol_b_ = llt.matrixL();
}

GPJointPosterior ProbitLaplaceGp::posterior_joint(
    const Eigen::MatrixXd& queries) const {
  if (queries.rows() < 1)
    throw DomainError("posterior_joint needs at least one query point");
  if (!queries.allFinite())
    throw DomainError("posterior_joint queries must be finite");
  GPJointPosterior post;
  post.query_points = queries;
  Eigen::MatrixXd kss = kernel_matrix(queries, queries, params_);
  if (data_.size() == 0) {
    post.mu = Eigen::VectorXd::Zero(queries.rows());
    post.S = 0.5 * (kss + kss.transpose());
    return post;
  }
  const Eigen::MatrixXd ks = kernel_matrix(data_.inputs, queries, params_);
  post.mu = ks.transpose() * grad_;
  const Eigen::MatrixXd v = chol_b_.triangularView<Eigen::Lower>().solve(
      sqrt_w_.asDiagonal() * ks);
  Eigen::MatrixXd s = kss - v.transpose() * v;
  post.S = 0.5 * (s + s.transpose());
  return post;
}

Eigen::VectorXd ProbitLaplaceGp::predict_prob1(
    const Eigen::MatrixXd& queries) const {
  const GPJointPosterior post = posterior_joint(queries);
  Eigen::VectorXd p(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    p(i) = std_normal_cdf(post.mu(i) / std::sqrt(post.S(i, i) + 1.0));
  return p;
}

Eigen::MatrixXd sample_latents(const GPJointPosterior& post, int num_samples,
                               Rng& rng, double jitter) {
  const Eigen::Index b = post.mu.size();
  Eigen::MatrixXd s = post.S;
  s.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    // escalate once; duplicated query points make S singular at round-off
    s.diagonal().array() += 1e-8 * (1.0 + s.trace() / static_cast<double>(b));
    llt.compute(s);
    if (llt.info() != Eigen::Success)
      throw MatrixError("sample_latents: covariance not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd z(b, num_samples);
  for (Eigen::Index j = 0; j < num_samples; ++j)
    for (Eigen::Index i = 0; i < b; ++i) z(i, j) = nd(rng);
  Eigen::MatrixXd out = l * z;
  out.colwise() += post.mu;
  return out;
}

}  // namespace bbal
