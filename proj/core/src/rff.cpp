#include "bbal/rff.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "bbal/errors.hpp"

namespace bbal {

namespace {
constexpr double kTwoPi = 6.2831853071795864769;

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits, double temperature) {
  logits /= temperature;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    logits.row(r) = (e / e.sum()).matrix();
  }
  return logits;
}
}  // namespace

void RffConfig::validate() const {
  if (num_features < 1) throw DomainError("rff: num_features must be >= 1");
  if (!(lengthscale > 0.0)) throw DomainError("rff: lengthscale must be > 0");
  if (!(kernel_amplitude > 0.0))
    throw DomainError("rff: kernel_amplitude must be > 0");
  if (!(weight_prior_var > 0.0))
    throw DomainError("rff: weight_prior_var must be > 0");
  if (!(noise_var > 0.0)) throw DomainError("rff: noise_var must be > 0");
  if (!(temperature > 0.0)) throw DomainError("rff: temperature must be > 0");
}

RffSoftmaxSurrogate::RffSoftmaxSurrogate(const Dataset& data,
                                         const RffConfig& cfg,
                                         std::uint64_t seed)
    : cfg_(cfg) {
  cfg_.validate();
  data.validate();
  num_classes_ = data.num_classes;
  const int f = cfg_.num_features;
  const auto d = std::max<Eigen::Index>(data.dim(), 1);

  Rng rng = make_rng(derive_seed(seed, 0x0feaULL));
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> up(0.0, kTwoPi);
  freq_.resize(f, d);
  for (int i = 0; i < f; ++i)
    for (Eigen::Index j = 0; j < d; ++j) freq_(i, j) = nd(rng) / cfg_.lengthscale;
  phase_.resize(f);
  for (int i = 0; i < f; ++i) phase_(i) = up(rng);

  // Posterior precision A = Phi'Phi / noise + I / prior, shared across
  // classes; per-class means solve A m_c = Phi' t_c / noise.
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(f, f) / cfg_.weight_prior_var;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(f, num_classes_);
  if (data.size() > 0) {
    const Eigen::MatrixXd phi = features(data.inputs);
    a += (phi.transpose() * phi) / cfg_.noise_var;
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(data.size(), num_classes_);
    for (Eigen::Index i = 0; i < data.size(); ++i)
      onehot(i, data.labels[static_cast<std::size_t>(i)]) = 1.0;
    rhs = (phi.transpose() * onehot) / cfg_.noise_var;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw FitError("rff fit: posterior precision is not positive definite");
  prec_chol_ = llt.matrixL();
  weight_mean_ = llt.solve(rhs);
}

Eigen::MatrixXd RffSoftmaxSurrogate::features(
    const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd z = points * freq_.transpose();
  z.rowwise() += phase_.transpose();
  const double scale =
      std::sqrt(2.0 * cfg_.kernel_amplitude / cfg_.num_features);
  return scale * z.array().cos().matrix();
}

ProbSampleTensor RffSoftmaxSurrogate::sample_probs(
    const Eigen::MatrixXd& points, int num_samples, Rng& rng) const {
  if (num_samples < 2)
    throw DomainError("sample_probs: need at least two samples");
  const int f = cfg_.num_features;
  const int c = num_classes_;
  const Eigen::Index b = points.rows();
  const Eigen::MatrixXd phi = features(points);

  // One z block per (sample, class); w = mean + L^-T z has covariance A^-1.
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd z(f, static_cast<Eigen::Index>(num_samples) * c);
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (int i = 0; i < f; ++i) z(i, j) = nd(rng);
  prec_chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(z);

  ProbSampleTensor out;
  out.points.assign(static_cast<std::size_t>(b),
                    Eigen::MatrixXd(num_samples, c));
  Eigen::MatrixXd logits_all = phi * z;  // B x (S*C)
  for (int s = 0; s < num_samples; ++s) {
    Eigen::MatrixXd logits = logits_all.middleCols(
        static_cast<Eigen::Index>(s) * c, c);
    logits += phi * weight_mean_;
    const Eigen::MatrixXd probs = softmax_rows(std::move(logits), cfg_.temperature);
    for (Eigen::Index i = 0; i < b; ++i)
      out.points[static_cast<std::size_t>(i)].row(s) = probs.row(i);
  }
  return out;
}

Eigen::MatrixXd RffSoftmaxSurrogate::mean_probs(
    const Eigen::MatrixXd& points) const {
  return softmax_rows(features(points) * weight_mean_, cfg_.temperature);
}

std::vector<int> RffSoftmaxSurrogate::predict(
    const Eigen::MatrixXd& points) const {
  const Eigen::MatrixXd p = mean_probs(points);
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index arg = 0;
    p.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

}  // namespace bbal
