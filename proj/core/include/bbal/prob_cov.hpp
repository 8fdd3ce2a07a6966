#ifndef BBAL_PROB_COV_HPP
#define BBAL_PROB_COV_HPP

#include <vector>

#include <Eigen/Core>

#include "bbal/gp.hpp"

namespace bbal {

// Per-class covariance matrices of predictive class probabilities,
// (C_p^c)_{ij} = Cov(p_c(x_i), p_c(x_j)). Matrices are stored raw (possibly
// rank-deficient, e.g. for duplicated points); `jitter_applied` is the
// diagonal loading used whenever a factorization is taken.
struct ClassProbCov {
  std::vector<Eigen::MatrixXd> per_class;
  double jitter_applied = 0.0;

  int num_classes() const { return static_cast<int>(per_class.size()); }
  Eigen::Index batch_size() const {
    return per_class.empty() ? 0 : per_class.front().rows();
  }
  // per_class[c] + jitter_applied * I
  Eigen::MatrixXd regularized(int c) const;
};

// S x B x C array of sampled class probabilities, stored per point as an
// S x C matrix. Per (sample, point) the class row sums to one.
struct ProbSampleTensor {
  std::vector<Eigen::MatrixXd> points;  // each S x C

  int num_points() const { return static_cast<int>(points.size()); }
  Eigen::Index num_samples() const {
    return points.empty() ? 0 : points.front().rows();
  }
  int num_classes() const {
    return points.empty() ? 0 : static_cast<int>(points.front().cols());
  }
  // Throws DomainError if shapes mismatch, entries leave [0,1], or a row
  // deviates from sum 1 by more than 1e-6.
  void validate() const;
};

// E[Phi(f)] for f ~ N(mu, var): Phi(mu / sqrt(var + 1)).
double probit_mean(double mu, double var);

// Cov(Phi(f_i), Phi(f_j)) for (f_i, f_j) ~ N(mu, S):
// orthant probability of N(mu, S + I2) minus the product of probit means.
double probit_cov(const Eigen::Vector2d& mu, const Eigen::Matrix2d& S);

// Binary analytic covariance of predictive probabilities over all pairs of
// the posterior's query points. Class 0 and class 1 matrices are identical
// since Cov(1-p, 1-q) = Cov(p, q).
ClassProbCov analytic_class_cov(const GPJointPosterior& post);

// Plug-in estimator from S sampled probability vectors, exactly
// (1/S) sum sigma sigma' - mu_hat mu_hat' per class (biased, 1/S). S >= 2.
ClassProbCov sampled_class_cov(const ProbSampleTensor& t);

// Ledoit-Wolf shrinkage toward mu_t I with mu_t = trace(cov)/B. `intensity`
// is estimated from `factor_samples` (rows = observations) and clamped to
// [0,1]. `fallback` is set when both the covariance trace and the samples are
// fully degenerate and the result is jitter * I.
struct ShrinkResult {
  Eigen::MatrixXd cov;
  double intensity = 0.0;
  bool fallback = false;
};

// Ledoit-Wolf optimal shrinkage intensity for the identity-target estimator,
// computed from an n x p matrix of observations (1/n covariance convention,
// matching the plug-in estimator above).
double ledoit_wolf_intensity(const Eigen::MatrixXd& factor_samples);

ShrinkResult ledoit_wolf_shrink(const Eigen::MatrixXd& cov,
                                const Eigen::MatrixXd& factor_samples);

// Convex combination (1-lambda) cov + lambda mu_t I.
Eigen::MatrixXd shrink_toward_identity(const Eigen::MatrixXd& cov,
                                       double lambda);

// Diagonal loading used before any log-det: 1e-10 * (1 + trace/B).
double default_jitter(double trace, Eigen::Index b);

// Map joint latent samples (B x S, from sample_latents) through the probit
// link into a binary ProbSampleTensor with class 1 probability Phi(f).
ProbSampleTensor probit_prob_samples(const Eigen::MatrixXd& latents);

}  // namespace bbal

#endif  // BBAL_PROB_COV_HPP
