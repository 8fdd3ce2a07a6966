#ifndef BBAL_RFF_HPP
#define BBAL_RFF_HPP

#include <cstdint>

#include <Eigen/Core>

#include "bbal/dataset.hpp"
#include "bbal/prob_cov.hpp"
#include "bbal/rng.hpp"

namespace bbal {

struct RffConfig {
  int num_features = 256;
  double lengthscale = 1.0;
  double kernel_amplitude = 1.0;
  double weight_prior_var = 1.0;
  double noise_var = 0.25;  // regression noise on one-hot targets
  double temperature = 1.0;

  void validate() const;
};

// Bayesian multi-class surrogate on random cosine features: per-class linear
// regression on one-hot targets with a shared Gaussian weight posterior,
// probabilities via a tempered softmax of sampled logits. Stands in for
// heavier variational networks at desk scale; feeds the sample-based
// covariance path.
class RffSoftmaxSurrogate {
 public:
  // Feature frequencies/phases depend only on (cfg, seed), not on the data,
  // so refits during an active-learning run share the feature map.
  RffSoftmaxSurrogate(const Dataset& data, const RffConfig& cfg,
                      std::uint64_t seed);

  int num_classes() const { return num_classes_; }

  // S x B x C tensor of softmax probabilities from S weight-posterior draws.
  ProbSampleTensor sample_probs(const Eigen::MatrixXd& points, int num_samples,
                                Rng& rng) const;

  // Softmax of posterior-mean logits (deterministic prediction).
  Eigen::MatrixXd mean_probs(const Eigen::MatrixXd& points) const;
  std::vector<int> predict(const Eigen::MatrixXd& points) const;

 private:
  Eigen::MatrixXd features(const Eigen::MatrixXd& points) const;

  RffConfig cfg_;
  int num_classes_ = 0;
  Eigen::MatrixXd freq_;       // F x D
  Eigen::VectorXd phase_;      // F
  Eigen::MatrixXd weight_mean_;  // F x C
  Eigen::MatrixXd prec_chol_;    // lower Cholesky of the posterior precision
};

}  // namespace bbal

#endif  // BBAL_RFF_HPP
