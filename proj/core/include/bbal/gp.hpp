#ifndef BBAL_GP_HPP
#define BBAL_GP_HPP

#include <optional>

#include <Eigen/Core>

#include "bbal/dataset.hpp"
#include "bbal/rng.hpp"

namespace bbal {

// Isotropic squared-exponential kernel hyperparameters. Fixed per experiment;
// no marginal-likelihood optimization happens anywhere in this library.
struct KernelParams {
  double amplitude = 1.0;
  double lengthscale = 1.0;
  double jitter = 1e-10;

  void validate() const;
};

// amplitude * exp(-||x1 - x2||^2 / (2 lengthscale^2))
double rbf_kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                  const KernelParams& params);

// Joint Gaussian posterior over latent function values at `query_points`:
// f ~ N(mu, S). Produced by ProbitLaplaceGp::posterior_joint.
struct GPJointPosterior {
  Eigen::MatrixXd query_points;  // B x D
  Eigen::VectorXd mu;            // B
  Eigen::MatrixXd S;             // B x B, symmetric

  GPJointPosterior marginal(const std::vector<int>& keep) const;
};

// Binary GP classifier with probit likelihood, Gaussianized by a Laplace
// approximation at the posterior mode (Newton iteration, max 100 steps,
// gradient tolerance 1e-8). Labels must be in {0, 1}; internally y = ±1 with
// P(y=+1 | f) = Phi(f). Fitted models are immutable; posterior_joint may be
// called concurrently.
class ProbitLaplaceGp {
 public:
  ProbitLaplaceGp(Dataset data, KernelParams params);

  const Dataset& data() const { return data_; }
  const KernelParams& params() const { return params_; }

  // Latent mode over the training inputs (empty for N = 0 fits).
  const Eigen::VectorXd& latent_mode() const { return f_hat_; }
  int newton_iterations() const { return newton_iters_; }

  // Joint latent posterior N(mu, S) at the given query points (B >= 1).
  GPJointPosterior posterior_joint(const Eigen::MatrixXd& queries) const;

  // Marginal predictive probability of class 1 at each query point,
  // E[Phi(f)] = Phi(mu / sqrt(1 + var)).
  Eigen::VectorXd predict_prob1(const Eigen::MatrixXd& queries) const;

 private:
  void fit();

  Dataset data_;
  KernelParams params_;
  Eigen::VectorXd y_;        // ±1 labels
  Eigen::VectorXd f_hat_;    // latent mode
  Eigen::VectorXd sqrt_w_;   // sqrt of likelihood curvature at the mode
  Eigen::MatrixXd chol_b_;   // lower Cholesky of I + sqrtW K sqrtW
  Eigen::VectorXd grad_;     // d log p(y|f) / df at the mode
  int newton_iters_ = 0;
};

// Draw S joint samples of the latent vector from N(mu, S + jitter I).
// Column s of the result is one sample. Deterministic given rng state.
Eigen::MatrixXd sample_latents(const GPJointPosterior& post, int num_samples,
                               Rng& rng, double jitter = 1e-12);

}  // namespace bbal

#endif  // BBAL_GP_HPP
