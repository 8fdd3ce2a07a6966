#ifndef BBAL_ACQUISITION_HPP
#define BBAL_ACQUISITION_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bbal/prob_cov.hpp"

namespace bbal {

// A scored batch. For greedily built batches the per-step gains telescope to
// `value`. All entropies are in nats.
struct AcquisitionScore {
  double value = 0.0;
  std::vector<int> batch;
  std::vector<double> per_step_gains;
};

enum class JointMode { kExact, kMonteCarlo };

// Shannon entropy of a probability row in nats, with 0 log 0 := 0.
double entropy_nats(const Eigen::Ref<const Eigen::RowVectorXd>& p);

// BALD mutual-information estimate from S sampled probability rows (S x C):
// H(mean over samples) - mean(H(sample)). Nonnegative by concavity; tiny
// negative round-off is clamped to zero.
double bald_score(const Eigen::MatrixXd& point_samples);

struct JointScoreDetail {
  double value = 0.0;
  double joint_entropy = 0.0;
  double cond_entropy = 0.0;
  double mc_stderr = 0.0;  // standard error of the joint-entropy estimate
};

// Joint mutual information of a batch from an S x B x C sample tensor.
//
// Exact mode enumerates all C^B label configurations (guarded at 2^20) with
// joint probability (1/S) sum_s prod_b p(y_b | f_s). Monte Carlo mode draws
// `mc_configs` configurations from that plug-in joint (s uniform, labels per
// point from p(.|f_s)) and averages -log of the plug-in joint probability.
// The conditional-entropy term is always computed exactly from the samples.
JointScoreDetail batchbald_joint_score_detail(const ProbSampleTensor& batch,
                                              JointMode mode, int mc_configs,
                                              std::uint64_t seed = 0);

double batchbald_joint_score(const ProbSampleTensor& batch, JointMode mode,
                             int mc_configs, std::uint64_t seed = 0);

// Greedy BatchBALD over a pool tensor: at each step adds the pool index whose
// inclusion maximizes the joint score, ties broken by lowest index.
AcquisitionScore batchbald_greedy(const ProbSampleTensor& pool, int batch_size,
                                  JointMode mode, int mc_configs,
                                  std::uint64_t seed = 0);

// a_BBB = sum_c log det(C_p^c + jitter I) via Cholesky; on factorization
// failure the jitter escalates by 10x up to three times before MatrixError.
double bbb_score(const ClassProbCov& cov);

}  // namespace bbal

#endif  // BBAL_ACQUISITION_HPP
