#ifndef BBAL_SELECTION_HPP
#define BBAL_SELECTION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "bbal/acquisition.hpp"
#include "bbal/prob_cov.hpp"

namespace bbal {

// Lazy source of per-class probability-covariance entries over a pool.
// Implementations must be deterministic: repeated queries for the same
// (c, i, j) return identical values. entry() increments the query counter.
class CovOracle {
 public:
  virtual ~CovOracle() = default;
  virtual int pool_size() const = 0;
  virtual int num_classes() const = 0;
  virtual double entry(int c, int i, int j) const = 0;
  // Diagonal loading / clamping floor used by the greedy selector.
  virtual double jitter() const = 0;

  std::uint64_t queries() const { return queries_; }
  void reset_queries() const { queries_ = 0; }

 protected:
  mutable std::uint64_t queries_ = 0;
};

// Analytic binary path: probit covariances computed on demand from a joint
// GP posterior over the pool.
class AnalyticCovOracle : public CovOracle {
 public:
  explicit AnalyticCovOracle(GPJointPosterior pool_posterior);
  int pool_size() const override;
  int num_classes() const override { return 2; }
  double entry(int c, int i, int j) const override;
  double jitter() const override { return jitter_; }

 private:
  GPJointPosterior post_;
  double jitter_;
};

// Sampled path: plug-in covariance entries from an S x pool x C probability
// tensor, Ledoit-Wolf shrunk toward mu_t I with an intensity estimated once
// from a random pool subset (size min(256, pool)).
class SampledCovOracle : public CovOracle {
 public:
  SampledCovOracle(const ProbSampleTensor& pool_samples, std::uint64_t seed,
                   int factor_subset_size = 256);
  int pool_size() const override;
  int num_classes() const override;
  double entry(int c, int i, int j) const override;
  double jitter() const override { return jitter_; }
  double intensity(int c) const { return intensity_[static_cast<std::size_t>(c)]; }

 private:
  std::vector<Eigen::MatrixXd> sigma_;  // per class: S x pool probabilities
  std::vector<Eigen::VectorXd> mean_;   // per class: pool means
  std::vector<double> intensity_;       // per class: shrink intensity
  std::vector<double> target_;          // per class: mu_t over the pool
  double jitter_ = 0.0;
};

struct SelectionResult {
  AcquisitionScore score;
  double seconds = 0.0;
  std::uint64_t oracle_queries = 0;
};

// Greedy maximization of sum_c log det over pool subsets via per-class
// incremental Cholesky rows: O(pool * B^2) arithmetic per class and at most
// C * pool * (B+1) oracle entry queries. Conditional variances are clamped
// below at the oracle's jitter before logs; ties break to the lowest index.
// Throws DegeneratePoolError when no remaining candidate has any class
// conditional variance above jitter.
SelectionResult greedy_logdet_select(const CovOracle& oracle, int batch_size);

// Score landscape over a 1D axis for ordered pairs (x1, x2):
// values(i, j) = score(axis[i], axis[j]). Cells where the score is
// non-finite are flagged and excluded from the argmax.
struct LandscapeGrid {
  Eigen::VectorXd axis;
  Eigen::MatrixXd values;
  std::vector<std::pair<int, int>> flagged;
};

struct GridMaxResult {
  double x1 = 0.0;
  double x2 = 0.0;
  int i1 = 0;
  int i2 = 0;
  LandscapeGrid grid;
};

// Evaluate `score` on all G^2 ordered pairs of axis values; argmax with
// lexicographic (i1, i2) tie-breaking. `threads` > 1 splits rows across
// std::thread workers; results are identical for any thread count.
GridMaxResult grid_joint_maximize(
    const std::function<double(double, double)>& score,
    const Eigen::VectorXd& axis, int threads = 1);

}  // namespace bbal

#endif  // BBAL_SELECTION_HPP
