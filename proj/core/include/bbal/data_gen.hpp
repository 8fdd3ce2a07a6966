#ifndef BBAL_DATA_GEN_HPP
#define BBAL_DATA_GEN_HPP

#include <cstdint>

#include "bbal/dataset.hpp"
#include "bbal/gp.hpp"

namespace bbal {

// Geometry of the 1D two-cluster toy: a clean labeled cluster near x = -1,
// a high-label-noise cluster near x = +1 (flip probability 0.35), and no
// labels near x = 0. The generating truth is y = 1{x > 0} with flips applied
// only in the noisy zone x > kToyNoisyZone.
inline constexpr double kToyCleanCenter = -1.0;
inline constexpr double kToyNoisyCenter = 1.0;
inline constexpr double kToyCleanSpread = 0.06;
inline constexpr double kToyNoisySpread = 0.12;
inline constexpr double kToyFlipProb = 0.35;
inline constexpr double kToyNoisyZone = 0.5;
inline constexpr double kToyXMin = -1.3;
inline constexpr double kToyXMax = 1.3;

struct Toy1d {
  Dataset labeled;                // the initial labeled clusters
  Eigen::MatrixXd pool_inputs;    // P x 1 unlabeled candidates
  std::vector<int> pool_labels;   // hidden oracle labels for the pool
  KernelParams gp;                // GP hyperparameters tuned for this toy
};

// Deterministic per seed. Pool points are drawn uniformly over the toy range
// with labels from the same generating process as the clusters.
Toy1d make_toy_1d(std::uint64_t seed, int n_noisy = 10, int n_clean = 30,
                  int pool_size = 64);

struct BlobSpec {
  int num_classes = 4;
  int n_per_class = 100;
  int dim = 2;
  double cluster_std = 1.0;
  double center_distance = 4.0;  // minimum pairwise distance between centers
};

// Gaussian class clusters with controlled overlap. Centers are drawn first
// from the seed stream, so different n_per_class values share centers.
Dataset make_blobs(std::uint64_t seed, const BlobSpec& spec);

// Deterministic shuffled split into (pool, test) with the given test
// fraction. Hidden pool labels stay attached for oracle reveals.
struct PoolTestSplit {
  Dataset pool;
  Dataset test;
};
PoolTestSplit split_pool_test(const Dataset& all, double test_fraction,
                              std::uint64_t seed);

}  // namespace bbal

#endif  // BBAL_DATA_GEN_HPP
