#include "bbal/data_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bbal/errors.hpp"
#include "bbal/rng.hpp"

namespace bbal {

namespace {

int toy_label(double x, Rng& rng) {
  const int base = x > 0.0 ? 1 : 0;
  if (x > kToyNoisyZone) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < kToyFlipProb) return 1 - base;
  }
  return base;
}

}  // namespace

Toy1d make_toy_1d(std::uint64_t seed, int n_noisy, int n_clean, int pool_size) {
  if (n_noisy < 1 || n_clean < 1 || pool_size < 1)
    throw DomainError("make_toy_1d: counts must be >= 1");
  Toy1d toy;
  Rng rng = make_rng(derive_seed(seed, 0x70f1dULL));
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const int n = n_clean + n_noisy;
  toy.labeled.inputs.resize(n, 1);
  toy.labeled.labels.reserve(static_cast<std::size_t>(n));
  toy.labeled.num_classes = 2;
  for (int i = 0; i < n_clean; ++i) {
    toy.labeled.inputs(i, 0) = kToyCleanCenter + kToyCleanSpread * nd(rng);
    toy.labeled.labels.push_back(0);
  }
  for (int i = 0; i < n_noisy; ++i) {
    toy.labeled.inputs(n_clean + i, 0) =
        kToyNoisyCenter + kToyNoisySpread * nd(rng);
    const bool flip = u(rng) < kToyFlipProb;
    toy.labeled.labels.push_back(flip ? 0 : 1);
  }

  toy.pool_inputs.resize(pool_size, 1);
  toy.pool_labels.reserve(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) {
    const double x = kToyXMin + (kToyXMax - kToyXMin) * u(rng);
    toy.pool_inputs(i, 0) = x;
    toy.pool_labels.push_back(toy_label(x, rng));
  }

  toy.gp.amplitude = 1.0;
  toy.gp.lengthscale = 1.1;
  toy.gp.jitter = 1e-10;
  return toy;
}

Dataset make_blobs(std::uint64_t seed, const BlobSpec& spec) {
  if (spec.num_classes < 2) throw DomainError("make_blobs: need >= 2 classes");
  if (spec.n_per_class < 1 || spec.dim < 1)
    throw DomainError("make_blobs: counts and dim must be >= 1");
  Rng rng = make_rng(derive_seed(seed, 0xb10b5ULL));
  std::normal_distribution<double> nd(0.0, 1.0);

  // Centers first so they are prefix-consistent across n_per_class.
  Eigen::MatrixXd centers(spec.num_classes, spec.dim);
  for (int k = 0; k < spec.num_classes; ++k) {
    Eigen::VectorXd cand(spec.dim);
    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
      for (int d = 0; d < spec.dim; ++d)
        cand(d) = spec.center_distance * scale * nd(rng);
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        if ((centers.row(j).transpose() - cand).norm() < spec.center_distance) {
          ok = false;
          break;
        }
      }
      if (ok) break;
      if (attempt % 16 == 15) scale *= 1.25;  // widen until centers fit
    }
    centers.row(k) = cand.transpose();
  }

  Dataset out;
  out.num_classes = spec.num_classes;
  const int n = spec.num_classes * spec.n_per_class;
  out.inputs.resize(n, spec.dim);
  out.labels.reserve(static_cast<std::size_t>(n));
  int row = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    for (int i = 0; i < spec.n_per_class; ++i, ++row) {
      for (int d = 0; d < spec.dim; ++d)
        out.inputs(row, d) = centers(k, d) + spec.cluster_std * nd(rng);
      out.labels.push_back(k);
    }
  }
  return out;
}

PoolTestSplit split_pool_test(const Dataset& all, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw DomainError("split_pool_test: test fraction must be in [0,1)");
  const int n = static_cast<int>(all.size());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(derive_seed(seed, 0x51137ULL));
  std::shuffle(idx.begin(), idx.end(), rng);
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  PoolTestSplit split;
  split.test = all.subset({idx.begin(), idx.begin() + n_test});
  split.pool = all.subset({idx.begin() + n_test, idx.end()});
  return split;
}

}  // namespace bbal
