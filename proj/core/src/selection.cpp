#include "bbal/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "bbal/errors.hpp"
#include "bbal/rng.hpp"

namespace bbal {

AnalyticCovOracle::AnalyticCovOracle(GPJointPosterior pool_posterior)
    : post_(std::move(pool_posterior)) {
  const Eigen::Index n = post_.mu.size();
  double trace = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Vector2d mu(post_.mu(i), post_.mu(i));
    Eigen::Matrix2d s;
    s << post_.S(i, i), post_.S(i, i), post_.S(i, i), post_.S(i, i);
    trace += probit_cov(mu, s);
  }
  jitter_ = default_jitter(trace, n);
}

int AnalyticCovOracle::pool_size() const {
  return static_cast<int>(post_.mu.size());
}

double AnalyticCovOracle::entry(int c, int i, int j) const {
  (void)c;  // both binary classes share the same covariance
  ++queries_;
  Eigen::Vector2d mu(post_.mu(i), post_.mu(j));
  Eigen::Matrix2d s;
  s << post_.S(i, i), post_.S(i, j), post_.S(i, j), post_.S(j, j);
  return probit_cov(mu, s);
}

SampledCovOracle::SampledCovOracle(const ProbSampleTensor& pool_samples,
                                   std::uint64_t seed, int factor_subset_size) {
  pool_samples.validate();
  const int pool = pool_samples.num_points();
  const int classes = pool_samples.num_classes();
  const Eigen::Index s = pool_samples.num_samples();
  if (s < 2) throw DomainError("SampledCovOracle needs at least two samples");

  // Shrinkage factor from a random pool subset, once per oracle (App.-B style
  // subset so we never touch the full pool x pool matrix).
  const int m = std::min(factor_subset_size, pool);
  std::vector<int> idx(static_cast<std::size_t>(pool));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(derive_seed(seed, 0x1ed017ULL));
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, pool - 1);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(pick(rng))]);
  }

  double max_target = 0.0;
  for (int c = 0; c < classes; ++c) {
    Eigen::MatrixXd sig(s, pool);
    for (int i = 0; i < pool; ++i)
      sig.col(i) = pool_samples.points[static_cast<std::size_t>(i)].col(c);
    Eigen::VectorXd mu = sig.colwise().mean();

    Eigen::MatrixXd sub(s, m);
    for (int i = 0; i < m; ++i) sub.col(i) = sig.col(idx[static_cast<std::size_t>(i)]);
    intensity_.push_back(ledoit_wolf_intensity(sub));

    // mu_t over the pool: mean of the per-point plug-in variances.
    double trace = 0.0;
    for (int i = 0; i < pool; ++i)
      trace += sig.col(i).squaredNorm() / static_cast<double>(s) - mu(i) * mu(i);
    target_.push_back(trace / pool);
    max_target = std::max(max_target, trace / pool);

    sigma_.push_back(std::move(sig));
    mean_.push_back(std::move(mu));
  }
  jitter_ = default_jitter(max_target * pool, pool);
}

int SampledCovOracle::pool_size() const {
  return sigma_.empty() ? 0 : static_cast<int>(sigma_.front().cols());
}

int SampledCovOracle::num_classes() const {
  return static_cast<int>(sigma_.size());
}

double SampledCovOracle::entry(int c, int i, int j) const {
  ++queries_;
  const auto& sig = sigma_[static_cast<std::size_t>(c)];
  const auto& mu = mean_[static_cast<std::size_t>(c)];
  const double s = static_cast<double>(sig.rows());
  const double raw = sig.col(i).dot(sig.col(j)) / s - mu(i) * mu(j);
  const double lam = intensity_[static_cast<std::size_t>(c)];
  double v = (1.0 - lam) * raw;
  if (i == j) v += lam * target_[static_cast<std::size_t>(c)];
  return v;
}

SelectionResult greedy_logdet_select(const CovOracle& oracle, int batch_size) {
  const int pool = oracle.pool_size();
  const int classes = oracle.num_classes();
  if (batch_size < 1 || batch_size > pool)
    throw DomainError("greedy_logdet_select: batch size must be in [1, pool]");
  const double jitter = oracle.jitter();

  const auto t0 = std::chrono::steady_clock::now();
  oracle.reset_queries();

  // Per class: d2[i] is the conditional variance of candidate i given the
  // selected set; rows[i] accumulates the candidate's incremental Cholesky
  // row against the selected points.
  std::vector<Eigen::VectorXd> d2(static_cast<std::size_t>(classes));
  std::vector<Eigen::MatrixXd> rows(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    d2[static_cast<std::size_t>(c)].resize(pool);
    for (int i = 0; i < pool; ++i)
      d2[static_cast<std::size_t>(c)](i) = oracle.entry(c, i, i) + jitter;
    rows[static_cast<std::size_t>(c)].resize(pool, batch_size);
  }

  std::vector<bool> selected(static_cast<std::size_t>(pool), false);
  SelectionResult out;
  double running = 0.0;

  for (int step = 0; step < batch_size; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    bool any_alive = false;
    for (int i = 0; i < pool; ++i) {
      if (selected[static_cast<std::size_t>(i)]) continue;
      double gain = 0.0;
      for (int c = 0; c < classes; ++c) {
        const double v = d2[static_cast<std::size_t>(c)](i);
        if (v > jitter) any_alive = true;
        gain += std::log(std::max(v, jitter));
      }
      if (gain > best_gain) {  // ties keep the lowest index
        best_gain = gain;
        best = i;
      }
    }
    if (!any_alive)
      throw DegeneratePoolError(
          "greedy_logdet_select: all conditional variances at or below jitter");

    selected[static_cast<std::size_t>(best)] = true;
    out.score.batch.push_back(best);
    out.score.per_step_gains.push_back(best_gain);
    running += best_gain;

    if (step + 1 == batch_size) break;
    for (int c = 0; c < classes; ++c) {
      auto& dc = d2[static_cast<std::size_t>(c)];
      auto& rc = rows[static_cast<std::size_t>(c)];
      const double pivot = std::sqrt(std::max(dc(best), jitter));
      for (int i = 0; i < pool; ++i) {
        if (selected[static_cast<std::size_t>(i)]) continue;
        double cross = oracle.entry(c, i, best);
        if (step > 0)
          cross -= rc.row(i).head(step).dot(rc.row(best).head(step));
        const double e = cross / pivot;
        rc(i, step) = e;
        dc(i) -= e * e;
      }
      rc(best, step) = pivot;
    }
  }

  out.score.value = running;
  out.oracle_queries = oracle.queries();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

GridMaxResult grid_joint_maximize(
    const std::function<double(double, double)>& score,
    const Eigen::VectorXd& axis, int threads) {
  const auto g = axis.size();
  if (g < 2) throw DomainError("grid_joint_maximize: axis needs >= 2 points");
  for (Eigen::Index i = 1; i < g; ++i)
    if (!(axis(i) > axis(i - 1)))
      throw DomainError("grid_joint_maximize: axis must be strictly increasing");

  GridMaxResult res;
  res.grid.axis = axis;
  res.grid.values.resize(g, g);

  const auto eval_rows = [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index i = lo; i < hi; ++i)
      for (Eigen::Index j = 0; j < g; ++j)
        res.grid.values(i, j) = score(axis(i), axis(j));
  };
  if (threads <= 1) {
    eval_rows(0, g);
  } else {
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (g + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const Eigen::Index lo = std::min<Eigen::Index>(t * chunk, g);
      const Eigen::Index hi = std::min<Eigen::Index>(lo + chunk, g);
      if (lo < hi) pool.emplace_back(eval_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      const double v = res.grid.values(i, j);
      if (!std::isfinite(v)) {
        res.grid.flagged.emplace_back(static_cast<int>(i), static_cast<int>(j));
        continue;
      }
      if (v > best) {  // lexicographic tie-breaking via scan order
        best = v;
        res.i1 = static_cast<int>(i);
        res.i2 = static_cast<int>(j);
        found = true;
      }
    }
  }
  if (!found)
    throw DomainError("grid_joint_maximize: every grid cell was non-finite");
  res.x1 = axis(res.i1);
  res.x2 = axis(res.i2);
  return res;
}

}  // namespace bbal
