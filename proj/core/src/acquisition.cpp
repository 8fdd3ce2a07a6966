#include "bbal/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "bbal/errors.hpp"
#include "bbal/rng.hpp"

namespace bbal {

namespace {

constexpr std::uint64_t kMaxExactConfigs = 1ULL << 20;

void require_prob_rows(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 2)
    throw DomainError("probability matrix needs >= 1 row and >= 2 classes");
  if ((m.array() < -1e-12).any() || (m.array() > 1.0 + 1e-12).any())
    throw DomainError("probability entries must lie in [0,1]");
  if (((m.rowwise().sum().array() - 1.0).abs() > 1e-6).any())
    throw DomainError("probability rows must sum to 1");
}

// C^B with the exact-mode capacity guard, or throw CapacityError.
std::uint64_t checked_config_count(int c, int b) {
  std::uint64_t n = 1;
  for (int i = 0; i < b; ++i) {
    n *= static_cast<std::uint64_t>(c);
    if (n > kMaxExactConfigs)
      throw CapacityError("exact BatchBALD needs C^B <= 2^20, got C=" +
                          std::to_string(c) + " B=" + std::to_string(b));
  }
  return n;
}

// Mean over samples of the per-point conditional entropies H(y_b | f_s).
double mean_conditional_entropy(const Eigen::MatrixXd& point_samples) {
  double h = 0.0;
  for (Eigen::Index s = 0; s < point_samples.rows(); ++s)
    h += entropy_nats(point_samples.row(s));
  return h / static_cast<double>(point_samples.rows());
}

// Joint entropy of the plug-in distribution over all C^B configurations,
// enumerated with an odometer over labels and a stack of per-sample partial
// products (memory O(B S), work O(C^B S C/(C-1))).
double exact_joint_entropy(const ProbSampleTensor& batch) {
  const int b = batch.num_points();
  const int c = batch.num_classes();
  const auto s = batch.num_samples();
  checked_config_count(c, b);

  std::vector<Eigen::ArrayXd> partial(static_cast<std::size_t>(b) + 1,
                                      Eigen::ArrayXd::Ones(s));
  std::vector<int> labels(static_cast<std::size_t>(b), 0);
  double h = 0.0;
  int lowest = 0;
  while (true) {
    for (int i = lowest; i < b; ++i)
      partial[static_cast<std::size_t>(i) + 1] =
          partial[static_cast<std::size_t>(i)] *
          batch.points[static_cast<std::size_t>(i)]
              .col(labels[static_cast<std::size_t>(i)])
              .array();
    const double p = partial[static_cast<std::size_t>(b)].mean();
    if (p > 0.0) h -= p * std::log(p);
    int i = b - 1;
    while (i >= 0 && labels[static_cast<std::size_t>(i)] == c - 1) {
      labels[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++labels[static_cast<std::size_t>(i)];
    lowest = i;
  }
  return h;
}

int draw_categorical(const Eigen::RowVectorXd& p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  for (Eigen::Index c = 0; c < p.size() - 1; ++c) {
    r -= p(c);
    if (r < 0.0) return static_cast<int>(c);
  }
  return static_cast<int>(p.size() - 1);
}

// Monte Carlo estimate of the plug-in joint entropy: configurations sampled
// via s ~ U{1..S}, y_b ~ p(.|f_s), averaging -log of the plug-in joint.
std::pair<double, double> mc_joint_entropy(const ProbSampleTensor& batch,
                                           int mc_configs, std::uint64_t seed) {
  const int b = batch.num_points();
  const auto s = batch.num_samples();
  Rng rng = make_rng(derive_seed(seed, 0xb41dULL));
  std::uniform_int_distribution<Eigen::Index> pick(0, s - 1);
  double sum = 0.0, sum2 = 0.0;
  Eigen::ArrayXd prod(s);
  for (int m = 0; m < mc_configs; ++m) {
    const Eigen::Index fs = pick(rng);
    prod.setOnes();
    for (int i = 0; i < b; ++i) {
      const auto& pts = batch.points[static_cast<std::size_t>(i)];
      const int y = draw_categorical(pts.row(fs), rng);
      prod *= pts.col(y).array();
    }
    const double p = std::max(prod.mean(), 1e-300);
    const double nll = -std::log(p);
    sum += nll;
    sum2 += nll * nll;
  }
  const double mean = sum / mc_configs;
  const double var =
      std::max(0.0, sum2 / mc_configs - mean * mean) / std::max(1, mc_configs - 1);
  return {mean, std::sqrt(var) * std::sqrt(static_cast<double>(mc_configs) /
                                           std::max(1, mc_configs - 1))};
}

}  // namespace

double entropy_nats(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  return h;
}

double bald_score(const Eigen::MatrixXd& point_samples) {
  require_prob_rows(point_samples);
  const Eigen::RowVectorXd mean = point_samples.colwise().mean();
  const double h_marginal = entropy_nats(mean);
  const double h_cond = mean_conditional_entropy(point_samples);
  return std::max(0.0, h_marginal - h_cond);
}

JointScoreDetail batchbald_joint_score_detail(const ProbSampleTensor& batch,
                                              JointMode mode, int mc_configs,
                                              std::uint64_t seed) {
  batch.validate();
  if (batch.num_points() < 1)
    throw DomainError("batchbald_joint_score: empty batch");
  if (batch.num_samples() < 1)
    throw DomainError("batchbald_joint_score: no samples");
  JointScoreDetail d;
  for (const auto& pts : batch.points) d.cond_entropy += mean_conditional_entropy(pts);
  if (mode == JointMode::kExact) {
    d.joint_entropy = exact_joint_entropy(batch);
  } else {
    if (mc_configs < 1)
      throw DomainError("batchbald_joint_score: mc_configs must be >= 1");
    auto [h, se] = mc_joint_entropy(batch, mc_configs, seed);
    d.joint_entropy = h;
    d.mc_stderr = se;
  }
  d.value = d.joint_entropy - d.cond_entropy;
  return d;
}

double batchbald_joint_score(const ProbSampleTensor& batch, JointMode mode,
                             int mc_configs, std::uint64_t seed) {
  return batchbald_joint_score_detail(batch, mode, mc_configs, seed).value;
}

AcquisitionScore batchbald_greedy(const ProbSampleTensor& pool, int batch_size,
                                  JointMode mode, int mc_configs,
                                  std::uint64_t seed) {
  pool.validate();
  const int p = pool.num_points();
  const int c = pool.num_classes();
  const auto s = pool.num_samples();
  if (batch_size < 1 || batch_size > p)
    throw DomainError("batchbald_greedy: batch size must be in [1, pool]");
  if (mode == JointMode::kMonteCarlo && mc_configs < 1)
    throw DomainError("batchbald_greedy: mc_configs must be >= 1");

  std::vector<double> cond(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    cond[static_cast<std::size_t>(i)] =
        mean_conditional_entropy(pool.points[static_cast<std::size_t>(i)]);

  std::vector<bool> selected(static_cast<std::size_t>(p), false);
  AcquisitionScore out;
  double sel_cond = 0.0;
  double prev_score = 0.0;

  // Exact mode: rows of sel_prods are per-configuration products of the
  // selected points' probabilities across samples.
  Eigen::MatrixXd sel_prods = Eigen::MatrixXd::Ones(1, s);

  // MC mode: one function index per configuration, weights are products of
  // the drawn labels' probabilities; both persist across steps.
  Eigen::MatrixXd weights;
  std::vector<Eigen::Index> cfg_fs;
  if (mode == JointMode::kMonteCarlo) {
    weights = Eigen::MatrixXd::Ones(mc_configs, s);
    cfg_fs.resize(static_cast<std::size_t>(mc_configs));
    Rng rng = make_rng(derive_seed(seed, 0x5e1ecfULL));
    std::uniform_int_distribution<Eigen::Index> pick(0, s - 1);
    for (auto& f : cfg_fs) f = pick(rng);
  }

  for (int step = 0; step < batch_size; ++step) {
    if (mode == JointMode::kExact)
      checked_config_count(c, step + 1);

    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;  // MC: labels drawn for the winning point

    for (int i = 0; i < p; ++i) {
      if (selected[static_cast<std::size_t>(i)]) continue;
      const auto& pts = pool.points[static_cast<std::size_t>(i)];
      double joint = 0.0;
      std::vector<int> labels;
      if (mode == JointMode::kExact) {
        for (Eigen::Index q = 0; q < sel_prods.rows(); ++q) {
          for (int k = 0; k < c; ++k) {
            const double prob =
                sel_prods.row(q).dot(pts.col(k).transpose()) /
                static_cast<double>(s);
            if (prob > 0.0) joint -= prob * std::log(prob);
          }
        }
      } else {
        labels.resize(static_cast<std::size_t>(mc_configs));
        Rng rng = make_rng(derive_seed(seed, step + 1, i + 1));
        for (int m = 0; m < mc_configs; ++m) {
          const int y = draw_categorical(pts.row(cfg_fs[static_cast<std::size_t>(m)]), rng);
          labels[static_cast<std::size_t>(m)] = y;
          const double prob = std::max(
              weights.row(m).dot(pts.col(y).transpose()) / static_cast<double>(s),
              1e-300);
          joint -= std::log(prob);
        }
        joint /= mc_configs;
      }
      const double score = joint - (sel_cond + cond[static_cast<std::size_t>(i)]);
      if (score > best_score) {  // ties keep the lowest index
        best_score = score;
        best = i;
        best_labels = std::move(labels);
      }
    }

    selected[static_cast<std::size_t>(best)] = true;
    out.batch.push_back(best);
    out.per_step_gains.push_back(best_score - prev_score);
    prev_score = best_score;
    sel_cond += cond[static_cast<std::size_t>(best)];

    if (step + 1 == batch_size) break;
    const auto& pts = pool.points[static_cast<std::size_t>(best)];
    if (mode == JointMode::kExact) {
      Eigen::MatrixXd grown(sel_prods.rows() * c, s);
      for (Eigen::Index q = 0; q < sel_prods.rows(); ++q)
        for (int k = 0; k < c; ++k)
          grown.row(q * c + k) =
              sel_prods.row(q).cwiseProduct(pts.col(k).transpose());
      sel_prods = std::move(grown);
    } else {
      for (int m = 0; m < mc_configs; ++m)
        weights.row(m) = weights.row(m).cwiseProduct(
            pts.col(best_labels[static_cast<std::size_t>(m)]).transpose());
    }
  }
  out.value = prev_score;
  return out;
}

double bbb_score(const ClassProbCov& cov) {
  if (cov.per_class.empty()) throw DomainError("bbb_score: no class matrices");
  double total = 0.0;
  for (int c = 0; c < cov.num_classes(); ++c) {
    const Eigen::MatrixXd& m = cov.per_class[static_cast<std::size_t>(c)];
    double jitter = cov.jitter_applied > 0.0
                        ? cov.jitter_applied
                        : default_jitter(m.trace(), m.rows());
    bool done = false;
    for (int attempt = 0; attempt <= 3 && !done; ++attempt, jitter *= 10.0) {
      Eigen::MatrixXd reg = m;
      reg.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(reg);
      if (llt.info() == Eigen::Success) {
        total += 2.0 * Eigen::MatrixXd(llt.matrixL())
                           .diagonal()
                           .array()
                           .log()
                           .sum();
        done = true;
      }
    }
    if (!done)
      throw MatrixError(
          "bbb_score: class covariance not positive definite after jitter "
          "escalation");
  }
  return total;
}

}  // namespace bbal
