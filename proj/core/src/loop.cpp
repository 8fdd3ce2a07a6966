#include "bbal/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "bbal/errors.hpp"
#include "bbal/selection.hpp"

namespace bbal {

namespace {

using Clock = std::chrono::steady_clock;

struct FittedSurrogate {
  std::unique_ptr<ProbitLaplaceGp> gp;
  std::unique_ptr<RffSoftmaxSurrogate> rff;
};

FittedSurrogate fit_surrogate(const Dataset& labeled, const LoopConfig& cfg) {
  FittedSurrogate s;
  if (cfg.surrogate == SurrogateKind::kGpProbit) {
    s.gp = std::make_unique<ProbitLaplaceGp>(labeled, cfg.gp_params);
  } else {
    s.rff = std::make_unique<RffSoftmaxSurrogate>(labeled, cfg.rff,
                                                  derive_seed(cfg.seed, 0xf17ULL));
  }
  return s;
}

double test_accuracy(const FittedSurrogate& s, const Dataset& test) {
  if (test.size() == 0) return 0.0;
  int hits = 0;
  if (s.gp) {
    const Eigen::VectorXd p1 = s.gp->predict_prob1(test.inputs);
    for (Eigen::Index i = 0; i < test.size(); ++i) {
      const int pred = p1(i) >= 0.5 ? 1 : 0;
      if (pred == test.labels[static_cast<std::size_t>(i)]) ++hits;
    }
  } else {
    const std::vector<int> pred = s.rff->predict(test.inputs);
    for (Eigen::Index i = 0; i < test.size(); ++i)
      if (pred[static_cast<std::size_t>(i)] ==
          test.labels[static_cast<std::size_t>(i)])
        ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

// Coherent posterior probability samples over the candidate points: joint
// latent draws for the GP path, weight draws for the RFF path.
ProbSampleTensor sample_candidates(const FittedSurrogate& s,
                                   const Eigen::MatrixXd& cands,
                                   const LoopConfig& cfg, int round) {
  Rng rng = make_rng(derive_seed(cfg.seed, 0x5a3ULL, static_cast<std::uint64_t>(round)));
  if (s.gp) {
    const GPJointPosterior post = s.gp->posterior_joint(cands);
    const Eigen::MatrixXd latents = sample_latents(post, cfg.sample_count, rng);
    return probit_prob_samples(latents);
  }
  return s.rff->sample_probs(cands, cfg.sample_count, rng);
}

struct Selection {
  std::vector<int> local_indices;
  double score = 0.0;
};

Selection select_batch(const FittedSurrogate& s, const Eigen::MatrixXd& cands,
                       int batch, const LoopConfig& cfg, int round) {
  Selection sel;
  switch (cfg.acquisition) {
    case AcquisitionKind::kRandom: {
      Rng rng = make_rng(derive_seed(cfg.seed, 0xa4dULL, static_cast<std::uint64_t>(round)));
      std::vector<int> idx(static_cast<std::size_t>(cands.rows()));
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      sel.local_indices.assign(idx.begin(), idx.begin() + batch);
      sel.score = 0.0;
      return sel;
    }
    case AcquisitionKind::kBaldTopB: {
      const ProbSampleTensor t = sample_candidates(s, cands, cfg, round);
      std::vector<std::pair<double, int>> scored;
      scored.reserve(t.points.size());
      for (int i = 0; i < t.num_points(); ++i)
        scored.emplace_back(bald_score(t.points[static_cast<std::size_t>(i)]), i);
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      double total = 0.0;
      for (int k = 0; k < batch; ++k) {
        sel.local_indices.push_back(scored[static_cast<std::size_t>(k)].second);
        total += scored[static_cast<std::size_t>(k)].first;
      }
      sel.score = total;
      return sel;
    }
    case AcquisitionKind::kBatchBald: {
      const ProbSampleTensor t = sample_candidates(s, cands, cfg, round);
      const AcquisitionScore score = batchbald_greedy(
          t, batch, cfg.batchbald_mode, cfg.mc_configs,
          derive_seed(cfg.seed, 0xbbULL, static_cast<std::uint64_t>(round)));
      sel.local_indices = score.batch;
      sel.score = score.value;
      return sel;
    }
    case AcquisitionKind::kBbb: {
      if (cfg.bbb_path == BbbPath::kAnalytic) {
        if (!s.gp)
          throw ConfigError("bbb analytic path requires the gp-probit surrogate");
        AnalyticCovOracle oracle(s.gp->posterior_joint(cands));
        const SelectionResult r = greedy_logdet_select(oracle, batch);
        sel.local_indices = r.score.batch;
        sel.score = r.score.value;
      } else {
        const ProbSampleTensor t = sample_candidates(s, cands, cfg, round);
        SampledCovOracle oracle(
            t, derive_seed(cfg.seed, 0x1cULL, static_cast<std::uint64_t>(round)));
        const SelectionResult r = greedy_logdet_select(oracle, batch);
        sel.local_indices = r.score.batch;
        sel.score = r.score.value;
      }
      return sel;
    }
  }
  throw ConfigError("unknown acquisition kind");
}

}  // namespace

void LoopConfig::validate() const {
  if (initial_count < 1) throw ConfigError("initial_count must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (sample_count < 2) throw ConfigError("sample_count must be >= 2");
  if (mc_configs < 1) throw ConfigError("mc_configs must be >= 1");
  if (min_points < 0) throw ConfigError("min_points must be >= 0");
  if (surrogate == SurrogateKind::kGpProbit) gp_params.validate();
  if (surrogate == SurrogateKind::kRffSoftmax) rff.validate();
}

LoopHistory run_loop(const Dataset& pool, const Dataset& test,
                     const LoopConfig& cfg) {
  cfg.validate();
  pool.validate();
  test.validate();
  if (pool.size() < cfg.initial_count)
    throw ConfigError("pool smaller than initial_count");

  LoopHistory hist;
  const int pool_n = static_cast<int>(pool.size());

  std::vector<int> order(static_cast<std::size_t>(pool_n));
  std::iota(order.begin(), order.end(), 0);
  Rng init_rng = make_rng(derive_seed(cfg.seed, 0x111ULL));
  std::shuffle(order.begin(), order.end(), init_rng);

  std::vector<int> labeled(order.begin(), order.begin() + cfg.initial_count);
  std::vector<bool> taken(static_cast<std::size_t>(pool_n), false);
  for (int i : labeled) taken[static_cast<std::size_t>(i)] = true;

  int total_rounds = cfg.rounds;
  if (cfg.min_points > cfg.initial_count) {
    const int needed = cfg.min_points - cfg.initial_count;
    const int by_points = (needed + cfg.batch_size - 1) / cfg.batch_size;
    total_rounds = std::max(total_rounds, by_points);
  }

  for (int round = 1; round <= total_rounds; ++round) {
    Dataset labeled_data = pool.subset(labeled);
    const FittedSurrogate surrogate = fit_surrogate(labeled_data, cfg);
    const double acc = test_accuracy(surrogate, test);

    std::vector<int> avail;
    avail.reserve(static_cast<std::size_t>(pool_n));
    for (int i = 0; i < pool_n; ++i)
      if (!taken[static_cast<std::size_t>(i)]) avail.push_back(i);
    const int batch = std::min<int>(cfg.batch_size, static_cast<int>(avail.size()));
    if (batch == 0) {
      hist.pool_exhausted = true;
      break;
    }

    Eigen::MatrixXd cands(static_cast<Eigen::Index>(avail.size()), pool.dim());
    for (std::size_t i = 0; i < avail.size(); ++i)
      cands.row(static_cast<Eigen::Index>(i)) = pool.inputs.row(avail[i]);

    const auto t0 = Clock::now();
    const Selection sel = select_batch(surrogate, cands, batch, cfg, round);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    RoundRecord rec;
    rec.round = round;
    rec.accuracy = acc;
    rec.acq_seconds = seconds;
    rec.score = sel.score;
    for (int local : sel.local_indices) {
      const int global = avail[static_cast<std::size_t>(local)];
      rec.indices.push_back(global);
      taken[static_cast<std::size_t>(global)] = true;
      labeled.push_back(global);
    }
    rec.labeled_count = static_cast<int>(labeled.size());
    hist.rounds.push_back(std::move(rec));
    if (static_cast<int>(avail.size()) == batch) {
      hist.pool_exhausted = true;
      break;
    }
  }
  return hist;
}

std::string to_string(SurrogateKind k) {
  return k == SurrogateKind::kGpProbit ? "gp-probit" : "rff-softmax";
}

std::string to_string(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::kBbb: return "bbb";
    case AcquisitionKind::kBatchBald: return "batchbald";
    case AcquisitionKind::kBaldTopB: return "bald-topB";
    case AcquisitionKind::kRandom: return "random";
  }
  return "unknown";
}

std::string to_string(BbbPath p) {
  return p == BbbPath::kAnalytic ? "analytic" : "sampled";
}

}  // namespace bbal
