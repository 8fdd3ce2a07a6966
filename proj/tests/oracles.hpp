// Independent reference implementations used only by tests. Everything here
// deliberately avoids the library's own code paths: series expansions, brute
// force enumeration, Monte Carlo, and from-scratch dense linear algebra.
#ifndef BBAL_TESTS_ORACLES_HPP
#define BBAL_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace oracle {

// erf via its Maclaurin series in long double. Alternating terms stay small
// for |x| <= 2, giving ~1e-17 absolute error there; only use in that range.
inline long double erf_series(long double x) {
  const long double two_over_sqrt_pi = 1.128379167095512573896L;
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-25L * std::abs(sum)) break;
  }
  return two_over_sqrt_pi * sum;
}

inline double phi_series(double x) {
  return 0.5 * (1.0 + static_cast<double>(
                          erf_series(static_cast<long double>(x) /
                                     1.414213562373095048802L)));
}

// Monte Carlo estimate of P(z1 >= 0, z2 >= 0) under N(mean, cov).
// Returns (estimate, standard error).
inline std::pair<double, double> bvn_orthant_mc(const Eigen::Vector2d& mean,
                                                const Eigen::Matrix2d& cov,
                                                std::int64_t samples,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double z1 = nd(rng);
    const double z2 = nd(rng);
    const double a = mean(0) + l(0, 0) * z1;
    const double b = mean(1) + l(1, 0) * z1 + l(1, 1) * z2;
    if (a >= 0.0 && b >= 0.0) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                              static_cast<double>(samples));
  return {p, se};
}

// Monte Carlo estimates of E[Phi(f_i)], E[Phi(f_j)], Cov(Phi(f_i), Phi(f_j))
// for (f_i,f_j) ~ N(mu, S), sharing one sample stream.
struct ProbitMcResult {
  double mean_i = 0.0;
  double mean_j = 0.0;
  double cov = 0.0;
};
inline ProbitMcResult probit_mc(const Eigen::Vector2d& mu,
                                const Eigen::Matrix2d& s, std::int64_t samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::Matrix2d sj = s;
  sj.diagonal().array() += 1e-14;
  const Eigen::Matrix2d l = Eigen::LLT<Eigen::Matrix2d>(sj).matrixL();
  double si = 0.0, sjj = 0.0, sij = 0.0;
  for (std::int64_t k = 0; k < samples; ++k) {
    const double z1 = nd(rng);
    const double z2 = nd(rng);
    const double fi = mu(0) + l(0, 0) * z1;
    const double fj = mu(1) + l(1, 0) * z1 + l(1, 1) * z2;
    const double pi = 0.5 * std::erfc(-fi * 0.7071067811865475244);
    const double pj = 0.5 * std::erfc(-fj * 0.7071067811865475244);
    si += pi;
    sjj += pj;
    sij += pi * pj;
  }
  const double n = static_cast<double>(samples);
  ProbitMcResult r;
  r.mean_i = si / n;
  r.mean_j = sjj / n;
  r.cov = sij / n - r.mean_i * r.mean_j;
  return r;
}

// Exact probit posterior at a single location observed `copies` times with
// y=1: p(f) ∝ Phi(f)^copies N(f; 0, v), via importance sampling with the
// prior as proposal. Returns (mean, variance).
inline std::pair<double, double> one_point_probit_posterior(
    double prior_var, int copies, std::int64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(prior_var));
  double w = 0.0, wf = 0.0, wff = 0.0;
  for (std::int64_t k = 0; k < samples; ++k) {
    const double f = nd(rng);
    const double weight =
        std::pow(0.5 * std::erfc(-f * 0.7071067811865475244), copies);
    w += weight;
    wf += weight * f;
    wff += weight * f * f;
  }
  const double mean = wf / w;
  return {mean, wff / w - mean * mean};
}

// Naive greedy log-det selection: at every step recompute the full
// sum_c log det of each candidate extension with dense Cholesky.
inline std::vector<int> naive_greedy_logdet(
    const std::vector<Eigen::MatrixXd>& class_covs, int batch_size,
    double jitter) {
  const int pool = static_cast<int>(class_covs.front().rows());
  std::vector<int> chosen;
  auto logdet_subset = [&](const std::vector<int>& idx) {
    double total = 0.0;
    for (const auto& cov : class_covs) {
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd sub(m, m);
      for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
          sub(a, b) = cov(idx[static_cast<std::size_t>(a)],
                          idx[static_cast<std::size_t>(b)]);
      sub.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(sub);
      total += 2.0 *
               Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    }
    return total;
  };
  double prev = 0.0;
  for (int step = 0; step < batch_size; ++step) {
    int best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < pool; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      std::vector<int> trial = chosen;
      trial.push_back(i);
      const double v = logdet_subset(trial);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    chosen.push_back(best);
    prev = best_val;
  }
  (void)prev;
  return chosen;
}

// Entropy in nats with 0 log 0 = 0, for brute-force enumerations.
inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

}  // namespace oracle

#endif  // BBAL_TESTS_ORACLES_HPP
