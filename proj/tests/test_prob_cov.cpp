#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "bbal/errors.hpp"
#include "bbal/gp.hpp"
#include "bbal/normal.hpp"
#include "bbal/prob_cov.hpp"
#include "oracles.hpp"

using bbal::analytic_class_cov;
using bbal::ClassProbCov;
using bbal::GPJointPosterior;
using bbal::ledoit_wolf_intensity;
using bbal::ledoit_wolf_shrink;
using bbal::probit_cov;
using bbal::probit_mean;
using bbal::ProbSampleTensor;
using bbal::sampled_class_cov;
using bbal::shrink_toward_identity;

namespace {

// Closed-form eigenvalues of a symmetric 3x3 via the trigonometric solution
// of the characteristic polynomial; independent of any library eigensolver.
std::array<double, 3> sym3_eigenvalues(const Eigen::Matrix3d& a) {
  const double q = a.trace() / 3.0;
  Eigen::Matrix3d b = a - q * Eigen::Matrix3d::Identity();
  const double p2 = b.squaredNorm() / 6.0;
  const double p = std::sqrt(p2);
  if (p < 1e-300) return {q, q, q};
  const double detb = b.determinant();
  double r = detb / (2.0 * p * p * p);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = 3.14159265358979323846;
  std::array<double, 3> eig = {
      q + 2.0 * p * std::cos(phi),
      q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0),
      q + 2.0 * p * std::cos(phi + 4.0 * pi / 3.0)};
  std::sort(eig.begin(), eig.end());
  return eig;
}

GPJointPosterior random_posterior(int b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  GPJointPosterior post;
  post.query_points.setZero(b, 1);
  post.mu.resize(b);
  for (int i = 0; i < b; ++i) post.mu(i) = nd(rng);
  Eigen::MatrixXd a(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) a(i, j) = nd(rng);
  post.S = a * a.transpose() / b + 0.05 * Eigen::MatrixXd::Identity(b, b);
  return post;
}

ProbSampleTensor binary_tensor(const std::vector<std::vector<double>>& p1) {
  ProbSampleTensor t;
  for (const auto& point : p1) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(point.size()), 2);
    for (std::size_t s = 0; s < point.size(); ++s) {
      m(static_cast<Eigen::Index>(s), 1) = point[s];
      m(static_cast<Eigen::Index>(s), 0) = 1.0 - point[s];
    }
    t.points.push_back(std::move(m));
  }
  return t;
}

}  // namespace

TEST_CASE("probit_mean pinned values") {
  CHECK(probit_mean(0.0, 0.7) == 0.5);
  CHECK(probit_mean(0.0, 123.0) == 0.5);
  CHECK(probit_mean(1.3, 0.0) == bbal::std_normal_cdf(1.3));
  // frozen from the erf series oracle: Phi(0.5)
  const double phi_half = 0.6914624612740131;
  CHECK(oracle::phi_series(0.5) == doctest::Approx(phi_half).epsilon(1e-15));
  CHECK(probit_mean(1.0, 3.0) == doctest::Approx(phi_half).epsilon(1e-14));
  CHECK_THROWS_AS(probit_mean(0.0, -0.1), bbal::DomainError);
}

TEST_CASE("probit_cov factorizes to zero for independent latents") {
  Eigen::Vector2d mu(0.4, -1.2);
  Eigen::Matrix2d s;
  s << 0.8, 0.0, 0.0, 1.7;
  CHECK(std::abs(probit_cov(mu, s)) <= 1e-9);
}

TEST_CASE("probit_cov pinned value for perfectly correlated latents") {
  Eigen::Vector2d mu(0.0, 0.0);
  Eigen::Matrix2d s;
  s << 1.0, 1.0, 1.0, 1.0;
  // E[Phi^2] = 1/4 + asin(1/2)/(2pi) = 1/3, means are 1/2 each
  CHECK(probit_cov(mu, s) == doctest::Approx(1.0 / 12.0).epsilon(1e-9));
}

TEST_CASE("probit_cov self-covariance is positive") {
  for (double v : {0.1, 1.0, 4.0}) {
    Eigen::Vector2d mu(0.3, 0.3);
    Eigen::Matrix2d s;
    s << v, v, v, v;
    CHECK(probit_cov(mu, s) > 0.0);
  }
}

TEST_CASE("probit_cov against a 1e7-sample Monte Carlo oracle") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector2d mu(nd(rng), nd(rng));
    Eigen::Matrix2d a;
    a << nd(rng), nd(rng), nd(rng), nd(rng);
    Eigen::Matrix2d s = a * a.transpose() + 0.05 * Eigen::Matrix2d::Identity();
    const auto mc = oracle::probit_mc(mu, s, 10'000'000, 1234 + k);
    CHECK(std::abs(probit_cov(mu, s) - mc.cov) <= 2e-3);
    CHECK(std::abs(probit_mean(mu(0), s(0, 0)) - mc.mean_i) <= 1e-3);
  }
}

TEST_CASE("analytic_class_cov single point pinned value") {
  GPJointPosterior post;
  post.query_points.setZero(1, 1);
  post.mu.resize(1);
  post.mu << 0.0;
  post.S.resize(1, 1);
  post.S << 1.0;
  const ClassProbCov cov = analytic_class_cov(post);
  REQUIRE(cov.num_classes() == 2);
  CHECK(cov.per_class[0](0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-9));
  CHECK(cov.per_class[1](0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-9));
}

TEST_CASE("analytic_class_cov binary symmetry and entrywise consistency") {
  const GPJointPosterior post = random_posterior(3, 21);
  const ClassProbCov cov = analytic_class_cov(post);
  CHECK((cov.per_class[0] - cov.per_class[1]).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((cov.per_class[0] - cov.per_class[0].transpose()).lpNorm<Eigen::Infinity>() <=
        1e-12);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector2d mu(post.mu(i), post.mu(j));
      Eigen::Matrix2d s;
      s << post.S(i, i), post.S(i, j), post.S(i, j), post.S(j, j);
      CHECK(std::abs(cov.per_class[0](i, j) - probit_cov(mu, s)) <= 1e-12);
    }
  }
}

TEST_CASE("analytic entries stay inside [-1/4, 1/4]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ClassProbCov cov = analytic_class_cov(random_posterior(4, 100 + seed));
    CHECK(cov.per_class[0].maxCoeff() <= 0.25);
    CHECK(cov.per_class[0].minCoeff() >= -0.25);
  }
}

TEST_CASE("duplicated points: singular raw matrix, PD after jitter") {
  GPJointPosterior post;
  post.query_points.setZero(2, 1);
  post.mu.resize(2);
  post.mu << 0.3, 0.3;
  post.S.resize(2, 2);
  post.S << 0.9, 0.9, 0.9, 0.9;
  const ClassProbCov cov = analytic_class_cov(post);
  // raw determinant vanishes up to quadrature error
  const Eigen::MatrixXd& m = cov.per_class[0];
  CHECK(std::abs(m.determinant()) <= 1e-12);
  Eigen::LLT<Eigen::MatrixXd> llt(cov.regularized(0));
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("permuting query points permutes every class matrix identically") {
  const GPJointPosterior post = random_posterior(5, 77);
  const ClassProbCov cov = analytic_class_cov(post);
  std::vector<int> perm = {3, 0, 4, 1, 2};
  const ClassProbCov permuted = analytic_class_cov(post.marginal(perm));
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(permuted.per_class[static_cast<std::size_t>(c)](i, j) -
                       cov.per_class[static_cast<std::size_t>(c)](
                           perm[static_cast<std::size_t>(i)],
                           perm[static_cast<std::size_t>(j)])) <= 1e-13);
}

TEST_CASE("sampled_class_cov of identical samples is zero") {
  const ProbSampleTensor t = binary_tensor({{0.4, 0.4, 0.4}, {0.7, 0.7, 0.7}});
  const ClassProbCov cov = sampled_class_cov(t);
  CHECK(cov.per_class[0].lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK(cov.per_class[1].lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("sampled_class_cov pinned two-sample variance") {
  // mean 0.5, E[p^2] = 0.34, plug-in variance 0.09 for both classes
  const ProbSampleTensor t = binary_tensor({{0.2, 0.8}});
  const ClassProbCov cov = sampled_class_cov(t);
  CHECK(cov.per_class[0](0, 0) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(cov.per_class[1](0, 0) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("two samples give rank <= 1 before shrinkage") {
  const ProbSampleTensor t =
      binary_tensor({{0.2, 0.9}, {0.4, 0.1}, {0.6, 0.7}});
  const ClassProbCov cov = sampled_class_cov(t);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cov.per_class[0]);
  lu.setThreshold(1e-10);
  CHECK(lu.rank() <= 1);
}

TEST_CASE("sampled_class_cov rejects a single sample") {
  const ProbSampleTensor t = binary_tensor({{0.2}});
  CHECK_THROWS_AS(sampled_class_cov(t), bbal::DomainError);
}

TEST_CASE("tensor validation rejects malformed rows") {
  ProbSampleTensor t = binary_tensor({{0.2, 0.8}});
  t.points[0](0, 0) = 0.9;  // row no longer sums to 1
  CHECK_THROWS_AS(t.validate(), bbal::DomainError);
}

TEST_CASE("sampled covariance converges to the analytic one") {
  const GPJointPosterior post = random_posterior(4, 5);
  const ClassProbCov exact = analytic_class_cov(post);
  double prev_err = std::numeric_limits<double>::infinity();
  for (int s : {100, 10'000, 1'000'000}) {
    bbal::Rng rng(17);
    const Eigen::MatrixXd latents = bbal::sample_latents(post, s, rng);
    const ClassProbCov est = sampled_class_cov(bbal::probit_prob_samples(latents));
    const double err =
        (est.per_class[1] - exact.per_class[1]).lpNorm<Eigen::Infinity>();
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 5e-3);
}

TEST_CASE("ledoit_wolf full shrinkage for degenerate samples") {
  Eigen::MatrixXd cov(2, 2);
  cov << 0.5, 0.2, 0.2, 0.3;
  const Eigen::MatrixXd samples = Eigen::MatrixXd::Constant(6, 2, 0.3);
  const auto res = ledoit_wolf_shrink(cov, samples);
  CHECK(res.intensity == 1.0);
  CHECK(!res.fallback);
  const double mu_t = cov.trace() / 2.0;
  CHECK((res.cov - mu_t * Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() <=
        1e-15);
}

TEST_CASE("zero intensity leaves the covariance unchanged") {
  Eigen::MatrixXd cov(3, 3);
  cov << 1.0, 0.3, 0.1, 0.3, 0.8, 0.2, 0.1, 0.2, 0.9;
  CHECK((shrink_toward_identity(cov, 0.0) - cov).lpNorm<Eigen::Infinity>() == 0.0);
  const Eigen::MatrixXd id = shrink_toward_identity(cov, 1.0);
  CHECK((id - (cov.trace() / 3.0) * Eigen::MatrixXd::Identity(3, 3))
            .lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("rank-1 3x3 becomes full rank with positive spectrum") {
  // two samples of three points: plug-in covariance has rank 1
  const ProbSampleTensor t =
      binary_tensor({{0.2, 0.9}, {0.35, 0.15}, {0.6, 0.75}});
  const ClassProbCov cov = sampled_class_cov(t);
  Eigen::MatrixXd samples(2, 3);
  for (int i = 0; i < 3; ++i)
    samples.col(i) = t.points[static_cast<std::size_t>(i)].col(1);
  const auto res = ledoit_wolf_shrink(cov.per_class[1], samples);
  CHECK(res.intensity > 0.0);
  CHECK(res.intensity <= 1.0);
  const auto eig = sym3_eigenvalues(Eigen::Matrix3d(res.cov));
  CHECK(eig[0] > 0.0);
  // min eigenvalue >= lambda * mu_t for a PSD input
  const double mu_t = cov.per_class[1].trace() / 3.0;
  CHECK(eig[0] >= res.intensity * mu_t - 1e-12);
}

TEST_CASE("shrunk output is PD whenever the trace is positive (B >= S)") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    // B = 8 points, S = 2 samples: the degenerate regime
    std::vector<std::vector<double>> p1(8);
    for (auto& point : p1) point = {u(rng), u(rng)};
    const ProbSampleTensor t = binary_tensor(p1);
    const ClassProbCov cov = sampled_class_cov(t);
    Eigen::MatrixXd samples(2, 8);
    for (int i = 0; i < 8; ++i)
      samples.col(i) = t.points[static_cast<std::size_t>(i)].col(1);
    const auto res = ledoit_wolf_shrink(cov.per_class[1], samples);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.cov);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("fully degenerate shrink falls back to jitter identity") {
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(4, 3);
  const auto res = ledoit_wolf_shrink(cov, samples);
  CHECK(res.fallback);
  CHECK(res.cov(0, 0) > 0.0);
  Eigen::LLT<Eigen::MatrixXd> llt(res.cov);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("intensity lands in [0,1] on random data") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(5 + trial, 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = nd(rng);
    const double lam = ledoit_wolf_intensity(x);
    CHECK(lam >= 0.0);
    CHECK(lam <= 1.0);
  }
}
