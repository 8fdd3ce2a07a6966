#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "bbal/errors.hpp"
#include "bbal/selection.hpp"
#include "oracles.hpp"

using bbal::CovOracle;
using bbal::greedy_logdet_select;
using bbal::grid_joint_maximize;
using bbal::SelectionResult;

namespace {

// Test oracle backed by explicit matrices.
class MatrixOracle : public CovOracle {
 public:
  MatrixOracle(std::vector<Eigen::MatrixXd> mats, double jitter)
      : mats_(std::move(mats)), jitter_(jitter) {}
  int pool_size() const override { return static_cast<int>(mats_.front().rows()); }
  int num_classes() const override { return static_cast<int>(mats_.size()); }
  double entry(int c, int i, int j) const override {
    ++queries_;
    return mats_[static_cast<std::size_t>(c)](i, j);
  }
  double jitter() const override { return jitter_; }

 private:
  std::vector<Eigen::MatrixXd> mats_;
  double jitter_;
};

std::vector<Eigen::MatrixXd> random_psd(int classes, int pool,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Eigen::MatrixXd> mats;
  for (int c = 0; c < classes; ++c) {
    Eigen::MatrixXd a(pool, pool + 2);
    for (int i = 0; i < pool; ++i)
      for (int j = 0; j < pool + 2; ++j) a(i, j) = nd(rng);
    mats.push_back(a * a.transpose() / (pool + 2));
  }
  return mats;
}

}  // namespace

TEST_CASE("B=1 picks the argmax of summed log diagonal entries") {
  const auto mats = random_psd(3, 12, 5);
  MatrixOracle oracle(mats, 1e-10);
  const SelectionResult r = greedy_logdet_select(oracle, 1);
  int best = 0;
  double best_val = -1e300;
  for (int i = 0; i < 12; ++i) {
    double v = 0.0;
    for (const auto& m : mats) v += std::log(m(i, i) + 1e-10);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  CHECK(r.score.batch == std::vector<int>{best});
  CHECK(r.score.value == doctest::Approx(best_val).epsilon(1e-12));
}

TEST_CASE("matches the naive recompute-from-scratch greedy") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int classes = 1 + static_cast<int>(seed % 3);
    const auto mats = random_psd(classes, 10, 100 + seed);
    MatrixOracle oracle(mats, 1e-10);
    const SelectionResult fast = greedy_logdet_select(oracle, 4);
    const std::vector<int> naive = oracle::naive_greedy_logdet(mats, 4, 1e-10);
    CHECK(fast.score.batch == naive);
  }
}

TEST_CASE("per-step gains are nonincreasing and telescope to the value") {
  const auto mats = random_psd(2, 14, 7);
  MatrixOracle oracle(mats, 1e-10);
  const SelectionResult r = greedy_logdet_select(oracle, 6);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.score.per_step_gains.size(); ++i) {
    sum += r.score.per_step_gains[i];
    if (i)
      CHECK(r.score.per_step_gains[i] <= r.score.per_step_gains[i - 1] + 1e-9);
  }
  CHECK(sum == doctest::Approx(r.score.value).epsilon(1e-12));
}

TEST_CASE("an exact duplicate is never selected while variance remains") {
  auto mats = random_psd(1, 6, 9);
  // make point 3 an exact duplicate of point 1
  auto& m = mats[0];
  m.row(3) = m.row(1);
  m.col(3) = m.col(1);
  m(3, 3) = m(1, 1);
  MatrixOracle oracle(mats, 1e-10);
  const SelectionResult r = greedy_logdet_select(oracle, 5);
  // 5 of 6 points selected; the duplicate pair contributes only one member
  const bool has1 = std::find(r.score.batch.begin(), r.score.batch.end(), 1) !=
                    r.score.batch.end();
  const bool has3 = std::find(r.score.batch.begin(), r.score.batch.end(), 3) !=
                    r.score.batch.end();
  CHECK(has1);
  CHECK_FALSE(has3);
}

TEST_CASE("selection is invariant to uniform positive scaling") {
  const auto mats = random_psd(2, 12, 13);
  auto scaled = mats;
  for (auto& m : scaled) m *= 7.3;
  MatrixOracle a(mats, 1e-10);
  MatrixOracle b(scaled, 1e-10);
  CHECK(greedy_logdet_select(a, 5).score.batch ==
        greedy_logdet_select(b, 5).score.batch);
}

TEST_CASE("oracle query count stays within C * pool * (B+1)") {
  for (int batch : {1, 3, 6}) {
    const auto mats = random_psd(3, 15, 21);
    MatrixOracle oracle(mats, 1e-10);
    const SelectionResult r = greedy_logdet_select(oracle, batch);
    CHECK(r.oracle_queries <=
          static_cast<std::uint64_t>(3 * 15 * (batch + 1)));
  }
}

TEST_CASE("selected-point gains equal dense Schur complements") {
  const auto mats = random_psd(2, 10, 31);
  MatrixOracle oracle(mats, 1e-10);
  const SelectionResult r = greedy_logdet_select(oracle, 5);
  std::vector<int> sel;
  for (std::size_t step = 0; step < r.score.batch.size(); ++step) {
    const int j = r.score.batch[step];
    double expect = 0.0;
    for (const auto& m : mats) {
      double v = m(j, j) + 1e-10;
      if (!sel.empty()) {
        const auto k = static_cast<Eigen::Index>(sel.size());
        Eigen::MatrixXd sub(k, k);
        Eigen::VectorXd cross(k);
        for (Eigen::Index a = 0; a < k; ++a) {
          cross(a) = m(j, sel[static_cast<std::size_t>(a)]);
          for (Eigen::Index b = 0; b < k; ++b)
            sub(a, b) = m(sel[static_cast<std::size_t>(a)],
                          sel[static_cast<std::size_t>(b)]);
        }
        sub.diagonal().array() += 1e-10;
        v -= cross.dot(sub.llt().solve(cross));
      }
      expect += std::log(std::max(v, 1e-10));
    }
    CHECK(r.score.per_step_gains[step] == doctest::Approx(expect).epsilon(1e-8));
    sel.push_back(j);
  }
}

TEST_CASE("selecting the whole pool recovers the full log-determinant") {
  const auto mats = random_psd(2, 7, 41);
  MatrixOracle oracle(mats, 1e-10);
  const SelectionResult r = greedy_logdet_select(oracle, 7);
  double expect = 0.0;
  for (const auto& m : mats) {
    Eigen::MatrixXd reg = m;
    reg.diagonal().array() += 1e-10;
    expect += 2.0 * Eigen::MatrixXd(reg.llt().matrixL())
                        .diagonal()
                        .array()
                        .log()
                        .sum();
  }
  CHECK(r.score.value == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("degenerate pool raises the dedicated error") {
  std::vector<Eigen::MatrixXd> mats = {Eigen::MatrixXd::Zero(4, 4)};
  MatrixOracle oracle(mats, 1e-10);
  CHECK_THROWS_AS(greedy_logdet_select(oracle, 2), bbal::DegeneratePoolError);
}

TEST_CASE("grid maximize finds the analytic argmax") {
  Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(11, -1.0, 1.0);
  const auto res = grid_joint_maximize(
      [](double x1, double x2) { return -(x1 * x1 + x2 * x2); }, axis);
  CHECK(res.x1 == 0.0);
  CHECK(res.x2 == 0.0);
  CHECK(res.grid.values(res.i1, res.i2) == 0.0);
}

TEST_CASE("grid maximize breaks ties lexicographically") {
  Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  const auto res =
      grid_joint_maximize([](double, double) { return 1.0; }, axis);
  CHECK(res.i1 == 0);
  CHECK(res.i2 == 0);
}

TEST_CASE("non-finite cells are flagged and skipped") {
  Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(3, 0.0, 1.0);
  const auto res = grid_joint_maximize(
      [](double x1, double x2) {
        if (x1 == 0.5 && x2 == 0.5) return std::nan("");
        return x1 + x2;
      },
      axis);
  CHECK(res.grid.flagged.size() == 1);
  CHECK(res.x1 == 1.0);
  CHECK(res.x2 == 1.0);
}

TEST_CASE("grid results are identical across thread counts") {
  Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(33, -2.0, 2.0);
  auto score = [](double x1, double x2) {
    return std::sin(3 * x1) * std::cos(2 * x2) - 0.1 * x1 * x2;
  };
  const auto a = grid_joint_maximize(score, axis, 1);
  const auto b = grid_joint_maximize(score, axis, 4);
  CHECK(a.i1 == b.i1);
  CHECK(a.i2 == b.i2);
  CHECK((a.grid.values - b.grid.values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("axis must be strictly increasing") {
  Eigen::VectorXd axis(3);
  axis << 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(
      grid_joint_maximize([](double, double) { return 0.0; }, axis),
      bbal::DomainError);
}
