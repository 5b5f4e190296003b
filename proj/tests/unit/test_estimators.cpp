#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mcb/error.hpp"
#include "mcb/estimators.hpp"
#include "oracles.hpp"

using namespace mcb;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(gen);
  return x;
}

Eigen::MatrixXd gaussian_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(gen);
  }
  return x;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  const Eigen::MatrixXd m = gaussian_points(d, d, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("trim count") {
  CHECK(trim_count(10, 0.2) == 4);
  CHECK(trim_count(100, 0.1) == 20);
  CHECK(trim_count(7, 0.0) == 0);
  CHECK(trim_count(10, 0.2, TrimOptions{1.0}) == 2);
}

TEST_CASE("trimmed mean: hand examples") {
  const std::vector<double> constant(9, 0.7);
  for (double a : {0.0, 0.05, 0.1}) CHECK(trimmed_mean(constant, a).scalar() == doctest::Approx(0.7).epsilon(1e-15));

  std::vector<double> x(8, 0.0);
  x.push_back(100.0);
  x.push_back(100.0);
  const auto est = trimmed_mean(x, 0.2);
  CHECK(est.scalar() == 0.0);
  CHECK(est.removed_fraction == doctest::Approx(0.8));
}

TEST_CASE("trimmed mean agrees with a sort-and-trim oracle") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x(10 + rep);
    for (auto& v : x) v = u(gen);
    const double alpha = 0.01 * (rep % 20);
    const std::size_t k = trim_count(x.size(), alpha);
    CHECK(trimmed_mean(x, alpha).scalar() == doctest::Approx(oracle::sort_and_trim(x, k)).epsilon(1e-12));
  }
}

TEST_CASE("trimmed mean: 10% of 5000 normals moved to +50") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto x = normals(5000, seed);
    for (std::size_t i = 0; i < 500; ++i) x[i] = 50.0;
    CHECK(std::abs(trimmed_mean(x, 0.1).scalar()) <= 3.0 * std::sqrt(0.1));
  }
}

TEST_CASE("trimmed mean errors") {
  const std::vector<double> x(10, 1.0);
  CHECK_THROWS_AS(trimmed_mean(std::vector<double>{1.0}, 0.1), Error);
  CHECK_THROWS_AS(trimmed_mean(x, 0.34), Error);
  try {
    (void)trimmed_mean(x, 0.3);
    FAIL("expected over-trim");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverTrimmed);
  }
}

TEST_CASE("trimmed mean is translation and scale equivariant") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = normals(101, seed);
    const double base = trimmed_mean(x, 0.1).scalar();
    std::vector<double> shifted(x), scaled(x);
    for (auto& v : shifted) v += 3.25;
    for (auto& v : scaled) v *= -2.5;
    CHECK(std::abs(trimmed_mean(shifted, 0.1).scalar() - (base + 3.25)) <= 1e-12);
    CHECK(std::abs(trimmed_mean(scaled, 0.1).scalar() - (-2.5 * base)) <= 1e-12);
  }
}

TEST_CASE("trimmed mean lies within the retained samples") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto x = normals(40 + seed, seed);
    const double alpha = 0.02 * static_cast<double>(seed % 10);
    const std::size_t k = trim_count(x.size(), alpha);
    const double est = trimmed_mean(x, alpha).scalar();
    std::sort(x.begin(), x.end());
    CHECK(est >= x[k]);
    CHECK(est <= x[x.size() - 1 - k]);
  }
}

TEST_CASE("breakdown: bounded trimmed-mean shift, unbounded plain-mean shift") {
  const double alpha = 0.1;
  const std::size_t n = 2000;
  const auto corrupt = static_cast<std::size_t>(std::floor(alpha * n));
  double last_plain = 0.0;
  for (double magnitude : {10.0, 1e3, 1e6}) {
    double worst = 0.0, plain_shift = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto x = normals(n, seed + 1000);
      const double clean = trimmed_mean(x, alpha).scalar();
      double clean_mean = 0.0, dirty_mean = 0.0;
      for (double v : x) clean_mean += v / n;
      for (std::size_t i = 0; i < corrupt; ++i) x[i] = magnitude;
      for (double v : x) dirty_mean += v / n;
      worst = std::max(worst, std::abs(trimmed_mean(x, alpha).scalar() - clean));
      plain_shift += (dirty_mean - clean_mean) / 100.0;
    }
    CHECK(worst <= 3.0 * std::sqrt(alpha));
    CHECK(plain_shift >= 0.9 * alpha * magnitude);
    CHECK(plain_shift > last_plain);
    last_plain = plain_shift;
  }
}

TEST_CASE("median of means") {
  const std::vector<double> x{1, 1, 1, 2, 2, 2, 9, 9, 9};
  CHECK(median_of_means(x, 3) == 2.0);
  CHECK(median_of_means(x, 1) == doctest::Approx(4.0));
  const std::vector<double> c(12, -1.5);
  for (int b = 1; b <= 12; ++b) CHECK(median_of_means(c, b) == -1.5);
  // Even block count: lower median of (1, 2, 9, 9) is 2.
  const std::vector<double> y{1, 2, 9, 9};
  CHECK(median_of_means(y, 4) == 2.0);
  CHECK_THROWS_AS(median_of_means(x, 10), Error);
  CHECK_THROWS_AS(median_of_means(x, 0), Error);
}

TEST_CASE("power iteration matches a dense eigensolver") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd g = gaussian_points(30, 8, seed);
    const Eigen::MatrixXd m = g.transpose() * g / 30.0;
    const auto top = power_iteration(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double ref = es.eigenvalues()(7);
    CHECK(top.value == doctest::Approx(ref).epsilon(1e-6));
    CHECK(std::abs(std::abs(top.vector.dot(es.eigenvectors().col(7))) - 1.0) <= 1e-4);
  }
  // A start vector in the null space still finds the top eigenpair.
  Eigen::MatrixXd m(2, 2);
  m << 1, -1, -1, 1;
  const auto top = power_iteration(m);
  CHECK(top.value == doctest::Approx(2.0));
}

TEST_CASE("robust_mean_highdim: identical points") {
  Eigen::MatrixXd x(20, 3);
  x.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
  const auto est = robust_mean_highdim(x, 0.1, 1.0);
  CHECK((est.estimate - Eigen::Vector3d(1.0, -2.0, 0.5)).norm() <= 1e-15);
  CHECK(est.iterations <= 1);
  CHECK(est.removed_fraction == 0.0);
}

TEST_CASE("robust_mean_highdim: clean data with alpha=0 returns the sample mean") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = gaussian_points(500, 5, seed);
    const auto est = robust_mean_highdim(x, 0.0, 1.0);
    REQUIRE(est.removed_fraction == 0.0);
    CHECK((est.estimate - x.colwise().mean().transpose()).norm() <= 1e-9);
  }
}

TEST_CASE("robust_mean_highdim: d=1 agrees with the trimmed mean") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto x = normals(1000, seed + 7);
    for (std::size_t i = 0; i < 100; ++i) x[i] = 10.0;
    const Eigen::MatrixXd pts = Eigen::Map<Eigen::MatrixXd>(x.data(), 1000, 1);
    const double hd = robust_mean_highdim(pts, 0.1, 1.0).scalar();
    const double tm = trimmed_mean(x, 0.1).scalar();
    CHECK(std::abs(hd - tm) <= 3.0 * std::sqrt(0.1));
  }
}

TEST_CASE("robust_mean_highdim: d=50 with 10% moved to mu + 10") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Eigen::MatrixXd x = gaussian_points(5000, 50, seed + 100);
    Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(50, -1.0, 1.0);
    x.rowwise() += mu.transpose();
    for (Eigen::Index i = 0; i < 500; ++i) x.row(i) = (mu.array() + 10.0).matrix().transpose();
    const auto est = robust_mean_highdim(x, 0.1, 1.0);
    CHECK((est.estimate - mu).norm() <= 3.0 * std::sqrt(0.1));
    CHECK((x.colwise().mean().transpose() - mu).norm() >= 0.1 * 10 * std::sqrt(50.0) / 2);
    CHECK(est.removed_fraction < 0.5);
    CHECK(est.spectral_bound >= 0.0);
  }
}

TEST_CASE("robust_mean_highdim is rotation equivariant") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd x = gaussian_points(400, 6, seed + 300);
    for (Eigen::Index i = 0; i < 40; ++i) x.row(i).setConstant(6.0);
    const Eigen::MatrixXd q = random_orthogonal(6, seed + 900);
    const auto base = robust_mean_highdim(x, 0.1, 1.0);
    const auto rotated = robust_mean_highdim(x * q.transpose(), 0.1, 1.0);
    CHECK((rotated.estimate - q * base.estimate).norm() <= 1e-6);
  }
}

TEST_CASE("robust_mean_highdim errors and warnings") {
  const auto x = gaussian_points(30, 10, 1);
  CHECK_FALSE(robust_mean_highdim(x, 0.1, 1.0).warnings.empty());
  CHECK_THROWS_AS(robust_mean_highdim(x, 0.4, 1.0), Error);
  Eigen::MatrixXd spread = gaussian_points(200, 2, 2) * 100.0;
  try {
    (void)robust_mean_highdim(spread, 0.1, 1e-6);
    FAIL("expected filter collapse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFilterCollapse);
  }
}

TEST_CASE("condition B.1: all points at mu*") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 2);
  const auto rep = check_condition_b1(x, Eigen::Vector2d::Zero(), 0.1);
  CHECK(rep.delta1 == 0.0);
  CHECK(rep.delta2 == 0.0);
  CHECK(rep.delta3 == 0.0);
  CHECK(rep.pass);
  CHECK_FALSE(rep.approximate);
}

TEST_CASE("condition B.1: exact deltas against a direction-sweep LP oracle") {
  // For a fixed direction u the LP max_w <u, sum w_i x_i> over the capped simplex is
  // solved by filling the cap greedily; sweeping u over the circle gives the sup.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd x = gaussian_points(6, 2, seed + 40);
    const Eigen::Vector2d mu_star(0.1, -0.2);
    const double eps = 0.1;
    const auto rep = check_condition_b1(x, mu_star, eps);
    const Eigen::MatrixXd c = x.rowwise() - mu_star.transpose();
    const double cap = 1.0 / ((1.0 - 3 * eps) * 6.0);
    auto greedy = [&](std::vector<double> score) {
      std::sort(score.begin(), score.end(), std::greater<>());
      double left = 1.0, total = 0.0;
      for (double s : score) {
        const double w = std::min(cap, left);
        total += w * s;
        left -= w;
      }
      return total;
    };
    double d1 = 0.0, d2 = 0.0;
    const int steps = 200000;
    for (int t = 0; t < steps; ++t) {
      const double th = 2.0 * M_PI * t / steps;
      const Eigen::Vector2d u(std::cos(th), std::sin(th));
      std::vector<double> lin(6), sq(6);
      for (int i = 0; i < 6; ++i) {
        lin[i] = c.row(i).dot(u);
        sq[i] = lin[i] * lin[i];
      }
      d1 = std::max(d1, greedy(lin));
      d2 = std::max(d2, greedy(sq));
    }
    CHECK_FALSE(rep.approximate);
    CHECK(rep.delta1 == doctest::Approx(d1).epsilon(1e-8));
    CHECK(rep.delta2 == doctest::Approx(d2).epsilon(1e-8));
    CHECK(rep.delta3 == doctest::Approx(c.rowwise().norm().maxCoeff()).epsilon(1e-15));
  }
}

TEST_CASE("condition B.1 holds for iid samples with N = d log d / eps") {
  const Eigen::Index d = 5;
  const double eps = 0.1;
  const auto n = static_cast<Eigen::Index>(std::ceil(d * std::log(static_cast<double>(d)) / eps));
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = gaussian_points(n, d, seed + 500);
    const auto rep = check_condition_b1(x, Eigen::VectorXd::Zero(d), eps, {}, seed);
    CHECK(rep.approximate);
    passes += rep.pass ? 1 : 0;
  }
  CHECK(passes >= 45);
}
