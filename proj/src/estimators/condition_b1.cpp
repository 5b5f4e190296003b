#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcb/error.hpp"
#include "mcb/estimators.hpp"
#include "mcb/rng.hpp"

namespace mcb {

namespace {

struct VertexShape {
  std::size_t full = 0;   // coordinates at the cap
  double cap = 0.0;
  double remainder = 0.0;  // mass of the single partial coordinate (may be zero)
};

// Vertices of {sum w = 1, 0 <= w_i <= cap} put `full` coordinates at the cap and
// the leftover mass on one more coordinate.
VertexShape vertex_shape(std::size_t n, double eps) {
  VertexShape v;
  v.cap = 1.0 / ((1.0 - 3.0 * eps) * static_cast<double>(n));
  v.full = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(1.0 / v.cap + 1e-12)));
  v.remainder = std::max(0.0, 1.0 - static_cast<double>(v.full) * v.cap);
  if (v.remainder < 1e-14) v.remainder = 0.0;
  return v;
}

struct Evaluator {
  const Eigen::MatrixXd& centred;  // rows are X_i - mu*

  double first_moment(const std::vector<double>& w) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(centred.cols());
    for (Eigen::Index i = 0; i < centred.rows(); ++i) {
      if (w[static_cast<std::size_t>(i)] != 0.0) acc += w[static_cast<std::size_t>(i)] * centred.row(i).transpose();
    }
    return acc.norm();
  }

  double second_moment(const std::vector<double>& w) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(centred.cols(), centred.cols());
    for (Eigen::Index i = 0; i < centred.rows(); ++i) {
      const double wi = w[static_cast<std::size_t>(i)];
      if (wi != 0.0) m.noalias() += wi * centred.row(i).transpose() * centred.row(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().maxCoeff());
  }
};

// Greedy vertex: cap mass on the highest scores, remainder on the next one.
std::vector<double> greedy_vertex(const std::vector<double>& score, const VertexShape& shape) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<double> w(score.size(), 0.0);
  for (std::size_t k = 0; k < shape.full; ++k) w[order[k]] = shape.cap;
  if (shape.remainder > 0.0 && shape.full < order.size()) w[order[shape.full]] = shape.remainder;
  return w;
}

}  // namespace

ConditionB1Report check_condition_b1(const Eigen::MatrixXd& points, const Eigen::VectorXd& mu_star, double eps,
                                     const ConditionB1Constants& constants, std::uint64_t seed) {
  require(points.rows() >= 1, "check_condition_b1: need at least one point");
  if (points.cols() != mu_star.size()) fail(ErrorCode::kDimensionMismatch, "check_condition_b1: mu_star dimension");
  require(eps > 0.0 && eps < 1.0 / 3.0, "check_condition_b1: eps must lie in (0, 1/3)");

  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = points.cols();
  const Eigen::MatrixXd centred = points.rowwise() - mu_star.transpose();
  const Evaluator eval{centred};
  const VertexShape shape = vertex_shape(n, eps);

  ConditionB1Report rep;
  rep.delta3 = centred.rowwise().norm().maxCoeff();

  if (n <= kB1ExactLimit) {
    // Enumerate every vertex: a subset of `full` indices plus one partial index.
    std::vector<int> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(shape.full), 1);
    std::sort(pick.begin(), pick.end());  // smallest permutation for next_permutation
    do {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (pick[i]) w[i] = shape.cap;
      }
      auto consider = [&](const std::vector<double>& wv) {
        rep.delta1 = std::max(rep.delta1, eval.first_moment(wv));
        rep.delta2 = std::max(rep.delta2, eval.second_moment(wv));
      };
      if (shape.remainder == 0.0) {
        consider(w);
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          if (pick[j]) continue;
          w[j] = shape.remainder;
          consider(w);
          w[j] = 0.0;
        }
      }
    } while (std::next_permutation(pick.begin(), pick.end()));
  } else {
    rep.approximate = true;
    std::vector<Eigen::VectorXd> directions;
    for (Eigen::Index j = 0; j < d; ++j) directions.push_back(Eigen::VectorXd::Unit(d, j));
    const std::size_t from_points = std::min<std::size_t>(n, 64);
    for (std::size_t i = 0; i < from_points; ++i) {
      const double norm = centred.row(static_cast<Eigen::Index>(i)).norm();
      if (norm > 0.0) directions.push_back(centred.row(static_cast<Eigen::Index>(i)).transpose() / norm);
    }
    Rng rng(derive_seed(seed, "condition_b1"));
    for (int k = 0; k < 64; ++k) {
      Eigen::VectorXd u(d);
      for (Eigen::Index j = 0; j < d; ++j) u(j) = rng.normal();
      if (u.norm() > 0.0) directions.push_back(u.normalized());
    }
    std::vector<double> score(n);
    for (const auto& u : directions) {
      const Eigen::VectorXd proj = centred * u;
      for (std::size_t i = 0; i < n; ++i) score[i] = proj(static_cast<Eigen::Index>(i));
      rep.delta1 = std::max(rep.delta1, eval.first_moment(greedy_vertex(score, shape)));
      for (std::size_t i = 0; i < n; ++i) score[i] = score[i] * score[i];
      rep.delta2 = std::max(rep.delta2, eval.second_moment(greedy_vertex(score, shape)));
    }
  }

  rep.pass = rep.delta1 <= constants.c1 * std::sqrt(eps) && rep.delta2 <= constants.c2 &&
             rep.delta3 <= constants.c3 * std::sqrt(static_cast<double>(d) / eps);
  return rep;
}

}  // namespace mcb
