#include <cmath>

#include "mcb/error.hpp"
#include "mcb/estimators.hpp"

namespace mcb {

namespace {

Eigen::VectorXd perturbed_start(Eigen::Index d, int attempt) {
  Eigen::VectorXd v(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    v(j) = 1.0 + 0.5 * std::sin(static_cast<double>((j + 1) * (attempt + 1)));
  }
  return v.normalized();
}

}  // namespace

TopEigen power_iteration(const Eigen::MatrixXd& matrix, const PowerIterationOptions& opts) {
  require(matrix.rows() == matrix.cols() && matrix.rows() > 0, "power_iteration: need a non-empty square matrix");
  const Eigen::Index d = matrix.rows();
  TopEigen out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d).normalized();
  Eigen::VectorXd w = matrix * v;

  // A start vector in the null space stalls at zero; retry from fixed perturbations,
  // then the coordinate axes.
  for (int attempt = 0; w.norm() == 0.0 && attempt < 4; ++attempt) {
    v = perturbed_start(d, attempt);
    w = matrix * v;
  }
  for (Eigen::Index j = 0; w.norm() == 0.0 && j < d; ++j) {
    v = Eigen::VectorXd::Unit(d, j);
    w = matrix * v;
  }
  if (w.norm() == 0.0) {
    out.value = 0.0;
    out.vector = Eigen::VectorXd::Ones(d).normalized();
    out.converged = true;
    return out;
  }

  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::VectorXd next = w.normalized();
    const double change = (next - v).norm();
    v = std::move(next);
    w = matrix * v;
    out.iterations = it;
    if (change < opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.vector = v;
  out.value = v.dot(w);
  return out;
}

}  // namespace mcb
