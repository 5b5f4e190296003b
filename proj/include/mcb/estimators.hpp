#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace mcb {

struct RobustEstimate {
  Eigen::VectorXd estimate;
  double removed_fraction = 0.0;
  int iterations = 0;
  // Final top eigenvalue of the weighted covariance (high-dimensional estimator only).
  double spectral_bound = 0.0;
  std::vector<std::string> warnings;

  double scalar() const { return estimate(0); }
};

struct TrimOptions {
  double c_trim = 2.0;
};

// Points trimmed from each side: ceil(c_trim * alpha * n).
std::size_t trim_count(std::size_t n, double alpha, const TrimOptions& opts = {});

RobustEstimate trimmed_mean(std::span<const double> samples, double alpha, const TrimOptions& opts = {});

// Contiguous blocks in the given order; the median of an even count is the lower median.
double median_of_means(std::span<const double> samples, int num_blocks);

double lower_median(std::vector<double> values);

struct TopEigen {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  double tolerance = 1e-8;
  int max_iterations = 1000;
};

// Top eigenpair of a symmetric PSD matrix. Starts from the normalised all-ones
// vector; a start vector annihilated by the matrix is perturbed deterministically.
TopEigen power_iteration(const Eigen::MatrixXd& matrix, const PowerIterationOptions& opts = {});

struct FilterOptions {
  double c_stop = 9.0;
  // Mass removed per filtering round, as a fraction of the initial mass.
  double step_fraction = 0.01;
  int max_rounds = 10000;
  PowerIterationOptions power;
};

/// Spectral filtering: while the weighted covariance has an eigenvalue above
/// c_stop * sigma_sq, drop the points lying furthest from the weighted median
/// along the top eigenvector. Rows of `points` are samples.
/// Throws kFilterCollapse once half of the mass is gone.
RobustEstimate robust_mean_highdim(const Eigen::MatrixXd& points, double alpha, double sigma_sq,
                                   const FilterOptions& opts = {});

struct ConditionB1Constants {
  double c1 = 4.0;
  double c2 = 4.0;
  double c3 = 4.0;
};

struct ConditionB1Report {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  bool pass = false;
  // delta1/delta2 are lower bounds from sampled directions rather than exact suprema.
  bool approximate = false;
};

inline constexpr std::size_t kB1ExactLimit = 12;

ConditionB1Report check_condition_b1(const Eigen::MatrixXd& points, const Eigen::VectorXd& mu_star, double eps,
                                     const ConditionB1Constants& constants = {}, std::uint64_t seed = 0);

}  // namespace mcb
