#include <algorithm>
#include <cmath>

#include "mcb/error.hpp"
#include "mcb/estimators.hpp"

namespace mcb {

std::size_t trim_count(std::size_t n, double alpha, const TrimOptions& opts) {
  // The small offset keeps products such as 2 * 0.2 * 10 from rounding up to 5.
  const double raw = opts.c_trim * alpha * static_cast<double>(n);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(raw - 1e-9)));
}

RobustEstimate trimmed_mean(std::span<const double> samples, double alpha, const TrimOptions& opts) {
  require(alpha >= 0.0 && alpha < 1.0 / 3.0, "trimmed_mean: alpha must lie in [0, 1/3)");
  require(samples.size() >= 2, "trimmed_mean: need at least two samples");
  const std::size_t n = samples.size();
  const std::size_t k = trim_count(n, alpha, opts);
  if (2 * k >= n) {
    fail(ErrorCode::kOverTrimmed, "trimmed_mean: over-trimmed (k=" + std::to_string(k) + " per side, N=" +
                                      std::to_string(n) + ")");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (std::size_t i = k; i < n - k; ++i) sum += sorted[i];
  RobustEstimate out;
  out.estimate = Eigen::VectorXd::Constant(1, sum / static_cast<double>(n - 2 * k));
  out.removed_fraction = static_cast<double>(2 * k) / static_cast<double>(n);
  out.iterations = 1;
  return out;
}

double lower_median(std::vector<double> values) {
  require(!values.empty(), "median of an empty set");
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

double median_of_means(std::span<const double> samples, int num_blocks) {
  require(num_blocks >= 1, "median_of_means: need at least one block");
  const std::size_t n = samples.size();
  require(static_cast<std::size_t>(num_blocks) <= n, "median_of_means: more blocks than samples");
  std::vector<double> means;
  means.reserve(num_blocks);
  // Block b covers [b*n/B, (b+1)*n/B); sizes differ by at most one.
  for (int b = 0; b < num_blocks; ++b) {
    const std::size_t lo = n * static_cast<std::size_t>(b) / num_blocks;
    const std::size_t hi = n * static_cast<std::size_t>(b + 1) / num_blocks;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += samples[i];
    means.push_back(sum / static_cast<double>(hi - lo));
  }
  return lower_median(std::move(means));
}

}  // namespace mcb
