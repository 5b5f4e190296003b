#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcb/error.hpp"
#include "mcb/estimators.hpp"

namespace mcb {

RobustEstimate robust_mean_highdim(const Eigen::MatrixXd& points, double alpha, double sigma_sq,
                                   const FilterOptions& opts) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  require(n >= 1 && d >= 1, "robust_mean_highdim: need at least one point of dimension >= 1");
  require(alpha >= 0.0 && alpha < 1.0 / 3.0, "robust_mean_highdim: alpha must lie in [0, 1/3)");
  require(sigma_sq >= 0.0 && std::isfinite(sigma_sq), "robust_mean_highdim: sigma_sq must be finite and >= 0");
  require(opts.step_fraction > 0.0 && opts.step_fraction < 0.5, "robust_mean_highdim: step_fraction in (0, 1/2)");

  RobustEstimate out;
  if (alpha > 0.0) {
    const double dd = static_cast<double>(d);
    const double recommended = dd * std::log(std::max(dd, 2.0)) / alpha;
    if (static_cast<double>(n) < recommended) {
      out.warnings.push_back("robust_mean_highdim: N=" + std::to_string(n) + " below recommended d log d / alpha = " +
                             std::to_string(static_cast<long long>(std::ceil(recommended))));
    }
  }

  // Moments of the active set are kept relative to the full-sample mean and
  // downdated as points are removed.
  const Eigen::RowVectorXd ref = points.colwise().mean();
  const Eigen::MatrixXd y = points.rowwise() - ref;
  Eigen::VectorXd first = y.colwise().sum().transpose();
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  second.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose(), 1.0);

  std::vector<Eigen::Index> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), Eigen::Index{0});
  const double threshold = opts.c_stop * sigma_sq;
  const auto per_round = static_cast<std::size_t>(
      std::max(1.0, std::ceil(opts.step_fraction * static_cast<double>(n) - 1e-9)));

  for (int round = 0; round < opts.max_rounds; ++round) {
    const auto m = static_cast<double>(active.size());
    const Eigen::VectorXd shift = first / m;
    Eigen::MatrixXd cov = second.selfadjointView<Eigen::Lower>();
    cov /= m;
    cov.noalias() -= shift * shift.transpose();

    const TopEigen top = power_iteration(cov, opts.power);
    out.iterations = round + 1;
    out.spectral_bound = std::max(0.0, top.value);
    if (top.value <= threshold) {
      out.estimate = ref.transpose() + shift;
      out.removed_fraction = static_cast<double>(n - static_cast<Eigen::Index>(active.size())) / static_cast<double>(n);
      return out;
    }

    const Eigen::VectorXd proj_all = y * top.vector;
    std::vector<double> proj(active.size());
    for (std::size_t r = 0; r < active.size(); ++r) proj[r] = proj_all(active[r]);
    const double med = lower_median(proj);
    std::vector<std::pair<double, Eigen::Index>> scored(active.size());
    for (std::size_t r = 0; r < active.size(); ++r) {
      const double dev = proj_all(active[r]) - med;
      scored[r] = {dev * dev, active[r]};
    }
    const std::size_t drop = std::min(per_round, scored.size() - 1);
    auto by_score = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(drop), scored.end(), by_score);

    std::vector<Eigen::Index> dropped;
    dropped.reserve(drop);
    for (std::size_t r = 0; r < drop; ++r) dropped.push_back(scored[r].second);
    const Eigen::MatrixXd gone = y(dropped, Eigen::placeholders::all);
    first -= gone.colwise().sum().transpose();
    second.selfadjointView<Eigen::Lower>().rankUpdate(gone.transpose(), -1.0);

    active.clear();
    for (std::size_t r = drop; r < scored.size(); ++r) active.push_back(scored[r].second);
    std::sort(active.begin(), active.end());

    const auto removed = static_cast<std::size_t>(n) - active.size();
    if (2 * removed >= static_cast<std::size_t>(n)) {
      fail(ErrorCode::kFilterCollapse, "robust_mean_highdim: filter collapse (removed " + std::to_string(removed) +
                                           " of " + std::to_string(n) +
                                           " points; corruption beyond tolerance or sigma_sq too small)");
    }
  }
  fail(ErrorCode::kInternal, "robust_mean_highdim: exceeded max_rounds");
}

}  // namespace mcb
