#include <cmath>
#include <ostream>

#include "format.hpp"
#include "mcb/estimators.hpp"
#include "mcb/harness.hpp"
#include "mcb/rng.hpp"

namespace mcb {

std::vector<BenchRow> estimators_bench(const BenchParams& params) {
  require(params.reps >= 1, "estimators_bench: reps must be >= 1");
  std::vector<BenchRow> out;
  for (double alpha : params.alphas) {
    require(alpha > 0.0 && alpha < 1.0 / 3.0, "estimators_bench: alpha must lie in (0, 1/3)");
    for (int d : params.dims) {
      require(d >= 1, "estimators_bench: dimension must be >= 1");
      const double logd = std::max(1.0, std::ceil(std::log(static_cast<double>(d))));
      const int N = static_cast<int>(std::ceil(params.n_factor * d * logd / alpha));
      const int m = static_cast<int>(std::floor(alpha * N));
      const double bound = 3.0 * std::sqrt(alpha);
      for (const std::string& attack : params.attacks) {
        require(attack == "shift" || attack == "inlier", "estimators_bench: unknown attack " + attack);
        std::vector<BenchRow> rows;
        if (d == 1) rows.push_back({"trimmed_mean", attack, alpha, d, N, params.reps, 0, 0.0, bound});
        rows.push_back({"robust_mean_highdim", attack, alpha, d, N, params.reps, 0, 0.0, bound});
        rows.push_back({"plain_mean", attack, alpha, d, N, params.reps, 0, 0.0, bound});
        for (int rep = 0; rep < params.reps; ++rep) {
          const std::uint64_t seed =
              derive_seed(derive_seed(derive_seed(params.seed, hash_name(attack)), static_cast<std::uint64_t>(d)),
                          derive_seed(static_cast<std::uint64_t>(alpha * 1e6), static_cast<std::uint64_t>(rep)));
          Rng rng(seed);
          Eigen::VectorXd mu(d);
          for (int j = 0; j < d; ++j) mu(j) = 2.0 * rng.uniform() - 1.0;
          Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> draws(N, d);
          for (int i = 0; i < N; ++i) {
            for (int j = 0; j < d; ++j) draws(i, j) = mu(j) + rng.normal();
          }
          Eigen::MatrixXd X = draws;
          for (int i = 0; i < m; ++i) {
            if (attack == "shift") {
              X.row(i) = (mu.array() + params.shift).transpose();
            } else {
              X.row(i) = mu.transpose();
              X(i, 0) += 1.0 / std::sqrt(alpha);
            }
          }
          for (auto& row : rows) {
            Eigen::VectorXd est;
            if (row.estimator == "trimmed_mean") {
              est = trimmed_mean(std::span<const double>(X.data(), static_cast<std::size_t>(N)), alpha).estimate;
            } else if (row.estimator == "robust_mean_highdim") {
              est = robust_mean_highdim(X, alpha, 1.0).estimate;
            } else {
              est = X.colwise().mean().transpose();
            }
            const double err = (est - mu).norm();
            row.mean_error += err / params.reps;
            if (err <= bound) ++row.within;
          }
        }
        out.insert(out.end(), rows.begin(), rows.end());
      }
    }
  }
  return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "# mcb-bench v1 columns: within = replications with l2 error <= bound\n";
  os << "estimator,attack,alpha,d,N,reps,within,mean_error,bound\n";
  for (const auto& r : rows) {
    os << r.estimator << ',' << r.attack << ',' << detail::fmt(r.alpha) << ',' << r.dim << ',' << r.num_points << ','
       << r.reps << ',' << r.within << ',' << detail::fmt(r.mean_error) << ',' << detail::fmt(r.bound) << '\n';
  }
}

}  // namespace mcb
