#include <cmath>
#include <limits>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/lowerbound.hpp"

namespace mcb {
namespace {

// Neumaier summation.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ClassTerms {
  std::vector<double> log_half;  // log(C(n,k) 2^-n)
  std::vector<double> x;         // log((1 - alpha) b_k / p), b_k the B(1/2+eps) density
};

ClassTerms class_terms(int n, double alpha, double eps) {
  ClassTerms c;
  c.log_half.resize(static_cast<std::size_t>(n) + 1);
  c.x.resize(static_cast<std::size_t>(n) + 1);
  const double lp = -n * std::log(2.0);
  const double up = std::log1p(2.0 * eps);
  const double down = std::log1p(-2.0 * eps);
  const double la = std::log1p(-alpha);
  for (int k = 0; k <= n; ++k) {
    c.log_half[static_cast<std::size_t>(k)] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + lp;
    c.x[static_cast<std::size_t>(k)] = k * up + (n - k) * down + la;
  }
  return c;
}

void check_args(int n, double alpha, double eps, int num_users) {
  require(n >= 1, "E^(n): n must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "E^(n): alpha must lie in (0, 1)");
  require(eps >= 0.0 && eps < 0.5, "E^(n): eps must lie in [0, 1/2)");
  require(num_users >= 1, "E^(n): L must be >= 1");
}

}  // namespace

int lecam_max_n(double alpha, double eps, int num_users) {
  if (eps <= 0.0 || num_users <= 1) return std::numeric_limits<int>::max();
  const double v = 0.01 * alpha * alpha / (eps * eps * std::log(static_cast<double>(num_users)));
  return v >= static_cast<double>(std::numeric_limits<int>::max()) ? std::numeric_limits<int>::max()
                                                                   : static_cast<int>(std::floor(v));
}

WeightLawE build_E_n(int n, double alpha, double eps, int num_users) {
  check_args(n, alpha, eps, num_users);
  WeightLawE law;
  law.n = n;
  law.alpha = alpha;
  law.eps = eps;
  law.num_users = num_users;
  law.delta_max = 4.0 * std::sqrt(n * std::log(static_cast<double>(num_users)));
  if (alpha >= 1.0 / 6.0) law.warnings.push_back("alpha >= 1/6 is outside the construction's hypothesis");
  if (n > lecam_max_n(alpha, eps, num_users)) {
    law.warnings.push_back("n exceeds 0.01 alpha^2 / (eps^2 ln L)");
  }

  const ClassTerms c = class_terms(n, alpha, eps);
  Accumulator bad;
  for (int k = 0; k <= n; ++k) {
    if (law.good_class(k)) continue;
    bad.add(std::exp(c.log_half[static_cast<std::size_t>(k)]) * std::expm1(c.x[static_cast<std::size_t>(k)]));
  }
  law.z_minus_one = bad.value() / alpha;
  law.z = 1.0 + law.z_minus_one;

  law.mass.assign(static_cast<std::size_t>(n) + 1, 0.0);
  Accumulator total;
  for (int k = 0; k <= n; ++k) {
    if (!law.good_class(k)) continue;
    const double x = c.x[static_cast<std::size_t>(k)];
    if (x > 0.0) {
      std::ostringstream msg;
      msg << "E^(n) density is negative at weight " << k << " (n=" << n << ", alpha=" << alpha << ", eps=" << eps
          << ", L=" << num_users << ")";
      fail(ErrorCode::kNegativeDensity, msg.str());
    }
    const double m = std::exp(c.log_half[static_cast<std::size_t>(k)]) * -std::expm1(x) / (alpha * law.z);
    law.mass[static_cast<std::size_t>(k)] = m;
    total.add(m);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    fail(ErrorCode::kInternal, "E^(n) masses sum to " + std::to_string(total.value()));
  }
  return law;
}

double tv_mixture(const WeightLawE& law) {
  const ClassTerms c = class_terms(law.n, law.alpha, law.eps);
  const double shrink = std::abs(law.z_minus_one) / law.z;
  Accumulator acc;
  for (int k = 0; k <= law.n; ++k) {
    const double gap = std::exp(c.log_half[static_cast<std::size_t>(k)]) * std::abs(std::expm1(c.x[static_cast<std::size_t>(k)]));
    acc.add(law.good_class(k) ? gap * shrink : gap);
  }
  return 0.5 * acc.value();
}

double tv_mixture(int n, double alpha, double eps, int num_users) {
  return tv_mixture(build_E_n(n, alpha, eps, num_users));
}

double tv_prefix(const WeightLawE& law, int m) {
  require(m >= 0 && m <= law.n, "tv_prefix: m must lie in [0, n]");
  const int n = law.n;
  auto lchoose = [](int a, int b) { return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0); };
  const double lfair = -m * std::log(2.0);
  Accumulator acc;
  for (int j = 0; j <= m; ++j) {
    const double lbiased = j * std::log(0.5 + law.eps) + (m - j) * std::log(0.5 - law.eps);
    Accumulator bad;
    for (int k = j; k <= n - m + j; ++k) {
      const double mk = law.mass[static_cast<std::size_t>(k)];
      if (mk == 0.0) continue;
      bad.add(mk * std::exp(lchoose(n - m, k - j) - lchoose(n, k) - lfair));
    }
    // per-sequence ratio of mixture to fair, minus one
    const double ratio_minus_one = (1.0 - law.alpha) * std::expm1(lbiased - lfair) + law.alpha * (bad.value() - 1.0);
    acc.add(std::exp(lchoose(m, j) + lfair) * std::abs(ratio_minus_one));
  }
  return 0.5 * acc.value();
}

std::vector<std::uint8_t> sample_tape(const WeightLawE& law, Rng& rng) {
  const double u = rng.uniform();
  int k = law.n;
  double acc = 0.0;
  for (int j = 0; j <= law.n; ++j) {
    acc += law.mass[static_cast<std::size_t>(j)];
    if (u < acc) {
      k = j;
      break;
    }
  }
  while (law.mass[static_cast<std::size_t>(k)] == 0.0 && k > 0) --k;
  std::vector<std::uint8_t> tape(static_cast<std::size_t>(law.n), 0);
  for (int j = 0; j < k; ++j) tape[static_cast<std::size_t>(j)] = 1;
  for (std::size_t j = tape.size(); j > 1; --j) {
    const auto r = static_cast<std::size_t>(rng.below(j));
    std::swap(tape[j - 1], tape[r]);
  }
  return tape;
}

std::vector<LowerBoundRow> lower_bound_grid(const std::vector<double>& alphas, const std::vector<int>& users,
                                            const std::vector<int>& ns) {
  std::vector<LowerBoundRow> rows;
  for (double alpha : alphas) {
    for (int L : users) {
      require(L >= 2, "lower_bound_grid: L must be >= 2");
      for (int n : ns) {
        LowerBoundRow row;
        row.n = n;
        row.alpha = alpha;
        row.num_users = L;
        row.eps = std::sqrt(0.01 * alpha * alpha / ((n + 0.5) * std::log(static_cast<double>(L))));
        row.bound = 1.0 / std::pow(static_cast<double>(L), 4);
        try {
          const WeightLawE law = build_E_n(n, alpha, row.eps, L);
          row.z = law.z;
          row.tv = tv_mixture(law);
          row.pass = row.tv <= row.bound;
        } catch (const Error& e) {
          row.error = e.what();
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace mcb
