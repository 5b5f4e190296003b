#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "format.hpp"
#include "mcb/harness.hpp"

namespace mcb {
namespace {

const std::vector<std::string> kColumns = {
    "experiment", "param",   "x",      "algorithm",    "algo_params", "rep",   "seed",     "S",
    "A",          "L",       "gap",    "nu",           "noise",       "alpha", "alpha_hat", "alpha_eff",
    "attack",     "eps0",    "count",  "arrival",      "T0",          "T",     "K",        "optimal_value",
    "value",      "suboptimality", "status", "message", "diagnostics"};

const std::vector<std::string> kSummaryColumns = {"experiment", "param",  "x",    "algorithm",
                                                  "n",          "errors", "mean", "stderr"};

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        fields.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

void write_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    os << quote(fields[k]);
  }
  os << '\n';
}

// Returns data lines, checking the version comment and the header.
std::vector<std::vector<std::string>> read_table(std::istream& is, const char* version,
                                                 const std::vector<std::string>& columns, bool allow_extra) {
  std::string line;
  bool versioned = false;
  bool header = false;
  std::vector<std::vector<std::string>> rows;
  std::size_t width = columns.size();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(version, 0) == 0) versioned = true;
      continue;
    }
    auto fields = split_line(line);
    if (!header) {
      if (!versioned) fail(ErrorCode::kParse, std::string("missing version line '") + version + "'");
      const bool extra_ok = allow_extra && fields.size() == columns.size() + 1;
      if (fields.size() != columns.size() && !extra_ok) fail(ErrorCode::kParse, "unexpected CSV header");
      for (std::size_t k = 0; k < columns.size(); ++k) {
        if (fields[k] != columns[k]) fail(ErrorCode::kParse, "unexpected CSV column '" + fields[k] + "'");
      }
      width = fields.size();
      header = true;
      continue;
    }
    if (fields.size() != width) fail(ErrorCode::kParse, "CSV row has " + std::to_string(fields.size()) + " fields");
    rows.push_back(std::move(fields));
  }
  if (!header) fail(ErrorCode::kParse, "CSV has no header");
  return rows;
}

}  // namespace

void write_results_csv(std::ostream& os, const SweepResult& result) {
  const bool timed = !result.rows.empty() && result.rows.front().wall_time.has_value();
  os << kResultsVersion << " columns: one row per (grid point, algorithm, replication); suboptimality = "
     << "optimal_value - value on a good user's task\n";
  auto header = kColumns;
  if (timed) header.push_back("wall_time");
  write_line(os, header);
  for (const auto& r : result.rows) {
    std::vector<std::string> f = {r.experiment,
                                  r.param,
                                  detail::fmt(r.x),
                                  r.algorithm,
                                  r.algo_params,
                                  std::to_string(r.rep),
                                  std::to_string(r.seed),
                                  std::to_string(r.num_contexts),
                                  std::to_string(r.num_actions),
                                  std::to_string(r.num_users),
                                  detail::fmt(r.gap),
                                  r.nu,
                                  r.noise,
                                  detail::fmt(r.alpha),
                                  detail::fmt(r.alpha_hat),
                                  detail::fmt(r.alpha_eff),
                                  r.attack,
                                  detail::fmt(r.eps0),
                                  r.count,
                                  r.arrival,
                                  std::to_string(r.t0),
                                  std::to_string(r.horizon),
                                  detail::fmt(r.k_constant),
                                  detail::fmt(r.optimal_value),
                                  detail::fmt(r.value),
                                  detail::fmt(r.suboptimality),
                                  r.status,
                                  r.message,
                                  r.diagnostics};
    if (timed) f.push_back(detail::fmt(r.wall_time.value_or(0.0)));
    write_line(os, f);
  }
}

SweepResult read_results_csv(std::istream& is) {
  SweepResult out;
  for (const auto& f : read_table(is, kResultsVersion, kColumns, true)) {
    ResultRow r;
    std::size_t k = 0;
    r.experiment = f[k++];
    r.param = f[k++];
    r.x = detail::parse_double(f[k++]);
    r.algorithm = f[k++];
    r.algo_params = f[k++];
    r.rep = detail::parse_int<int>(f[k++]);
    r.seed = detail::parse_int<std::uint64_t>(f[k++]);
    r.num_contexts = detail::parse_int<int>(f[k++]);
    r.num_actions = detail::parse_int<int>(f[k++]);
    r.num_users = detail::parse_int<int>(f[k++]);
    r.gap = detail::parse_double(f[k++]);
    r.nu = f[k++];
    r.noise = f[k++];
    r.alpha = detail::parse_double(f[k++]);
    r.alpha_hat = detail::parse_double(f[k++]);
    r.alpha_eff = detail::parse_double(f[k++]);
    r.attack = f[k++];
    r.eps0 = detail::parse_double(f[k++]);
    r.count = f[k++];
    r.arrival = f[k++];
    r.t0 = detail::parse_int<std::int64_t>(f[k++]);
    r.horizon = detail::parse_int<std::int64_t>(f[k++]);
    r.k_constant = detail::parse_double(f[k++]);
    r.optimal_value = detail::parse_double(f[k++]);
    r.value = detail::parse_double(f[k++]);
    r.suboptimality = detail::parse_double(f[k++]);
    r.status = f[k++];
    r.message = f[k++];
    r.diagnostics = f[k++];
    if (k < f.size()) r.wall_time = detail::parse_double(f[k]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> aggregate(const SweepResult& result) {
  using Key = std::tuple<std::string, std::string, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : result.rows) {
    Key key{r.experiment, r.param, r.x, r.algorithm};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    SummaryRow s;
    std::tie(s.experiment, s.param, s.x, s.algorithm) = key;
    double sum = 0.0;
    for (const ResultRow* r : groups[key]) {
      if (r->status != "ok") {
        ++s.errors;
        continue;
      }
      ++s.n;
      sum += r->suboptimality;
    }
    if (s.n > 0) s.mean = sum / s.n;
    if (s.n > 1) {
      double ss = 0.0;
      for (const ResultRow* r : groups[key]) {
        if (r->status == "ok") ss += (r->suboptimality - s.mean) * (r->suboptimality - s.mean);
      }
      s.stderr_mean = std::sqrt(ss / (s.n - 1) / s.n);
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryVersion << " columns: mean and standard error of suboptimality over ok rows\n";
  write_line(os, kSummaryColumns);
  for (const auto& s : rows) {
    write_line(os, {s.experiment, s.param, detail::fmt(s.x), s.algorithm, std::to_string(s.n), std::to_string(s.errors),
                    detail::fmt(s.mean), detail::fmt(s.stderr_mean)});
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::vector<SummaryRow> out;
  for (const auto& f : read_table(is, kSummaryVersion, kSummaryColumns, false)) {
    SummaryRow s;
    s.experiment = f[0];
    s.param = f[1];
    s.x = detail::parse_double(f[2]);
    s.algorithm = f[3];
    s.n = detail::parse_int<int>(f[4]);
    s.errors = detail::parse_int<int>(f[5]);
    s.mean = detail::parse_double(f[6]);
    s.stderr_mean = detail::parse_double(f[7]);
    out.push_back(s);
  }
  return out;
}

}  // namespace mcb
