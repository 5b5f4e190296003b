#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "format.hpp"
#include "mcb/harness.hpp"

namespace mcb {

using nlohmann::json;

std::string noise_to_string(const NoiseLaw& noise) {
  if (noise.kind == NoiseKind::kBernoulli) return "bernoulli";
  return "gaussian:" + detail::fmt(noise.variance);
}

NoiseLaw parse_noise(const std::string& text) {
  if (text == "bernoulli") return NoiseLaw::bernoulli();
  if (text.rfind("gaussian:", 0) == 0) return NoiseLaw::truncated_gaussian(detail::parse_double(text.substr(9)));
  fail(ErrorCode::kParse, "unknown noise law '" + text + "'");
}

std::string AlgorithmSpec::params_string(double resolved_alpha_hat, std::int64_t horizon) const {
  std::string out;
  if (name == "robust_mcb" || name == "mab_baseline" || name == "highdim_baseline") {
    out = "alpha_hat=" + detail::fmt(resolved_alpha_hat);
    if (name != "highdim_baseline") out += ";c_trim=" + detail::fmt(c_trim);
    if (name == "robust_mcb") out += ";t0_fraction=" + detail::fmt(t0_fraction);
  } else if (name == "corruption_robust_ucb") {
    out = "budget=" + detail::fmt(corruption_budget.value_or(std::sqrt(static_cast<double>(horizon))));
  }
  return out;
}

AlgorithmSpec AlgorithmSpec::from_params(const std::string& name, const std::string& params) {
  AlgorithmSpec spec;
  spec.name = name;
  std::istringstream in(params);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kParse, "bad algorithm parameter '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double v = detail::parse_double(item.substr(eq + 1));
    if (key == "alpha_hat") {
      spec.alpha_hat = v;
    } else if (key == "c_trim") {
      spec.c_trim = v;
    } else if (key == "t0_fraction") {
      spec.t0_fraction = v;
    } else if (key == "budget") {
      spec.corruption_budget = v;
    } else {
      fail(ErrorCode::kParse, "unknown algorithm parameter '" + key + "'");
    }
  }
  return spec;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::kParse, "config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(ErrorCode::kParse, "config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    check_keys(j, {"name", "seed", "replications", "instance", "population", "arrival", "budget", "algorithms", "sweep",
                   "output", "record_wall_time"},
               "the top level");
    c.name = get_or<std::string>(j, "name", c.name);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.replications = get_or<int>(j, "replications", c.replications);
    if (j.contains("instance")) {
      const json& in = j.at("instance");
      check_keys(in, {"S", "A", "gap", "nu", "noise"}, "instance");
      c.num_contexts = get_or<int>(in, "S", c.num_contexts);
      c.num_actions = get_or<int>(in, "A", c.num_actions);
      c.gap = get_or<double>(in, "gap", c.gap);
      c.nu = NuSpec::parse(get_or<std::string>(in, "nu", "uniform"));
      c.noise = parse_noise(get_or<std::string>(in, "noise", "bernoulli"));
    }
    if (j.contains("population")) {
      const json& p = j.at("population");
      check_keys(p, {"L", "L_rule", "L_ref_SA", "alpha", "attack", "eps0", "count"}, "population");
      c.num_users = get_or<int>(p, "L", c.num_users);
      c.l_rule = get_or<std::string>(p, "L_rule", c.l_rule);
      c.l_ref_sa = get_or<int>(p, "L_ref_SA", c.l_ref_sa);
      c.alpha = get_or<double>(p, "alpha", c.alpha);
      if (p.contains("attack")) c.attack = AdversaryStrategy::parse(p.at("attack").get<std::string>());
      c.eps0 = get_or<double>(p, "eps0", c.eps0);
      c.count = detail::parse_count(get_or<std::string>(p, "count", "exact"));
    }
    c.arrival = ArrivalModel::parse(get_or<std::string>(j, "arrival", "round_robin"));
    if (j.contains("budget")) {
      const json& b = j.at("budget");
      check_keys(b, {"T_over_L", "T"}, "budget");
      c.t_over_l = get_or<double>(b, "T_over_L", c.t_over_l);
      if (b.contains("T")) c.horizon = b.at("T").get<std::int64_t>();
    }
    if (j.contains("algorithms")) {
      for (const json& a : j.at("algorithms")) {
        AlgorithmSpec spec;
        if (a.is_string()) {
          spec.name = a.get<std::string>();
        } else {
          check_keys(a, {"name", "alpha_hat", "c_trim", "t0_fraction", "budget"}, "an algorithm entry");
          spec.name = a.at("name").get<std::string>();
          if (a.contains("alpha_hat")) spec.alpha_hat = a.at("alpha_hat").get<double>();
          spec.c_trim = get_or<double>(a, "c_trim", spec.c_trim);
          spec.t0_fraction = get_or<double>(a, "t0_fraction", spec.t0_fraction);
          if (a.contains("budget")) spec.corruption_budget = a.at("budget").get<double>();
        }
        c.algorithms.push_back(spec);
      }
    }
    if (j.contains("sweep")) {
      Sweep s;
      check_keys(j.at("sweep"), {"param", "values"}, "sweep");
      s.param = j.at("sweep").at("param").get<std::string>();
      s.values = j.at("sweep").at("values").get<std::vector<double>>();
      c.sweep = s;
    }
    c.output = get_or<std::string>(j, "output", c.output);
    c.record_wall_time = get_or<bool>(j, "record_wall_time", false);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["replications"] = replications;
  j["instance"] = {{"S", num_contexts}, {"A", num_actions}, {"gap", gap}, {"nu", nu.to_string()},
                   {"noise", noise_to_string(noise)}};
  j["population"] = {{"L", num_users}, {"L_rule", l_rule}, {"L_ref_SA", l_ref_sa}, {"alpha", alpha},
                     {"attack", attack.to_string()}, {"eps0", eps0}, {"count", detail::count_to_string(count)}};
  j["arrival"] = arrival.to_string();
  j["budget"] = {{"T_over_L", t_over_l}};
  if (horizon) j["budget"]["T"] = *horizon;
  j["algorithms"] = json::array();
  for (const auto& a : algorithms) {
    json o = {{"name", a.name}, {"c_trim", a.c_trim}, {"t0_fraction", a.t0_fraction}};
    if (a.alpha_hat) o["alpha_hat"] = *a.alpha_hat;
    if (a.corruption_budget) o["budget"] = *a.corruption_budget;
    j["algorithms"].push_back(o);
  }
  if (sweep) j["sweep"] = {{"param", sweep->param}, {"values", sweep->values}};
  j["output"] = output;
  j["record_wall_time"] = record_wall_time;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  require(replications >= 1, "config: replications must be >= 1");
  require(num_contexts >= 1 && num_actions >= 1, "config: S and A must be >= 1");
  require(num_users >= 1, "config: L must be >= 1");
  require(alpha >= 0.0 && alpha < 0.5, "config: alpha must lie in [0, 1/2)");
  require(eps0 >= 0.0, "config: eps0 must be >= 0");
  require(l_rule == "fixed" || l_rule == "sa_log_sa", "config: L_rule must be fixed or sa_log_sa");
  require(t_over_l > 0.0, "config: T_over_L must be positive");
  require(!algorithms.empty(), "config: no algorithms listed");
  for (const auto& a : algorithms) {
    const bool known = std::any_of(std::begin(kAlgorithmNames), std::end(kAlgorithmNames),
                                   [&](const char* n) { return a.name == n; });
    if (!known) fail(ErrorCode::kUnknownKind, "config: unknown algorithm '" + a.name + "'");
    if (a.alpha_hat) require(*a.alpha_hat >= 0.0 && *a.alpha_hat < 0.5, "config: alpha_hat must lie in [0, 1/2)");
    require(a.t0_fraction > 0.0 && a.t0_fraction < 1.0, "config: t0_fraction must lie in (0, 1)");
  }
  if (sweep) {
    static const char* params[] = {"S", "A", "L", "alpha", "alpha_hat", "T_over_L", "eps0", "gap"};
    const bool known =
        std::any_of(std::begin(params), std::end(params), [&](const char* p) { return sweep->param == p; });
    if (!known) fail(ErrorCode::kUnknownKind, "config: unknown sweep parameter '" + sweep->param + "'");
    require(!sweep->values.empty(), "config: empty sweep");
  }
}

std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& assignments) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorCode::kParse, "override must be key=value: '" + a + "'");
    const std::string value = a.substr(eq + 1);
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    std::string pointer = "/" + a.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    j[json::json_pointer(pointer)] = v;
  }
  return j.dump(2);
}

}  // namespace mcb
