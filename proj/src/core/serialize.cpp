#include <json.hpp>

#include "mcb/core.hpp"
#include "mcb/error.hpp"

namespace mcb {

using nlohmann::json;

// Doubles are written with the shortest representation that parses back to the
// same bits, so a write/read/write cycle reproduces the document exactly.
std::string to_json(const BanditInstance& instance) {
  json doc;
  doc["S"] = instance.num_contexts();
  doc["A"] = instance.num_actions();
  doc["nu"] = instance.nu();
  json rows = json::array();
  for (int s = 0; s < instance.num_contexts(); ++s) {
    auto row = instance.mu_row(s);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["mu"] = std::move(rows);
  if (instance.noise().kind == NoiseKind::kBernoulli) {
    doc["noise"] = "bernoulli";
  } else {
    doc["noise"] = "truncated_gaussian";
    doc["noise_variance"] = instance.noise().variance;
  }
  doc["seed"] = instance.seed();
  return doc.dump(2);
}

BanditInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("instance document: ") + e.what());
  }
  try {
    const int S = doc.at("S").get<int>();
    const int A = doc.at("A").get<int>();
    auto nu = doc.at("nu").get<std::vector<double>>();
    std::vector<double> mu;
    const auto& rows = doc.at("mu");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(S)) {
      fail(ErrorCode::kDimensionMismatch, "mu must have S rows");
    }
    for (const auto& row : rows) {
      auto r = row.get<std::vector<double>>();
      if (r.size() != static_cast<std::size_t>(A)) fail(ErrorCode::kDimensionMismatch, "mu rows must have A entries");
      mu.insert(mu.end(), r.begin(), r.end());
    }
    NoiseLaw noise;
    const auto tag = doc.value("noise", std::string("bernoulli"));
    if (tag == "truncated_gaussian") {
      noise = NoiseLaw::truncated_gaussian(doc.at("noise_variance").get<double>());
    } else if (tag != "bernoulli") {
      fail(ErrorCode::kParse, "unknown noise tag '" + tag + "'");
    }
    return BanditInstance(S, A, std::move(nu), std::move(mu), noise, doc.value("seed", std::uint64_t{0}));
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("instance document: ") + e.what());
  }
}

}  // namespace mcb
