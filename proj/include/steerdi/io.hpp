#pragma once

#include <fstream>
#include <string>

#include "json.hpp"
#include "steerdi/protocol.hpp"
#include "steerdi/self_test.hpp"

namespace steerdi {

using nlohmann::json;

inline json to_json(const WitnessReport& r) {
  json j{{"kind", witness_kind_name(r.kind)},
         {"value", r.value},
         {"threshold", r.threshold},
         {"violated", r.violated}};
  if (r.stderr_est) j["stderr"] = *r.stderr_est;
  return j;
}

inline json to_json(const ProtocolConfig& cfg, const SamplingBudget& budget) {
  json j{{"visibility", cfg.visibility},
         {"phi_visibility", cfg.phi_visibility},
         {"budget",
          {{"steer_per_setting", budget.steer_per_setting}, {"chsh_per_line", budget.chsh_per_line}}}};
  if (cfg.alice_flip) j["alice_flip"] = *cfg.alice_flip;
  return j;
}

inline json to_json(const CountsRecord& rec) {
  json counts = json::array();
  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z) {
      if (!rec.has_steer[x - 1][z - 1]) continue;
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
          for (int ic = 0; ic < 2; ++ic)
            counts.push_back({{"x", x},
                              {"z", z},
                              {"a", slot_outcome(ia)},
                              {"bob", ib == 0 ? "yes" : "no"},
                              {"c", slot_outcome(ic)},
                              {"n", rec.steer[x - 1][z - 1][ia][ib][ic]}});
    }
  json chsh = json::array();
  for (int y = 1; y <= 6; ++y)
    for (int z = 1; z <= 3; ++z) {
      if (!rec.has_chsh[y - 1][z - 1]) continue;
      for (int ib = 0; ib < 2; ++ib)
        for (int ic = 0; ic < 2; ++ic)
          chsh.push_back({{"y", y},
                          {"z", z},
                          {"b", slot_outcome(ib)},
                          {"c", slot_outcome(ic)},
                          {"n", rec.chsh[y - 1][z - 1][ib][ic]}});
    }
  return json{{"config", to_json(rec.config, rec.budget)}, {"seed", rec.seed},
              {"counts", counts}, {"chsh_counts", chsh}};
}

inline CountsRecord counts_from_json(const json& j) {
  CountsRecord rec;
  try {
    const json& cfg = j.at("config");
    rec.config.visibility = cfg.at("visibility").get<double>();
    rec.config.phi_visibility = cfg.value("phi_visibility", 1.0);
    if (cfg.contains("alice_flip") && !cfg.at("alice_flip").is_null())
      rec.config.alice_flip = cfg.at("alice_flip").get<double>();
    if (cfg.contains("budget")) {
      rec.budget.steer_per_setting = cfg.at("budget").value("steer_per_setting", int64_t{0});
      rec.budget.chsh_per_line = cfg.at("budget").value("chsh_per_line", int64_t{0});
    }
    rec.seed = j.value("seed", uint64_t{0});
    for (const auto& cell : j.at("counts")) {
      const int x = cell.at("x").get<int>();
      const int z = cell.at("z").get<int>();
      const int a = cell.at("a").get<int>();
      const std::string bob = cell.at("bob").get<std::string>();
      const int c = cell.at("c").get<int>();
      const long long n = cell.at("n").get<long long>();
      if (x < 1 || x > 3 || z < 1 || z > 3 || (a != 1 && a != -1) || (c != 1 && c != -1) ||
          (bob != "yes" && bob != "no") || n < 0)
        throw std::invalid_argument("counts cell (x=" + std::to_string(x) + ",z=" + std::to_string(z) +
                                    "): bad outcome labels or negative count");
      rec.has_steer[x - 1][z - 1] = true;
      rec.steer[x - 1][z - 1][outcome_slot(a)][bob == "yes" ? 0 : 1][outcome_slot(c)] += n;
    }
    for (const auto& cell : j.value("chsh_counts", json::array())) {
      const int y = cell.at("y").get<int>();
      const int z = cell.at("z").get<int>();
      const int b = cell.at("b").get<int>();
      const int c = cell.at("c").get<int>();
      const long long n = cell.at("n").get<long long>();
      if (y < 1 || y > 6 || z < 1 || z > 3 || (b != 1 && b != -1) || (c != 1 && c != -1) || n < 0)
        throw std::invalid_argument("chsh cell (y=" + std::to_string(y) + ",z=" + std::to_string(z) +
                                    "): bad outcome labels or negative count");
      rec.has_chsh[y - 1][z - 1] = true;
      rec.chsh[y - 1][z - 1][outcome_slot(b)][outcome_slot(c)] += n;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("counts file: ") + e.what());
  }
  return rec;
}

inline json to_json(const Behavior& beh) {
  json cells = json::array();
  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z) {
      if (!beh.has_steer[x - 1][z - 1]) continue;
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
          for (int ic = 0; ic < 2; ++ic) {
            json cell{{"x", x},        {"z", z},
                      {"a", slot_outcome(ia)}, {"bob", ib == 0 ? "yes" : "no"},
                      {"c", slot_outcome(ic)}, {"p", beh.steer[x - 1][z - 1][ia][ib][ic]}};
            if (beh.has_steer_se) cell["stderr"] = beh.steer_se[x - 1][z - 1][ia][ib][ic];
            cells.push_back(std::move(cell));
          }
    }
  json correlators = json::array();
  for (int y = 1; y <= 6; ++y)
    for (int z = 1; z <= 3; ++z) {
      if (!beh.has_chsh[y - 1][z - 1]) continue;
      json cell{{"y", y}, {"z", z}, {"e", beh.chsh_e[y - 1][z - 1]}};
      if (beh.has_chsh_se) cell["stderr"] = beh.chsh_se[y - 1][z - 1];
      correlators.push_back(std::move(cell));
    }
  return json{{"cells", cells}, {"correlators", correlators}};
}

inline Behavior behavior_from_json(const json& j) {
  Behavior beh;
  try {
    for (const auto& cell : j.at("cells")) {
      const int x = cell.at("x").get<int>(), z = cell.at("z").get<int>();
      beh.has_steer[x - 1][z - 1] = true;
      beh.steer[x - 1][z - 1][outcome_slot(cell.at("a").get<int>())]
                [cell.at("bob").get<std::string>() == "yes" ? 0 : 1]
                [outcome_slot(cell.at("c").get<int>())] = cell.at("p").get<double>();
      if (cell.contains("stderr")) {
        beh.has_steer_se = true;
        beh.steer_se[x - 1][z - 1][outcome_slot(cell.at("a").get<int>())]
                    [cell.at("bob").get<std::string>() == "yes" ? 0 : 1]
                    [outcome_slot(cell.at("c").get<int>())] = cell.at("stderr").get<double>();
      }
    }
    for (const auto& cell : j.value("correlators", json::array())) {
      const int y = cell.at("y").get<int>(), z = cell.at("z").get<int>();
      beh.has_chsh[y - 1][z - 1] = true;
      beh.chsh_e[y - 1][z - 1] = cell.at("e").get<double>();
      if (cell.contains("stderr")) {
        beh.has_chsh_se = true;
        beh.chsh_se[y - 1][z - 1] = cell.at("stderr").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("behavior: ") + e.what());
  }
  return beh;
}

inline const char* sdp_status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::stalled: return "stalled";
    case SdpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

inline json to_json(const SelfTestBound& b) {
  return json{{"objective", swap_objective_name(b.objective)},
              {"chsh", b.chsh},
              {"value", b.value},
              {"status", sdp_status_name(b.status)},
              {"gap", b.gap},
              {"primal_residual", b.primal_residual},
              {"dual_residual", b.dual_residual},
              {"iterations", b.iterations},
              {"basis_size", b.basis_size},
              {"num_classes", b.num_classes}};
}

inline json to_json(const SelfTestReport& rep) {
  json bounds = json::array();
  for (const auto& b : rep.bounds) bounds.push_back(to_json(b));
  return json{{"chsh", rep.chsh},
              {"f", rep.f},
              {"f_avg", rep.f_avg},
              {"trace_distance", rep.trace_distance},
              {"noisy_visibility_threshold", rep.noisy_visibility_threshold},
              {"bounds", bounds}};
}

/// Regression-pinnable dump of a relaxation's structure.
inline json to_json(const MomentRelaxation& rel) {
  json basis = json::array();
  for (const auto& w : rel.basis) basis.push_back(w.str());
  json constraints = json::array();
  for (const auto& aff : rel.constraints) {
    json terms = json::array();
    for (const auto& [cls, coeff] : aff.terms) terms.push_back({cls, coeff});
    constraints.push_back({{"name", aff.name}, {"rhs", aff.rhs}, {"terms", terms}});
  }
  return json{{"objective", swap_objective_name(rel.objective_kind)},
              {"chsh", rel.chsh_values},
              {"basis", basis},
              {"num_classes", rel.num_classes()},
              {"constraints", constraints}};
}

/// Atomic file write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << contents;
    if (!out.good()) throw std::runtime_error("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace steerdi
