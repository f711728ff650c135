#include <cstdio>

#include "doctest.h"
#include "steerdi/io.hpp"

using namespace steerdi;

TEST_CASE("witness report serialization") {
  const WitnessReport rep = make_report(WitnessKind::payoff, 0.1421, 0.0, 0.0714);
  const json j = to_json(rep);
  CHECK(j["kind"] == "payoff");
  CHECK(j["value"].get<double>() == doctest::Approx(0.1421));
  CHECK(j["threshold"].get<double>() == 0.0);
  CHECK(j["violated"].get<bool>());
  CHECK(j["stderr"].get<double>() == doctest::Approx(0.0714));
}

TEST_CASE("counts record round trip") {
  ProtocolConfig cfg;
  cfg.visibility = 0.8;
  cfg.alice_flip = 0.05;
  SamplingBudget budget;
  budget.steer_per_setting = 5000;
  budget.chsh_per_line = 8000;
  const CountsRecord rec = sample_counts(cfg, budget, 77);

  const json j = to_json(rec);
  const CountsRecord back = counts_from_json(j);
  CHECK(back.steer == rec.steer);
  CHECK(back.chsh == rec.chsh);
  CHECK(back.seed == rec.seed);
  CHECK(back.config.visibility == rec.config.visibility);
  CHECK(back.config.alice_flip == rec.config.alice_flip);
  CHECK(back.budget.steer_per_setting == rec.budget.steer_per_setting);

  // witness evaluation is identical through the file format
  const double direct = payoff_eq7(estimate_behavior(rec), {1, 1, 1}).value;
  const double via_json = payoff_eq7(estimate_behavior(back), {1, 1, 1}).value;
  CHECK(direct == via_json);
}

TEST_CASE("counts schema violations carry cell addresses") {
  json j{{"config", {{"visibility", 0.5}}},
         {"seed", 1},
         {"counts", json::array({{{"x", 5}, {"z", 1}, {"a", 1}, {"bob", "yes"}, {"c", 1}, {"n", 3}}})}};
  try {
    counts_from_json(j);
    FAIL("expected a schema error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("x=5") != std::string::npos);
  }

  json neg{{"config", {{"visibility", 0.5}}},
           {"seed", 1},
           {"counts", json::array({{{"x", 1}, {"z", 1}, {"a", 1}, {"bob", "yes"}, {"c", 1}, {"n", -2}}})}};
  CHECK_THROWS_AS(counts_from_json(neg), std::invalid_argument);
}

TEST_CASE("behavior serialization round trip") {
  ProtocolConfig cfg;
  cfg.visibility = 0.7015;
  SamplingBudget budget;
  budget.steer_per_setting = 20000;
  budget.chsh_per_line = 20000;
  const Behavior est = estimate_behavior(sample_counts(cfg, budget, 5));

  const Behavior back = behavior_from_json(to_json(est));
  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z)
      for (int a = -1; a <= 1; a += 2)
        for (int c = -1; c <= 1; c += 2)
          CHECK(back.p(a, true, c, x, z) == est.p(a, true, c, x, z));
  for (int y = 1; y <= 6; ++y)
    for (int z = 1; z <= 3; ++z)
      if (est.has_chsh[y - 1][z - 1]) {
        CHECK(back.correlator(y, z) == est.correlator(y, z));
        CHECK(back.chsh_se[y - 1][z - 1] == est.chsh_se[y - 1][z - 1]);
      }
}

TEST_CASE("relaxation dump is pinned") {
  const auto rel = build_relaxation({2.8, 2.8, 2.8}, SwapObjective::f0);
  const json j = to_json(rel);
  CHECK(j["basis"].size() == 72);
  CHECK(j["num_classes"].get<int>() == 1298);
  CHECK(j["constraints"].size() == 4);
  CHECK(j["basis"][0] == "1");
  CHECK(j["objective"] == "f0");
}

TEST_CASE("atomic write and read back") {
  const std::string path = "/tmp/steerdi_io_test.json";
  write_file_atomic(path, json{{"hello", 1.25}}.dump());
  const json j = read_json_file(path);
  CHECK(j["hello"].get<double>() == 1.25);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_json_file("/tmp/steerdi_does_not_exist.json"), std::invalid_argument);
}
