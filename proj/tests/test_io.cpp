#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fluidlob/config_io.hpp"
#include "fluidlob/discrete_sim.hpp"
#include "fluidlob/errors.hpp"
#include "fluidlob/report_io.hpp"
#include "support.hpp"

using namespace fluidlob;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fluidlob_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_error_key(const json& j) {
  try {
    parse_fixture(j);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

json ref1_json() {
  return json::parse(R"({
    "n_exchanges": 2, "beta": [2, 1], "lambda": [0.3, 0.2], "big_lambda": 1, "mu": 1,
    "rebate0": -1, "rebates": [1, 2], "type_dist": {"kind": "exponential", "rate": 1},
    "q0": [1, 1]})");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLUIDLOB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(ConfigIo, ParsesFixtureWithDefaults) {
  const Fixture fx = parse_fixture(ref1_json());
  EXPECT_TRUE(fx.model == testing_support::ref1());
  ASSERT_TRUE(fx.q0.has_value());
  EXPECT_EQ(*fx.q0, (std::vector<double>{1, 1}));
}

TEST(ConfigIo, ShippedFixturesMatchReferenceConfigs) {
  EXPECT_TRUE(load_config(FLUIDLOB_FIXTURES "/ref1.json") == testing_support::ref1());
  EXPECT_TRUE(load_config(FLUIDLOB_FIXTURES "/ref2.json") == testing_support::ref2());
}

TEST(ConfigIo, RoundTrip) {
  auto cfg = testing_support::ref1();
  cfg.type_dist = TypeDistribution::tabulated({{0, 0}, {0.5, 0.3}, {2, 1}});
  cfg.market_sizes = {SizeDistribution::geometric(0.5), SizeDistribution::tabulated({0, 1})};
  cfg.v = 2.0;
  cfg.dedicated_sizes = {SizeDistribution::deterministic(3), SizeDistribution::deterministic(1)};
  cfg.b_dedicated = {3, 1};
  ASSERT_NO_THROW(validate(cfg));
  Fixture fx{cfg, std::vector<double>{0.5, 2.5}};
  const Fixture back = parse_fixture(json::parse(to_json(fx).dump()));
  EXPECT_TRUE(back.model == cfg);
  EXPECT_EQ(back.q0, fx.q0);

  std::mt19937_64 gen(5);
  for (int k = 0; k < 50; ++k) {
    const auto r = testing_support::random_config(gen, 5, k % 2 == 0);
    EXPECT_TRUE(parse_fixture(json::parse(to_json(r).dump())).model == r);
  }
}

TEST(ConfigIo, ErrorsCarryJsonPointers) {
  auto j = ref1_json();
  j.erase("mu");
  EXPECT_EQ(config_error_key(j), "/mu");
  j = ref1_json();
  j["beta"][1] = -1;
  EXPECT_EQ(config_error_key(j), "/beta/1");
  j = ref1_json();
  j["type_dist"] = {{"kind", "cauchy"}};
  EXPECT_EQ(config_error_key(j), "/type_dist/kind");
  j = ref1_json();
  j["type_dist"] = {{"kind", "exponential"}, {"rate", 0}};
  EXPECT_EQ(config_error_key(j), "/type_dist/rate");
  j = ref1_json();
  j["size_dists"] = {{"market", {{"kind", "geometric"}, {"p", 0.5}}}};
  EXPECT_EQ(config_error_key(j), "/size_dists/market/0");  // mean 2 != v = 1
  j = ref1_json();
  j["q0"] = {1};
  EXPECT_EQ(config_error_key(j), "/q0");
  j = ref1_json();
  j["rebates"] = {2, 2};
  EXPECT_EQ(config_error_key(j).rfind("/rebates", 0), 0u);
}

TEST(Csv, TrajectoryHeaderAndWorkloadColumn) {
  const auto cfg = testing_support::ref1();
  IntegratorConfig icfg;
  icfg.record_every = 500;
  const auto traj = integrate(cfg, {1, 1}, 10.0, icfg);
  const CsvTable t = parse_csv(trajectory_csv(traj));
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "q1", "q2", "W"}));
  ASSERT_EQ(t.rows.size(), traj.times.size());
  for (const auto& row : t.rows) EXPECT_NEAR(row[3], 2 * row[1] + row[2], 1e-10);
}

TEST(Csv, SingleRowTrajectory) {
  const auto traj = integrate(testing_support::ref1(), {1, 1}, 0.0);
  const CsvTable t = parse_csv(trajectory_csv(traj));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (std::vector<double>{0, 1, 1, 3}));
}

TEST(Csv, PathReparsesWithBookkeeping) {
  SimConfig sc;
  sc.n = 100;
  sc.horizon = 5.0;
  sc.seed = 12;
  sc.q0_scaled = {1, 1};
  const auto path = simulate(testing_support::ref1(), sc);
  const std::string text = path_csv(path);
  EXPECT_EQ(text.rfind("# seed=12, n=100", 0), 0u);
  const CsvTable t = parse_csv(text);
  EXPECT_EQ(t.header.size(), 1u + 4 * 2 + 1);
  ASSERT_EQ(t.rows.size(), path.samples());
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(row[1 + i], 1.0 + row[3 + i] + row[5 + i] - row[7 + i], 1e-9);
    }
  }
}

TEST(Csv, ConvergenceRecordsSeedBase) {
  SimConfig sc;
  sc.horizon = 2.0;
  sc.seed = 77;
  sc.q0_scaled = {1, 1};
  const auto table = replicate(testing_support::ref1(), sc, {20, 40}, 3);
  const std::string text = convergence_csv(table, 77);
  EXPECT_EQ(text.rfind("# seed_base=77\n", 0), 0u);
  const CsvTable t = parse_csv(text);
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "rep", "sup_distance"}));
  EXPECT_EQ(t.rows.size(), 6u);
  const json j = to_json(table, 77);
  EXPECT_EQ(j["rows"][0]["seeds"][2], 79);
}

TEST(Csv, FixedPrecision) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(WriteAtomic, WritesAndReportsPath) {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "a.txt", "hello\n");
  EXPECT_EQ(slurp(dir / "a.txt"), "hello\n");
  EXPECT_FALSE(fs::exists(dir / "a.txt.tmp"));
  try {
    write_atomic(dir / "missing" / "b.txt", "x");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
}

TEST(Json, InfinityIsSpelledOut) {
  const json j = to_json(compute_bands(testing_support::ref1()));
  EXPECT_EQ(j["a_plus"][1], "inf");
  EXPECT_DOUBLE_EQ(j["a_minus"][0].get<double>(), 0.25);
}

TEST(Cli, ExitStatusesAndOutputs) {
  const fs::path out = scratch("cli");
  const std::string ref1 = FLUIDLOB_FIXTURES "/ref1.json";
  const std::string ref2 = FLUIDLOB_FIXTURES "/ref2.json";
  const std::string o = " --out " + out.string();

  EXPECT_EQ(run_cli("check " + ref1 + o), 0);
  const json a = json::parse(slurp(out / "assumptions.json"));
  EXPECT_TRUE(a["cond_ii"]["holds"].get<bool>());
  EXPECT_TRUE(a["cond_iv"]["holds"].get<bool>());

  EXPECT_EQ(run_cli("equilibrium " + ref1 + o), 0);
  const json e = json::parse(slurp(out / "equilibrium.json"));
  EXPECT_NEAR(e["w_star"].get<double>(), 2.77259, 1e-5);

  // The config the tool writes re-parses to the same model.
  EXPECT_TRUE(load_config(out / "config.json") == testing_support::ref1());

  EXPECT_EQ(run_cli("fluid " + ref1 + " --T 5" + o), 0);
  const std::string first = slurp(out / "trajectory.csv");
  EXPECT_EQ(run_cli("fluid " + ref1 + " --T 5" + o), 0);
  EXPECT_EQ(slurp(out / "trajectory.csv"), first);

  EXPECT_EQ(run_cli("simulate " + ref1 + " --n 100 --T 2 --seed 4" + o), 0);
  const std::string sim1 = slurp(out / "sim_path.csv");
  EXPECT_EQ(run_cli("simulate " + ref1 + " --n 100 --T 2 --seed 4" + o), 0);
  EXPECT_EQ(slurp(out / "sim_path.csv"), sim1);

  EXPECT_EQ(run_cli("spectrum " + ref2 + o), 0);
  EXPECT_EQ(run_cli("converge " + ref1 + " --n 20,200 --reps 4 --T 2" + o), 0);

  // Invalid input: unreadable config, bad schema, unequal beta for the global study.
  EXPECT_EQ(run_cli("check /nonexistent.json" + o), 1);
  const fs::path bad = out / "bad.json";
  {
    json j = ref1_json();
    j["mu"] = "fast";
    std::ofstream(bad) << j.dump();
  }
  EXPECT_EQ(run_cli("equilibrium " + bad.string() + o), 1);
  EXPECT_EQ(run_cli("stability-global " + ref1 + " --inits 1 --T 1" + o), 1);

  // Experiment failure: no equilibrium when dedicated flow alone exceeds service.
  const fs::path over = out / "over.json";
  {
    json j = ref1_json();
    j["lambda"] = {0.7, 0.6};
    std::ofstream(over) << j.dump();
  }
  EXPECT_EQ(run_cli("equilibrium " + over.string() + o), 2);
}
