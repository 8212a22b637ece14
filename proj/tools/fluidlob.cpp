// Command-line runner for the fluid-limit experiments.
//
// Exit status: 0 pass, 1 invalid input, 2 experiment failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluidlob/config_io.hpp"
#include "fluidlob/discrete_sim.hpp"
#include "fluidlob/equilibrium.hpp"
#include "fluidlob/errors.hpp"
#include "fluidlob/fluid.hpp"
#include "fluidlob/report_io.hpp"
#include "fluidlob/stability.hpp"

namespace fs = std::filesystem;
using namespace fluidlob;

namespace {

constexpr int kPass = 0;
constexpr int kInvalid = 1;
constexpr int kFailed = 2;

struct Common {
  std::string config;
  std::string out = "out";
  std::vector<double> q0;
};

struct Outputs {
  fs::path dir;

  void write(const std::string& name, const std::string& contents) const {
    write_atomic(dir / name, contents);
  }
  void write(const std::string& name, const nlohmann::json& j) const { write(name, j.dump(2) + "\n"); }
};

Outputs prepare(const Common& c, const Fixture& fx) {
  Outputs o{c.out};
  std::error_code ec;
  fs::create_directories(o.dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + o.dir.string() + ": " + ec.message());
  o.write("config.json", to_json(fx));
  return o;
}

std::vector<double> initial_state(const Common& c, const Fixture& fx) {
  std::vector<double> q0 = !c.q0.empty() ? c.q0 : fx.q0.value_or(std::vector<double>{});
  if (q0.empty()) throw ConfigError("/q0", "no initial state in the config and none given with --q0");
  if (q0.size() != fx.model.size()) throw ConfigError("/q0", "length must equal n_exchanges");
  for (std::size_t i = 0; i < q0.size(); ++i) {
    if (!(q0[i] >= 0.0)) throw ConfigError("/q0/" + std::to_string(i), "must be >= 0");
  }
  return q0;
}

void summary(const std::string& command, const std::string& text, bool pass) {
  std::printf("%s: %s [%s]\n", command.c_str(), text.c_str(), pass ? "PASS" : "FAIL");
}

std::string fmt(double x) { return format_number(x); }

std::string join(const std::vector<double>& xs) {
  std::string s = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
  return s + ")";
}

void add_common(CLI::App* sub, Common& c, bool with_q0) {
  sub->add_option("config", c.config, "model config JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  if (with_q0) sub->add_option("--q0", c.q0, "initial state, overrides the config")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluid-limit experiments for multi-exchange limit order routing"};
  app.require_subcommand(1);

  Common common;

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "one path of the n-th rescaled system");
  add_common(sim_cmd, common, true);
  std::int64_t sim_n = 100;
  double sim_T = 10.0, sim_dt = 0.1, sim_eps = 0.0;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--n", sim_n, "scaling parameter")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--T", sim_T, "horizon")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--sample-dt", sim_dt, "sampling interval")->check(CLI::PositiveNumber)->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  sim_cmd->add_option("--epsilon", sim_eps, "market-rate truncation, 0 = off")->check(CLI::NonNegativeNumber);

  // fluid
  auto* fluid_cmd = app.add_subcommand("fluid", "integrate the fluid equations");
  add_common(fluid_cmd, common, true);
  double fl_T = 10.0, fl_dt = 0.0;
  std::size_t fl_every = 100;
  bool fl_refine = false;
  fluid_cmd->add_option("--T", fl_T, "horizon")->check(CLI::PositiveNumber)->capture_default_str();
  fluid_cmd->add_option("--dt", fl_dt, "step size (default 1e-3/mu)")->check(CLI::NonNegativeNumber);
  fluid_cmd->add_option("--record-every", fl_every, "keep every k-th step")->check(CLI::PositiveNumber)->capture_default_str();
  fluid_cmd->add_flag("--refine-check", fl_refine, "compare every step against two half-steps");

  auto* eq_cmd = app.add_subcommand("equilibrium", "solve for the stationary point");
  add_common(eq_cmd, common, false);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Jacobian spectrum at the equilibrium or at --q0");
  add_common(spectrum_cmd, common, true);

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "sup-distance between simulated paths and the fluid limit");
  add_common(conv_cmd, common, true);
  std::vector<std::int64_t> conv_n{20, 200, 2000};
  int conv_reps = 20;
  double conv_T = 10.0, conv_dt = 0.1;
  std::uint64_t conv_seed = 0;
  conv_cmd->add_option("--n", conv_n, "comma-separated scaling parameters")->delimiter(',')->capture_default_str();
  conv_cmd->add_option("--reps", conv_reps, "replicates per n")->check(CLI::PositiveNumber)->capture_default_str();
  conv_cmd->add_option("--T", conv_T, "horizon")->check(CLI::PositiveNumber)->capture_default_str();
  conv_cmd->add_option("--sample-dt", conv_dt, "sampling interval")->check(CLI::PositiveNumber)->capture_default_str();
  conv_cmd->add_option("--seed-base", conv_seed, "replicate r uses seed_base + r")->capture_default_str();

  // stability-local
  auto* loc_cmd = app.add_subcommand("stability-local", "perturbations around the equilibrium");
  add_common(loc_cmd, common, false);
  std::vector<double> loc_deltas{0.01, 0.1};
  int loc_dirs = 16;
  double loc_T = 500.0, loc_tol = 1e-6;
  std::uint64_t loc_seed = 0;
  loc_cmd->add_option("--deltas", loc_deltas, "perturbation radii")->delimiter(',')->capture_default_str();
  loc_cmd->add_option("--directions", loc_dirs, "random directions per radius")->check(CLI::PositiveNumber)->capture_default_str();
  loc_cmd->add_option("--T", loc_T, "horizon")->check(CLI::PositiveNumber)->capture_default_str();
  loc_cmd->add_option("--tol", loc_tol, "terminal distance tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  loc_cmd->add_option("--seed", loc_seed, "direction seed")->capture_default_str();

  // stability-global
  auto* glob_cmd = app.add_subcommand("stability-global", "random initial states, equal beta only");
  add_common(glob_cmd, common, false);
  int glob_inits = 50;
  double glob_box = 5.0, glob_T = 300.0, glob_tol = 1e-4;
  std::uint64_t glob_seed = 0;
  glob_cmd->add_option("--inits", glob_inits, "number of initial states")->check(CLI::PositiveNumber)->capture_default_str();
  glob_cmd->add_option("--box", glob_box, "initial states drawn from (0, box]^N")->check(CLI::PositiveNumber)->capture_default_str();
  glob_cmd->add_option("--T", glob_T, "horizon")->check(CLI::PositiveNumber)->capture_default_str();
  glob_cmd->add_option("--tol", glob_tol, "terminal distance tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  glob_cmd->add_option("--seed", glob_seed, "initial-state seed")->capture_default_str();

  auto* check_cmd = app.add_subcommand("check", "verify the model assumptions");
  add_common(check_cmd, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInvalid;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  Fixture fx;
  try {
    fx = load_fixture(common.config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: invalid config %s: %s\n", common.config.c_str(), e.what());
    return kInvalid;
  }
  const ModelConfig& cfg = fx.model;

  try {
    const Outputs out = prepare(common, fx);

    if (name == "simulate") {
      SimConfig sc;
      sc.n = sim_n;
      sc.horizon = sim_T;
      sc.sample_dt = sim_dt;
      sc.seed = sim_seed;
      sc.epsilon = sim_eps;
      sc.q0_scaled = initial_state(common, fx);
      const SimPath path = simulate(cfg, sc);
      out.write("sim_path.csv", path_csv(path));
      summary(name, "n=" + std::to_string(sim_n) + " seed=" + std::to_string(sim_seed) + " events=" +
                        std::to_string(path.event_count) + " min_W=" + fmt(path.min_workload) +
                        " q(T)=" + join(path.q_scaled(path.samples() - 1)),
              true);
      return kPass;
    }

    if (name == "fluid") {
      IntegratorConfig icfg;
      icfg.dt = fl_dt;
      icfg.record_every = fl_every;
      icfg.refine_check = fl_refine;
      const FluidTrajectory traj = integrate(cfg, initial_state(common, fx), fl_T, icfg);
      out.write("trajectory.csv", trajectory_csv(traj));
      summary(name, "steps=" + std::to_string(traj.stats.steps) + " min_W=" + fmt(traj.min_workload) +
                        " kappa=" + fmt(traj.kappa) + " q(T)=" + join(traj.terminal()),
              true);
      return kPass;
    }

    if (name == "equilibrium") {
      const Equilibrium eq = solve_equilibrium(cfg);
      out.write("equilibrium.json", to_json(eq));
      const bool pass = eq.unique && eq.residual < 1e-10;
      summary(name, "w_star=" + fmt(eq.w_star) + " q_star=" + join(eq.q_star) + " residual=" +
                        fmt(eq.residual) + " roots=" + std::to_string(eq.all_roots.size()),
              pass);
      return pass ? kPass : kFailed;
    }

    if (name == "spectrum") {
      const std::vector<double> q = !common.q0.empty() ? initial_state(common, fx) : solve_equilibrium(cfg).q_star;
      const SpectrumReport rep = spectrum(cfg, q);
      out.write("spectrum.json", to_json(rep));
      const bool pass = rep.verdict == Verdict::stable && rep.det_identity_max_rel_err < 1e-8 && rep.sign_law_holds;
      summary(name, std::string("verdict=") + to_string(rep.verdict) + " max_re=" + fmt(rep.max_real_part) +
                        " det_rel_err=" + fmt(rep.det_identity_max_rel_err) +
                        " sign_law=" + (rep.sign_law_holds ? "yes" : "no"),
              pass);
      return pass ? kPass : kFailed;
    }

    if (name == "converge") {
      SimConfig sc;
      sc.horizon = conv_T;
      sc.sample_dt = conv_dt;
      sc.seed = conv_seed;
      sc.q0_scaled = initial_state(common, fx);
      for (auto n : conv_n) {
        if (n < 1) throw ConfigError("--n", "scaling parameters must be positive");
      }
      const ConvergenceTable table = replicate(cfg, sc, conv_n, conv_reps);
      out.write("convergence.csv", convergence_csv(table, conv_seed));
      out.write("convergence.json", to_json(table, conv_seed));
      std::string text = "seed_base=" + std::to_string(conv_seed);
      for (const auto& row : table.rows) text += " median(n=" + std::to_string(row.n) + ")=" + fmt(row.median);
      const bool pass = table.medians_strictly_decreasing();
      summary(name, text, pass);
      return pass ? kPass : kFailed;
    }

    if (name == "stability-local") {
      const Equilibrium eq = solve_equilibrium(cfg);
      const LocalStabilityReport rep =
          local_stability_experiment(cfg, eq, loc_deltas, loc_T, loc_dirs, loc_seed, loc_tol);
      out.write("stability_local.csv", local_trials_csv(rep));
      out.write("stability_local.json", to_json(rep));
      double worst = 0.0;
      std::size_t passed = 0;
      for (const auto& t : rep.trials) {
        worst = std::max(worst, t.terminal_distance);
        passed += t.passed;
      }
      summary(name, "seed=" + std::to_string(loc_seed) + " passed=" + std::to_string(passed) + "/" +
                        std::to_string(rep.trials.size()) + " max_distance=" + fmt(worst),
              rep.all_pass);
      return rep.all_pass ? kPass : kFailed;
    }

    if (name == "stability-global") {
      GlobalStabilityOptions opts;
      opts.convergence_tol = glob_tol;
      const GlobalStabilityReport rep =
          global_stability_experiment(cfg, glob_inits, glob_box, glob_T, glob_seed, opts);
      out.write("stability_global.csv", global_trials_csv(rep));
      out.write("stability_global.json", to_json(rep));
      double worst = 0.0;
      std::size_t passed = 0;
      for (const auto& t : rep.trials) {
        worst = std::max(worst, t.terminal_distance);
        passed += t.passed;
      }
      summary(name, "seed=" + std::to_string(glob_seed) + " passed=" + std::to_string(passed) + "/" +
                        std::to_string(rep.trials.size()) + " max_distance=" + fmt(worst),
              rep.all_pass);
      return rep.all_pass ? kPass : kFailed;
    }

    if (name == "check") {
      const AssumptionReport rep = check_assumptions(cfg, initial_state(common, fx));
      nlohmann::json j = to_json(rep);
      j["bands"] = to_json(compute_bands(cfg));
      out.write("assumptions.json", j);
      // Violated assumptions are findings, not failures of the check itself.
      summary(name, std::string("cond_i=") + (rep.cond_i_holds ? "holds" : "fails") +
                        " cond_ii=" + (rep.cond_ii_holds ? "holds" : "fails") +
                        " cond_iv=" + (rep.cond_iv_holds ? "holds" : "fails") + " kappa=" + fmt(rep.kappa),
              rep.complete);
      return rep.complete ? kPass : kFailed;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s failed: %s\n", name.c_str(), e.what());
    return kFailed;
  }
  return kInvalid;
}
