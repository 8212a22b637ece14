#include "fluidlob/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fluidlob {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

// JSON has no infinity; spell it out.
json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

json nums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

class CsvWriter {
 public:
  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) out_ << (k ? "," : "") << cols[k];
    out_ << '\n';
  }
  CsvWriter& cell(double x) {
    sep();
    out_ << format_number(x);
    return *this;
  }
  CsvWriter& cell(std::int64_t x) {
    sep();
    out_ << x;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostringstream out_;
  bool first_ = true;
};

std::vector<std::string> indexed(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

std::string trajectory_csv(const FluidTrajectory& traj) {
  CsvWriter w;
  std::vector<std::string> cols{"t"};
  for (auto& c : indexed("q", traj.n_exchanges())) cols.push_back(c);
  cols.push_back("W");
  w.header(cols);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    w.cell(traj.times[k]);
    for (double x : traj.states[k]) w.cell(x);
    w.cell(traj.workload[k]);
    w.end_row();
  }
  return w.str();
}

std::string path_csv(const SimPath& path) {
  CsvWriter w;
  w.comment("seed=" + std::to_string(path.seed) + ", n=" + std::to_string(path.n) +
            ", epsilon=" + format_number(path.epsilon) + ", rng_fingerprint=" +
            std::to_string(path.rng_fingerprint));
  const std::size_t nx = path.q0.size();
  std::vector<std::string> cols{"t"};
  for (const char* p : {"q", "ad", "ao", "d"}) {
    for (auto& c : indexed(p, nx)) cols.push_back(c);
  }
  cols.push_back("routed0");
  w.header(cols);
  const double n = static_cast<double>(path.n);
  for (std::size_t s = 0; s < path.samples(); ++s) {
    w.cell(path.times[s]);
    for (const auto* block : {&path.q, &path.dedicated, &path.optimized, &path.served}) {
      for (std::int64_t x : (*block)[s]) w.cell(static_cast<double>(x) / n);
    }
    w.cell(path.routed_to_market[s]);
    w.end_row();
  }
  return w.str();
}

std::string convergence_csv(const ConvergenceTable& table, std::uint64_t seed_base) {
  CsvWriter w;
  w.comment("seed_base=" + std::to_string(seed_base));
  w.header({"n", "rep", "sup_distance"});
  for (const auto& row : table.rows) {
    for (std::size_t r = 0; r < row.distances.size(); ++r) {
      w.cell(row.n).cell(static_cast<std::int64_t>(r)).cell(row.distances[r]);
      w.end_row();
    }
  }
  return w.str();
}

std::string local_trials_csv(const LocalStabilityReport& rep) {
  CsvWriter w;
  w.comment("seed=" + std::to_string(rep.seed));
  w.header({"delta", "direction", "terminal_distance", "min_workload", "kappa", "passed"});
  for (const auto& t : rep.trials) {
    w.cell(t.delta).cell(static_cast<std::int64_t>(t.direction)).cell(t.terminal_distance);
    w.cell(t.min_workload).cell(t.kappa).cell(static_cast<std::int64_t>(t.passed));
    w.end_row();
  }
  return w.str();
}

std::string global_trials_csv(const GlobalStabilityReport& rep) {
  CsvWriter w;
  w.comment("seed=" + std::to_string(rep.seed));
  const std::size_t nx = rep.q_star.size();
  std::vector<std::string> cols;
  for (auto& c : indexed("q0_", nx)) cols.push_back(c);
  for (const char* c : {"w0", "terminal_distance", "workload_monotone", "max_gap_increase",
                        "tube_entry_time", "min_workload", "kappa", "passed"}) {
    cols.emplace_back(c);
  }
  w.header(cols);
  for (const auto& t : rep.trials) {
    for (double x : t.initial) w.cell(x);
    w.cell(t.w0).cell(t.terminal_distance).cell(static_cast<std::int64_t>(t.workload_monotone));
    w.cell(t.max_gap_increase).cell(t.tube_entry_time.value_or(std::nan("")));
    w.cell(t.min_workload).cell(t.kappa).cell(static_cast<std::int64_t>(t.passed));
    w.end_row();
  }
  return w.str();
}

json to_json(const RoutingBands& bands) {
  json empty = json::array();
  for (bool b : bands.empty_band) empty.push_back(b);
  return json{{"a_minus", nums(bands.a_minus)},
              {"a_plus", nums(bands.a_plus)},
              {"a_min_global", num(bands.a_min_global)},
              {"empty_band", empty}};
}

json to_json(const AssumptionReport& rep) {
  json j{{"complete", rep.complete},
         {"cond_i", {{"holds", rep.cond_i_holds},
                     {"grid_lo", num(rep.cond_i_grid_lo)},
                     {"grid_hi", num(rep.cond_i_grid_hi)},
                     {"grid_points", rep.cond_i_grid_points}}},
         {"cond_ii", {{"holds", rep.cond_ii_holds},
                      {"dedicated_volume_rate", num(rep.cond_ii_dedicated)},
                      {"service_volume_rate", num(rep.cond_ii_service)},
                      {"total_arrival_volume_rate", num(rep.cond_ii_total)}}},
         {"cond_iii", AssumptionReport::cond_iii},
         {"cond_iv", {{"holds", rep.cond_iv_holds}, {"empty_band_exchanges", rep.empty_band_exchanges}}},
         {"w0", num(rep.w0)},
         {"w_star", num(rep.w_star)},
         {"kappa", num(rep.kappa)}};
  if (rep.cond_i_first_violation) j["cond_i"]["first_violation"] = num(*rep.cond_i_first_violation);
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  return j;
}

json to_json(const Equilibrium& eq) {
  return json{{"w_star", num(eq.w_star)},
              {"q_star", nums(eq.q_star)},
              {"chi_at_star", nums(eq.chi_at_star)},
              {"residual", num(eq.residual)},
              {"all_roots", nums(eq.all_roots)},
              {"unique", eq.unique}};
}

json to_json(const SpectrumReport& rep) {
  json jac = json::array();
  for (Eigen::Index r = 0; r < rep.jacobian.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < rep.jacobian.cols(); ++c) row.push_back(num(rep.jacobian(r, c)));
    jac.push_back(row);
  }
  json eig = json::array();
  for (const auto& ev : rep.eigenvalues) eig.push_back({{"re", num(ev.real())}, {"im", num(ev.imag())}});
  return json{{"q", nums(rep.q)},
              {"w", num(rep.w)},
              {"jacobian", jac},
              {"eigenvalues", eig},
              {"max_real_part", num(rep.max_real_part)},
              {"nu_grid", nums(rep.nu_grid)},
              {"det_direct", nums(rep.det_direct)},
              {"det_formula", nums(rep.det_formula)},
              {"det_identity_max_rel_err", num(rep.det_identity_max_rel_err)},
              {"sign_law_holds", rep.sign_law_holds},
              {"eigen_residual", num(rep.eigen_residual)},
              {"distinct_poles", rep.distinct_poles},
              {"secular_roots", rep.secular_roots},
              {"real_eigenvalues", rep.real_eigenvalues},
              {"secular_consistent", rep.secular_consistent},
              {"verdict", to_string(rep.verdict)}};
}

json to_json(const ConvergenceTable& table, std::uint64_t seed_base) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"n", row.n},
                    {"reps", row.distances.size()},
                    {"median", num(row.median)},
                    {"p90", num(row.p90)},
                    {"distances", nums(row.distances)},
                    {"seeds", row.seeds}});
  }
  return json{{"seed_base", seed_base},
              {"rows", rows},
              {"medians_strictly_decreasing", table.medians_strictly_decreasing()}};
}

json to_json(const LocalStabilityReport& rep) {
  json trials = json::array();
  for (const auto& t : rep.trials) {
    json row{{"delta", num(t.delta)},
             {"direction", t.direction},
             {"initial", nums(t.initial)},
             {"terminal_distance", num(t.terminal_distance)},
             {"min_workload", num(t.min_workload)},
             {"kappa", num(t.kappa)},
             {"passed", t.passed}};
    if (!t.error.empty()) row["error"] = t.error;
    trials.push_back(row);
  }
  return json{{"q_star", nums(rep.q_star)},
              {"horizon", num(rep.horizon)},
              {"tolerance", num(rep.tolerance)},
              {"seed", rep.seed},
              {"all_pass", rep.all_pass},
              {"trials", trials}};
}

json to_json(const GlobalStabilityReport& rep) {
  json trials = json::array();
  for (const auto& t : rep.trials) {
    json row{{"initial", nums(t.initial)},
             {"w0", num(t.w0)},
             {"terminal_distance", num(t.terminal_distance)},
             {"workload_monotone", t.workload_monotone},
             {"max_gap_increase", num(t.max_gap_increase)},
             {"workload_crossed", t.workload_crossed},
             {"min_workload", num(t.min_workload)},
             {"kappa", num(t.kappa)},
             {"passed", t.passed}};
    row["tube_entry_time"] = t.tube_entry_time ? num(*t.tube_entry_time) : json(nullptr);
    if (!t.error.empty()) row["error"] = t.error;
    trials.push_back(row);
  }
  return json{{"q_star", nums(rep.q_star)},
              {"w_star", num(rep.w_star)},
              {"tube_epsilon", num(rep.tube_epsilon)},
              {"horizon", num(rep.horizon)},
              {"box", num(rep.box)},
              {"seed", rep.seed},
              {"all_pass", rep.all_pass},
              {"trials", trials}};
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (table.header.empty()) {
      table.header = split(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fluidlob
