#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluidlob/discrete_sim.hpp"
#include "fluidlob/equilibrium.hpp"
#include "fluidlob/fluid.hpp"
#include "fluidlob/model.hpp"
#include "fluidlob/stability.hpp"

namespace fluidlob {

/// "%.12g" formatting shared by every CSV writer.
std::string format_number(double x);

/// Columns t, q1..qN, W.
std::string trajectory_csv(const FluidTrajectory& traj);

/// Leading "# seed=..., n=..., epsilon=..." line, then columns
/// t, q1..qN, ad1..adN, ao1..aoN, d1..dN, routed0 (all scaled by 1/n except
/// routed0, which counts orders).
std::string path_csv(const SimPath& path);

/// Leading "# seed_base=..." line, then columns n, rep, sup_distance.
std::string convergence_csv(const ConvergenceTable& table, std::uint64_t seed_base);

std::string local_trials_csv(const LocalStabilityReport& rep);
std::string global_trials_csv(const GlobalStabilityReport& rep);

nlohmann::json to_json(const RoutingBands& bands);
nlohmann::json to_json(const AssumptionReport& rep);
nlohmann::json to_json(const Equilibrium& eq);
nlohmann::json to_json(const SpectrumReport& rep);
nlohmann::json to_json(const ConvergenceTable& table, std::uint64_t seed_base);
nlohmann::json to_json(const LocalStabilityReport& rep);
nlohmann::json to_json(const GlobalStabilityReport& rep);

/// Writes to a sibling temp file and renames it over `path`. Throws
/// std::runtime_error naming the path on failure.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Minimal CSV reader for the files above: skips '#' lines, returns the
/// header and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);

}  // namespace fluidlob
