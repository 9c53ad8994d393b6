#pragma once

// File formats: solution.csv node table, report.json, scorecard.json.
// Doubles are written as shortest round-trip decimals.

#include "plateau/config.hpp"
#include "plateau/geometry.hpp"
#include "plateau/solver.hpp"
#include "plateau/verifier.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace plateau {

/// Writes to a temporary file in the same directory, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Header for n = 2: r,phi,x1,x2,u,Du1,Du2,kappa1,kappa2,nu,eta (n = 1 drops
/// the second components; r = |x|, phi = 0 or pi).  One row per node,
/// interior nodes first.
std::string solution_csv_header(int dim);
std::string solution_csv(const GridTopology& topo, std::span<const double> u, double sigma);

/// Reads back the u column; throws std::runtime_error on a malformed table.
std::vector<double> read_solution_csv(const std::string& text, int dim);

nlohmann::json config_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

nlohmann::json report_json(const RunConfig& config, const SolveReport& report);
/// The stored config and the report, including the epsilon ladder solutions.
std::pair<RunConfig, SolveReport> read_report_json(const nlohmann::json& j);

nlohmann::json scorecard_json(const Scorecard& card);

}  // namespace plateau
