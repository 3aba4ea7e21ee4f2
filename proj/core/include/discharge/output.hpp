/// @file output.hpp
/// @brief CSV and JSON writers. Numbers use "%.17g", NaN becomes an empty
/// cell, lines end in LF.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "discharge/auxiliary.hpp"
#include "discharge/mms.hpp"
#include "discharge/monitors.hpp"
#include "discharge/run_config.hpp"

namespace discharge {

std::string format_number(double v);

inline constexpr const char* kTimeseriesHeader =
    "t,min_p,min_n,L2_p,L2_n,H1_p,H1_n,charge_residual,Y,bihari_bound,clamp_active,source_finite";
inline constexpr const char* kFieldsHeader = "i,j,x,y,p,n,phi";

std::string timeseries_csv(std::span<const MonitorRecord> records);
std::string fields_csv(const Mesh& mesh, const State& state);
/// "fields_000042.csv"
std::string fields_filename(std::size_t step);
std::string convergence_csv(const ConvergenceReport& rep);
std::string sweep_csv(const SweepReport& rep);
std::string tail_csv(const TailReport& rep);
std::string dependence_csv(const DependenceReport& rep);

struct MetaInfo {
  std::string subcommand;
  std::string stop_cause = "completed";
  double wall_time_s = 0.0;
  int exit_code = 0;
  std::string error;
  /// Extra scalar results, written under "results".
  std::vector<std::pair<std::string, double>> results;
};
std::string meta_json(const RunConfig& config, const MetaInfo& info);

/// Writes bytes exactly (binary mode); creates parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace discharge
