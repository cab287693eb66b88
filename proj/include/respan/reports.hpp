#pragma once

// Run configuration, screening-parameter files, run records and comparison
// reports: the JSON and CSV artifacts the command-line tool reads and writes.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "respan/instance_io.hpp"
#include "respan/metrics.hpp"
#include "respan/pipeline.hpp"

namespace respan {

/// xi given as one value for every bus or as a per-bus object.
using XiOverride = std::variant<double, std::map<std::string, double>>;

/// Expands an override to one value per bus. Buses missing from a per-bus
/// object throw FormatError, as do unknown bus ids.
std::vector<double> resolve_xi(const XiOverride& xi, const SystemInstance& inst);

struct ScreeningOverrides {
  std::optional<std::size_t> delta_tau;
  std::optional<XiOverride> xi;
  std::optional<double> selection_threshold;
  std::optional<std::size_t> peak_steps;
};

/// Reads {"delta_tau", "xi", "selection_threshold", "peak_steps"}; every key
/// is optional. This is also the format estimate-params writes.
ScreeningOverrides screening_overrides_from_json(const std::string& text);

struct RunConfig {
  std::filesystem::path instance;
  SolverConfig solver;
  ScreeningOverrides screening;
  std::filesystem::path output_dir;
  double feasibility_tol = kFeasTol;
  double objective_tol = kObjRelTol;
  bool cyclic_storage = false;
};

/// Parses a run configuration. Relative paths are resolved against
/// `base_dir` (the directory of the config file). Throws FormatError.
RunConfig run_config_from_json(const std::string& text, const std::filesystem::path& base_dir);

/// Checks tolerances > 0 and that the instance path exists.
void validate_run_config(const RunConfig& cfg);

/// Applies overrides to SmOptions, expanding xi against the instance.
SmOptions sm_options(const RunConfig& cfg, const SystemInstance& inst);

std::string params_json(const ScreeningParams& params, const SystemInstance& inst);

struct RunMeta {
  std::string instance;
  std::optional<ScreeningParams> params;  // SITE records
  bool delta_tau_overridden = false;
  bool xi_overridden = false;
};

std::string run_record_json(const RunRecord& rec, const RunMeta& meta, const SystemInstance& inst);

struct LoadedRun {
  RunRecord record;
  std::string instance;
};

/// Scalar fields only; designs and screening come from the CSV artifacts.
LoadedRun run_record_from_json(const std::string& text);

/// kind,id,bus,tech,kappa0,new_capacity,total_capacity for sites, generators,
/// storage units and lines (lines list from_bus-to_bus and AC/DC).
std::string design_csv(const SystemInstance& inst, const SolvedDesign& design);

/// Capacities only; trajectories stay empty.
SolvedDesign design_from_csv(const SystemInstance& inst, const std::string& text);

/// site_id,bus,tech,siting_capacity for retained sites.
std::string retained_csv(const SystemInstance& inst, const ScreeningResult& screening);
ScreeningResult retained_from_csv(const SystemInstance& inst, const std::string& text);

std::string report_json(const ComparisonReport& rep);
std::string distances_csv(const ComparisonReport& rep);
std::string capacities_csv(const ComparisonReport& rep);

}  // namespace respan
