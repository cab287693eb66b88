#pragma once

// Benchmark (full LP) and two-stage (screening, then reduced LP) runs, with
// problem-size, memory and timing bookkeeping for each solved model.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "respan/flp_builder.hpp"
#include "respan/lp.hpp"
#include "respan/screening.hpp"
#include "respan/system_model.hpp"

namespace respan {

enum class ModelKind { FLP, SITE, RLP };
const char* to_string(ModelKind k);

enum class SolverKind { Reference, ExternalMps };

/// How LPs are solved. The external path writes `<work_dir>/<tag>.mps`, runs
/// `command` through /bin/sh with `{mps}` and `{sol}` substituted (appended
/// when absent) and reads the name/value solution back.
struct SolverConfig {
  SolverKind kind = SolverKind::Reference;
  std::string command;
  std::filesystem::path work_dir;  // empty: a fresh temporary directory
  bool keep_files = false;
  SimplexOptions simplex;

  std::string label() const { return kind == SolverKind::Reference ? "reference" : "external-mps"; }
};

struct SolveOutcome {
  LpSolution solution;
  std::size_t peak_memory_bytes = 0;
  bool peak_memory_estimated = false;
};

/// Solves `lp` with the configured backend. Throws SolveError when the
/// external command fails or its output cannot be read.
SolveOutcome solve_lp(const LpProblem& lp, const SolverConfig& solver, const std::string& tag);

struct RunRecord {
  ModelKind model = ModelKind::FLP;
  std::string solver;
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  ModelSize size;
  std::size_t peak_memory_bytes = 0;
  bool peak_memory_estimated = false;
  double solve_seconds = 0.0;
  std::size_t iterations = 0;

  std::optional<SolvedDesign> design;        // FLP and RLP
  std::optional<ResidualReport> residuals;   // FLP and RLP
  std::optional<ScreeningResult> screening;  // SITE
};

/// Reduced CEP: the full model over the retained sites only.
BuiltLp build_rlp(const SystemInstance& inst, const ScreeningResult& screening,
                  const BuildOptions& opts = {});

/// Validates, builds, solves and extracts the full CEP. Throws
/// ValidationError before any solve, SolveError on non-optimal status.
RunRecord run_flp(const SystemInstance& inst, const SolverConfig& solver,
                  const BuildOptions& opts = {});

/// Solves the reduced CEP for a given screening outcome.
RunRecord run_rlp(const SystemInstance& inst, const ScreeningResult& screening,
                  const SolverConfig& solver, const BuildOptions& opts = {});

struct SmOptions {
  std::optional<std::size_t> delta_tau;   // skips the DFT estimator when set
  std::optional<std::vector<double>> xi;  // skips the xi estimator when set
  double selection_threshold = 1.0;
  XiOptions xi_options;
  bool force_retain_all = false;          // keep every site regardless of siting
  BuildOptions build;
};

struct SmResult {
  RunRecord site;
  RunRecord rlp;
  ScreeningParams params;
  bool delta_tau_overridden = false;
  bool xi_overridden = false;

  const ScreeningResult& screening() const { return *site.screening; }
  double solve_seconds() const { return site.solve_seconds + rlp.solve_seconds; }
};

/// Screening stage followed by the reduced CEP, solved sequentially.
SmResult run_sm(const SystemInstance& inst, const SolverConfig& solver, const SmOptions& opts = {});

/// Resolves estimated or overridden screening parameters.
ScreeningParams resolve_params(const SystemInstance& inst, const SmOptions& opts);

}  // namespace respan
