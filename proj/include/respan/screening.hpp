#pragma once

// Renewable site screening: a siting LP that keeps only renewable
// investment/dispatch and unserved demand, with per-bus energy targets
// enforced over time slices. Sites built beyond a threshold are retained
// for the reduced CEP.

#include <cstddef>
#include <string>
#include <vector>

#include "respan/flp_builder.hpp"
#include "respan/lp.hpp"
#include "respan/system_model.hpp"

namespace respan {

struct ScreeningParams {
  std::size_t delta_tau = 24;     // steps per slice
  std::vector<double> xi;         // per bus, aligned with inst.buses
  double selection_threshold = 1.0;  // MW
};

/// Checks 1 <= delta_tau <= T, xi in [0,1] per bus, threshold > 0.
std::vector<Violation> validate_params(const ScreeningParams& p, const SystemInstance& inst);

struct Slice {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

/// Consecutive slices of `delta_tau` steps; a shorter remainder slice closes
/// the horizon when delta_tau does not divide it.
std::vector<Slice> make_slices(std::size_t horizon, std::size_t delta_tau);

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Period (in steps) of the strongest nonzero-frequency DFT component of the
/// potential-weighted mean capacity factor series. Requires T >= 4; throws
/// EstimationError when the series has no nonzero-frequency content.
std::size_t estimate_delta_tau(const SystemInstance& inst);

/// Same estimator on an explicit series.
std::size_t dominant_period(const std::vector<double>& series);

struct XiOptions {
  /// Number of highest-demand steps treated as peak load conditions.
  std::size_t peak_steps = 1;
};

/// Per-bus minimum renewable feed-in fraction from residual demand, renewable
/// potential and transmission capability over one slicing period.
std::vector<double> estimate_xi(const SystemInstance& inst, std::size_t delta_tau,
                                const XiOptions& opts = {});

/// Siting LP: renewable capacity and output plus unserved demand, slice
/// energy targets per bus, availability and capacity caps.
BuiltLp build_siting_lp(const SystemInstance& inst, const ScreeningParams& params);

struct ScreeningResult {
  std::vector<std::vector<std::size_t>> retained;  // per bus: site indices
  std::vector<double> siting_capacity;             // K per site (aligned with inst.sites)
  double objective = 0.0;
  SolverStats stats;

  std::vector<bool> keep_mask(std::size_t num_sites) const;
  std::size_t retained_count() const;

  /// Screening result that keeps every site of the instance.
  static ScreeningResult retain_all(const SystemInstance& inst);
};

/// Retains sites with kappa0 + K >= threshold. Throws SolveError if `sol`
/// is not Optimal.
ScreeningResult extract_retained(const SystemInstance& inst, const VarMap& vars,
                                 const LpSolution& sol, double threshold);

}  // namespace respan
