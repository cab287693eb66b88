#pragma once

// Full capacity expansion LP: investment in sites, conventional generators,
// storage and lines, coupled to hourly dispatch through a transportation
// network model.
//
// Closed-form sizes (R retained sites, B buses, G generators, S storage
// units, L lines, T steps, Z zero capacity factors among retained sites):
//
//   variables   = R + G + S + L + T (R + G + 3S + 2L + B)
//   constraints = T (B + R + G + 4S + L) + R + G + S + L
//   nonzeros    = T (3R + 3G + 12S + 7L + B) - Z + R + G + S + L - S*[!cyclic]
//
// (the nonzero formula assumes T >= 2 when storage is cyclic).

#include <cstddef>
#include <optional>
#include <vector>

#include "respan/lp.hpp"
#include "respan/system_model.hpp"

namespace respan {

struct BuildOptions {
  /// Storage state at t = -1 is the state at the final step instead of zero.
  bool cyclic_storage = false;
};

/// LP handles for every variable family, aligned with the instance vectors.
/// Sites left out of the model (reduced LP) have no handles.
struct VarMap {
  std::vector<std::optional<VarId>> site_capacity;
  std::vector<std::vector<VarId>> site_output;

  std::vector<VarId> gen_capacity;
  std::vector<std::vector<VarId>> gen_output;

  std::vector<VarId> storage_capacity;
  std::vector<std::vector<VarId>> storage_charge;
  std::vector<std::vector<VarId>> storage_discharge;
  std::vector<std::vector<VarId>> storage_energy;

  std::vector<VarId> line_capacity;
  std::vector<std::vector<VarId>> line_forward;
  std::vector<std::vector<VarId>> line_backward;

  std::vector<std::vector<VarId>> unserved;  // [bus][t]

  bool includes_site(std::size_t i) const { return site_capacity[i].has_value(); }
};

struct BuiltLp {
  LpProblem lp;
  VarMap vars;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws ValidationError when validate_instance reports anything.
void require_valid(const SystemInstance& inst);

BuiltLp build_flp(const SystemInstance& inst, const BuildOptions& opts = {});

/// Same model restricted to the sites flagged in `keep_site` (one flag per
/// instance site). Excluded sites contribute nothing.
BuiltLp build_flp_restricted(const SystemInstance& inst, const std::vector<bool>& keep_site,
                             const BuildOptions& opts = {});

struct ModelSize {
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t nonzeros = 0;
  bool operator==(const ModelSize&) const = default;
};

/// Closed-form size of build_flp_restricted for the given site selection.
ModelSize expected_flp_size(const SystemInstance& inst, const std::vector<bool>& keep_site,
                            const BuildOptions& opts = {});

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps an optimal LP solution back to domain terms. Excluded sites get
/// zero capacity and output. Throws SolveError if `sol` is not Optimal.
SolvedDesign extract_design(const SystemInstance& inst, const VarMap& vars,
                            const LpSolution& sol);

struct ResidualReport {
  double balance = 0.0;            // |lhs - rhs| of the bus energy balance
  double site_availability = 0.0;  // p - pi * (kappa0 + K) * dt, positive part
  double site_capacity = 0.0;
  double gen_dispatch = 0.0;
  double gen_capacity = 0.0;
  double storage_power = 0.0;
  double storage_energy = 0.0;
  double soc = 0.0;                // |e_t - eta_sd e_{t-1} - eta_c pc + pd / eta_d|
  double storage_capacity = 0.0;
  double line_flow = 0.0;
  double line_capacity = 0.0;
  double negativity = 0.0;         // largest negative capacity/flow/state value

  double max() const;
};

ResidualReport check_design(const SystemInstance& inst, const SolvedDesign& design,
                            const BuildOptions& opts = {});

}  // namespace respan
