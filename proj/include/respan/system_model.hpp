#pragma once

// Power system instance and solved-design value types for the capacity
// expansion planning (CEP) model.
//
// Units: MW for power capacity, MWh for storage energy capacity and for all
// per-step flows (dispatch, demand), hours for step length, and one abstract
// currency. Investment and fixed costs are annualized per MW (per MWh for
// storage); variable costs are per MWh.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace respan {

enum class LineKind { AC, DC };

struct Bus {
  std::string id;
  std::string name;

  bool operator==(const Bus&) const = default;
};

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  LineKind kind = LineKind::AC;
  double kappa0 = 0.0;     // existing capacity, MW
  double kappa_max = 0.0;  // maximum total capacity, MW
  double length_km = 0.0;
  double zeta = 0.0;       // annualized investment, currency/MW/yr
  double theta_f = 0.0;    // fixed O&M, currency/MW/yr
  double theta_v = 0.0;    // variable O&M, currency/MWh

  bool operator==(const Line&) const = default;
};

/// Candidate renewable site. A single technology is attached to each site,
/// and `cf` holds its per-unit availability for every time step.
struct CandidateSite {
  std::string id;
  std::string bus;
  std::string tech;  // e.g. W_on, W_off, PV_u, PV_d
  double lat = 0.0;
  double lon = 0.0;
  double kappa0 = 0.0;
  double kappa_max = 0.0;
  double zeta = 0.0;
  double theta_f = 0.0;
  double theta_v = 0.0;
  std::vector<double> cf;

  bool operator==(const CandidateSite&) const = default;
};

struct ConventionalGen {
  std::string id;
  std::string bus;
  std::string tech;
  double kappa0 = 0.0;
  double kappa_max = 0.0;
  double zeta = 0.0;
  double theta_f = 0.0;
  double theta_v = 0.0;
  bool sizable = true;

  bool operator==(const ConventionalGen&) const = default;
};

/// Storage unit; capacities are energy (MWh). Power rating is phi * energy.
struct StorageUnit {
  std::string id;
  std::string bus;
  std::string tech;
  double kappa0 = 0.0;
  double kappa_max = 0.0;
  double phi = 0.25;     // power-to-energy ratio, 1/h
  double eta_sd = 1.0;   // self-discharge retention per step
  double eta_c = 1.0;
  double eta_d = 1.0;
  double zeta = 0.0;
  double theta_f = 0.0;
  double theta_v = 0.0;
  bool sizable = true;

  bool operator==(const StorageUnit&) const = default;
};

struct DemandSeries {
  std::string bus;
  std::vector<double> lambda;  // MWh per step

  bool operator==(const DemandSeries&) const = default;
};

struct GlobalParams {
  std::size_t horizon_len = 0;
  double step_hours = 1.0;
  double omega = 1.0;      // weight of annualized costs relative to the horizon
  double theta_e = 1.0e4;  // unserved-demand penalty, currency/MWh

  bool operator==(const GlobalParams&) const = default;
};

struct SystemInstance {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<CandidateSite> sites;
  std::vector<ConventionalGen> generators;
  std::vector<StorageUnit> storages;
  std::vector<DemandSeries> demands;
  GlobalParams params;

  std::size_t horizon() const { return params.horizon_len; }

  /// Index of the bus with the given id; throws std::out_of_range if absent.
  std::size_t bus_index(const std::string& id) const;

  /// Demand at bus index `b`, or nullptr when the bus carries no demand.
  const DemandSeries* demand_of(std::size_t b) const;

  bool operator==(const SystemInstance&) const = default;
};

struct SolverStats {
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t nonzeros = 0;
};

/// Capacities and trajectories of a solved CEP, aligned with the instance the
/// design was extracted against (sites[i] <-> site_capacity[i], ...).
/// Capacities are the new-build amounts K (on top of kappa0).
struct SolvedDesign {
  double objective = 0.0;

  std::vector<double> site_capacity;
  std::vector<std::vector<double>> site_output;

  std::vector<double> gen_capacity;
  std::vector<std::vector<double>> gen_output;

  std::vector<double> storage_capacity;
  std::vector<std::vector<double>> storage_charge;
  std::vector<std::vector<double>> storage_discharge;
  std::vector<std::vector<double>> storage_energy;

  std::vector<double> line_capacity;
  std::vector<std::vector<double>> line_flow;  // signed, from -> to positive

  std::vector<std::vector<double>> unserved;  // [bus][t]

  SolverStats stats;

  /// All-zero design shaped for `inst`.
  static SolvedDesign zeros(const SystemInstance& inst);
};

struct Violation {
  std::string entity;
  std::string field;
  std::string rule;
};

/// Checks every instance invariant; returns an empty list iff all hold.
std::vector<Violation> validate_instance(const SystemInstance& inst);

std::string describe(const Violation& v);

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws DimensionError if the design's shape does not match `inst`.
void check_dimensions(const SolvedDesign& design, const SystemInstance& inst);

/// Recomputes the CEP objective from primal values. Absolute values of line
/// flows and generator output are taken directly; storage uses charge +
/// discharge.
double total_cost(const SolvedDesign& design, const SystemInstance& inst);

}  // namespace respan
