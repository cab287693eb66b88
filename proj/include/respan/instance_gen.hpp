#pragma once

// Seeded synthetic instances: buses scattered over a continental-scale box,
// renewable sites clustered around their bus, spatially correlated wind and
// clipped-sinusoid solar availability, diurnal demand.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "respan/system_model.hpp"

namespace respan {

enum class Topology { Ring, Star, Tree };

const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Per-technology site parameters. Costs are annualized per MW; the
/// investment cost of each site is drawn from `zeta`.
struct SiteTechSpec {
  std::size_t per_bus = 0;
  Range kappa_max{50.0, 150.0};
  Range zeta{80000.0, 120000.0};
  double theta_f = 0.0;
  double theta_v = 0.0;
  double offset_km = 0.0;  // shifts the cluster centre away from the bus
};

struct GenSpec {
  std::uint64_t seed = 1;
  std::size_t n_buses = 3;
  std::map<std::string, SiteTechSpec> techs;  // keyed by W_on, W_off, PV_u, PV_d, ...
  std::size_t horizon = 168;
  double step_hours = 1.0;

  double demand_base = 100.0;      // mean demand per bus, MWh per step
  double demand_amplitude = 0.3;   // relative diurnal swing
  double demand_noise = 0.05;

  Topology topology = Topology::Ring;
  std::size_t extra_edges = 0;
  Range line_kappa0{20.0, 60.0};
  double line_headroom = 200.0;    // kappa_max - kappa0, MW
  double line_zeta_per_km = 400.0;
  double dc_threshold_km = 600.0;  // longer lines are DC

  double lat_min = 40.0, lat_max = 55.0, lon_min = -5.0, lon_max = 20.0;
  double site_spread_km = 150.0;
  double correlation_length_km = 400.0;
  double wind_persistence = 0.9;   // AR(1) coefficient of the wind field

  std::size_t gens_per_bus = 1;
  double gen_kappa0_share = 0.3;   // existing capacity as a share of demand_base
  double gen_kappa_max_share = 2.0;
  double gen_zeta = 70000.0;
  double gen_theta_f = 15000.0;
  double gen_theta_v = 80.0;

  std::size_t storage_per_bus = 1;
  double storage_kappa_max = 400.0;  // MWh
  double storage_phi = 0.25;
  double storage_zeta = 25000.0;
  double storage_eta = 0.92;

  double theta_e = 3000.0;
  double omega = 0.0;  // 0: horizon hours / 8760

  /// Wind onshore/offshore and utility/distributed PV with plausible costs.
  static GenSpec with_default_techs();
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws SpecError for degenerate specs (horizon < 24, zero buses, inverted
/// ranges, non-positive step or correlation length, ...).
void validate_spec(const GenSpec& spec);

/// Deterministic for a given spec; the result passes validate_instance.
SystemInstance generate(const GenSpec& spec);

/// Correlated wind capacity factors for points (lat, lon): a Gaussian field
/// with covariance exp(-d / length_km), AR(1) in time, squashed to [0,1].
std::vector<std::vector<double>> wind_series(const std::vector<std::pair<double, double>>& points,
                                             std::size_t steps, double length_km, double persistence,
                                             std::uint64_t seed);

/// Clear-sky solar shape: zero before 06:00 and after 18:00.
double solar_shape(double hour_of_day);

}  // namespace respan
