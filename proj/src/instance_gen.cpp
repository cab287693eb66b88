#include "respan/instance_gen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "respan/metrics.hpp"

namespace respan {

const char* to_string(Topology t) {
  switch (t) {
    case Topology::Ring: return "ring";
    case Topology::Star: return "star";
    case Topology::Tree: return "tree";
  }
  return "ring";
}

Topology topology_from_string(const std::string& s) {
  if (s == "ring") return Topology::Ring;
  if (s == "star") return Topology::Star;
  if (s == "tree") return Topology::Tree;
  throw SpecError("unknown topology '" + s + "' (expected ring, star or tree)");
}

GenSpec GenSpec::with_default_techs() {
  GenSpec s;
  s.techs["W_on"] = {2, {60.0, 180.0}, {95000.0, 125000.0}, 12000.0, 1.0, 0.0};
  s.techs["W_off"] = {1, {100.0, 300.0}, {180000.0, 230000.0}, 25000.0, 1.5, 120.0};
  s.techs["PV_u"] = {2, {50.0, 150.0}, {45000.0, 60000.0}, 8000.0, 0.5, 0.0};
  s.techs["PV_d"] = {1, {10.0, 40.0}, {70000.0, 90000.0}, 10000.0, 0.5, 0.0};
  return s;
}

namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

bool is_wind(const std::string& tech) { return tech.rfind("W", 0) == 0; }

void check_range(const Range& r, const std::string& what) {
  if (!(r.lo >= 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
    throw SpecError(what + ": range must satisfy 0 <= lo <= hi < inf");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd correlation_factor(const std::vector<std::pair<double, double>>& points, double length_km) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = points[static_cast<std::size_t>(i)];
      const auto& b = points[static_cast<std::size_t>(j)];
      c(i, j) = std::exp(-haversine_km(a.first, a.second, b.first, b.second) / length_km);
    }
  // Co-located points make the matrix singular; add jitter until it factors.
  for (double jitter = 1e-10; jitter < 1.0; jitter *= 10.0) {
    Eigen::MatrixXd m = c;
    m.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw SpecError("wind correlation matrix could not be factored");
}

// Latent standard-normal field: each column is one point, stationary AR(1) in time.
std::vector<std::vector<double>> wind_latent(const std::vector<std::pair<double, double>>& points,
                                             std::size_t steps, double length_km, double persistence,
                                             std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(steps, 0.0));
  if (n == 0) return out;
  const Eigen::MatrixXd factor = correlation_factor(points, length_km);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - persistence * persistence);

  Eigen::VectorXd eps(static_cast<Eigen::Index>(n));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < steps; ++t) {
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
    const Eigen::VectorXd shock = factor * eps;
    z = t == 0 ? shock : Eigen::VectorXd(persistence * z + innovation * shock);
    for (std::size_t i = 0; i < n; ++i) out[i][t] = z(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::pair<double, double> offset_point(double lat, double lon, double km_north, double km_east) {
  const double dlat = km_north / kKmPerDegree;
  const double dlon = km_east / (kKmPerDegree * std::max(0.1, std::cos(lat * std::numbers::pi / 180.0)));
  return {lat + dlat, lon + dlon};
}

// Rounds to a number of decimals; dividing by an exact power of ten keeps the
// written form short.
double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace

void validate_spec(const GenSpec& spec) {
  if (spec.n_buses == 0) throw SpecError("n_buses must be >= 1");
  if (spec.horizon < 24) throw SpecError("horizon must be >= 24 steps");
  if (!(spec.step_hours > 0.0) || !std::isfinite(spec.step_hours)) throw SpecError("step_hours must be > 0");
  if (!(spec.correlation_length_km > 0.0)) throw SpecError("correlation_length_km must be > 0");
  if (!(spec.wind_persistence >= 0.0 && spec.wind_persistence < 1.0))
    throw SpecError("wind_persistence must lie in [0, 1)");
  if (!(spec.demand_base > 0.0)) throw SpecError("demand_base must be > 0");
  if (!(spec.demand_amplitude >= 0.0 && spec.demand_amplitude < 1.0))
    throw SpecError("demand_amplitude must lie in [0, 1)");
  if (!(spec.demand_noise >= 0.0 && spec.demand_noise < 0.5)) throw SpecError("demand_noise must lie in [0, 0.5)");
  if (!(spec.lat_min < spec.lat_max) || !(spec.lon_min < spec.lon_max) || spec.lat_min < -80.0 ||
      spec.lat_max > 80.0)
    throw SpecError("bounding box must satisfy lat_min < lat_max (within +-80) and lon_min < lon_max");
  if (!(spec.site_spread_km >= 0.0)) throw SpecError("site_spread_km must be >= 0");
  check_range(spec.line_kappa0, "line_kappa0");
  if (!(spec.line_headroom >= 0.0) || !(spec.line_zeta_per_km >= 0.0))
    throw SpecError("line_headroom and line_zeta_per_km must be >= 0");
  if (!(spec.gen_kappa0_share >= 0.0) || !(spec.gen_kappa_max_share >= spec.gen_kappa0_share))
    throw SpecError("generator shares must satisfy 0 <= kappa0 share <= kappa_max share");
  if (!(spec.storage_kappa_max >= 0.0) || !(spec.storage_phi > 0.0) ||
      !(spec.storage_eta > 0.0 && spec.storage_eta <= 1.0))
    throw SpecError("storage parameters out of range");
  if (!(spec.theta_e > 0.0) || !(spec.omega >= 0.0)) throw SpecError("theta_e must be > 0 and omega >= 0");
  for (const auto& [tech, t] : spec.techs) {
    if (tech.empty() || tech.find_first_of(" \t\r\n,") != std::string::npos)
      throw SpecError("technology tag '" + tech + "' must be non-empty without whitespace or commas");
    check_range(t.kappa_max, tech + ".kappa_max");
    check_range(t.zeta, tech + ".zeta");
    if (!(t.theta_f >= 0.0) || !(t.theta_v >= 0.0)) throw SpecError(tech + ": costs must be >= 0");
  }
}

double solar_shape(double hour_of_day) {
  return std::max(0.0, std::sin(2.0 * std::numbers::pi * (hour_of_day - 6.0) / 24.0));
}

std::vector<std::vector<double>> wind_series(const std::vector<std::pair<double, double>>& points,
                                             std::size_t steps, double length_km, double persistence,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto z = wind_latent(points, steps, length_km, persistence, rng);
  for (auto& row : z)
    for (auto& v : row) v = logistic(-0.6 + 1.4 * v);
  return z;
}

SystemInstance generate(const GenSpec& spec) {
  validate_spec(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  const std::size_t B = spec.n_buses;
  const std::size_t T = spec.horizon;
  SystemInstance inst;
  inst.params.horizon_len = T;
  inst.params.step_hours = spec.step_hours;
  inst.params.theta_e = spec.theta_e;
  inst.params.omega = spec.omega > 0.0 ? spec.omega : static_cast<double>(T) * spec.step_hours / 8760.0;

  std::vector<std::pair<double, double>> bus_pos;
  std::vector<double> bus_demand;
  for (std::size_t b = 0; b < B; ++b) {
    inst.buses.push_back({"B" + std::to_string(b + 1), "bus " + std::to_string(b + 1)});
    bus_pos.emplace_back(draw({spec.lat_min, spec.lat_max}), draw({spec.lon_min, spec.lon_max}));
    bus_demand.push_back(spec.demand_base * draw({0.7, 1.3}));
  }

  std::set<std::pair<std::size_t, std::size_t>> edges;
  auto connect = [&](std::size_t a, std::size_t b) {
    if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
  };
  for (std::size_t b = 1; b < B; ++b) {
    switch (spec.topology) {
      case Topology::Ring: connect(b - 1, b); break;
      case Topology::Star: connect(0, b); break;
      case Topology::Tree: connect(static_cast<std::size_t>(unit(rng) * static_cast<double>(b)), b); break;
    }
  }
  if (spec.topology == Topology::Ring && B >= 3) connect(B - 1, 0);
  const std::size_t max_edges = B * (B - 1) / 2;
  for (std::size_t k = 0; k < spec.extra_edges && edges.size() < max_edges; ++k) {
    std::size_t before = edges.size();
    while (edges.size() == before) {
      const auto a = static_cast<std::size_t>(unit(rng) * static_cast<double>(B));
      const auto c = static_cast<std::size_t>(unit(rng) * static_cast<double>(B));
      connect(std::min(a, B - 1), std::min(c, B - 1));
    }
  }
  std::size_t line_no = 0;
  for (const auto& [a, b] : edges) {
    Line l;
    l.id = "L" + std::to_string(++line_no);
    l.from_bus = inst.buses[a].id;
    l.to_bus = inst.buses[b].id;
    l.length_km = round_to(
        haversine_km(bus_pos[a].first, bus_pos[a].second, bus_pos[b].first, bus_pos[b].second), 1);
    l.kind = l.length_km > spec.dc_threshold_km ? LineKind::DC : LineKind::AC;
    l.kappa0 = round_to(draw(spec.line_kappa0), 1);
    l.kappa_max = l.kappa0 + spec.line_headroom;
    l.zeta = spec.line_zeta_per_km * std::max(1.0, l.length_km);
    l.theta_f = 0.02 * l.zeta;
    l.theta_v = 0.01;
    inst.lines.push_back(l);
  }

  // Site placement first, so wind points are known before the field is drawn.
  for (std::size_t b = 0; b < B; ++b) {
    for (const auto& [tech, ts] : spec.techs) {
      const auto centre = offset_point(bus_pos[b].first, bus_pos[b].second, ts.offset_km, 0.0);
      for (std::size_t k = 0; k < ts.per_bus; ++k) {
        CandidateSite s;
        s.id = inst.buses[b].id + "_" + tech + "_" + std::to_string(k + 1);
        s.bus = inst.buses[b].id;
        s.tech = tech;
        const double r = spec.site_spread_km * std::sqrt(unit(rng));
        const double ang = 2.0 * std::numbers::pi * unit(rng);
        const auto p = offset_point(centre.first, centre.second, r * std::cos(ang), r * std::sin(ang));
        s.lat = round_to(p.first, 4);
        s.lon = round_to(p.second, 4);
        s.kappa_max = round_to(draw(ts.kappa_max), 1);
        s.zeta = round_to(draw(ts.zeta), 0);
        s.theta_f = ts.theta_f;
        s.theta_v = ts.theta_v;
        inst.sites.push_back(std::move(s));
      }
    }
  }

  std::vector<std::size_t> wind_idx;
  std::vector<std::pair<double, double>> wind_pts;
  for (std::size_t i = 0; i < inst.sites.size(); ++i)
    if (is_wind(inst.sites[i].tech)) {
      wind_idx.push_back(i);
      wind_pts.emplace_back(inst.sites[i].lat, inst.sites[i].lon);
    }
  const auto latent = wind_latent(wind_pts, T, spec.correlation_length_km, spec.wind_persistence, rng);
  for (std::size_t w = 0; w < wind_idx.size(); ++w) {
    auto& s = inst.sites[wind_idx[w]];
    const double bias = s.tech == "W_off" ? -0.1 : -0.6;
    s.cf.resize(T);
    for (std::size_t t = 0; t < T; ++t) s.cf[t] = round_to(logistic(bias + 1.4 * latent[w][t]), 4);
  }

  // Solar: shared daily cloudiness per bus, slight per-site jitter.
  const std::size_t days = static_cast<std::size_t>(std::ceil(static_cast<double>(T) * spec.step_hours / 24.0)) + 1;
  std::vector<std::vector<double>> cloud(B, std::vector<double>(days));
  for (auto& row : cloud)
    for (auto& c : row) c = draw({0.45, 1.0});
  for (auto& s : inst.sites) {
    if (is_wind(s.tech)) continue;
    const std::size_t b = inst.bus_index(s.bus);
    const double peak = (s.tech == "PV_d" ? 0.75 : 0.85) * draw({0.95, 1.0});
    s.cf.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double hours = static_cast<double>(t) * spec.step_hours;
      const auto day = static_cast<std::size_t>(hours / 24.0);
      s.cf[t] = round_to(peak * cloud[b][day] * solar_shape(std::fmod(hours, 24.0)), 4);
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t b = 0; b < B; ++b) {
    DemandSeries d;
    d.bus = inst.buses[b].id;
    d.lambda.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double hours = static_cast<double>(t) * spec.step_hours;
      const double h = std::fmod(hours, 24.0);
      const auto day = static_cast<std::size_t>(hours / 24.0) % 7;
      const double weekly = day >= 5 ? 0.9 : 1.0;
      const double shape = 1.0 + spec.demand_amplitude * std::sin(2.0 * std::numbers::pi * (h - 12.0) / 24.0);
      const double eps = std::clamp(spec.demand_noise * noise(rng), -0.5, 0.5);
      d.lambda[t] = round_to(bus_demand[b] * spec.step_hours * weekly * shape * (1.0 + eps), 3);
    }
    inst.demands.push_back(std::move(d));
  }

  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t k = 0; k < spec.gens_per_bus; ++k) {
      ConventionalGen g;
      g.id = inst.buses[b].id + "_CCGT_" + std::to_string(k + 1);
      g.bus = inst.buses[b].id;
      g.tech = "CCGT";
      g.kappa0 = round_to(spec.gen_kappa0_share * bus_demand[b], 1);
      g.kappa_max = round_to(spec.gen_kappa_max_share * bus_demand[b], 1);
      g.zeta = spec.gen_zeta;
      g.theta_f = spec.gen_theta_f;
      g.theta_v = spec.gen_theta_v;
      inst.generators.push_back(g);
    }
    for (std::size_t k = 0; k < spec.storage_per_bus; ++k) {
      StorageUnit u;
      u.id = inst.buses[b].id + "_BAT_" + std::to_string(k + 1);
      u.bus = inst.buses[b].id;
      u.tech = "BAT";
      u.kappa_max = spec.storage_kappa_max;
      u.phi = spec.storage_phi;
      u.eta_sd = 0.999;
      u.eta_c = spec.storage_eta;
      u.eta_d = spec.storage_eta;
      u.zeta = spec.storage_zeta;
      u.theta_f = 0.0;
      u.theta_v = 0.5;
      inst.storages.push_back(u);
    }
  }

  if (auto v = validate_instance(inst); !v.empty())
    throw SpecError("generated instance is invalid: " + describe(v.front()));
  return inst;
}

}  // namespace respan
