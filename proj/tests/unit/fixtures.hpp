#pragma once

// Small hand-built instances shared by the unit tests.

#include <string>
#include <vector>

#include "respan/system_model.hpp"

namespace respan::testing {

inline SystemInstance empty_instance(std::size_t T) {
  SystemInstance inst;
  inst.params.horizon_len = T;
  inst.params.step_hours = 1.0;
  inst.params.omega = 1.0;
  inst.params.theta_e = 1.0e4;
  return inst;
}

inline CandidateSite site(const std::string& id, const std::string& bus, std::vector<double> cf,
                          double kappa_max, double zeta = 100.0, const std::string& tech = "W_on",
                          double lat = 0.0, double lon = 0.0) {
  CandidateSite s;
  s.id = id;
  s.bus = bus;
  s.tech = tech;
  s.lat = lat;
  s.lon = lon;
  s.kappa_max = kappa_max;
  s.zeta = zeta;
  s.cf = std::move(cf);
  return s;
}

inline Line line(const std::string& id, const std::string& from, const std::string& to, double kappa0,
                 double kappa_max, double theta_v = 0.1, double zeta = 10.0) {
  Line l;
  l.id = id;
  l.from_bus = from;
  l.to_bus = to;
  l.kappa0 = kappa0;
  l.kappa_max = kappa_max;
  l.length_km = 100.0;
  l.zeta = zeta;
  l.theta_v = theta_v;
  return l;
}

inline ConventionalGen gen(const std::string& id, const std::string& bus, double kappa0, double kappa_max,
                           double zeta, double theta_v) {
  ConventionalGen g;
  g.id = id;
  g.bus = bus;
  g.tech = "CCGT";
  g.kappa0 = kappa0;
  g.kappa_max = kappa_max;
  g.zeta = zeta;
  g.theta_v = theta_v;
  return g;
}

inline StorageUnit storage(const std::string& id, const std::string& bus, double kappa_max, double zeta,
                           double eta = 0.9) {
  StorageUnit u;
  u.id = id;
  u.bus = bus;
  u.tech = "BAT";
  u.kappa_max = kappa_max;
  u.phi = 0.25;
  u.eta_sd = 0.99;
  u.eta_c = eta;
  u.eta_d = eta;
  u.zeta = zeta;
  u.theta_v = 0.01;
  return u;
}

/// One bus, one site, T steps of flat demand.
inline SystemInstance one_bus(std::size_t T, std::vector<double> cf, double kappa_max, double demand) {
  auto inst = empty_instance(T);
  inst.buses.push_back({"N1", "north"});
  inst.sites.push_back(site("S1", "N1", std::move(cf), kappa_max));
  inst.demands.push_back({"N1", std::vector<double>(T, demand)});
  return inst;
}

/// Two buses joined by a line; a cheap site at N1 and demand only at N2.
inline SystemInstance two_bus_export(std::size_t T) {
  auto inst = empty_instance(T);
  inst.buses.push_back({"N1", "north"});
  inst.buses.push_back({"N2", "south"});
  inst.lines.push_back(line("L1", "N1", "N2", 0.0, 100.0, 0.5, 5.0));
  inst.sites.push_back(site("S1", "N1", std::vector<double>(T, 0.8), 200.0, 50.0));
  inst.demands.push_back({"N2", std::vector<double>(T, 20.0)});
  return inst;
}

/// Every asset family present: 2 buses, 3 sites, a generator, storage and a
/// line, with a solar-like diurnal site so storage is used.
inline SystemInstance small_system(std::size_t T = 12) {
  auto inst = empty_instance(T);
  inst.params.omega = static_cast<double>(T) / 8760.0;
  inst.params.theta_e = 3000.0;
  inst.buses.push_back({"N1", "north"});
  inst.buses.push_back({"N2", "south"});
  inst.lines.push_back(line("L1", "N1", "N2", 5.0, 60.0, 0.2, 2000.0));
  std::vector<double> solar(T), wind(T), wind2(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double h = static_cast<double>(t % 12);
    solar[t] = (h >= 3 && h <= 8) ? 0.2 + 0.1 * static_cast<double>(h < 6 ? h - 3 : 8 - h) : 0.0;
    wind[t] = 0.3 + 0.2 * static_cast<double>((t * 7) % 5) / 4.0;
    wind2[t] = 0.2 + 0.3 * static_cast<double>((t * 3) % 4) / 3.0;
  }
  inst.sites.push_back(site("S1", "N1", solar, 80.0, 40000.0, "PV_u", 45.0, 7.0));
  inst.sites.push_back(site("S2", "N1", wind, 60.0, 90000.0, "W_on", 45.5, 7.5));
  inst.sites.push_back(site("S3", "N2", wind2, 60.0, 85000.0, "W_on", 44.0, 9.0));
  inst.generators.push_back(gen("G1", "N2", 10.0, 80.0, 60000.0, 70.0));
  inst.storages.push_back(storage("E1", "N1", 100.0, 20000.0));
  std::vector<double> d1(T), d2(T);
  for (std::size_t t = 0; t < T; ++t) {
    d1[t] = 15.0 + 5.0 * static_cast<double>(t % 3);
    d2[t] = 25.0 + 4.0 * static_cast<double>((t + 1) % 4);
  }
  inst.demands.push_back({"N1", d1});
  inst.demands.push_back({"N2", d2});
  return inst;
}

}  // namespace respan::testing
