#include "respan/system_model.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

namespace respan {

std::size_t SystemInstance::bus_index(const std::string& id) const {
  for (std::size_t b = 0; b < buses.size(); ++b)
    if (buses[b].id == id) return b;
  throw std::out_of_range("unknown bus '" + id + "'");
}

const DemandSeries* SystemInstance::demand_of(std::size_t b) const {
  for (const auto& d : demands)
    if (d.bus == buses[b].id) return &d;
  return nullptr;
}

SolvedDesign SolvedDesign::zeros(const SystemInstance& inst) {
  const std::size_t T = inst.horizon();
  auto series = [T](std::size_t n) { return std::vector<std::vector<double>>(n, std::vector<double>(T, 0.0)); };
  SolvedDesign d;
  d.site_capacity.assign(inst.sites.size(), 0.0);
  d.site_output = series(inst.sites.size());
  d.gen_capacity.assign(inst.generators.size(), 0.0);
  d.gen_output = series(inst.generators.size());
  d.storage_capacity.assign(inst.storages.size(), 0.0);
  d.storage_charge = series(inst.storages.size());
  d.storage_discharge = series(inst.storages.size());
  d.storage_energy = series(inst.storages.size());
  d.line_capacity.assign(inst.lines.size(), 0.0);
  d.line_flow = series(inst.lines.size());
  d.unserved = series(inst.buses.size());
  return d;
}

std::string describe(const Violation& v) { return v.entity + ": " + v.field + ": " + v.rule; }

namespace {

class Checker {
 public:
  explicit Checker(const SystemInstance& inst) : inst_(inst) {
    for (const auto& b : inst.buses) bus_ids_.insert(b.id);
  }

  void add(std::string entity, std::string field, std::string rule) {
    out_.push_back({std::move(entity), std::move(field), std::move(rule)});
  }

  void id(const std::string& kind, const std::string& id, std::unordered_set<std::string>& seen) {
    const std::string entity = kind + " '" + id + "'";
    if (id.empty()) add(kind, "id", "empty id");
    for (char c : id)
      if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        add(entity, "id", "id contains whitespace or comma");
        break;
      }
    if (!seen.insert(id).second) add(entity, "id", "duplicate id");
  }

  void bus_ref(const std::string& entity, const std::string& field, const std::string& bus) {
    if (!bus_ids_.count(bus)) add(entity, field, "unknown bus '" + bus + "'");
  }

  void capacity(const std::string& entity, double k0, double kmax) {
    if (!(std::isfinite(k0) && k0 >= 0.0)) add(entity, "kappa0", "kappa0 must be finite and >= 0");
    if (!(std::isfinite(kmax) && kmax >= k0)) add(entity, "kappa_max", "kappa_max must be >= kappa0");
  }

  void finite(const std::string& entity, const std::string& field, double v) {
    if (!std::isfinite(v)) add(entity, field, "not finite");
  }

  void series_length(const std::string& entity, const std::string& field, std::size_t len) {
    if (len != inst_.horizon())
      add(entity, field,
          "length mismatch: " + std::to_string(len) + " != horizon " + std::to_string(inst_.horizon()));
  }

  std::vector<Violation> take() { return std::move(out_); }

 private:
  const SystemInstance& inst_;
  std::set<std::string> bus_ids_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_instance(const SystemInstance& inst) {
  Checker c(inst);
  const auto& p = inst.params;
  if (p.horizon_len < 1) c.add("params", "horizon_len", "horizon_len must be >= 1");
  if (!(p.omega > 0.0) || !std::isfinite(p.omega)) c.add("params", "omega", "omega must be > 0");
  if (!(p.theta_e > 0.0) || !std::isfinite(p.theta_e)) c.add("params", "theta_e", "theta_e must be > 0");
  if (!(p.step_hours > 0.0) || !std::isfinite(p.step_hours))
    c.add("params", "step_hours", "step_hours must be > 0");

  std::unordered_set<std::string> seen;
  for (const auto& b : inst.buses) c.id("bus", b.id, seen);

  seen.clear();
  for (const auto& l : inst.lines) {
    const std::string e = "line '" + l.id + "'";
    c.id("line", l.id, seen);
    c.bus_ref(e, "from_bus", l.from_bus);
    c.bus_ref(e, "to_bus", l.to_bus);
    if (l.from_bus == l.to_bus) c.add(e, "to_bus", "from_bus equals to_bus");
    c.capacity(e, l.kappa0, l.kappa_max);
    if (!(l.length_km >= 0.0)) c.add(e, "length_km", "length must be >= 0");
    c.finite(e, "zeta", l.zeta);
    c.finite(e, "theta_f", l.theta_f);
    c.finite(e, "theta_v", l.theta_v);
  }

  seen.clear();
  for (const auto& s : inst.sites) {
    const std::string e = "site '" + s.id + "'";
    c.id("site", s.id, seen);
    c.bus_ref(e, "bus", s.bus);
    if (s.tech.empty()) c.add(e, "tech", "missing technology");
    if (!(s.lat >= -90.0 && s.lat <= 90.0)) c.add(e, "lat", "latitude out of [-90,90]");
    if (!(s.lon >= -180.0 && s.lon <= 180.0)) c.add(e, "lon", "longitude out of [-180,180]");
    c.capacity(e, s.kappa0, s.kappa_max);
    c.finite(e, "zeta", s.zeta);
    c.finite(e, "theta_f", s.theta_f);
    c.finite(e, "theta_v", s.theta_v);
    c.series_length(e, "cf", s.cf.size());
    for (std::size_t t = 0; t < s.cf.size(); ++t) {
      if (!(s.cf[t] >= 0.0 && s.cf[t] <= 1.0)) {
        c.add(e, "cf", "cf out of [0,1] at t=" + std::to_string(t));
        break;
      }
    }
  }

  seen.clear();
  for (const auto& g : inst.generators) {
    const std::string e = "generator '" + g.id + "'";
    c.id("generator", g.id, seen);
    c.bus_ref(e, "bus", g.bus);
    c.capacity(e, g.kappa0, g.kappa_max);
    c.finite(e, "zeta", g.zeta);
    c.finite(e, "theta_f", g.theta_f);
    c.finite(e, "theta_v", g.theta_v);
  }

  seen.clear();
  for (const auto& s : inst.storages) {
    const std::string e = "storage '" + s.id + "'";
    c.id("storage", s.id, seen);
    c.bus_ref(e, "bus", s.bus);
    c.capacity(e, s.kappa0, s.kappa_max);
    if (!(s.phi > 0.0) || !std::isfinite(s.phi)) c.add(e, "phi", "phi must be > 0");
    if (!(s.eta_c > 0.0 && s.eta_c <= 1.0)) c.add(e, "eta_c", "efficiency out of (0,1]");
    if (!(s.eta_d > 0.0 && s.eta_d <= 1.0)) c.add(e, "eta_d", "efficiency out of (0,1]");
    if (!(s.eta_sd > 0.0 && s.eta_sd <= 1.0)) c.add(e, "eta_sd", "efficiency out of (0,1]");
    c.finite(e, "zeta", s.zeta);
    c.finite(e, "theta_f", s.theta_f);
    c.finite(e, "theta_v", s.theta_v);
  }

  seen.clear();
  for (const auto& d : inst.demands) {
    const std::string e = "demand '" + d.bus + "'";
    c.bus_ref(e, "bus", d.bus);
    if (!seen.insert(d.bus).second) c.add(e, "bus", "duplicate demand series for bus");
    c.series_length(e, "lambda", d.lambda.size());
    for (std::size_t t = 0; t < d.lambda.size(); ++t) {
      if (!(d.lambda[t] >= 0.0) || !std::isfinite(d.lambda[t])) {
        c.add(e, "lambda", "negative or non-finite demand at t=" + std::to_string(t));
        break;
      }
    }
  }
  return c.take();
}

void check_dimensions(const SolvedDesign& d, const SystemInstance& inst) {
  const std::size_t T = inst.horizon();
  auto series_ok = [T](const std::vector<std::vector<double>>& s, std::size_t n) {
    if (s.size() != n) return false;
    for (const auto& v : s)
      if (v.size() != T) return false;
    return true;
  };
  bool ok = d.site_capacity.size() == inst.sites.size() && series_ok(d.site_output, inst.sites.size()) &&
            d.gen_capacity.size() == inst.generators.size() &&
            series_ok(d.gen_output, inst.generators.size()) &&
            d.storage_capacity.size() == inst.storages.size() &&
            series_ok(d.storage_charge, inst.storages.size()) &&
            series_ok(d.storage_discharge, inst.storages.size()) &&
            series_ok(d.storage_energy, inst.storages.size()) &&
            d.line_capacity.size() == inst.lines.size() && series_ok(d.line_flow, inst.lines.size()) &&
            series_ok(d.unserved, inst.buses.size());
  if (!ok) throw DimensionError("design dimensions do not match the instance");
}

double total_cost(const SolvedDesign& d, const SystemInstance& inst) {
  check_dimensions(d, inst);
  const std::size_t T = inst.horizon();

  double invest = 0.0;
  for (std::size_t i = 0; i < inst.sites.size(); ++i)
    invest += (inst.sites[i].zeta + inst.sites[i].theta_f) * d.site_capacity[i];
  for (std::size_t i = 0; i < inst.generators.size(); ++i)
    invest += (inst.generators[i].zeta + inst.generators[i].theta_f) * d.gen_capacity[i];
  for (std::size_t i = 0; i < inst.storages.size(); ++i)
    invest += (inst.storages[i].zeta + inst.storages[i].theta_f) * d.storage_capacity[i];
  for (std::size_t i = 0; i < inst.lines.size(); ++i)
    invest += (inst.lines[i].zeta + inst.lines[i].theta_f) * d.line_capacity[i];

  double operating = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < inst.lines.size(); ++i)
      operating += inst.lines[i].theta_v * std::abs(d.line_flow[i][t]);
    for (std::size_t i = 0; i < inst.sites.size(); ++i)
      operating += inst.sites[i].theta_v * d.site_output[i][t];
    for (std::size_t i = 0; i < inst.generators.size(); ++i)
      operating += inst.generators[i].theta_v * std::abs(d.gen_output[i][t]);
    for (std::size_t i = 0; i < inst.storages.size(); ++i)
      operating += inst.storages[i].theta_v * (d.storage_charge[i][t] + d.storage_discharge[i][t]);
    for (std::size_t b = 0; b < inst.buses.size(); ++b)
      operating += inst.params.theta_e * d.unserved[b][t];
  }
  return inst.params.omega * invest + operating;
}

}  // namespace respan
