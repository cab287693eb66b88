#include "respan/flp_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace respan {

namespace {

std::string summarize(const std::vector<Violation>& v) {
  std::string msg = "instance validation failed (" + std::to_string(v.size()) + " violation" +
                    (v.size() == 1 ? "" : "s") + ")";
  for (std::size_t i = 0; i < v.size() && i < 5; ++i) msg += "\n  " + describe(v[i]);
  if (v.size() > 5) msg += "\n  ...";
  return msg;
}

std::string idx_name(const char* family, const std::string& id, std::size_t t) {
  std::string s(family);
  s += '[';
  s += id;
  s += ',';
  s += std::to_string(t);
  s += ']';
  return s;
}

std::string cap_name(const char* family, const std::string& id) {
  return std::string(family) + "[" + id + "]";
}

double new_capacity_ub(double kappa0, double kappa_max, bool sizable) {
  return sizable ? std::max(0.0, kappa_max - kappa0) : 0.0;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

void require_valid(const SystemInstance& inst) {
  auto v = validate_instance(inst);
  if (!v.empty()) throw ValidationError(std::move(v));
}

BuiltLp build_flp(const SystemInstance& inst, const BuildOptions& opts) {
  return build_flp_restricted(inst, std::vector<bool>(inst.sites.size(), true), opts);
}

BuiltLp build_flp_restricted(const SystemInstance& inst, const std::vector<bool>& keep_site,
                             const BuildOptions& opts) {
  require_valid(inst);
  if (keep_site.size() != inst.sites.size())
    throw std::invalid_argument("site selection size does not match the instance");

  const std::size_t T = inst.horizon();
  const std::size_t B = inst.buses.size();
  const double dt = inst.params.step_hours;
  const double w = inst.params.omega;

  BuiltLp out;
  LpProblem& lp = out.lp;
  VarMap& vm = out.vars;

  // capacity variables
  vm.site_capacity.assign(inst.sites.size(), std::nullopt);
  vm.site_output.assign(inst.sites.size(), {});
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!keep_site[i]) continue;
    const auto& s = inst.sites[i];
    vm.site_capacity[i] = lp.add_var(cap_name("K_site", s.id), 0.0,
                                     new_capacity_ub(s.kappa0, s.kappa_max, true),
                                     w * (s.zeta + s.theta_f));
  }
  for (const auto& g : inst.generators)
    vm.gen_capacity.push_back(lp.add_var(cap_name("K_gen", g.id), 0.0,
                                         new_capacity_ub(g.kappa0, g.kappa_max, g.sizable),
                                         w * (g.zeta + g.theta_f)));
  for (const auto& s : inst.storages)
    vm.storage_capacity.push_back(lp.add_var(cap_name("K_sto", s.id), 0.0,
                                             new_capacity_ub(s.kappa0, s.kappa_max, s.sizable),
                                             w * (s.zeta + s.theta_f)));
  for (const auto& l : inst.lines)
    vm.line_capacity.push_back(lp.add_var(cap_name("K_line", l.id), 0.0,
                                          new_capacity_ub(l.kappa0, l.kappa_max, true),
                                          w * (l.zeta + l.theta_f)));

  // dispatch variables
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!keep_site[i]) continue;
    const auto& s = inst.sites[i];
    auto& v = vm.site_output[i];
    for (std::size_t t = 0; t < T; ++t) v.push_back(lp.add_var(idx_name("p_site", s.id, t), 0.0, kInf, s.theta_v));
  }
  vm.gen_output.resize(inst.generators.size());
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    for (std::size_t t = 0; t < T; ++t)
      vm.gen_output[i].push_back(lp.add_var(idx_name("p_gen", g.id, t), 0.0, kInf, g.theta_v));
  }
  const std::size_t S = inst.storages.size();
  vm.storage_charge.resize(S);
  vm.storage_discharge.resize(S);
  vm.storage_energy.resize(S);
  for (std::size_t i = 0; i < S; ++i) {
    const auto& s = inst.storages[i];
    for (std::size_t t = 0; t < T; ++t) {
      vm.storage_charge[i].push_back(lp.add_var(idx_name("p_ch", s.id, t), 0.0, kInf, s.theta_v));
      vm.storage_discharge[i].push_back(lp.add_var(idx_name("p_dis", s.id, t), 0.0, kInf, s.theta_v));
      vm.storage_energy[i].push_back(lp.add_var(idx_name("e", s.id, t), 0.0, kInf, 0.0));
    }
  }
  const std::size_t L = inst.lines.size();
  vm.line_forward.resize(L);
  vm.line_backward.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    const auto& l = inst.lines[i];
    for (std::size_t t = 0; t < T; ++t) {
      vm.line_forward[i].push_back(lp.add_var(idx_name("p_fwd", l.id, t), 0.0, kInf, l.theta_v));
      vm.line_backward[i].push_back(lp.add_var(idx_name("p_bwd", l.id, t), 0.0, kInf, l.theta_v));
    }
  }
  vm.unserved.resize(B);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t)
      vm.unserved[b].push_back(
          lp.add_var(idx_name("p_e", inst.buses[b].id, t), 0.0, kInf, inst.params.theta_e));

  // incidence
  std::vector<std::vector<std::size_t>> bus_sites(B), bus_gens(B), bus_sto(B), bus_in(B), bus_out(B);
  for (std::size_t i = 0; i < inst.sites.size(); ++i)
    if (keep_site[i]) bus_sites[inst.bus_index(inst.sites[i].bus)].push_back(i);
  for (std::size_t i = 0; i < inst.generators.size(); ++i)
    bus_gens[inst.bus_index(inst.generators[i].bus)].push_back(i);
  for (std::size_t i = 0; i < S; ++i) bus_sto[inst.bus_index(inst.storages[i].bus)].push_back(i);
  for (std::size_t i = 0; i < L; ++i) {
    bus_in[inst.bus_index(inst.lines[i].to_bus)].push_back(i);
    bus_out[inst.bus_index(inst.lines[i].from_bus)].push_back(i);
  }

  // energy balance: supply + imports + unserved - charge - exports = demand
  std::vector<Term> terms;
  for (std::size_t b = 0; b < B; ++b) {
    const DemandSeries* dem = inst.demand_of(b);
    for (std::size_t t = 0; t < T; ++t) {
      terms.clear();
      for (auto i : bus_sites[b]) terms.push_back({vm.site_output[i][t], 1.0});
      for (auto i : bus_gens[b]) terms.push_back({vm.gen_output[i][t], 1.0});
      for (auto i : bus_sto[b]) {
        terms.push_back({vm.storage_discharge[i][t], 1.0});
        terms.push_back({vm.storage_charge[i][t], -1.0});
      }
      for (auto i : bus_in[b]) {
        terms.push_back({vm.line_forward[i][t], 1.0});
        terms.push_back({vm.line_backward[i][t], -1.0});
      }
      for (auto i : bus_out[b]) {
        terms.push_back({vm.line_forward[i][t], -1.0});
        terms.push_back({vm.line_backward[i][t], 1.0});
      }
      terms.push_back({vm.unserved[b][t], 1.0});
      const double lambda = dem ? dem->lambda[t] : 0.0;
      lp.add_constraint(terms, lambda, lambda, idx_name("bal", inst.buses[b].id, t));
    }
  }

  // renewable availability and caps
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!keep_site[i]) continue;
    const auto& s = inst.sites[i];
    const VarId k = *vm.site_capacity[i];
    for (std::size_t t = 0; t < T; ++t) {
      const double a = s.cf[t] * dt;
      lp.add_constraint({{vm.site_output[i][t], 1.0}, {k, -a}}, -kInf, a * s.kappa0,
                        idx_name("avail", s.id, t));
    }
    lp.add_constraint({{k, 1.0}}, -kInf, s.kappa_max - s.kappa0, cap_name("cap_site", s.id));
  }

  // conventional generation
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    const VarId k = vm.gen_capacity[i];
    for (std::size_t t = 0; t < T; ++t)
      lp.add_constraint({{vm.gen_output[i][t], 1.0}, {k, -dt}}, -kInf, dt * g.kappa0,
                        idx_name("disp", g.id, t));
    lp.add_constraint({{k, 1.0}}, -kInf, g.kappa_max - g.kappa0, cap_name("cap_gen", g.id));
  }

  // storage
  for (std::size_t i = 0; i < S; ++i) {
    const auto& s = inst.storages[i];
    const VarId k = vm.storage_capacity[i];
    const double pw = s.phi * dt;
    for (std::size_t t = 0; t < T; ++t) {
      lp.add_constraint({{vm.storage_charge[i][t], 1.0}, {k, -pw}}, -kInf, pw * s.kappa0,
                        idx_name("ch_lim", s.id, t));
      lp.add_constraint({{vm.storage_discharge[i][t], 1.0}, {k, -pw}}, -kInf, pw * s.kappa0,
                        idx_name("dis_lim", s.id, t));
      lp.add_constraint({{vm.storage_energy[i][t], 1.0}, {k, -1.0}}, -kInf, s.kappa0,
                        idx_name("e_lim", s.id, t));
      terms.clear();
      terms.push_back({vm.storage_energy[i][t], 1.0});
      if (t > 0)
        terms.push_back({vm.storage_energy[i][t - 1], -s.eta_sd});
      else if (opts.cyclic_storage)
        terms.push_back({vm.storage_energy[i][T - 1], -s.eta_sd});
      terms.push_back({vm.storage_charge[i][t], -s.eta_c});
      terms.push_back({vm.storage_discharge[i][t], 1.0 / s.eta_d});
      lp.add_constraint(terms, 0.0, 0.0, idx_name("soc", s.id, t));
    }
    lp.add_constraint({{k, 1.0}}, -kInf, s.kappa_max - s.kappa0, cap_name("cap_sto", s.id));
  }

  // transmission
  for (std::size_t i = 0; i < L; ++i) {
    const auto& l = inst.lines[i];
    const VarId k = vm.line_capacity[i];
    for (std::size_t t = 0; t < T; ++t)
      lp.add_constraint({{vm.line_forward[i][t], 1.0}, {vm.line_backward[i][t], 1.0}, {k, -dt}},
                        -kInf, dt * l.kappa0, idx_name("flow", l.id, t));
    lp.add_constraint({{k, 1.0}}, -kInf, l.kappa_max - l.kappa0, cap_name("cap_line", l.id));
  }

  return out;
}

ModelSize expected_flp_size(const SystemInstance& inst, const std::vector<bool>& keep_site,
                            const BuildOptions& opts) {
  const std::size_t T = inst.horizon();
  const std::size_t B = inst.buses.size(), G = inst.generators.size(), S = inst.storages.size(),
                    L = inst.lines.size();
  std::size_t R = 0, Z = 0;
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!keep_site[i]) continue;
    ++R;
    for (double c : inst.sites[i].cf)
      if (c * inst.params.step_hours == 0.0) ++Z;
  }
  ModelSize sz;
  sz.variables = R + G + S + L + T * (R + G + 3 * S + 2 * L + B);
  sz.constraints = T * (B + R + G + 4 * S + L) + R + G + S + L;
  sz.nonzeros = T * (3 * R + 3 * G + 12 * S + 7 * L + B) - Z + R + G + S + L - (opts.cyclic_storage ? 0 : S);
  return sz;
}

SolvedDesign extract_design(const SystemInstance& inst, const VarMap& vm, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal)
    throw SolveError(std::string("cannot extract design from a non-optimal solution (") +
                     to_string(sol.status) + ")");
  const auto& x = sol.primal;
  auto val = [&x](VarId v) { return x.at(v.index); };
  auto series = [&](const std::vector<std::vector<VarId>>& ids, std::vector<std::vector<double>>& dst) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t t = 0; t < ids[i].size(); ++t) dst[i][t] = val(ids[i][t]);
  };

  SolvedDesign d = SolvedDesign::zeros(inst);
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!vm.includes_site(i)) continue;
    d.site_capacity[i] = val(*vm.site_capacity[i]);
  }
  series(vm.site_output, d.site_output);
  for (std::size_t i = 0; i < vm.gen_capacity.size(); ++i) d.gen_capacity[i] = val(vm.gen_capacity[i]);
  series(vm.gen_output, d.gen_output);
  for (std::size_t i = 0; i < vm.storage_capacity.size(); ++i)
    d.storage_capacity[i] = val(vm.storage_capacity[i]);
  series(vm.storage_charge, d.storage_charge);
  series(vm.storage_discharge, d.storage_discharge);
  series(vm.storage_energy, d.storage_energy);
  for (std::size_t i = 0; i < vm.line_capacity.size(); ++i) d.line_capacity[i] = val(vm.line_capacity[i]);
  for (std::size_t i = 0; i < vm.line_forward.size(); ++i)
    for (std::size_t t = 0; t < vm.line_forward[i].size(); ++t)
      d.line_flow[i][t] = val(vm.line_forward[i][t]) - val(vm.line_backward[i][t]);
  series(vm.unserved, d.unserved);

  d.objective = sol.objective;
  d.stats.iterations = sol.iterations;
  d.stats.wall_seconds = sol.wall_seconds;
  return d;
}

double ResidualReport::max() const {
  return std::max({balance, site_availability, site_capacity, gen_dispatch, gen_capacity, storage_power,
                   storage_energy, soc, storage_capacity, line_flow, line_capacity, negativity});
}

ResidualReport check_design(const SystemInstance& inst, const SolvedDesign& d, const BuildOptions& opts) {
  check_dimensions(d, inst);
  const std::size_t T = inst.horizon();
  const double dt = inst.params.step_hours;
  ResidualReport r;
  auto pos = [](double v) { return std::max(0.0, v); };
  auto neg = [&r](double v) { r.negativity = std::max(r.negativity, -v); };

  std::vector<std::vector<double>> net(inst.buses.size(), std::vector<double>(T, 0.0));
  for (std::size_t b = 0; b < inst.buses.size(); ++b)
    for (std::size_t t = 0; t < T; ++t) {
      net[b][t] = d.unserved[b][t];
      neg(d.unserved[b][t]);
    }

  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    const std::size_t b = inst.bus_index(s.bus);
    const double cap = s.kappa0 + d.site_capacity[i];
    neg(d.site_capacity[i]);
    r.site_capacity = std::max(r.site_capacity, pos(cap - s.kappa_max));
    for (std::size_t t = 0; t < T; ++t) {
      const double p = d.site_output[i][t];
      neg(p);
      r.site_availability = std::max(r.site_availability, pos(p - s.cf[t] * cap * dt));
      net[b][t] += p;
    }
  }
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    const std::size_t b = inst.bus_index(g.bus);
    const double cap = g.kappa0 + d.gen_capacity[i];
    neg(d.gen_capacity[i]);
    r.gen_capacity = std::max(r.gen_capacity, pos(cap - (g.sizable ? g.kappa_max : g.kappa0)));
    for (std::size_t t = 0; t < T; ++t) {
      const double p = d.gen_output[i][t];
      neg(p);
      r.gen_dispatch = std::max(r.gen_dispatch, pos(p - cap * dt));
      net[b][t] += p;
    }
  }
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    const auto& s = inst.storages[i];
    const std::size_t b = inst.bus_index(s.bus);
    const double cap = s.kappa0 + d.storage_capacity[i];
    neg(d.storage_capacity[i]);
    r.storage_capacity = std::max(r.storage_capacity, pos(cap - (s.sizable ? s.kappa_max : s.kappa0)));
    for (std::size_t t = 0; t < T; ++t) {
      const double pc = d.storage_charge[i][t];
      const double pd = d.storage_discharge[i][t];
      const double e = d.storage_energy[i][t];
      neg(pc);
      neg(pd);
      neg(e);
      r.storage_power = std::max({r.storage_power, pos(pc - s.phi * cap * dt), pos(pd - s.phi * cap * dt)});
      r.storage_energy = std::max(r.storage_energy, pos(e - cap));
      double prev = 0.0;
      if (t > 0)
        prev = d.storage_energy[i][t - 1];
      else if (opts.cyclic_storage)
        prev = d.storage_energy[i][T - 1];
      r.soc = std::max(r.soc, std::abs(e - s.eta_sd * prev - s.eta_c * pc + pd / s.eta_d));
      net[b][t] += pd - pc;
    }
  }
  for (std::size_t i = 0; i < inst.lines.size(); ++i) {
    const auto& l = inst.lines[i];
    const std::size_t from = inst.bus_index(l.from_bus);
    const std::size_t to = inst.bus_index(l.to_bus);
    const double cap = l.kappa0 + d.line_capacity[i];
    neg(d.line_capacity[i]);
    r.line_capacity = std::max(r.line_capacity, pos(cap - l.kappa_max));
    for (std::size_t t = 0; t < T; ++t) {
      const double f = d.line_flow[i][t];
      r.line_flow = std::max(r.line_flow, pos(std::abs(f) - cap * dt));
      net[to][t] += f;
      net[from][t] -= f;
    }
  }
  for (std::size_t b = 0; b < inst.buses.size(); ++b) {
    const DemandSeries* dem = inst.demand_of(b);
    for (std::size_t t = 0; t < T; ++t)
      r.balance = std::max(r.balance, std::abs(net[b][t] - (dem ? dem->lambda[t] : 0.0)));
  }
  return r;
}

}  // namespace respan
