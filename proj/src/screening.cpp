#include "respan/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "respan/parallel.hpp"

namespace respan {

std::vector<Violation> validate_params(const ScreeningParams& p, const SystemInstance& inst) {
  std::vector<Violation> out;
  if (p.delta_tau < 1 || p.delta_tau > inst.horizon())
    out.push_back({"screening", "delta_tau", "delta_tau out of [1, horizon]"});
  if (p.xi.size() != inst.buses.size())
    out.push_back({"screening", "xi", "one xi value per bus required"});
  for (std::size_t b = 0; b < p.xi.size(); ++b)
    if (!(p.xi[b] >= 0.0 && p.xi[b] <= 1.0))
      out.push_back({"screening", "xi", "xi out of [0,1] at bus index " + std::to_string(b)});
  if (!(p.selection_threshold > 0.0))
    out.push_back({"screening", "selection_threshold", "threshold must be > 0"});
  return out;
}

std::vector<Slice> make_slices(std::size_t horizon, std::size_t delta_tau) {
  if (delta_tau == 0) throw std::invalid_argument("delta_tau must be >= 1");
  std::vector<Slice> out;
  for (std::size_t b = 0; b < horizon; b += delta_tau) out.push_back({b, std::min(horizon, b + delta_tau)});
  return out;
}

std::size_t dominant_period(const std::vector<double>& series) {
  const std::size_t T = series.size();
  if (T < 4) throw EstimationError("at least 4 steps are needed to estimate the slice length");

  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(T);
  double scale = 0.0;
  for (double v : series) scale = std::max(scale, std::abs(v));

  std::vector<double> cos_t(T), sin_t(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(T);
    cos_t[i] = std::cos(ang);
    sin_t[i] = std::sin(ang);
  }

  std::size_t best_k = 0;
  double best_amp = 0.0;
  for (std::size_t k = 1; k <= T / 2; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const double v = series[t] - mean;
      re += v * cos_t[idx];
      im -= v * sin_t[idx];
      idx += k;
      if (idx >= T) idx -= T;
    }
    const double amp = std::hypot(re, im);
    if (amp > best_amp * (1.0 + 1e-12)) {
      best_amp = amp;
      best_k = k;
    }
  }
  if (best_k == 0 || best_amp <= 1e-9 * static_cast<double>(T) * std::max(1.0, scale))
    throw EstimationError(
        "capacity factor series has no nonzero-frequency component; set delta_tau explicitly");
  const double period = static_cast<double>(T) / static_cast<double>(best_k);
  auto steps = static_cast<std::size_t>(std::llround(period));
  return std::clamp<std::size_t>(steps, 1, T);
}

std::size_t estimate_delta_tau(const SystemInstance& inst) {
  const std::size_t T = inst.horizon();
  if (T < 4) throw EstimationError("at least 4 steps are needed to estimate the slice length");
  if (inst.sites.empty()) throw EstimationError("no candidate sites; set delta_tau explicitly");

  double total = 0.0;
  for (const auto& s : inst.sites) total += s.kappa_max;
  const bool uniform = !(total > 0.0);
  if (uniform) total = static_cast<double>(inst.sites.size());

  std::vector<double> agg(T, 0.0);
  for (const auto& s : inst.sites) {
    const double w = (uniform ? 1.0 : s.kappa_max) / total;
    for (std::size_t t = 0; t < T; ++t) agg[t] += w * s.cf[t];
  }
  return dominant_period(agg);
}

std::vector<double> estimate_xi(const SystemInstance& inst, std::size_t delta_tau, const XiOptions& opts) {
  require_valid(inst);
  const std::size_t T = inst.horizon();
  if (delta_tau < 1 || delta_tau > T) throw std::invalid_argument("delta_tau out of [1, horizon]");
  const double dt = inst.params.step_hours;
  const std::size_t B = inst.buses.size();
  const std::size_t k = std::clamp<std::size_t>(opts.peak_steps, 1, T);

  std::vector<std::vector<std::size_t>> bus_sites(B);
  for (std::size_t i = 0; i < inst.sites.size(); ++i) bus_sites[inst.bus_index(inst.sites[i].bus)].push_back(i);
  std::vector<double> legacy(B, 0.0), transfer(B, 0.0);
  for (const auto& g : inst.generators) legacy[inst.bus_index(g.bus)] += g.kappa0;
  for (const auto& l : inst.lines) {
    transfer[inst.bus_index(l.from_bus)] += l.kappa_max;
    transfer[inst.bus_index(l.to_bus)] += l.kappa_max;
  }

  std::vector<double> xi(B, 0.0);
  parallel_for(B, [&](std::size_t b) {
    if (bus_sites[b].empty()) {
      xi[b] = 0.0;
      return;
    }
    const DemandSeries* dem = inst.demand_of(b);
    auto lambda = [dem](std::size_t t) { return dem ? dem->lambda[t] : 0.0; };

    std::vector<double> potential(T, 0.0);
    for (auto i : bus_sites[b]) {
      const auto& s = inst.sites[i];
      for (std::size_t t = 0; t < T; ++t) potential[t] += s.cf[t] * s.kappa_max * dt;
    }

    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return lambda(a) > lambda(c); });

    double residual = 0.0, res_potential = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      residual += lambda(order[j]) - legacy[b] * dt;
      res_potential += potential[order[j]];
    }
    residual /= static_cast<double>(k);
    res_potential /= static_cast<double>(k);

    std::size_t surplus_steps = 0;
    for (std::size_t t = 0; t < T; ++t)
      if (potential[t] >= lambda(t)) ++surplus_steps;
    const bool exporter = surplus_steps >= (T + 1) / 2;

    const double period = static_cast<double>(delta_tau);
    const double exchange = transfer[b] * period * dt;
    const double adjusted = residual * period + (exporter ? exchange : -exchange);
    if (adjusted <= 0.0) {
      xi[b] = exporter ? 1.0 : 0.0;
      return;
    }
    xi[b] = std::clamp(res_potential * period / adjusted, 0.0, 1.0);
  });
  return xi;
}

BuiltLp build_siting_lp(const SystemInstance& inst, const ScreeningParams& params) {
  require_valid(inst);
  if (auto v = validate_params(params, inst); !v.empty()) throw ValidationError(std::move(v));

  const std::size_t T = inst.horizon();
  const std::size_t B = inst.buses.size();
  const double dt = inst.params.step_hours;
  const double w = inst.params.omega;

  BuiltLp out;
  LpProblem& lp = out.lp;
  VarMap& vm = out.vars;
  vm.site_capacity.assign(inst.sites.size(), std::nullopt);
  vm.site_output.assign(inst.sites.size(), {});
  vm.unserved.assign(B, {});

  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    vm.site_capacity[i] = lp.add_var("K_site[" + s.id + "]", 0.0, std::max(0.0, s.kappa_max - s.kappa0),
                                     w * (s.zeta + s.theta_f));
  }
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    for (std::size_t t = 0; t < T; ++t)
      vm.site_output[i].push_back(
          lp.add_var("p_site[" + s.id + "," + std::to_string(t) + "]", 0.0, kInf, s.theta_v));
  }
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t)
      vm.unserved[b].push_back(lp.add_var("p_e[" + inst.buses[b].id + "," + std::to_string(t) + "]", 0.0,
                                          kInf, inst.params.theta_e));

  std::vector<std::vector<std::size_t>> bus_sites(B);
  for (std::size_t i = 0; i < inst.sites.size(); ++i) bus_sites[inst.bus_index(inst.sites[i].bus)].push_back(i);

  const auto slices = make_slices(T, params.delta_tau);
  std::vector<Term> terms;
  for (std::size_t b = 0; b < B; ++b) {
    const DemandSeries* dem = inst.demand_of(b);
    for (std::size_t tau = 0; tau < slices.size(); ++tau) {
      terms.clear();
      double demand = 0.0;
      for (std::size_t t = slices[tau].begin; t < slices[tau].end; ++t) {
        for (auto i : bus_sites[b]) terms.push_back({vm.site_output[i][t], 1.0});
        terms.push_back({vm.unserved[b][t], 1.0});
        if (dem) demand += dem->lambda[t];
      }
      lp.add_constraint(terms, params.xi[b] * demand, kInf,
                        "target[" + inst.buses[b].id + "," + std::to_string(tau) + "]");
    }
  }

  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    const VarId k = *vm.site_capacity[i];
    for (std::size_t t = 0; t < T; ++t) {
      const double a = s.cf[t] * dt;
      lp.add_constraint({{vm.site_output[i][t], 1.0}, {k, -a}}, -kInf, a * s.kappa0,
                        "avail[" + s.id + "," + std::to_string(t) + "]");
    }
    lp.add_constraint({{k, 1.0}}, -kInf, s.kappa_max - s.kappa0, "cap_site[" + s.id + "]");
  }
  return out;
}

std::vector<bool> ScreeningResult::keep_mask(std::size_t num_sites) const {
  std::vector<bool> keep(num_sites, false);
  for (const auto& bus : retained)
    for (auto i : bus) keep.at(i) = true;
  return keep;
}

std::size_t ScreeningResult::retained_count() const {
  std::size_t n = 0;
  for (const auto& bus : retained) n += bus.size();
  return n;
}

ScreeningResult ScreeningResult::retain_all(const SystemInstance& inst) {
  ScreeningResult r;
  r.retained.assign(inst.buses.size(), {});
  for (std::size_t i = 0; i < inst.sites.size(); ++i) r.retained[inst.bus_index(inst.sites[i].bus)].push_back(i);
  r.siting_capacity.assign(inst.sites.size(), 0.0);
  return r;
}

ScreeningResult extract_retained(const SystemInstance& inst, const VarMap& vm, const LpSolution& sol,
                                 double threshold) {
  if (sol.status != LpStatus::Optimal)
    throw SolveError(std::string("cannot extract screening from a non-optimal solution (") +
                     to_string(sol.status) + ")");
  ScreeningResult r;
  r.retained.assign(inst.buses.size(), {});
  r.siting_capacity.assign(inst.sites.size(), 0.0);
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (i < vm.site_capacity.size() && vm.site_capacity[i]) r.siting_capacity[i] = sol.primal.at(vm.site_capacity[i]->index);
    if (inst.sites[i].kappa0 + r.siting_capacity[i] >= threshold)
      r.retained[inst.bus_index(inst.sites[i].bus)].push_back(i);
  }
  r.objective = sol.objective;
  r.stats.iterations = sol.iterations;
  r.stats.wall_seconds = sol.wall_seconds;
  return r;
}

}  // namespace respan
