#include "respan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace respan {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1 * rad) * std::cos(lat2 * rad) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double gamma(const SystemInstance& inst, const ScreeningResult& screening, const std::string& tech) {
  std::size_t total = 0;
  for (const auto& s : inst.sites)
    if (s.tech == tech) ++total;
  if (total == 0) throw std::invalid_argument("no candidate sites of technology '" + tech + "'");
  return 1.0 - static_cast<double>(retained_sites(inst, screening, tech).size()) / static_cast<double>(total);
}

std::optional<double> alpha(const std::set<std::string>& flp_sites, const std::set<std::string>& site_sites) {
  if (flp_sites.empty()) return std::nullopt;
  std::size_t common = 0;
  for (const auto& s : flp_sites) common += site_sites.count(s);
  return static_cast<double>(common) / static_cast<double>(flp_sites.size());
}

MatchResult match_sites(std::vector<SitePoint> unidentified, std::vector<SitePoint> exclusive) {
  auto by_id = [](const SitePoint& a, const SitePoint& b) { return a.id < b.id; };
  std::sort(unidentified.begin(), unidentified.end(), by_id);
  std::sort(exclusive.begin(), exclusive.end(), by_id);

  MatchResult out;
  std::vector<bool> used(exclusive.size(), false);
  for (const auto& f : unidentified) {
    std::size_t best = exclusive.size();
    double best_km = 0.0;
    for (std::size_t j = 0; j < exclusive.size(); ++j) {
      if (used[j]) continue;
      const double km = haversine_km(f.lat, f.lon, exclusive[j].lat, exclusive[j].lon);
      if (best == exclusive.size() || km < best_km) {
        best = j;
        best_km = km;
      }
    }
    if (best == exclusive.size()) {
      out.unmatched_flp.push_back(f.id);
      continue;
    }
    used[best] = true;
    out.pairs.push_back({f.id, exclusive[best].id, best_km});
  }
  for (std::size_t j = 0; j < exclusive.size(); ++j)
    if (!used[j]) out.unmatched_site.push_back(exclusive[j].id);
  return out;
}

double tsce(double flp_objective, double rlp_objective) {
  if (!(flp_objective > 0.0)) throw std::invalid_argument("TSCE needs a positive FLP objective");
  return (rlp_objective - flp_objective) / flp_objective;
}

SizeDeltas size_deltas(const RunRecord& flp, const RunRecord& rlp, const RunRecord& site) {
  auto red = [](double num, double den) { return den > 0.0 ? 100.0 * (1.0 - num / den) : 0.0; };
  SizeDeltas d;
  d.variables = red(static_cast<double>(rlp.size.variables), static_cast<double>(flp.size.variables));
  d.constraints = red(static_cast<double>(rlp.size.constraints), static_cast<double>(flp.size.constraints));
  d.nonzeros = red(static_cast<double>(rlp.size.nonzeros), static_cast<double>(flp.size.nonzeros));
  d.pmr = red(static_cast<double>(std::max(rlp.peak_memory_bytes, site.peak_memory_bytes)),
              static_cast<double>(flp.peak_memory_bytes));
  d.srt = red(site.solve_seconds + rlp.solve_seconds, flp.solve_seconds);
  return d;
}

std::set<std::string> selected_sites(const SystemInstance& inst, const SolvedDesign& design,
                                     const std::string& tech, double threshold) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < inst.sites.size(); ++i)
    if (inst.sites[i].tech == tech && inst.sites[i].kappa0 + design.site_capacity.at(i) >= threshold)
      out.insert(inst.sites[i].id);
  return out;
}

std::set<std::string> retained_sites(const SystemInstance& inst, const ScreeningResult& screening,
                                     const std::string& tech) {
  std::set<std::string> out;
  for (const auto& bus : screening.retained)
    for (auto i : bus)
      if (inst.sites.at(i).tech == tech) out.insert(inst.sites[i].id);
  return out;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

void add_delta(std::map<std::string, std::pair<double, double>>& acc, const std::string& key, double flp,
               double rlp) {
  auto& e = acc[key];
  e.first += flp;
  e.second += rlp;
}

}  // namespace

ComparisonReport compare_runs(const SystemInstance& inst, const RunRecord& flp, const RunRecord& site,
                              const RunRecord& rlp) {
  if (!flp.design || !rlp.design || !site.screening)
    throw std::invalid_argument("comparison needs FLP and RLP designs and a screening result");
  const SolvedDesign& fd = *flp.design;
  const SolvedDesign& rd = *rlp.design;
  const ScreeningResult& scr = *site.screening;

  std::map<std::string, std::size_t> index;
  std::set<std::string> techs;
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    index[inst.sites[i].id] = i;
    techs.insert(inst.sites[i].tech);
  }
  auto installed = [&](const SolvedDesign& d, const std::string& id) {
    const auto i = index.at(id);
    return inst.sites[i].kappa0 + d.site_capacity[i];
  };
  auto point = [&](const std::string& id) {
    const auto& s = inst.sites[index.at(id)];
    return SitePoint{s.id, s.lat, s.lon};
  };

  ComparisonReport rep;
  std::vector<double> cx, cy;
  for (const auto& tech : techs) {
    TechComparison tc;
    tc.tech = tech;
    for (const auto& s : inst.sites) tc.candidates += s.tech == tech;
    const auto kept = retained_sites(inst, scr, tech);
    const auto chosen = selected_sites(inst, fd, tech);
    tc.retained = kept.size();
    tc.flp_selected = chosen.size();
    tc.gamma = gamma(inst, scr, tech);
    tc.alpha = alpha(chosen, kept);

    std::vector<SitePoint> unidentified, exclusive;
    for (const auto& id : chosen) {
      if (kept.count(id)) {
        tc.matching.push_back({id, id, 0.0});
        tc.capacity_pairs.push_back({id, id, installed(fd, id), installed(rd, id), true});
      } else {
        unidentified.push_back(point(id));
      }
    }
    for (const auto& id : kept)
      if (!chosen.count(id)) exclusive.push_back(point(id));
    auto matched = match_sites(std::move(unidentified), std::move(exclusive));
    for (const auto& p : matched.pairs) {
      tc.matching.push_back(p);
      tc.capacity_pairs.push_back(
          {p.flp_site, p.matched_site, installed(fd, p.flp_site), installed(rd, p.matched_site), false});
    }
    tc.unmatched_flp = std::move(matched.unmatched_flp);

    std::vector<double> kms;
    for (const auto& m : tc.matching) kms.push_back(m.km);
    if (!kms.empty()) {
      tc.distance_p95_km = percentile(kms, 95.0);
      tc.distance_max_km = *std::max_element(kms.begin(), kms.end());
    }
    for (const auto& c : tc.capacity_pairs) {
      cx.push_back(c.flp_mw);
      cy.push_back(c.rlp_mw);
    }
    rep.techs.push_back(std::move(tc));
  }
  rep.capacity_pearson = pearson(cx, cy);

  rep.flp_objective = flp.objective;
  rep.rlp_objective = rlp.objective;
  rep.tsce = tsce(flp.objective, rlp.objective);
  rep.deltas = size_deltas(flp, rlp, site);

  std::map<std::string, std::pair<double, double>> acc;
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    add_delta(acc, s.tech, s.kappa0 + fd.site_capacity[i], s.kappa0 + rd.site_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    add_delta(acc, g.tech, g.kappa0 + fd.gen_capacity[i], g.kappa0 + rd.gen_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    const auto& s = inst.storages[i];
    add_delta(acc, s.tech, s.kappa0 + fd.storage_capacity[i], s.kappa0 + rd.storage_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.lines.size(); ++i) {
    const auto& l = inst.lines[i];
    add_delta(acc, l.kind == LineKind::AC ? "LINE_AC" : "LINE_DC", (l.kappa0 + fd.line_capacity[i]) * l.length_km,
              (l.kappa0 + rd.line_capacity[i]) * l.length_km);
  }
  for (const auto& [key, v] : acc) {
    CapacityDelta cd{key, v.first, v.second, v.second - v.first, std::nullopt};
    if (v.first > 0.0) cd.pct = 100.0 * cd.diff / v.first;
    rep.capacity_deltas.push_back(cd);
  }
  return rep;
}

}  // namespace respan
