#include "respan/reports.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "respan/text.hpp"

namespace respan {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

using text::format_double;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text, const std::vector<std::string>& header,
                                               const char* file) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool first = true;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto f = text::split(line, ',');
    if (first) {
      if (f != header) throw FormatError(std::string(file) + ": unexpected header");
      first = false;
      continue;
    }
    if (f.size() != header.size())
      throw FormatError(std::string(file) + ":" + std::to_string(n) + ": wrong number of fields");
    rows.push_back(std::move(f));
  }
  if (first) throw FormatError(std::string(file) + ": missing header row");
  return rows;
}

double number(const std::string& s, const char* file) {
  auto v = text::parse_double(s);
  if (!v) throw FormatError(std::string(file) + ": not a number: '" + s + "'");
  return *v;
}

const std::vector<std::string> kDesignCols{"kind",   "id",           "bus",           "tech",
                                           "kappa0", "new_capacity", "total_capacity"};
const std::vector<std::string> kRetainedCols{"site_id", "bus", "tech", "siting_capacity"};

std::size_t to_size(const json& j, const char* key) {
  const auto v = j.get<long long>();
  if (v < 0) throw FormatError(std::string(key) + " must be >= 0");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<double> resolve_xi(const XiOverride& xi, const SystemInstance& inst) {
  if (const double* all = std::get_if<double>(&xi)) return std::vector<double>(inst.buses.size(), *all);
  const auto& per_bus = std::get<std::map<std::string, double>>(xi);
  std::vector<double> out(inst.buses.size(), 0.0);
  std::set<std::string> used;
  for (std::size_t b = 0; b < inst.buses.size(); ++b) {
    auto it = per_bus.find(inst.buses[b].id);
    if (it == per_bus.end()) throw FormatError("xi: no value for bus '" + inst.buses[b].id + "'");
    out[b] = it->second;
    used.insert(it->first);
  }
  for (const auto& [bus, v] : per_bus)
    if (!used.count(bus)) throw FormatError("xi: unknown bus '" + bus + "'");
  return out;
}

namespace {

ScreeningOverrides overrides_from(const json& j) {
  if (!j.is_object()) throw FormatError("screening parameters must be a JSON object");
  ScreeningOverrides o;
  for (const auto& [key, v] : j.items()) {
    if (key == "delta_tau") {
      o.delta_tau = to_size(v, "delta_tau");
    } else if (key == "xi") {
      if (v.is_number()) {
        o.xi = v.get<double>();
      } else if (v.is_object()) {
        std::map<std::string, double> m;
        for (const auto& [bus, x] : v.items()) m[bus] = x.get<double>();
        o.xi = std::move(m);
      } else {
        throw FormatError("xi must be a number or an object keyed by bus id");
      }
    } else if (key == "selection_threshold") {
      o.selection_threshold = v.get<double>();
    } else if (key == "peak_steps") {
      o.peak_steps = to_size(v, "peak_steps");
    } else {
      throw FormatError("unknown screening key '" + key + "'");
    }
  }
  return o;
}

}  // namespace

ScreeningOverrides screening_overrides_from_json(const std::string& text) {
  try {
    return overrides_from(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("screening parameters: ") + e.what());
  }
}

RunConfig run_config_from_json(const std::string& text, const fs::path& base_dir) {
  RunConfig cfg;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw FormatError("run configuration must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "instance") {
        cfg.instance = resolve(v.get<std::string>());
      } else if (key == "output_dir") {
        cfg.output_dir = resolve(v.get<std::string>());
      } else if (key == "solver") {
        const std::string kind = v.is_string() ? v.get<std::string>() : v.at("kind").get<std::string>();
        if (kind == "reference") {
          cfg.solver.kind = SolverKind::Reference;
        } else if (kind == "external-mps") {
          cfg.solver.kind = SolverKind::ExternalMps;
          if (!v.is_object() || !v.contains("command"))
            throw FormatError("external-mps solver needs a 'command'");
        } else {
          throw FormatError("solver kind must be 'reference' or 'external-mps'");
        }
        if (v.is_object()) {
          for (const auto& [k, sv] : v.items()) {
            if (k == "kind") continue;
            if (k == "command") cfg.solver.command = sv.get<std::string>();
            else if (k == "work_dir") cfg.solver.work_dir = resolve(sv.get<std::string>());
            else if (k == "keep_files") cfg.solver.keep_files = sv.get<bool>();
            else if (k == "max_iterations") cfg.solver.simplex.max_iterations = to_size(sv, "max_iterations");
            else throw FormatError("unknown solver key '" + k + "'");
          }
        }
      } else if (key == "screening") {
        cfg.screening = overrides_from(v);
      } else if (key == "tolerances") {
        for (const auto& [k, tv] : v.items()) {
          if (k == "feasibility") cfg.feasibility_tol = tv.get<double>();
          else if (k == "objective") cfg.objective_tol = tv.get<double>();
          else throw FormatError("unknown tolerance '" + k + "'");
        }
      } else if (key == "cyclic_storage") {
        cfg.cyclic_storage = v.get<bool>();
      } else {
        throw FormatError("unknown configuration key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("run configuration: ") + e.what());
  }
  return cfg;
}

void validate_run_config(const RunConfig& cfg) {
  if (!(cfg.feasibility_tol > 0.0) || !(cfg.objective_tol > 0.0))
    throw FormatError("tolerances must be > 0");
  if (cfg.instance.empty()) throw FormatError("no instance path given");
  if (!fs::exists(cfg.instance)) throw IoError("instance path '" + cfg.instance.string() + "' does not exist");
  if (cfg.solver.kind == SolverKind::ExternalMps && cfg.solver.command.empty())
    throw FormatError("external-mps solver needs a command");
}

SmOptions sm_options(const RunConfig& cfg, const SystemInstance& inst) {
  SmOptions o;
  o.delta_tau = cfg.screening.delta_tau;
  if (cfg.screening.xi) o.xi = resolve_xi(*cfg.screening.xi, inst);
  if (cfg.screening.selection_threshold) o.selection_threshold = *cfg.screening.selection_threshold;
  if (cfg.screening.peak_steps) o.xi_options.peak_steps = *cfg.screening.peak_steps;
  o.build.cyclic_storage = cfg.cyclic_storage;
  return o;
}

std::string params_json(const ScreeningParams& params, const SystemInstance& inst) {
  ordered_json xi = ordered_json::object();
  for (std::size_t b = 0; b < inst.buses.size() && b < params.xi.size(); ++b) xi[inst.buses[b].id] = params.xi[b];
  ordered_json j = {{"delta_tau", params.delta_tau},
                    {"xi", xi},
                    {"selection_threshold", params.selection_threshold}};
  return j.dump(2) + "\n";
}

std::string run_record_json(const RunRecord& rec, const RunMeta& meta, const SystemInstance& inst) {
  ordered_json j;
  j["model"] = to_string(rec.model);
  j["solver"] = rec.solver;
  j["status"] = to_string(rec.status);
  j["objective"] = rec.objective;
  j["instance"] = meta.instance;
  j["size"] = {{"variables", rec.size.variables},
               {"constraints", rec.size.constraints},
               {"nonzeros", rec.size.nonzeros}};
  j["peak_memory_bytes"] = rec.peak_memory_bytes;
  j["peak_memory_estimated"] = rec.peak_memory_estimated;
  j["solve_seconds"] = rec.solve_seconds;
  j["iterations"] = rec.iterations;
  if (rec.residuals) {
    const auto& r = *rec.residuals;
    j["residuals"] = {{"balance", r.balance},
                      {"site_availability", r.site_availability},
                      {"site_capacity", r.site_capacity},
                      {"gen_dispatch", r.gen_dispatch},
                      {"gen_capacity", r.gen_capacity},
                      {"storage_power", r.storage_power},
                      {"storage_energy", r.storage_energy},
                      {"soc", r.soc},
                      {"storage_capacity", r.storage_capacity},
                      {"line_flow", r.line_flow},
                      {"line_capacity", r.line_capacity},
                      {"negativity", r.negativity},
                      {"max", r.max()}};
  }
  if (rec.screening) {
    ordered_json s;
    if (meta.params) {
      ordered_json xi = ordered_json::object();
      for (std::size_t b = 0; b < inst.buses.size() && b < meta.params->xi.size(); ++b)
        xi[inst.buses[b].id] = meta.params->xi[b];
      s["delta_tau"] = meta.params->delta_tau;
      s["xi"] = xi;
      s["selection_threshold"] = meta.params->selection_threshold;
    }
    s["delta_tau_overridden"] = meta.delta_tau_overridden;
    s["xi_overridden"] = meta.xi_overridden;
    s["candidate_count"] = inst.sites.size();
    s["retained_count"] = rec.screening->retained_count();
    j["screening"] = s;
  }
  return j.dump(2) + "\n";
}

LoadedRun run_record_from_json(const std::string& text) {
  LoadedRun out;
  try {
    const json j = json::parse(text);
    RunRecord& r = out.record;
    const auto model = j.at("model").get<std::string>();
    if (model == "FLP") r.model = ModelKind::FLP;
    else if (model == "SITE") r.model = ModelKind::SITE;
    else if (model == "RLP") r.model = ModelKind::RLP;
    else throw FormatError("unknown model '" + model + "'");
    r.solver = j.at("solver").get<std::string>();
    r.status = lp_status_from_string(j.at("status").get<std::string>());
    r.objective = j.at("objective").get<double>();
    out.instance = j.at("instance").get<std::string>();
    r.size.variables = to_size(j.at("size").at("variables"), "variables");
    r.size.constraints = to_size(j.at("size").at("constraints"), "constraints");
    r.size.nonzeros = to_size(j.at("size").at("nonzeros"), "nonzeros");
    r.peak_memory_bytes = to_size(j.at("peak_memory_bytes"), "peak_memory_bytes");
    r.peak_memory_estimated = j.at("peak_memory_estimated").get<bool>();
    r.solve_seconds = j.at("solve_seconds").get<double>();
    r.iterations = to_size(j.at("iterations"), "iterations");
  } catch (const json::exception& e) {
    throw FormatError(std::string("run record: ") + e.what());
  } catch (const LpError& e) {
    throw FormatError(std::string("run record: ") + e.what());
  }
  return out;
}

std::string design_csv(const SystemInstance& inst, const SolvedDesign& d) {
  check_dimensions(d, inst);
  std::string out = "kind,id,bus,tech,kappa0,new_capacity,total_capacity\n";
  auto row = [&out](const char* kind, const std::string& id, const std::string& bus, const std::string& tech,
                    double k0, double k) {
    out += std::string(kind) + "," + id + "," + bus + "," + tech + "," + format_double(k0) + "," +
           format_double(k) + "," + format_double(k0 + k) + "\n";
  };
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    const auto& s = inst.sites[i];
    row("site", s.id, s.bus, s.tech, s.kappa0, d.site_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    row("gen", g.id, g.bus, g.tech, g.kappa0, d.gen_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.storages.size(); ++i) {
    const auto& u = inst.storages[i];
    row("storage", u.id, u.bus, u.tech, u.kappa0, d.storage_capacity[i]);
  }
  for (std::size_t i = 0; i < inst.lines.size(); ++i) {
    const auto& l = inst.lines[i];
    row("line", l.id, l.from_bus + "-" + l.to_bus, l.kind == LineKind::AC ? "AC" : "DC", l.kappa0,
        d.line_capacity[i]);
  }
  return out;
}

SolvedDesign design_from_csv(const SystemInstance& inst, const std::string& text) {
  SolvedDesign d;
  d.site_capacity.assign(inst.sites.size(), 0.0);
  d.gen_capacity.assign(inst.generators.size(), 0.0);
  d.storage_capacity.assign(inst.storages.size(), 0.0);
  d.line_capacity.assign(inst.lines.size(), 0.0);
  std::map<std::pair<std::string, std::string>, double*> slot;
  for (std::size_t i = 0; i < inst.sites.size(); ++i) slot[{"site", inst.sites[i].id}] = &d.site_capacity[i];
  for (std::size_t i = 0; i < inst.generators.size(); ++i)
    slot[{"gen", inst.generators[i].id}] = &d.gen_capacity[i];
  for (std::size_t i = 0; i < inst.storages.size(); ++i)
    slot[{"storage", inst.storages[i].id}] = &d.storage_capacity[i];
  for (std::size_t i = 0; i < inst.lines.size(); ++i) slot[{"line", inst.lines[i].id}] = &d.line_capacity[i];

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : csv_rows(text, kDesignCols, "design.csv")) {
    auto it = slot.find({r[0], r[1]});
    if (it == slot.end()) throw FormatError("design.csv: unknown " + r[0] + " '" + r[1] + "'");
    *it->second = number(r[5], "design.csv");
    seen.insert(it->first);
  }
  if (seen.size() != slot.size()) throw FormatError("design.csv: does not cover every asset of the instance");
  return d;
}

std::string retained_csv(const SystemInstance& inst, const ScreeningResult& screening) {
  std::string out = "site_id,bus,tech,siting_capacity\n";
  const auto keep = screening.keep_mask(inst.sites.size());
  for (std::size_t i = 0; i < inst.sites.size(); ++i) {
    if (!keep[i]) continue;
    const auto& s = inst.sites[i];
    const double k = i < screening.siting_capacity.size() ? screening.siting_capacity[i] : 0.0;
    out += s.id + "," + s.bus + "," + s.tech + "," + format_double(k) + "\n";
  }
  return out;
}

ScreeningResult retained_from_csv(const SystemInstance& inst, const std::string& text) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < inst.sites.size(); ++i) index[inst.sites[i].id] = i;
  ScreeningResult r;
  r.retained.assign(inst.buses.size(), {});
  r.siting_capacity.assign(inst.sites.size(), 0.0);
  std::vector<bool> keep(inst.sites.size(), false);
  for (const auto& row : csv_rows(text, kRetainedCols, "retained.csv")) {
    auto it = index.find(row[0]);
    if (it == index.end()) throw FormatError("retained.csv: unknown site '" + row[0] + "'");
    keep[it->second] = true;
    r.siting_capacity[it->second] = number(row[3], "retained.csv");
  }
  for (std::size_t i = 0; i < inst.sites.size(); ++i)
    if (keep[i]) r.retained[inst.bus_index(inst.sites[i].bus)].push_back(i);
  return r;
}

std::string report_json(const ComparisonReport& rep) {
  ordered_json j;
  j["tsce"] = rep.tsce;
  j["flp_objective"] = rep.flp_objective;
  j["rlp_objective"] = rep.rlp_objective;
  j["capacity_pearson"] = opt(rep.capacity_pearson);
  j["deltas"] = {{"variables", rep.deltas.variables},
                 {"constraints", rep.deltas.constraints},
                 {"nonzeros", rep.deltas.nonzeros},
                 {"pmr", rep.deltas.pmr},
                 {"srt", rep.deltas.srt}};
  ordered_json techs = ordered_json::array();
  for (const auto& t : rep.techs) {
    techs.push_back({{"tech", t.tech},
                     {"candidates", t.candidates},
                     {"retained", t.retained},
                     {"flp_selected", t.flp_selected},
                     {"gamma", t.gamma},
                     {"alpha", opt(t.alpha)},
                     {"matched", t.matching.size()},
                     {"unmatched_flp", t.unmatched_flp},
                     {"distance_p95_km", opt(t.distance_p95_km)},
                     {"distance_max_km", opt(t.distance_max_km)}});
  }
  j["techs"] = techs;
  ordered_json caps = ordered_json::array();
  for (const auto& c : rep.capacity_deltas)
    caps.push_back({{"key", c.key}, {"flp", c.flp}, {"rlp", c.rlp}, {"diff", c.diff}, {"pct", opt(c.pct)}});
  j["capacity_deltas"] = caps;
  return j.dump(2) + "\n";
}

std::string distances_csv(const ComparisonReport& rep) {
  std::string out = "tech,flp_site,matched_site,km\n";
  for (const auto& t : rep.techs)
    for (const auto& m : t.matching)
      out += t.tech + "," + m.flp_site + "," + m.matched_site + "," + format_double(m.km) + "\n";
  return out;
}

std::string capacities_csv(const ComparisonReport& rep) {
  std::string out = "tech,flp_site,rlp_site,flp_mw,rlp_mw,common\n";
  for (const auto& t : rep.techs)
    for (const auto& c : t.capacity_pairs)
      out += t.tech + "," + c.flp_site + "," + c.rlp_site + "," + format_double(c.flp_mw) + "," +
             format_double(c.rlp_mw) + "," + (c.common ? "1" : "0") + "\n";
  return out;
}

}  // namespace respan
