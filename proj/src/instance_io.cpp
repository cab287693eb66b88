#include "respan/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "respan/text.hpp"

namespace respan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

namespace {

using text::format_double;

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_no;

  [[noreturn]] void fail(std::size_t row, const std::string& msg) const {
    throw FormatError(file + ":" + std::to_string(line_no[row]) + ": " + msg);
  }

  double num(std::size_t row, std::size_t col) const {
    auto v = text::parse_double(rows[row][col]);
    if (!v) fail(row, "column '" + header[col] + "': not a number: '" + rows[row][col] + "'");
    return *v;
  }

  bool flag(std::size_t row, std::size_t col) const {
    const auto& s = rows[row][col];
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    fail(row, "column '" + header[col] + "': expected 0/1 or true/false, got '" + s + "'");
  }
};

CsvTable read_csv(const fs::path& path) {
  const std::string content = read_text_file(path);
  CsvTable t;
  t.file = path.filename().string();
  std::istringstream in(content);
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line, ',');
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw FormatError(t.file + ":" + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_no.push_back(n);
  }
  if (!have_header) throw FormatError(t.file + ": missing header row");
  return t;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& cols) {
  if (t.header != cols) {
    std::string want;
    for (const auto& c : cols) want += (want.empty() ? "" : ",") + c;
    throw FormatError(t.file + ": header must be '" + want + "'");
  }
}

LineKind parse_kind(const CsvTable& t, std::size_t row, std::size_t col) {
  const auto& s = t.rows[row][col];
  if (s == "AC") return LineKind::AC;
  if (s == "DC") return LineKind::DC;
  t.fail(row, "kind must be AC or DC, got '" + s + "'");
}

void check_field(const std::string& s, const std::string& what) {
  if (s.find_first_of(",\r\n") != std::string::npos)
    throw FormatError(what + " '" + s + "' cannot be written: contains a comma or newline");
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

const std::vector<std::string> kBusCols{"id", "name"};
const std::vector<std::string> kLineCols{"id",        "from",      "to",   "kind",    "kappa0",
                                         "kappa_max", "length_km", "zeta", "theta_f", "theta_v"};
const std::vector<std::string> kSiteCols{"id",     "bus",       "tech", "lat",     "lon",
                                         "kappa0", "kappa_max", "zeta", "theta_f", "theta_v"};
const std::vector<std::string> kGenCols{"id",   "bus",     "tech",    "kappa0", "kappa_max",
                                        "zeta", "theta_f", "theta_v", "sizable"};
const std::vector<std::string> kStorageCols{"id",    "bus",  "tech",    "kappa0",  "kappa_max",
                                            "phi",   "eta_sd", "eta_c", "eta_d",   "zeta",
                                            "theta_f", "theta_v", "sizable"};

}  // namespace

void write_instance(const SystemInstance& inst, const fs::path& dir) {
  const std::size_t T = inst.horizon();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  std::string buses = join(kBusCols);
  for (const auto& b : inst.buses) {
    check_field(b.id, "bus id");
    check_field(b.name, "bus name");
    buses += join({b.id, b.name});
  }
  std::string lines = join(kLineCols);
  for (const auto& l : inst.lines)
    lines += join({l.id, l.from_bus, l.to_bus, l.kind == LineKind::AC ? "AC" : "DC", format_double(l.kappa0),
                   format_double(l.kappa_max), format_double(l.length_km), format_double(l.zeta),
                   format_double(l.theta_f), format_double(l.theta_v)});
  std::string sites = join(kSiteCols);
  for (const auto& s : inst.sites)
    sites += join({s.id, s.bus, s.tech, format_double(s.lat), format_double(s.lon), format_double(s.kappa0),
                   format_double(s.kappa_max), format_double(s.zeta), format_double(s.theta_f),
                   format_double(s.theta_v)});
  std::string gens = join(kGenCols);
  for (const auto& g : inst.generators)
    gens += join({g.id, g.bus, g.tech, format_double(g.kappa0), format_double(g.kappa_max), format_double(g.zeta),
                  format_double(g.theta_f), format_double(g.theta_v), g.sizable ? "1" : "0"});
  std::string storage = join(kStorageCols);
  for (const auto& u : inst.storages)
    storage += join({u.id, u.bus, u.tech, format_double(u.kappa0), format_double(u.kappa_max),
                     format_double(u.phi), format_double(u.eta_sd), format_double(u.eta_c), format_double(u.eta_d),
                     format_double(u.zeta), format_double(u.theta_f), format_double(u.theta_v),
                     u.sizable ? "1" : "0"});

  auto wide = [T](const std::vector<std::string>& ids, const std::function<double(std::size_t, std::size_t)>& at) {
    std::vector<std::string> head{"t"};
    head.insert(head.end(), ids.begin(), ids.end());
    std::string out = join(head);
    std::vector<std::string> row;
    for (std::size_t t = 0; t < T; ++t) {
      row.assign(1, std::to_string(t));
      for (std::size_t j = 0; j < ids.size(); ++j) row.push_back(format_double(at(j, t)));
      out += join(row);
    }
    return out;
  };
  std::vector<std::string> site_ids, demand_ids;
  for (const auto& s : inst.sites) site_ids.push_back(s.id);
  for (const auto& d : inst.demands) demand_ids.push_back(d.bus);
  for (const auto& s : inst.sites)
    if (s.cf.size() != T) throw FormatError("site '" + s.id + "' cf length differs from horizon");
  for (const auto& d : inst.demands)
    if (d.lambda.size() != T) throw FormatError("demand of '" + d.bus + "' length differs from horizon");
  const std::string cf = wide(site_ids, [&](std::size_t j, std::size_t t) { return inst.sites[j].cf[t]; });
  const std::string demand =
      wide(demand_ids, [&](std::size_t j, std::size_t t) { return inst.demands[j].lambda[t]; });

  json params = {{"horizon_len", inst.params.horizon_len},
                 {"step_hours", inst.params.step_hours},
                 {"omega", inst.params.omega},
                 {"theta_e", inst.params.theta_e}};

  write_text_file(dir / "buses.csv", buses);
  write_text_file(dir / "lines.csv", lines);
  write_text_file(dir / "sites.csv", sites);
  write_text_file(dir / "cf.csv", cf);
  write_text_file(dir / "demand.csv", demand);
  write_text_file(dir / "gens.csv", gens);
  write_text_file(dir / "storage.csv", storage);
  write_text_file(dir / "params.json", params.dump(2) + "\n");
}

SystemInstance read_instance(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("instance directory '" + dir.string() + "' does not exist");
  SystemInstance inst;

  try {
    const json p = json::parse(read_text_file(dir / "params.json"));
    inst.params.horizon_len = p.at("horizon_len").get<std::size_t>();
    inst.params.step_hours = p.at("step_hours").get<double>();
    inst.params.omega = p.at("omega").get<double>();
    inst.params.theta_e = p.at("theta_e").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("params.json: ") + e.what());
  }
  const std::size_t T = inst.params.horizon_len;

  {
    auto t = read_csv(dir / "buses.csv");
    expect_header(t, kBusCols);
    for (auto& r : t.rows) inst.buses.push_back({r[0], r[1]});
  }
  {
    auto t = read_csv(dir / "lines.csv");
    expect_header(t, kLineCols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      Line l;
      l.id = t.rows[i][0];
      l.from_bus = t.rows[i][1];
      l.to_bus = t.rows[i][2];
      l.kind = parse_kind(t, i, 3);
      l.kappa0 = t.num(i, 4);
      l.kappa_max = t.num(i, 5);
      l.length_km = t.num(i, 6);
      l.zeta = t.num(i, 7);
      l.theta_f = t.num(i, 8);
      l.theta_v = t.num(i, 9);
      inst.lines.push_back(l);
    }
  }
  {
    auto t = read_csv(dir / "sites.csv");
    expect_header(t, kSiteCols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CandidateSite s;
      s.id = t.rows[i][0];
      s.bus = t.rows[i][1];
      s.tech = t.rows[i][2];
      s.lat = t.num(i, 3);
      s.lon = t.num(i, 4);
      s.kappa0 = t.num(i, 5);
      s.kappa_max = t.num(i, 6);
      s.zeta = t.num(i, 7);
      s.theta_f = t.num(i, 8);
      s.theta_v = t.num(i, 9);
      inst.sites.push_back(std::move(s));
    }
  }
  if (fs::exists(dir / "gens.csv")) {
    auto t = read_csv(dir / "gens.csv");
    expect_header(t, kGenCols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      ConventionalGen g;
      g.id = t.rows[i][0];
      g.bus = t.rows[i][1];
      g.tech = t.rows[i][2];
      g.kappa0 = t.num(i, 3);
      g.kappa_max = t.num(i, 4);
      g.zeta = t.num(i, 5);
      g.theta_f = t.num(i, 6);
      g.theta_v = t.num(i, 7);
      g.sizable = t.flag(i, 8);
      inst.generators.push_back(g);
    }
  }
  if (fs::exists(dir / "storage.csv")) {
    auto t = read_csv(dir / "storage.csv");
    expect_header(t, kStorageCols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      StorageUnit u;
      u.id = t.rows[i][0];
      u.bus = t.rows[i][1];
      u.tech = t.rows[i][2];
      u.kappa0 = t.num(i, 3);
      u.kappa_max = t.num(i, 4);
      u.phi = t.num(i, 5);
      u.eta_sd = t.num(i, 6);
      u.eta_c = t.num(i, 7);
      u.eta_d = t.num(i, 8);
      u.zeta = t.num(i, 9);
      u.theta_f = t.num(i, 10);
      u.theta_v = t.num(i, 11);
      u.sizable = t.flag(i, 12);
      inst.storages.push_back(u);
    }
  }

  // Wide series: columns may come in any order but must name known ids once.
  auto read_wide = [T](const CsvTable& t, const std::map<std::string, std::size_t>& known, const char* what) {
    if (t.header.empty() || t.header[0] != "t") throw FormatError(t.file + ": first column must be 't'");
    std::vector<std::size_t> target;
    std::set<std::string> seen;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      auto it = known.find(t.header[c]);
      if (it == known.end()) throw FormatError(t.file + ": unknown " + std::string(what) + " '" + t.header[c] + "'");
      if (!seen.insert(t.header[c]).second)
        throw FormatError(t.file + ": duplicate column '" + t.header[c] + "'");
      target.push_back(it->second);
    }
    if (t.rows.size() != T)
      throw FormatError(t.file + ": expected " + std::to_string(T) + " rows, found " + std::to_string(t.rows.size()));
    std::vector<std::vector<double>> cols(known.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      auto step = text::parse_int(t.rows[i][0]);
      if (!step || *step != static_cast<long long>(i)) t.fail(i, "t must count 0, 1, 2, ...");
      for (std::size_t c = 1; c < t.header.size(); ++c) cols[target[c - 1]].push_back(t.num(i, c));
    }
    return std::make_pair(std::move(cols), std::move(target));
  };

  {
    std::map<std::string, std::size_t> known;
    for (std::size_t i = 0; i < inst.sites.size(); ++i) known[inst.sites[i].id] = i;
    auto t = read_csv(dir / "cf.csv");
    auto [cols, present] = read_wide(t, known, "site");
    if (present.size() != inst.sites.size()) throw FormatError("cf.csv: every site needs a column");
    for (std::size_t i = 0; i < inst.sites.size(); ++i) inst.sites[i].cf = std::move(cols[i]);
  }
  {
    std::map<std::string, std::size_t> known;
    for (std::size_t b = 0; b < inst.buses.size(); ++b) known[inst.buses[b].id] = b;
    auto t = read_csv(dir / "demand.csv");
    auto [cols, present] = read_wide(t, known, "bus");
    std::sort(present.begin(), present.end());
    for (auto b : present) inst.demands.push_back({inst.buses[b].id, std::move(cols[b])});
  }
  return inst;
}

namespace {

Range range_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw SpecError(key + ": expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void read_count(const json& j, const std::string& key, T& out) {
  const auto v = j.get<long long>();
  if (v < 0) throw SpecError(key + " must be >= 0");
  out = static_cast<T>(v);
}

}  // namespace

GenSpec gen_spec_from_json(const std::string& text) {
  GenSpec s = GenSpec::with_default_techs();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("spec must be a JSON object");

  const std::map<std::string, double*> reals{
      {"step_hours", &s.step_hours},
      {"demand_base", &s.demand_base},
      {"demand_amplitude", &s.demand_amplitude},
      {"demand_noise", &s.demand_noise},
      {"line_headroom", &s.line_headroom},
      {"line_zeta_per_km", &s.line_zeta_per_km},
      {"dc_threshold_km", &s.dc_threshold_km},
      {"lat_min", &s.lat_min},
      {"lat_max", &s.lat_max},
      {"lon_min", &s.lon_min},
      {"lon_max", &s.lon_max},
      {"site_spread_km", &s.site_spread_km},
      {"correlation_length_km", &s.correlation_length_km},
      {"wind_persistence", &s.wind_persistence},
      {"gen_kappa0_share", &s.gen_kappa0_share},
      {"gen_kappa_max_share", &s.gen_kappa_max_share},
      {"gen_zeta", &s.gen_zeta},
      {"gen_theta_f", &s.gen_theta_f},
      {"gen_theta_v", &s.gen_theta_v},
      {"storage_kappa_max", &s.storage_kappa_max},
      {"storage_phi", &s.storage_phi},
      {"storage_zeta", &s.storage_zeta},
      {"storage_eta", &s.storage_eta},
      {"theta_e", &s.theta_e},
      {"omega", &s.omega},
  };
  const std::map<std::string, std::size_t*> counts{
      {"n_buses", &s.n_buses},           {"horizon", &s.horizon},
      {"extra_edges", &s.extra_edges},   {"gens_per_bus", &s.gens_per_bus},
      {"storage_per_bus", &s.storage_per_bus},
  };

  try {
    for (const auto& [key, val] : j.items()) {
      if (auto r = reals.find(key); r != reals.end()) {
        *r->second = val.get<double>();
      } else if (auto c = counts.find(key); c != counts.end()) {
        read_count(val, key, *c->second);
      } else if (key == "seed") {
        read_count(val, key, s.seed);
      } else if (key == "topology") {
        s.topology = topology_from_string(val.get<std::string>());
      } else if (key == "line_kappa0") {
        s.line_kappa0 = range_from(val, key);
      } else if (key == "techs") {
        if (!val.is_object()) throw SpecError("techs must be an object keyed by technology");
        s.techs.clear();
        for (const auto& [tech, tj] : val.items()) {
          SiteTechSpec ts;
          for (const auto& [k, v] : tj.items()) {
            const std::string where = "techs." + tech + "." + k;
            if (k == "per_bus") read_count(v, where, ts.per_bus);
            else if (k == "kappa_max") ts.kappa_max = range_from(v, where);
            else if (k == "zeta") ts.zeta = range_from(v, where);
            else if (k == "theta_f") ts.theta_f = v.get<double>();
            else if (k == "theta_v") ts.theta_v = v.get<double>();
            else if (k == "offset_km") ts.offset_km = v.get<double>();
            else throw SpecError("unknown key '" + where + "'");
          }
          s.techs[tech] = ts;
        }
      } else {
        throw SpecError("unknown spec key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec has a field of the wrong type: ") + e.what());
  }
  validate_spec(s);
  return s;
}

GenSpec read_gen_spec(const fs::path& path) { return gen_spec_from_json(read_text_file(path)); }

}  // namespace respan
