#pragma once

// Instance directory format (CSV with header rows, '.' decimals) and the
// JSON generator spec. Numbers are written in shortest round-trip form, so
// write -> read -> write is byte-identical.
//
//   buses.csv    id,name
//   lines.csv    id,from,to,kind,kappa0,kappa_max,length_km,zeta,theta_f,theta_v
//   sites.csv    id,bus,tech,lat,lon,kappa0,kappa_max,zeta,theta_f,theta_v
//   cf.csv       t,<site id>...
//   demand.csv   t,<bus id>...
//   gens.csv     id,bus,tech,kappa0,kappa_max,zeta,theta_f,theta_v,sizable
//   storage.csv  id,bus,tech,kappa0,kappa_max,phi,eta_sd,eta_c,eta_d,zeta,theta_f,theta_v,sizable
//   params.json  horizon_len, step_hours, omega, theta_e

#include <filesystem>
#include <stdexcept>
#include <string>

#include "respan/instance_gen.hpp"
#include "respan/system_model.hpp"

namespace respan {

/// Malformed file contents (bad header, unparsable number, unknown id).
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or unreadable/unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Writes all instance files into `dir` (created if needed).
void write_instance(const SystemInstance& inst, const std::filesystem::path& dir);

/// Reads an instance directory. gens.csv and storage.csv are optional.
/// The result is not validated; callers decide when to run validate_instance.
SystemInstance read_instance(const std::filesystem::path& dir);

/// Generator spec from JSON. Unknown keys are rejected so typos surface.
GenSpec gen_spec_from_json(const std::string& text);
GenSpec read_gen_spec(const std::filesystem::path& path);

}  // namespace respan
