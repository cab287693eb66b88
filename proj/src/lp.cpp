#include "respan/lp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "respan/text.hpp"

namespace respan {

VarId LpProblem::add_var(std::string name, double lb, double ub, double obj_coef) {
  if (name.empty() || text::has_whitespace(name))
    throw LpError("invalid variable name '" + name + "'");
  if (std::isnan(lb) || std::isnan(ub) || lb == kInf || ub == -kInf)
    throw LpError("invalid bounds for variable '" + name + "'");
  if (lb > ub) throw LpError("inverted bounds for variable '" + name + "'");
  if (!std::isfinite(obj_coef)) throw LpError("non-finite objective for '" + name + "'");
  auto idx = static_cast<std::uint32_t>(vars_.size());
  auto [it, inserted] = by_name_.emplace(name, idx);
  if (!inserted) throw LpError("duplicate variable name '" + name + "'");
  vars_.push_back({std::move(name), lb, ub, obj_coef});
  slot_.push_back(-1);
  return VarId{idx};
}

RowId LpProblem::add_constraint(std::span<const Term> terms, double lb, double ub,
                                std::string name) {
  if (std::isnan(lb) || std::isnan(ub) || lb > ub || lb == kInf || ub == -kInf)
    throw LpError("invalid row bounds for row " + std::to_string(num_rows()));
  const std::size_t begin = row_var_.size();
  for (const Term& t : terms) {
    if (t.var.index >= vars_.size())
      throw LpError("unknown variable handle " + std::to_string(t.var.index));
    if (!std::isfinite(t.coef)) throw LpError("non-finite coefficient in row");
    auto& slot = slot_[t.var.index];
    if (slot >= 0) {
      row_coef_[static_cast<std::size_t>(slot)] += t.coef;
    } else {
      slot = static_cast<std::int64_t>(row_var_.size());
      row_var_.push_back(t.var.index);
      row_coef_.push_back(t.coef);
    }
  }
  // reset scratch and compact away zero coefficients
  std::size_t out = begin;
  for (std::size_t k = begin; k < row_var_.size(); ++k) {
    slot_[row_var_[k]] = -1;
    if (row_coef_[k] != 0.0) {
      row_var_[out] = row_var_[k];
      row_coef_[out] = row_coef_[k];
      ++out;
    }
  }
  row_var_.resize(out);
  row_coef_.resize(out);
  row_start_.push_back(out);
  row_lb_.push_back(lb);
  row_ub_.push_back(ub);
  if (name.empty()) name = "R" + std::to_string(row_lb_.size() - 1);
  row_name_.push_back(std::move(name));
  return RowId{static_cast<std::uint32_t>(row_lb_.size() - 1)};
}

std::int64_t LpProblem::find_var(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::size_t LpProblem::memory_bytes() const {
  std::size_t bytes = row_var_.size() * (sizeof(std::uint32_t) + sizeof(double));
  bytes += row_lb_.size() * (2 * sizeof(double) + sizeof(std::size_t));
  bytes += vars_.size() * (sizeof(Variable) + sizeof(std::int64_t));
  for (const auto& v : vars_) bytes += v.name.size();
  for (const auto& n : row_name_) bytes += n.size() + sizeof(std::string);
  return bytes;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
    case LpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

LpStatus lp_status_from_string(const std::string& s) {
  // case-insensitive: external solvers are not consistent about it
  auto lower = [](std::string v) {
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return v;
  };
  for (auto st : {LpStatus::Optimal, LpStatus::Infeasible, LpStatus::Unbounded,
                  LpStatus::IterationLimit, LpStatus::NumericalFailure})
    if (lower(s) == lower(to_string(st))) return st;
  throw LpError("unknown solver status '" + s + "'");
}

double evaluate_objective(const LpProblem& lp, std::span<const double> primal) {
  double obj = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) obj += lp.vars()[j].obj * primal[j];
  return obj;
}

FeasibilityReport check_feasibility(const LpProblem& lp, std::span<const double> primal) {
  if (primal.size() != lp.num_vars()) throw LpError("primal vector size mismatch");
  FeasibilityReport rep;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const auto& v = lp.vars()[j];
    double viol = std::max({0.0, v.lb - primal[j], primal[j] - v.ub});
    if (viol > rep.max_bound_violation) {
      rep.max_bound_violation = viol;
      rep.worst_var = j;
    }
  }
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    auto vars = lp.row_vars(r);
    auto coefs = lp.row_coefs(r);
    double act = 0.0;
    for (std::size_t k = 0; k < vars.size(); ++k) act += coefs[k] * primal[vars[k]];
    double viol = std::max({0.0, lp.row_lb(r) - act, act - lp.row_ub(r)});
    if (viol > rep.max_row_violation) {
      rep.max_row_violation = viol;
      rep.worst_row = r;
    }
  }
  return rep;
}

namespace {

// Fixed-MPS field start columns (0-based) for fields 1..6.
constexpr std::size_t kFieldStart[] = {1, 4, 14, 24, 39, 49};

std::string mps_line(std::initializer_list<std::string_view> fields, std::size_t first = 0) {
  std::string line;
  std::size_t f = first;
  for (auto field : fields) {
    std::size_t target = kFieldStart[f++];
    if (field.empty()) continue;
    if (line.size() < target)
      line.append(target - line.size(), ' ');
    else if (!line.empty())
      line.append(2, ' ');
    line.append(field);
  }
  return line;
}

}  // namespace

void export_mps(const LpProblem& lp, const std::filesystem::path& path,
                const std::string& model_name) {
  std::ofstream out(path);
  if (!out) throw LpError("cannot open '" + path.string() + "' for writing");

  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  const std::string obj_row = "COST";

  enum class Kind { E, G, L, N };
  std::vector<Kind> kind(m);
  for (std::size_t r = 0; r < m; ++r) {
    double lo = lp.row_lb(r), hi = lp.row_ub(r);
    if (lo == hi) kind[r] = Kind::E;
    else if (std::isfinite(lo)) kind[r] = Kind::G;
    else if (std::isfinite(hi)) kind[r] = Kind::L;
    else kind[r] = Kind::N;
  }

  // column-wise copy of the matrix
  std::vector<std::size_t> col_start(n + 1, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (auto j : lp.row_vars(r)) ++col_start[j + 1];
  for (std::size_t j = 0; j < n; ++j) col_start[j + 1] += col_start[j];
  std::vector<std::size_t> col_row(lp.num_nonzeros());
  std::vector<double> col_val(lp.num_nonzeros());
  {
    auto fill = col_start;
    for (std::size_t r = 0; r < m; ++r) {
      auto vars = lp.row_vars(r);
      auto coefs = lp.row_coefs(r);
      for (std::size_t k = 0; k < vars.size(); ++k) {
        auto pos = fill[vars[k]]++;
        col_row[pos] = r;
        col_val[pos] = coefs[k];
      }
    }
  }

  out << "NAME          " << model_name << '\n';
  out << "ROWS\n";
  out << mps_line({"N", obj_row}) << '\n';
  for (std::size_t r = 0; r < m; ++r) {
    const char* k = kind[r] == Kind::E ? "E" : kind[r] == Kind::G ? "G" : kind[r] == Kind::L ? "L" : "N";
    out << mps_line({k, lp.row_name(r)}) << '\n';
  }

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.vars()[j];
    bool wrote = false;
    if (v.obj != 0.0) {
      out << mps_line({v.name, obj_row, text::format_double(v.obj)}, 1) << '\n';
      wrote = true;
    }
    for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k) {
      out << mps_line({v.name, lp.row_name(col_row[k]), text::format_double(col_val[k])}, 1)
          << '\n';
      wrote = true;
    }
    if (!wrote) out << mps_line({v.name, obj_row, "0"}, 1) << '\n';
  }

  out << "RHS\n";
  for (std::size_t r = 0; r < m; ++r) {
    double rhs = 0.0;
    switch (kind[r]) {
      case Kind::E:
      case Kind::G: rhs = lp.row_lb(r); break;
      case Kind::L: rhs = lp.row_ub(r); break;
      case Kind::N: continue;
    }
    if (rhs != 0.0)
      out << mps_line({"RHS", lp.row_name(r), text::format_double(rhs)}, 1) << '\n';
  }

  out << "RANGES\n";
  for (std::size_t r = 0; r < m; ++r) {
    if (kind[r] == Kind::G && std::isfinite(lp.row_ub(r)))
      out << mps_line({"RNG", lp.row_name(r), text::format_double(lp.row_ub(r) - lp.row_lb(r))},
                      1)
          << '\n';
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.vars()[j];
    auto bound = [&](const char* type, std::string_view value) {
      out << mps_line({type, "BND", v.name, value}) << '\n';
    };
    if (v.lb == v.ub) {
      bound("FX", text::format_double(v.lb));
    } else if (v.lb == -kInf && v.ub == kInf) {
      bound("FR", "");
    } else {
      if (v.lb == -kInf)
        bound("MI", "");
      else if (v.lb != 0.0)
        bound("LO", text::format_double(v.lb));
      if (v.ub != kInf) bound("UP", text::format_double(v.ub));
    }
  }
  out << "ENDATA\n";
  if (!out) throw LpError("write failure on '" + path.string() + "'");
}

ImportedSolution import_solution(const LpProblem& lp, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LpError("cannot open solution file '" + path.string() + "'");

  ImportedSolution result;
  auto& sol = result.solution;
  sol.status = LpStatus::Optimal;
  std::vector<double> values(lp.num_vars(), 0.0);
  std::vector<char> seen(lp.num_vars(), 0);

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = text::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      auto comment = text::trim(body.substr(1));
      auto colon = comment.find(':');
      if (colon == std::string_view::npos) continue;
      auto key = text::trim(comment.substr(0, colon));
      auto val = text::trim(comment.substr(colon + 1));
      if (key == "status") {
        sol.status = lp_status_from_string(std::string(val));
      } else if (key == "solve_seconds") {
        if (auto s = text::parse_double(val)) sol.wall_seconds = *s;
      } else if (key == "peak_memory_bytes") {
        if (auto b = text::parse_int(val); b && *b >= 0) result.peak_memory_bytes = static_cast<std::size_t>(*b);
      } else if (key == "iterations") {
        if (auto it = text::parse_int(val)) sol.iterations = static_cast<std::size_t>(*it);
      }
      continue;
    }
    auto fields = text::split_ws(body);
    if (fields.size() != 2)
      throw LpError("malformed solution line " + std::to_string(lineno) + ": '" + line + "'");
    auto idx = lp.find_var(fields[0]);
    if (idx < 0) throw LpError("unknown variable '" + fields[0] + "' in solution file");
    auto value = text::parse_double(fields[1]);
    if (!value)
      throw LpError("malformed value on solution line " + std::to_string(lineno) + ": '" +
                    fields[1] + "'");
    values[static_cast<std::size_t>(idx)] = *value;
    seen[static_cast<std::size_t>(idx)] = 1;
  }

  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (seen[j]) continue;
    const auto& v = lp.vars()[j];
    if (std::isfinite(v.lb))
      values[j] = v.lb;
    else if (std::isfinite(v.ub) && v.ub < 0.0)
      values[j] = v.ub;
    else
      values[j] = 0.0;
    ++result.warnings;
  }
  sol.objective = evaluate_objective(lp, values);
  sol.primal = std::move(values);
  return result;
}

}  // namespace respan
