#pragma once

// Solver-agnostic sparse LP (minimization) with row and column bounds, a
// dense reference simplex for desk-scale problems, MPS export for external
// solvers and import of their name/value solution files.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace respan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Feasibility tolerance (absolute) used for bound/row checks everywhere.
inline constexpr double kFeasTol = 1e-7;
/// Relative tolerance for objective comparisons.
inline constexpr double kObjRelTol = 1e-6;

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VarId {
  std::uint32_t index = 0;
  bool operator==(const VarId&) const = default;
};

struct RowId {
  std::uint32_t index = 0;
  bool operator==(const RowId&) const = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;
};

class LpProblem {
 public:
  /// Registers a variable. Names must be unique and contain no whitespace
  /// (they are written verbatim into MPS files).
  VarId add_var(std::string name, double lb, double ub, double obj_coef);

  /// Appends lb <= sum(terms) <= ub. Zero coefficients are dropped and
  /// repeated variables are merged. Equality rows use lb == ub.
  RowId add_constraint(std::span<const Term> terms, double lb, double ub,
                       std::string name = {});
  RowId add_constraint(std::initializer_list<Term> terms, double lb, double ub,
                       std::string name = {}) {
    return add_constraint(std::span<const Term>(terms.begin(), terms.size()), lb, ub,
                          std::move(name));
  }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_rows() const { return row_lb_.size(); }
  std::size_t num_nonzeros() const { return row_var_.size(); }

  const Variable& var(VarId v) const { return vars_.at(v.index); }
  const std::vector<Variable>& vars() const { return vars_; }

  /// Index of a variable by name, or -1.
  std::int64_t find_var(const std::string& name) const;

  double row_lb(std::size_t r) const { return row_lb_[r]; }
  double row_ub(std::size_t r) const { return row_ub_[r]; }
  const std::string& row_name(std::size_t r) const { return row_name_[r]; }

  /// Terms of row r as parallel spans (variable indices, coefficients).
  std::span<const std::uint32_t> row_vars(std::size_t r) const {
    return {row_var_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  std::span<const double> row_coefs(std::size_t r) const {
    return {row_coef_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }

  /// Approximate in-memory footprint of the matrix and registries.
  std::size_t memory_bytes() const;

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, std::uint32_t> by_name_;

  std::vector<std::size_t> row_start_{0};
  std::vector<std::uint32_t> row_var_;
  std::vector<double> row_coef_;
  std::vector<double> row_lb_;
  std::vector<double> row_ub_;
  std::vector<std::string> row_name_;

  // scratch for duplicate merging in add_constraint
  std::vector<std::int64_t> slot_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);
LpStatus lp_status_from_string(const std::string& s);

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> primal;
  double objective = 0.0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
};

struct SimplexOptions {
  std::size_t max_vars = 5000;
  std::size_t max_iterations = 1'000'000;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  double primal_tol = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_switch = 50;
};

/// Dense bounded-variable two-phase primal simplex. Deterministic; Dantzig
/// pricing falls back to Bland's rule on degeneracy, so it always terminates.
/// Throws LpError if the problem exceeds `opts.max_vars`.
LpSolution solve_reference(const LpProblem& lp, const SimplexOptions& opts = {});

/// Objective value of `primal` under `lp`.
double evaluate_objective(const LpProblem& lp, std::span<const double> primal);

struct FeasibilityReport {
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_var = 0;
};

/// Independent residual check of a primal point (does not use solver state).
FeasibilityReport check_feasibility(const LpProblem& lp, std::span<const double> primal);

/// Writes `lp` as MPS (NAME/ROWS/COLUMNS/RHS/RANGES/BOUNDS/ENDATA). Columns
/// appear in registration order. Throws LpError on I/O failure.
void export_mps(const LpProblem& lp, const std::filesystem::path& path,
                const std::string& model_name = "RESPAN");

struct ImportedSolution {
  LpSolution solution;
  std::size_t warnings = 0;  // variables missing from the file
  std::optional<std::size_t> peak_memory_bytes;  // when reported by the solver
};

/// Reads `name value` lines. Lines starting with '#' are comments; the
/// comments `# status: <Status>`, `# solve_seconds: <s>`, `# iterations: <n>`
/// and `# peak_memory_bytes: <n>` are honored.
/// Missing variables default to their lower bound (or the finite bound
/// nearest zero) and are counted as warnings. Unknown names and malformed
/// lines throw LpError.
ImportedSolution import_solution(const LpProblem& lp, const std::filesystem::path& path);

}  // namespace respan
