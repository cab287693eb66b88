#include "respan/pipeline.hpp"

#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>

extern char** environ;

namespace respan {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::FLP: return "FLP";
    case ModelKind::SITE: return "SITE";
    case ModelKind::RLP: return "RLP";
  }
  return "FLP";
}

namespace {

using Clock = std::chrono::steady_clock;

std::optional<std::size_t> proc_status_kb(const std::string& key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ":", 0) != 0) continue;
    std::istringstream ss(line.substr(key.size() + 1));
    std::size_t kb = 0;
    if (ss >> kb) return kb;
  }
  return std::nullopt;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  out.flush();
  return static_cast<bool>(out);
}

std::size_t estimated_memory(const LpProblem& lp) { return lp.memory_bytes() * 3; }

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

struct ChildResult {
  int exit_code = -1;
  std::size_t max_rss_bytes = 0;
};

ChildResult run_shell(const std::string& command) {
  pid_t pid = 0;
  std::string cmd = command;
  char sh[] = "/bin/sh";
  char flag[] = "-c";
  char* argv[] = {sh, flag, cmd.data(), nullptr};
  if (posix_spawn(&pid, "/bin/sh", nullptr, nullptr, argv, environ) != 0)
    throw SolveError("failed to launch external solver command");
  int status = 0;
  rusage usage{};
  if (wait4(pid, &status, 0, &usage) < 0) throw SolveError("failed waiting for external solver");
  ChildResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  r.max_rss_bytes = static_cast<std::size_t>(usage.ru_maxrss) * 1024;
  return r;
}

std::filesystem::path fresh_work_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("respan-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

SolveOutcome solve_external(const LpProblem& lp, const SolverConfig& cfg, const std::string& tag) {
  if (cfg.command.empty()) throw SolveError("external solver selected but no command configured");
  const bool temp = cfg.work_dir.empty();
  const auto dir = temp ? fresh_work_dir() : cfg.work_dir;
  std::filesystem::create_directories(dir);
  const auto mps = dir / (tag + ".mps");
  const auto solfile = dir / (tag + ".sol");
  std::filesystem::remove(solfile);

  try {
    export_mps(lp, mps, tag);
  } catch (const LpError& e) {
    throw SolveError(e.what());
  }

  std::string cmd = cfg.command;
  if (cmd.find("{mps}") == std::string::npos && cmd.find("{sol}") == std::string::npos)
    cmd += " {mps} {sol}";
  cmd = replace_all(cmd, "{mps}", shell_quote(mps.string()));
  cmd = replace_all(cmd, "{sol}", shell_quote(solfile.string()));

  const auto start = Clock::now();
  const ChildResult child = run_shell(cmd);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (child.exit_code != 0)
    throw SolveError("external solver exited with code " + std::to_string(child.exit_code) + ": " + cmd);

  ImportedSolution imported;
  try {
    imported = import_solution(lp, solfile);
  } catch (const LpError& e) {
    throw SolveError(std::string("reading external solution: ") + e.what());
  }
  SolveOutcome out;
  out.solution = std::move(imported.solution);
  if (out.solution.wall_seconds <= 0.0) out.solution.wall_seconds = elapsed;
  if (imported.peak_memory_bytes) {
    out.peak_memory_bytes = *imported.peak_memory_bytes;
  } else {
    out.peak_memory_bytes = child.max_rss_bytes;
  }
  if (out.peak_memory_bytes == 0) {
    out.peak_memory_bytes = estimated_memory(lp);
    out.peak_memory_estimated = true;
  }
  if (imported.warnings > 0 && out.solution.status == LpStatus::Optimal)
    throw SolveError("external solution is missing " + std::to_string(imported.warnings) + " variable(s)");

  if (temp && !cfg.keep_files) std::filesystem::remove_all(dir);
  return out;
}

SolveOutcome solve_in_process(const LpProblem& lp, const SolverConfig& cfg) {
  SolveOutcome out;
  const bool reset = reset_peak_rss();
  const auto base = proc_status_kb("VmRSS");
  try {
    out.solution = solve_reference(lp, cfg.simplex);
  } catch (const LpError& e) {
    throw SolveError(e.what());
  }
  const auto peak = proc_status_kb("VmHWM");
  if (reset && base && peak && *peak > *base) {
    out.peak_memory_bytes = (*peak - *base) * 1024;
  } else {
    out.peak_memory_bytes = estimated_memory(lp);
    out.peak_memory_estimated = true;
  }
  return out;
}

ModelSize size_of(const LpProblem& lp) { return {lp.num_vars(), lp.num_rows(), lp.num_nonzeros()}; }

RunRecord solve_cep(const SystemInstance& inst, const BuiltLp& built, ModelKind kind,
                    const SolverConfig& solver, const BuildOptions& opts) {
  RunRecord rec;
  rec.model = kind;
  rec.solver = solver.label();
  rec.size = size_of(built.lp);
  auto outcome = solve_lp(built.lp, solver, kind == ModelKind::FLP ? "flp" : "rlp");
  rec.status = outcome.solution.status;
  rec.objective = outcome.solution.objective;
  rec.peak_memory_bytes = outcome.peak_memory_bytes;
  rec.peak_memory_estimated = outcome.peak_memory_estimated;
  rec.solve_seconds = outcome.solution.wall_seconds;
  rec.iterations = outcome.solution.iterations;
  if (rec.status != LpStatus::Optimal)
    throw SolveError(std::string(to_string(kind)) + " solve ended with status " + to_string(rec.status));
  SolvedDesign design = extract_design(inst, built.vars, outcome.solution);
  design.stats.variables = rec.size.variables;
  design.stats.constraints = rec.size.constraints;
  design.stats.nonzeros = rec.size.nonzeros;
  rec.residuals = check_design(inst, design, opts);
  rec.design = std::move(design);
  return rec;
}

}  // namespace

SolveOutcome solve_lp(const LpProblem& lp, const SolverConfig& solver, const std::string& tag) {
  return solver.kind == SolverKind::Reference ? solve_in_process(lp, solver) : solve_external(lp, solver, tag);
}

BuiltLp build_rlp(const SystemInstance& inst, const ScreeningResult& screening, const BuildOptions& opts) {
  return build_flp_restricted(inst, screening.keep_mask(inst.sites.size()), opts);
}

RunRecord run_flp(const SystemInstance& inst, const SolverConfig& solver, const BuildOptions& opts) {
  require_valid(inst);
  BuiltLp built = build_flp(inst, opts);
  return solve_cep(inst, built, ModelKind::FLP, solver, opts);
}

RunRecord run_rlp(const SystemInstance& inst, const ScreeningResult& screening, const SolverConfig& solver,
                  const BuildOptions& opts) {
  require_valid(inst);
  BuiltLp built = build_rlp(inst, screening, opts);
  return solve_cep(inst, built, ModelKind::RLP, solver, opts);
}

ScreeningParams resolve_params(const SystemInstance& inst, const SmOptions& opts) {
  ScreeningParams p;
  p.selection_threshold = opts.selection_threshold;
  p.delta_tau = opts.delta_tau ? *opts.delta_tau : estimate_delta_tau(inst);
  p.xi = opts.xi ? *opts.xi : estimate_xi(inst, p.delta_tau, opts.xi_options);
  return p;
}

SmResult run_sm(const SystemInstance& inst, const SolverConfig& solver, const SmOptions& opts) {
  require_valid(inst);
  SmResult res;
  res.params = resolve_params(inst, opts);
  res.delta_tau_overridden = opts.delta_tau.has_value();
  res.xi_overridden = opts.xi.has_value();

  BuiltLp siting = build_siting_lp(inst, res.params);
  RunRecord& site = res.site;
  site.model = ModelKind::SITE;
  site.solver = solver.label();
  site.size = size_of(siting.lp);
  auto outcome = solve_lp(siting.lp, solver, "site");
  site.status = outcome.solution.status;
  site.objective = outcome.solution.objective;
  site.peak_memory_bytes = outcome.peak_memory_bytes;
  site.peak_memory_estimated = outcome.peak_memory_estimated;
  site.solve_seconds = outcome.solution.wall_seconds;
  site.iterations = outcome.solution.iterations;
  if (site.status != LpStatus::Optimal)
    throw SolveError(std::string("SITE solve ended with status ") + to_string(site.status));

  ScreeningResult screening =
      extract_retained(inst, siting.vars, outcome.solution, res.params.selection_threshold);
  screening.stats.variables = site.size.variables;
  screening.stats.constraints = site.size.constraints;
  screening.stats.nonzeros = site.size.nonzeros;
  if (opts.force_retain_all) {
    auto all = ScreeningResult::retain_all(inst);
    screening.retained = std::move(all.retained);
  }
  site.screening = screening;

  res.rlp = run_rlp(inst, screening, solver, opts.build);
  return res;
}

}  // namespace respan
