// respan: synthetic instance generation, benchmark and two-stage runs,
// screening-parameter estimation and run comparison.
//
// Exit codes: 0 success, 2 invalid input (spec, config, instance, params),
// 3 solver failure, 4 I/O failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "respan/instance_gen.hpp"
#include "respan/instance_io.hpp"
#include "respan/metrics.hpp"
#include "respan/pipeline.hpp"
#include "respan/reports.hpp"

namespace fs = std::filesystem;
using namespace respan;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct RunFlags {
  std::string config;
  std::string instance;
  std::string solver;
  std::string solver_command;
  std::string out;
  bool keep_files = false;
  bool cyclic_storage = false;
};

struct SmFlags {
  std::string params;
  std::optional<double> xi;
  std::optional<std::size_t> delta_tau;
  std::optional<double> threshold;
  std::optional<std::size_t> peak_steps;
  bool retain_all = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("-c,--config", f.config, "run configuration JSON");
  cmd->add_option("-i,--instance", f.instance, "instance directory (overrides the config)");
  cmd->add_option("-s,--solver", f.solver, "reference | external-mps")
      ->check(CLI::IsMember({"reference", "external-mps"}));
  cmd->add_option("--solver-command", f.solver_command,
                  "external solver command; {mps} and {sol} are substituted");
  cmd->add_option("-o,--out", f.out, "output directory (overrides the config)");
  cmd->add_flag("--keep-files", f.keep_files, "keep exported MPS and solution files");
  cmd->add_flag("--cyclic-storage", f.cyclic_storage, "tie final storage level to the initial one");
}

void add_sm_flags(CLI::App* cmd, SmFlags& f) {
  cmd->add_option("-p,--params", f.params, "screening parameters JSON (as written by estimate-params)");
  cmd->add_option("--xi", f.xi, "feed-in target applied to every bus, in [0,1]");
  cmd->add_option("--delta-tau", f.delta_tau, "time-slice length in steps");
  cmd->add_option("--threshold", f.threshold, "retention threshold on kappa0 + K, MW");
  cmd->add_option("--peak-steps", f.peak_steps, "peak-demand steps averaged by the xi estimator");
}

RunConfig resolve_config(const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    const fs::path path(f.config);
    cfg = run_config_from_json(read_text_file(path), path.parent_path());
  }
  if (!f.instance.empty()) cfg.instance = f.instance;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.solver.empty())
    cfg.solver.kind = f.solver == "reference" ? SolverKind::Reference : SolverKind::ExternalMps;
  if (!f.solver_command.empty()) {
    cfg.solver.command = f.solver_command;
    if (f.solver.empty()) cfg.solver.kind = SolverKind::ExternalMps;
  }
  if (f.keep_files) cfg.solver.keep_files = true;
  if (f.cyclic_storage) cfg.cyclic_storage = true;
  if (cfg.output_dir.empty()) cfg.output_dir = ".";
  validate_run_config(cfg);
  return cfg;
}

void apply_sm_flags(RunConfig& cfg, const SmFlags& f) {
  if (!f.params.empty()) {
    auto o = screening_overrides_from_json(read_text_file(f.params));
    if (o.delta_tau) cfg.screening.delta_tau = o.delta_tau;
    if (o.xi) cfg.screening.xi = o.xi;
    if (o.selection_threshold) cfg.screening.selection_threshold = o.selection_threshold;
    if (o.peak_steps) cfg.screening.peak_steps = o.peak_steps;
  }
  if (f.xi) cfg.screening.xi = *f.xi;
  if (f.delta_tau) cfg.screening.delta_tau = *f.delta_tau;
  if (f.threshold) cfg.screening.selection_threshold = *f.threshold;
  if (f.peak_steps) cfg.screening.peak_steps = *f.peak_steps;
}

SystemInstance load_valid(const fs::path& dir) {
  SystemInstance inst = read_instance(dir);
  require_valid(inst);
  return inst;
}

std::string instance_label(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

void warn_residuals(const RunRecord& rec, double tol) {
  if (rec.residuals && rec.residuals->max() > tol)
    std::cerr << "warning: " << to_string(rec.model) << " design residual " << rec.residuals->max()
              << " exceeds feasibility tolerance " << tol << "\n";
}

int cmd_gen(const std::string& spec_path, const std::string& out) {
  const GenSpec spec = read_gen_spec(spec_path);
  const SystemInstance inst = generate(spec);
  write_instance(inst, out);
  std::cout << "wrote " << inst.buses.size() << " buses, " << inst.sites.size() << " sites, " << inst.horizon()
            << " steps to " << out << "\n";
  return 0;
}

int cmd_run_flp(const RunFlags& f) {
  const RunConfig cfg = resolve_config(f);
  const SystemInstance inst = load_valid(cfg.instance);
  BuildOptions build;
  build.cyclic_storage = cfg.cyclic_storage;
  const RunRecord rec = run_flp(inst, cfg.solver, build);
  warn_residuals(rec, cfg.feasibility_tol);
  RunMeta meta;
  meta.instance = instance_label(cfg.instance);
  write_text_file(cfg.output_dir / "flp_run.json", run_record_json(rec, meta, inst));
  write_text_file(cfg.output_dir / "design.csv", design_csv(inst, *rec.design));
  std::cout << "FLP objective " << rec.objective << " (" << rec.size.variables << " variables)\n";
  return 0;
}

int cmd_run_sm(const RunFlags& f, const SmFlags& s) {
  RunConfig cfg = resolve_config(f);
  apply_sm_flags(cfg, s);
  const SystemInstance inst = load_valid(cfg.instance);
  SmOptions opts = sm_options(cfg, inst);
  opts.force_retain_all = s.retain_all;
  const SmResult res = run_sm(inst, cfg.solver, opts);
  warn_residuals(res.rlp, cfg.feasibility_tol);

  RunMeta site_meta;
  site_meta.instance = instance_label(cfg.instance);
  site_meta.params = res.params;
  site_meta.delta_tau_overridden = res.delta_tau_overridden;
  site_meta.xi_overridden = res.xi_overridden;
  RunMeta rlp_meta;
  rlp_meta.instance = site_meta.instance;
  write_text_file(cfg.output_dir / "site_run.json", run_record_json(res.site, site_meta, inst));
  write_text_file(cfg.output_dir / "rlp_run.json", run_record_json(res.rlp, rlp_meta, inst));
  write_text_file(cfg.output_dir / "design.csv", design_csv(inst, *res.rlp.design));
  write_text_file(cfg.output_dir / "retained.csv", retained_csv(inst, res.screening()));
  std::cout << "retained " << res.screening().retained_count() << " of " << inst.sites.size()
            << " sites; RLP objective " << res.rlp.objective << "\n";
  return 0;
}

int cmd_estimate(const RunFlags& f, const SmFlags& s) {
  RunConfig cfg = resolve_config(f);
  apply_sm_flags(cfg, s);
  const SystemInstance inst = load_valid(cfg.instance);
  const ScreeningParams p = resolve_params(inst, sm_options(cfg, inst));
  if (auto v = validate_params(p, inst); !v.empty()) throw ValidationError(std::move(v));
  const std::string body = params_json(p, inst);
  write_text_file(cfg.output_dir / "params.json", body);
  std::cout << body;
  return 0;
}

int cmd_compare(const std::string& flp_dir, const std::string& sm_dir, const std::string& out) {
  const fs::path fd(flp_dir), sd(sm_dir);
  const LoadedRun flp = run_record_from_json(read_text_file(fd / "flp_run.json"));
  LoadedRun site = run_record_from_json(read_text_file(sd / "site_run.json"));
  LoadedRun rlp = run_record_from_json(read_text_file(sd / "rlp_run.json"));
  if (flp.instance != rlp.instance || site.instance != rlp.instance)
    throw FormatError("runs refer to different instances: '" + flp.instance + "' vs '" + rlp.instance + "'");
  const SystemInstance inst = load_valid(flp.instance);

  RunRecord f = flp.record;
  f.design = design_from_csv(inst, read_text_file(fd / "design.csv"));
  RunRecord r = rlp.record;
  r.design = design_from_csv(inst, read_text_file(sd / "design.csv"));
  RunRecord st = site.record;
  st.screening = retained_from_csv(inst, read_text_file(sd / "retained.csv"));

  const ComparisonReport rep = compare_runs(inst, f, st, r);
  const fs::path od(out);
  write_text_file(od / "report.json", report_json(rep));
  write_text_file(od / "distances.csv", distances_csv(rep));
  write_text_file(od / "capacities.csv", capacities_csv(rep));
  std::cout << "TSCE " << rep.tsce << ", variable reduction " << rep.deltas.variables << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renewable site screening for capacity expansion planning"};
  app.require_subcommand(1);
  app.footer("Environment: REsPAN_THREADS sets the HiGHS thread count in tools/highs_solve.py.\n"
             "Exit codes: 2 invalid input, 3 solver failure, 4 I/O failure.");

  std::string spec_path, gen_out;
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance directory from a JSON spec");
  gen->add_option("-s,--spec", spec_path, "generator spec JSON")->required();
  gen->add_option("-o,--out", gen_out, "instance directory to write")->required();

  RunFlags flp_flags;
  auto* flp = app.add_subcommand("run-flp", "solve the full capacity expansion LP");
  add_run_flags(flp, flp_flags);

  RunFlags sm_run_flags;
  SmFlags sm_flags;
  auto* sm = app.add_subcommand("run-sm", "screen sites, then solve the reduced LP");
  add_run_flags(sm, sm_run_flags);
  add_sm_flags(sm, sm_flags);
  sm->add_flag("--retain-all", sm_flags.retain_all, "keep every site whatever the screening outcome");

  RunFlags est_flags;
  SmFlags est_sm;
  auto* est = app.add_subcommand("estimate-params", "estimate the slice length and per-bus feed-in targets");
  add_run_flags(est, est_flags);
  add_sm_flags(est, est_sm);

  std::string cmp_flp, cmp_sm, cmp_out = ".";
  auto* cmp = app.add_subcommand("compare", "compare an FLP run directory with an SM run directory");
  cmp->add_option("--flp", cmp_flp, "directory written by run-flp")->required();
  cmp->add_option("--sm", cmp_sm, "directory written by run-sm")->required();
  cmp->add_option("-o,--out", cmp_out, "report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec_path, gen_out);
    if (flp->parsed()) return cmd_run_flp(flp_flags);
    if (sm->parsed()) return cmd_run_sm(sm_run_flags, sm_flags);
    if (est->parsed()) return cmd_estimate(est_flags, est_sm);
    if (cmp->parsed()) return cmd_compare(cmp_flp, cmp_sm, cmp_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << describe(v) << "\n";
    return kExitValidation;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
