#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commstab/config.hpp"
#include "commstab/io.hpp"
#include "commstab/stability.hpp"
#include "commstab/svg_chart.hpp"
#include "commstab/verify.hpp"

namespace {

using namespace commstab;

std::string kind_name(StructureKind kind) {
  return kind == StructureKind::gapped ? "gapped" : "full-coverage";
}

bool analytic_ne(const EquilibriumSpec& spec) {
  return spec.kind == StructureKind::gapped ? check_ne_gap(spec) : check_ne_full(spec);
}

int run_check_eq(const RunConfig& cfg) {
  const EquilibriumSpec spec = spec_from_config(cfg);
  const bool ne = analytic_ne(spec);
  const AuditReport audit = best_response_audit(spec, 512, 1e-3);
  std::printf("NE: %s (%s), l*_d=%s\n", ne ? "yes" : "no", kind_name(spec.kind).c_str(),
              format_double(equilibrium_ld(spec.params)).c_str());
  std::printf("audit: is_ne=%s worst_violation=%s (512 samples per side, grid 0.001)\n",
              audit.is_ne ? "yes" : "no", format_double(audit.worst_violation).c_str());
  for (const DeviationWitness& w : audit.witnesses) {
    std::printf("  witness: agent=%s deviation=%s gain=%s\n", format_double(w.agent).c_str(),
                w.deviation.c_str(), format_double(w.gain).c_str());
  }
  if (ne != audit.is_ne) {
    std::printf("warning: analytic verdict and sampled audit disagree\n");
  }
  return 0;
}

int run_simulate(const RunConfig& cfg, const std::string& out_path, const std::string& svg_path) {
  const EquilibriumSpec spec = spec_from_config(cfg);
  const Trajectory traj = integrate(initial_state_from_config(cfg), spec, cfg.integrator);
  write_text_file(out_path, trajectory_csv(traj));
  if (!svg_path.empty()) write_text_file(svg_path, trajectory_svg(traj));
  const PerturbationState& fin = traj.back().state;
  std::printf("termination: %s at t=%s (%zu samples)\n",
              termination_name(traj.termination).c_str(), format_double(fin.t).c_str(),
              traj.samples.size());
  std::printf("final: delta_dl=%s delta_dr=%s delta_sl=%s delta_sr=%s\n",
              format_double(fin.d_dl).c_str(), format_double(fin.d_dr).c_str(),
              format_double(fin.d_sl).c_str(), format_double(fin.d_sr).c_str());
  if (traj.termination == Termination::state_invalid && fin.t < 1.0) {
    std::fprintf(stderr,
                 "error: community widths collapsed at t=%s; the initial perturbation leaves no "
                 "valid pair state\n",
                 format_double(fin.t).c_str());
    return 2;
  }
  return 0;
}

int run_classify(const RunConfig& cfg) {
  const EquilibriumSpec spec = spec_from_config(cfg);
  if (!analytic_ne(spec)) {
    std::fprintf(stderr,
                 "error: the configured structure is not a Nash equilibrium; classification is "
                 "defined only at equilibria\n");
    return 1;
  }
  const double probe = cfg.probe_delta ? *cfg.probe_delta : default_probe_delta(spec);
  const ProbeGridResult grid = classify_probe_grid(spec, probe, cfg.integrator);
  StabilityVerdict report = grid.base;
  if (grid.aggregate != report.verdict) {
    report.verdict = grid.aggregate;
    report.diagnostics = "probe grid disagreement: " +
                         (report.diagnostics.empty() ? std::string("see per-probe verdicts")
                                                     : report.diagnostics);
  }
  std::fputs(verdict_report(report, spec).c_str(), stdout);
  for (std::size_t i = 0; i < grid.probes.size(); ++i) {
    std::printf("probe %s: %s\n", format_double(grid.probes[i]).c_str(),
                verdict_name(grid.verdicts[i]).c_str());
  }
  return 0;
}

bool set_swept_param(ModelParams& p, const std::string& name, double value) {
  if (name == "f0") p.f0 = value;
  else if (name == "a") p.a = value;
  else if (name == "g0") p.g0 = value;
  else if (name == "c") p.c = value;
  else if (name == "ep") p.ep = value;
  else if (name == "eq") p.eq = value;
  else if (name == "big_l") p.big_l = value;
  else if (name == "n_comm") p.n_comm = static_cast<int>(std::llround(value));
  else return false;
  return true;
}

int run_sweep(const RunConfig& cfg, const std::string& param, double from, double to, int steps,
              const std::string& out_path) {
  {
    ModelParams probe = cfg.params;
    if (!set_swept_param(probe, param, from)) {
      std::fprintf(stderr,
                   "error: unknown sweep parameter '%s' (expected one of f0, a, g0, c, ep, eq, "
                   "big_l, n_comm)\n",
                   param.c_str());
      return 1;
    }
  }
  if (steps < 2) {
    std::fprintf(stderr, "error: sweep needs at least 2 steps, got %d\n", steps);
    return 1;
  }
  std::string csv = "param,value,verdict,k_const,m_const,b0,lambda_plus,limit_utility\n";
  for (int i = 0; i < steps; ++i) {
    const double raw = from + (to - from) * static_cast<double>(i) / (steps - 1);
    RunConfig point = cfg;
    set_swept_param(point.params, param, raw);
    const double value = param == "n_comm" ? static_cast<double>(point.params.n_comm) : raw;
    std::string verdict;
    std::string k_s, m_s, b0_s, lambda_s, limit_s;
    try {
      const EquilibriumSpec spec = spec_from_config(point);
      if (!analytic_ne(spec)) {
        verdict = "not-ne";
      } else {
        const double p = point.probe_delta ? *point.probe_delta : default_probe_delta(spec);
        const ProbeGridResult grid = classify_probe_grid(spec, p, point.integrator);
        verdict = verdict_name(grid.aggregate);
        const StabilityVerdict& v = grid.base;
        if (v.coefficients) {
          k_s = format_double(v.coefficients->k_const);
          m_s = format_double(v.coefficients->m_const);
        }
        if (v.eigenvalues) lambda_s = format_double(v.eigenvalues->lambda_plus);
        if (spec.kind == StructureKind::gapped) b0_s = format_double(envelope_constant(spec));
        if (v.limit_utilities) limit_s = format_double(v.limit_utilities->first);
      }
    } catch (const std::invalid_argument&) {
      verdict = "invalid";
    }
    csv += param + "," + format_double(value) + "," + verdict + "," + k_s + "," + m_s + "," +
           b0_s + "," + lambda_s + "," + limit_s + "\n";
  }
  write_text_file(out_path, csv);
  std::printf("wrote %d rows to %s\n", steps, out_path.c_str());
  return 0;
}

int run_verify(const std::string& config_path) {
  verify::SuiteOptions opts;
  if (!config_path.empty()) opts.config = load_run_config(config_path);
  const std::vector<verify::CheckResult> results = verify::run_suite(opts);
  std::fputs(verify::format_results(results).c_str(), stdout);
  return verify::all_passed(results) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"community formation toolkit: equilibrium checks, boundary dynamics, stability"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (key = value lines)");

  CLI::App* check = app.add_subcommand("check-eq", "check whether the configured structure is a Nash equilibrium");
  check->fallthrough();

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the boundary perturbation dynamics");
  simulate->fallthrough();
  std::string out_path;
  std::string svg_path;
  simulate->add_option("--out", out_path, "trajectory CSV output path")->required();
  simulate->add_option("--svg", svg_path, "optional SVG chart of the four offsets");

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify the configured equilibrium's stability");
  classify_cmd->fallthrough();

  CLI::App* sweep = app.add_subcommand("sweep", "classify along a one-parameter grid and export CSV");
  sweep->fallthrough();
  std::string sweep_param;
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  int sweep_steps = 0;
  std::string sweep_out;
  sweep->add_option("--param", sweep_param, "model parameter to sweep")->required();
  sweep->add_option("--from", sweep_from, "first grid value")->required();
  sweep->add_option("--to", sweep_to, "last grid value")->required();
  sweep->add_option("--steps", sweep_steps, "number of grid points (>= 2)")->required();
  sweep->add_option("--out", sweep_out, "sweep CSV output path")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the oracle and invariant suite");
  verify_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*verify_cmd) return run_verify(config_path);
    if (config_path.empty()) {
      std::fprintf(stderr, "error: --config is required for this command\n");
      return 1;
    }
    const RunConfig cfg = load_run_config(config_path);
    if (*check) return run_check_eq(cfg);
    if (*simulate) return run_simulate(cfg, out_path, svg_path);
    if (*classify_cmd) return run_classify(cfg);
    if (*sweep) return run_sweep(cfg, sweep_param, sweep_from, sweep_to, sweep_steps, sweep_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
