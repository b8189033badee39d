#include "commstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "commstab/io.hpp"
#include "commstab/parallel.hpp"

namespace commstab {

namespace {
constexpr double kThresholdSlack = 1e-12;   // matches the NE check tolerance
constexpr double kConvergedDemand = 1e-6;   // demand offsets "reached zero"
constexpr double kLimitAgreement = 1e-6;
constexpr double kBoundSlack = 1e-12;       // fp slack on proof lower bounds

void require_gapped(const EquilibriumSpec& spec, const char* who) {
  if (spec.kind != StructureKind::gapped) {
    throw std::invalid_argument(std::string(who) + " applies to gapped structures only");
  }
}
}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::neutral_stable: return "neutral-stable";
    case Verdict::unstable: return "unstable";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

double envelope_constant(const EquilibriumSpec& spec) {
  require_gapped(spec, "envelope_constant");
  const ModelParams& p = spec.params;
  return p.ep * p.eq * spec.lc * p.a * p.g0 / 2.0;
}

double admissible_delta(const EquilibriumSpec& spec) {
  require_gapped(spec, "admissible_delta");
  const ModelParams& p = spec.params;
  const double gap = (spec.lc - spec.ld) / 2.0;
  const double reach = (p.f0 / p.a - spec.ld) / 2.0;
  const double confinement = spec.lc / 4.0;
  const double drift = spec.lc / std::sqrt(2.0);
  return std::min({1.0, gap, reach, confinement, drift});
}

PerturbationState instability_witness(const EquilibriumSpec& spec, double probe_delta) {
  if (spec.kind != StructureKind::full_coverage) {
    throw std::invalid_argument("instability_witness applies to full-coverage structures only");
  }
  const LinearSystem sys = linear_coefficients(spec);
  if (!(sys.k_const > 0.0)) {
    throw std::domain_error("instability_witness is inapplicable: the growth coefficient is not positive");
  }
  const double l_star = spec.params.zero_surplus_distance();
  if (!(probe_delta > 0.0 && 2.0 * spec.lc + probe_delta < 2.0 * l_star)) {
    throw std::invalid_argument("probe_delta violates the smallness condition 2*lc + probe < 2*(f0/a - c/(a*g0))");
  }
  const double eps_s = probe_delta / 2.0;
  const double eps_d = std::min(probe_delta / 2.0, sys.k_const * probe_delta / (4.0 * sys.m_const));
  const double d0 = (eps_d + probe_delta) / 2.0;
  const double s0 = (eps_s + probe_delta) / 2.0;
  return PerturbationState{0.0, d0, d0, s0, s0};
}

double envelope_check(const Trajectory& traj, const EquilibriumSpec& spec, double delta0) {
  require_gapped(spec, "envelope_check");
  if (traj.samples.empty()) throw std::invalid_argument("envelope_check needs a nonempty trajectory");
  if (std::fabs(traj.front().state.d_dl - delta0) > 1e-12) {
    throw std::invalid_argument("delta0 does not match the trajectory's initial delta_dl");
  }
  const ModelParams& p = spec.params;
  const double window = std::min(spec.lc - spec.ld, 2.0 * (p.f0 / p.a - spec.ld));
  if (!(std::fabs(delta0) < window)) {
    throw std::invalid_argument("delta0 is outside the envelope's validity window |delta0| < " +
                                format_double(window));
  }
  const double confinement = spec.lc / 2.0;
  const double b0 = envelope_constant(spec);
  double residual = -std::numeric_limits<double>::infinity();
  for (const TrajectorySample& s : traj.samples) {
    if (!(std::fabs(s.state.d_sl) < confinement)) {
      throw std::invalid_argument("supply offset left the confinement band |delta_sl| < lc/2 at t=" +
                                  format_double(s.state.t));
    }
    residual = std::max(residual,
                        std::fabs(s.state.d_dl) - std::fabs(delta0) * std::exp(-b0 * s.state.t));
  }
  return residual;
}

std::pair<double, double> neutral_limit_check(const Trajectory& traj, const EquilibriumSpec& spec) {
  require_gapped(spec, "neutral_limit_check");
  if (traj.samples.empty()) throw std::invalid_argument("neutral_limit_check needs a nonempty trajectory");
  const PerturbationState& fin = traj.back().state;
  if (std::max(std::fabs(fin.d_dl), std::fabs(fin.d_dr)) > kConvergedDemand) {
    throw std::runtime_error("trajectory did not converge: final delta_dl=" + format_double(fin.d_dl) +
                             ", delta_dr=" + format_double(fin.d_dr));
  }
  const CommunityPairState cs = spec.pair_state(fin.d_dl, fin.d_dr, fin.d_sl, fin.d_sr);
  return {producer_utility(1, cs), producer_utility(2, cs)};
}

namespace {

struct GappedRun {
  Termination termination = Termination::reached_t_max;
  PerturbationState final_state;
  double supply_excursion = 0.0;
  double envelope_residual = -std::numeric_limits<double>::infinity();
  double envelope_residual_statement = -std::numeric_limits<double>::infinity();
  std::string error;
};

StabilityVerdict classify_gapped(const EquilibriumSpec& spec, double probe,
                                 const IntegratorConfig& config) {
  const double admissible = admissible_delta(spec);
  if (!(probe > 0.0 && probe <= admissible)) {
    throw std::invalid_argument("probe_delta must be in (0, " + format_double(admissible) +
                                "] for this structure");
  }
  const double b0 = envelope_constant(spec);
  const double half = probe / 2.0;

  // one run per sign pattern of (delta_dl, delta_dr, shared supply offset)
  std::vector<GappedRun> runs(8);
  par::parallel_for(8, [&](std::size_t r) {
    const double s_dl = (r & 4) ? half : -half;
    const double s_dr = (r & 2) ? half : -half;
    const double s_s = (r & 1) ? half : -half;
    GappedRun& out = runs[r];
    try {
      const StepObserver watch = [&](const PerturbationState& st, const RhsResult&) {
        out.supply_excursion =
            std::max({out.supply_excursion, std::fabs(st.d_sl), std::fabs(st.d_sr)});
        const double bound = half * std::exp(-b0 * st.t);
        const double worst_d = std::max(std::fabs(st.d_dl), std::fabs(st.d_dr));
        out.envelope_residual = std::max(out.envelope_residual, worst_d - bound);
        out.envelope_residual_statement =
            std::max(out.envelope_residual_statement, worst_d - b0 * bound);
      };
      const Trajectory traj =
          integrate(PerturbationState{0.0, s_dl, s_dr, s_s, s_s}, spec, config, watch);
      out.termination = traj.termination;
      out.final_state = traj.back().state;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  StabilityVerdict v;
  v.probe_delta = probe;
  double residual = -std::numeric_limits<double>::infinity();
  double statement_residual = -std::numeric_limits<double>::infinity();
  double excursion = 0.0;
  std::optional<std::pair<double, double>> limits;
  const double confinement = spec.lc / 2.0;
  std::string problems;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const GappedRun& run = runs[r];
    auto complain = [&](const std::string& what) {
      problems += (problems.empty() ? "" : "; ") + ("run " + std::to_string(r) + ": " + what);
    };
    if (!run.error.empty()) {
      complain(run.error);
      continue;
    }
    if (run.termination == Termination::state_invalid) {
      complain("state collapsed");
      continue;
    }
    const PerturbationState& fin = run.final_state;
    if (std::max(std::fabs(fin.d_dl), std::fabs(fin.d_dr)) >= kConvergedDemand) {
      complain("demand offsets did not return to zero");
    }
    if (!(run.supply_excursion < confinement)) {
      complain("supply offsets left the confinement band lc/2");
    }
    const CommunityPairState cs = spec.pair_state(fin.d_dl, fin.d_dr, fin.d_sl, fin.d_sr);
    const double u1 = producer_utility(1, cs);
    const double u2 = producer_utility(2, cs);
    if (std::fabs(u1 - u2) > kLimitAgreement || !(u1 > 0.0) || !(u2 > 0.0)) {
      complain("limit producer utilities disagree or are not positive");
    }
    residual = std::max(residual, run.envelope_residual);
    statement_residual = std::max(statement_residual, run.envelope_residual_statement);
    excursion = std::max(excursion, run.supply_excursion);
    if (!limits) limits = std::make_pair(u1, u2);
  }
  v.envelope_residual = residual;
  v.envelope_residual_statement = statement_residual;
  v.supply_excursion = excursion;
  if (problems.empty()) {
    v.verdict = Verdict::neutral_stable;
    v.limit_utilities = limits;
  } else {
    v.verdict = Verdict::indeterminate;
    v.diagnostics = problems;
  }
  return v;
}

StabilityVerdict classify_full(const EquilibriumSpec& spec, double probe,
                               const IntegratorConfig& config) {
  StabilityVerdict v;
  v.probe_delta = probe;
  const LinearSystem sys = linear_coefficients(spec);
  v.coefficients = sys;
  v.eigenvalues = linear_eigenvalues(sys);
  const double l_star = spec.params.zero_surplus_distance();
  if (spec.lc >= l_star - kThresholdSlack) {
    v.verdict = Verdict::indeterminate;
    v.diagnostics = "coverage sits at the zero-growth threshold; the probe argument needs K > 0";
    return v;
  }

  const PerturbationState w = instability_witness(spec, probe);
  v.witness = w;
  const double eps_d = std::min(probe / 2.0, sys.k_const * probe / (4.0 * sys.m_const));
  double min_d = std::numeric_limits<double>::infinity();
  double min_s = std::numeric_limits<double>::infinity();
  const StepObserver watch = [&](const PerturbationState& st, const RhsResult&) {
    min_d = std::min({min_d, st.d_dl, st.d_dr});
    min_s = std::min({min_s, st.d_sl, st.d_sr});
  };
  const Trajectory traj = integrate(w, spec, config, watch);
  v.min_delta_d = min_d;
  v.min_delta_s = min_s;

  const bool bounded_below = min_d >= eps_d - kBoundSlack && min_s >= w.d_sl - kBoundSlack;
  const bool never_settled = traj.termination != Termination::converged_below_epsilon;
  if (bounded_below && never_settled) {
    v.verdict = Verdict::unstable;
    if (traj.termination == Termination::state_invalid) {
      v.diagnostics = "perturbation grew until a community width collapsed at t=" +
                      format_double(traj.back().state.t);
    }
  } else {
    v.verdict = Verdict::indeterminate;
    v.diagnostics = never_settled
                        ? "witness trajectory dipped below its guaranteed floor"
                        : "witness trajectory converged despite the positive growth coefficient";
  }
  return v;
}

}  // namespace

StabilityVerdict classify(const EquilibriumSpec& spec, double probe_delta,
                          const IntegratorConfig& config) {
  const bool is_ne = spec.kind == StructureKind::full_coverage ? check_ne_full(spec) : check_ne_gap(spec);
  if (!is_ne) {
    throw std::invalid_argument("classify expects a Nash equilibrium structure");
  }
  return spec.kind == StructureKind::gapped ? classify_gapped(spec, probe_delta, config)
                                            : classify_full(spec, probe_delta, config);
}

double default_probe_delta(const EquilibriumSpec& spec) {
  if (spec.kind == StructureKind::gapped) return admissible_delta(spec);
  const double l_star = spec.params.zero_surplus_distance();
  // the margin keeps the witness inside the smallness condition, lc/2 keeps
  // its initial offsets inside valid pair geometry; positive even at the
  // threshold, where classify ignores the probe
  return std::max(std::min({l_star - spec.lc, spec.lc / 2.0, 0.1}), 1e-6);
}

ProbeGridResult classify_probe_grid(const EquilibriumSpec& spec, double base_probe,
                                    const IntegratorConfig& config) {
  ProbeGridResult grid;
  for (int decade = 0; decade < 4; ++decade) {
    grid.probes.push_back(base_probe / std::pow(10.0, decade));
  }
  for (std::size_t i = 0; i < grid.probes.size(); ++i) {
    StabilityVerdict v = classify(spec, grid.probes[i], config);
    grid.verdicts.push_back(v.verdict);
    if (i == 0) grid.base = std::move(v);
  }
  const bool agree = std::all_of(grid.verdicts.begin(), grid.verdicts.end(),
                                 [&](Verdict x) { return x == grid.verdicts.front(); });
  grid.aggregate = agree ? grid.verdicts.front() : Verdict::indeterminate;
  return grid;
}

std::string verdict_report(const StabilityVerdict& v, const EquilibriumSpec& spec) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  };
  line("verdict", verdict_name(v.verdict));
  line("kind", spec.kind == StructureKind::gapped ? "gapped" : "full-coverage");
  line("lc", format_double(spec.lc));
  line("ld", format_double(spec.ld));
  line("probe_delta", format_double(v.probe_delta));
  if (spec.kind == StructureKind::gapped) line("b0", format_double(envelope_constant(spec)));
  if (v.envelope_residual) line("envelope_residual_max", format_double(*v.envelope_residual));
  if (v.envelope_residual_statement) {
    line("envelope_residual_statement_max", format_double(*v.envelope_residual_statement));
  }
  if (v.supply_excursion) line("supply_excursion_max", format_double(*v.supply_excursion));
  if (v.limit_utilities) {
    line("limit_utility_1", format_double(v.limit_utilities->first));
    line("limit_utility_2", format_double(v.limit_utilities->second));
  }
  if (v.coefficients) {
    line("k_const", format_double(v.coefficients->k_const));
    line("m_const", format_double(v.coefficients->m_const));
  }
  if (v.eigenvalues) {
    line("lambda_plus", format_double(v.eigenvalues->lambda_plus));
    line("lambda_minus", format_double(v.eigenvalues->lambda_minus));
  }
  if (v.witness) {
    line("witness_delta_d0", format_double(v.witness->d_dl));
    line("witness_delta_s0", format_double(v.witness->d_sl));
  }
  if (v.min_delta_d) line("min_delta_d", format_double(*v.min_delta_d));
  if (v.min_delta_s) line("min_delta_s", format_double(*v.min_delta_s));
  if (!v.diagnostics.empty()) line("diagnostics", v.diagnostics);
  return out;
}

}  // namespace commstab
