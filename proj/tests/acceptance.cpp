// End-to-end acceptance checks, one verdict line per criterion.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "commstab/stability.hpp"
#include "commstab/verify.hpp"

using namespace commstab;

namespace {

constexpr double kTolExact = 0.0;
constexpr double kTolEnvelope = 1e-6;
constexpr double kTolLimit = 1e-6;
constexpr double kTolCoeff = 1e-9;
constexpr double kTolWitness = 1e-12;
constexpr double kFloorSlack = 1e-12;

ModelParams base_params(double big_l) { return ModelParams{1.0, 1.0, 1.0, 0.5, 1.0, 1.0, big_l, 2}; }

IntegratorConfig integ(double t_max) {
  IntegratorConfig c;
  c.dt = 1e-3;
  c.t_max = t_max;
  c.sample_stride = 10;
  return c;
}

struct Criterion {
  bool ok = true;
  std::string why;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!why.empty()) why += "; ";
    why += what;
  }
};

bool report(int number, const std::string& title, const Criterion& c) {
  if (c.ok) {
    std::printf("PASS criterion %d: %s\n", number, title.c_str());
  } else {
    std::printf("FAIL criterion %d: %s (%s)\n", number, title.c_str(), c.why.c_str());
  }
  return c.ok;
}

Criterion equilibrium_criterion() {
  Criterion c;
  const ModelParams p = base_params(2.0);
  c.require(equilibrium_ld(p) == 0.5 + kTolExact, "equilibrium width is not exactly 0.5");

  const EquilibriumSpec at_eq = EquilibriumSpec::make(p, 0.5);
  c.require(check_ne_gap(at_eq), "the zero-surplus width fails the analytic check");
  const AuditReport good = best_response_audit(at_eq, 512, 1e-3);
  c.require(good.is_ne, "the audit found a profitable deviation at equilibrium");

  const EquilibriumSpec off_eq = EquilibriumSpec::make(p, 0.4);
  c.require(!check_ne_gap(off_eq), "a mistuned width passes the analytic check");
  const AuditReport bad = best_response_audit(off_eq, 512, 1e-3);
  c.require(!bad.is_ne && bad.worst_violation > 0.0, "the audit missed the joiners off equilibrium");

  c.require(check_ne_full(EquilibriumSpec::make(base_params(0.8), 0.4)),
            "tight full coverage should be an equilibrium");
  c.require(!check_ne_full(EquilibriumSpec::make(base_params(1.2), 0.6)),
            "oversized full coverage should not be an equilibrium");
  return c;
}

Criterion neutral_stability_criterion() {
  Criterion c;
  const EquilibriumSpec spec = EquilibriumSpec::make(base_params(2.0), 0.5);
  const double b0 = envelope_constant(spec);

  const double delta0 = 0.05;
  const Trajectory traj =
      integrate(PerturbationState{0.0, delta0, delta0, 0.0, 0.0}, spec, integ(40.0));
  bool envelope_ok = true;
  bool confined = true;
  for (const TrajectorySample& s : traj.samples) {
    if (std::fabs(s.state.d_dl) > delta0 * std::exp(-b0 * s.state.t) + kTolEnvelope)
      envelope_ok = false;
    if (!(std::fabs(s.state.d_sl) < spec.lc / 2.0)) confined = false;
  }
  c.require(envelope_ok, "a sample escaped the exponential envelope");
  c.require(confined, "the supply offset left the confinement band");
  const PerturbationState& fin = traj.back().state;
  c.require(std::max(std::fabs(fin.d_dl), std::fabs(fin.d_dr)) < 1e-6,
            "demand offsets did not return to zero in time");

  const ProbeGridResult grid = classify_probe_grid(spec, 0.1, integ(50.0));
  c.require(grid.aggregate == Verdict::neutral_stable, "probe grid verdict is not neutral-stable");
  for (Verdict v : grid.verdicts) {
    c.require(v == Verdict::neutral_stable, "a probe decade disagreed with neutral stability");
  }
  if (grid.base.limit_utilities) {
    c.require(std::fabs(grid.base.limit_utilities->first - 0.25) <= kTolLimit &&
                  std::fabs(grid.base.limit_utilities->second - 0.25) <= kTolLimit,
              "limit producer utilities moved away from 0.25");
  } else {
    c.require(false, "classification returned no limit utilities");
  }
  return c;
}

Criterion instability_criterion() {
  Criterion c;
  const EquilibriumSpec spec = EquilibriumSpec::make(base_params(0.8), 0.4);
  const LinearSystem sys = linear_coefficients(spec);
  c.require(std::fabs(sys.k_const - 0.2) <= kTolCoeff, "growth coefficient is off");
  c.require(std::fabs(sys.m_const - 0.8) <= kTolCoeff, "damping coefficient is off");
  const LinearEigen eig = linear_eigenvalues(sys);
  c.require(std::fabs(eig.lambda_plus - 0.04721359549995794) <= kTolCoeff,
            "positive eigenvalue is off");
  c.require(std::fabs(eig.lambda_minus + 0.8472135954999579) <= kTolCoeff,
            "negative eigenvalue is off");

  const PerturbationState w = instability_witness(spec, 0.01);
  c.require(std::fabs(w.d_dl - 0.0053125) <= kTolWitness, "witness demand offset is off");
  c.require(std::fabs(w.d_sl - 0.0075) <= kTolWitness, "witness supply offset is off");

  const double probe = 0.1;
  const ProbeGridResult grid = classify_probe_grid(spec, probe, integ(50.0));
  c.require(grid.aggregate == Verdict::unstable, "probe grid verdict is not unstable");
  for (Verdict v : grid.verdicts) {
    c.require(v == Verdict::unstable, "a probe decade disagreed with instability");
  }
  const double eps_d = std::min(probe / 2.0, sys.k_const * probe / (4.0 * sys.m_const));
  const double s0 = (probe / 2.0 + probe) / 2.0;
  c.require(grid.base.min_delta_d && *grid.base.min_delta_d >= eps_d - kFloorSlack,
            "demand offsets dipped below the guaranteed floor");
  c.require(grid.base.min_delta_s && *grid.base.min_delta_s >= s0 - kFloorSlack,
            "supply offsets dipped below their starting value");
  return c;
}

Criterion suite_criterion(const std::map<std::string, verify::CheckResult>& results,
                          std::initializer_list<const char*> names) {
  Criterion c;
  for (const char* name : names) {
    const auto it = results.find(name);
    if (it == results.end()) {
      c.require(false, std::string("missing check '") + name + "'");
      continue;
    }
    c.require(it->second.status == verify::Status::pass,
              std::string(name) + " did not pass: " + it->second.detail);
  }
  return c;
}

Criterion threshold_criterion() {
  Criterion c;
  const EquilibriumSpec spec = EquilibriumSpec::make(base_params(1.0), 0.5);
  c.require(linear_coefficients(spec).k_const == 0.0,
            "growth coefficient is not exactly zero at the threshold");
  const StabilityVerdict v = classify(spec, default_probe_delta(spec), integ(50.0));
  c.require(v.verdict == Verdict::indeterminate, "threshold verdict is not indeterminate");
  const ProbeGridResult grid = classify_probe_grid(spec, default_probe_delta(spec), integ(50.0));
  c.require(grid.aggregate == Verdict::indeterminate, "threshold probe grid reached a verdict");
  return c;
}

}  // namespace

int main() {
  std::map<std::string, verify::CheckResult> suite;
  for (const verify::CheckResult& r : verify::run_suite()) suite[r.name] = r;

  bool all = true;
  all &= report(1, "the zero-surplus width is the unique gapped equilibrium",
                equilibrium_criterion());
  all &= report(2, "the gapped equilibrium is neutrally stable under admissible probes",
                neutral_stability_criterion());
  all &= report(3, "tight full coverage is unstable with a certified witness",
                instability_criterion());
  all &= report(4, "closed-form utilities agree with the quadrature and search oracles",
                suite_criterion(suite, {"consumer-utility-quadrature", "producer-utility-quadrature",
                                        "optimal-content-argmax"}));
  all &= report(5, "the integrator reproduces the exact linear solution",
                suite_criterion(suite, {"rk4-vs-linear-solution"}));
  all &= report(6, "trajectory invariants hold at full step resolution",
                suite_criterion(suite, {"boundary-trap", "demand-bracketing",
                                        "border-utility-nonnegative", "symmetry-preservation",
                                        "supply-drift-bound", "consumer-utility-bound"}));
  all &= report(7, "the coverage threshold is left indeterminate", threshold_criterion());

  if (!all) {
    std::printf("ACCEPTANCE: FAIL\n");
    return 1;
  }
  std::printf("ACCEPTANCE: PASS\n");
  return 0;
}
