#include "commstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "commstab/io.hpp"

namespace commstab::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams standard_params(double big_l) {
  return ModelParams{1.0, 1.0, 1.0, 0.5, 1.0, 1.0, big_l, 2};
}

EquilibriumSpec gapped_builtin() { return EquilibriumSpec::make(standard_params(2.0), 0.5); }
EquilibriumSpec full_builtin() { return EquilibriumSpec::make(standard_params(0.8), 0.4); }
EquilibriumSpec threshold_builtin() { return EquilibriumSpec::make(standard_params(1.0), 0.5); }

CheckResult pass_fail(const std::string& name, double residual, double tolerance,
                      std::string detail = {}) {
  return CheckResult{name, residual <= tolerance ? Status::pass : Status::fail, residual,
                     tolerance, std::move(detail)};
}

CheckResult skipped(const std::string& name, std::string why) {
  return CheckResult{name, Status::skipped, 0.0, 0.0, std::move(why)};
}

std::string describe(const EquilibriumSpec& spec) {
  return (spec.kind == StructureKind::gapped ? std::string("gapped") : std::string("full-coverage")) +
         " lc=" + format_double(spec.lc) + " ld=" + format_double(spec.ld);
}

}  // namespace

CommunityPairState random_pair_state(std::mt19937_64& rng,
                                     const std::optional<ModelParams>& fixed_params,
                                     bool unique_argmax) {
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  ModelParams p{};
  if (fixed_params) {
    p = *fixed_params;
  } else {
    p.f0 = uni(0.4, 1.0);
    p.a = uni(0.3, 2.5);
    p.g0 = uni(0.4, 1.0);
    p.c = p.f0 * p.g0 * uni(0.15, 0.85);
    p.ep = uni(0.2, 1.0);
    p.eq = uni(0.2, 2.0);
    p.big_l = uni(0.6, 4.0);
    p.n_comm = 2;
  }
  CommunityPairState st{};
  st.params = p;
  st.lc = p.big_l * uni(0.25, 0.5);
  const double reach = std::min(p.f0 / p.a, p.big_l);
  if (unique_argmax) {
    st.ld = std::min(st.lc, reach) * uni(0.1, 0.7);
    st.d_dl = st.ld * uni(-0.6, 0.6);
    st.d_dr = st.ld * uni(-0.6, 0.6);
  } else {
    st.ld = st.lc * uni(0.1, 1.0);
    st.d_dl = st.ld * uni(-1.4, 1.4);
    st.d_dr = st.ld * uni(-1.4, 1.4);
  }
  st.d_sl = st.lc * uni(-1.4, 1.4);
  st.d_sr = st.lc * uni(-1.4, 1.4);
  return st;
}

namespace {

// ---- oracle equivalence over random states ---------------------------------

void oracle_checks(std::vector<CheckResult>& out, const std::optional<ModelParams>& fixed) {
  constexpr int kStates = 1000;
  constexpr double kQuadStep = 1e-4;
  std::mt19937_64 rng(20240811u);
  double worst_consumer = 0.0;
  double worst_producer = 0.0;
  double worst_bound = -kInf;
  for (int i = 0; i < kStates; ++i) {
    const CommunityPairState st = random_pair_state(rng, fixed, false);
    const double big_l = st.params.big_l;
    const double cap =
        st.params.ep * st.params.eq * 2.0 * big_l * std::max(st.params.c, st.params.g0 * st.params.f0);
    for (int which : {1, 2}) {
      const TorusPoint y =
          torus_point(std::uniform_real_distribution<double>(-big_l, big_l)(rng), big_l);
      const double closed = consumer_utility(which, y, st);
      const double oracle = consumer_utility_oracle(which, y, st, kQuadStep);
      worst_consumer =
          std::max(worst_consumer, std::fabs(closed - oracle) / (1.0 + std::fabs(closed)));
      worst_bound = std::max(worst_bound, std::fabs(closed) - cap);

      const double closed_p = producer_utility(which, st);
      const double oracle_p = producer_utility_oracle(which, st, kQuadStep);
      worst_producer =
          std::max(worst_producer, std::fabs(closed_p - oracle_p) / (1.0 + std::fabs(closed_p)));
    }
  }
  out.push_back(pass_fail("consumer-utility-quadrature", worst_consumer, 1e-6,
                          "1000 random states, midpoint step 1e-4"));
  out.push_back(pass_fail("producer-utility-quadrature", worst_producer, 1e-6,
                          "1000 random states, midpoint step 1e-4"));
  out.push_back(pass_fail("consumer-utility-bound", worst_bound, 1e-12,
                          "|utility| <= ep*eq*2L*max(c, g0*f0) on the same states"));
}

void argmax_check(std::vector<CheckResult>& out, const std::optional<ModelParams>& fixed) {
  constexpr int kStates = 200;
  constexpr double kGridStep = 1e-3;
  std::mt19937_64 rng(424242u);
  double worst = 0.0;
  for (int i = 0; i < kStates; ++i) {
    const CommunityPairState st = random_pair_state(rng, fixed, true);
    for (int which : {1, 2}) {
      const TorusPoint exact = optimal_content(which, st);
      const TorusPoint grid = optimal_content_oracle(which, st, kGridStep);
      worst = std::max(worst, torus_distance(exact, grid, st.params.big_l));
    }
  }
  out.push_back(pass_fail("optimal-content-argmax", worst, 1e-3,
                          "200 random states inside the unique-argmax regime, grid 1e-3"));
}

// ---- scenario helpers -------------------------------------------------------

struct Scenario {
  EquilibriumSpec spec;
  PerturbationState initial;
  IntegratorConfig config;
};

template <class PerStep>
Trajectory run_watched(const Scenario& sc, PerStep per_step) {
  const StepObserver watch = [&](const PerturbationState& st, const RhsResult& rhs) {
    per_step(st, rhs);
  };
  return integrate(sc.initial, sc.spec, sc.config, watch);
}

double gapped_probe(const EquilibriumSpec& spec) {
  return std::min(0.05, admissible_delta(spec));
}

// margin below the coverage threshold; nonpositive means no room to perturb
double full_probe(const EquilibriumSpec& spec) {
  const double margin = 2.0 * (spec.params.zero_surplus_distance() - spec.lc);
  return std::min(0.01, margin / 4.0);
}

void trap_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& gapped,
                const std::optional<EquilibriumSpec>& full, const IntegratorConfig& integ) {
  double residual = -kInf;
  std::string detail;
  bool ran = false;
  if (gapped) {
    const double s = gapped_probe(*gapped);
    const double two_lstar = 2.0 * gapped->params.zero_surplus_distance();
    const double two_ld = 2.0 * gapped->ld;
    Scenario sc{*gapped, PerturbationState{0.0, -s, 0.6 * s, 0.0, 0.0}, integ};
    run_watched(sc, [&](const PerturbationState& st, const RhsResult&) {
      residual = std::max({residual, two_ld + st.d_dl - two_lstar, two_ld - st.d_dr - two_lstar});
    });
    detail += describe(*gapped) + " ic(" + format_double(-s) + "," + format_double(0.6 * s) + ")";
    ran = true;
  }
  if (full) {
    const double s = full_probe(*full);
    if (s > 0.0) {
      const double two_lstar = 2.0 * full->params.zero_surplus_distance();
      const double two_ld = 2.0 * full->ld;
      Scenario sc{*full, PerturbationState{0.0, s, s, s, s}, integ};
      run_watched(sc, [&](const PerturbationState& st, const RhsResult&) {
        residual = std::max({residual, two_ld + st.d_dl - two_lstar, two_ld - st.d_dr - two_lstar});
      });
      detail += (detail.empty() ? "" : "; ") + describe(*full) + " symmetric ic " + format_double(s);
      ran = true;
    }
  }
  if (!ran) {
    out.push_back(skipped("boundary-trap", "inapplicable: no structure admits the trap scenario"));
    return;
  }
  out.push_back(pass_fail("boundary-trap", residual, 1e-8, detail));
}

void bracketing_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& gapped,
                      const IntegratorConfig& integ) {
  if (!gapped) {
    out.push_back(skipped("demand-bracketing", "inapplicable: needs a gapped structure"));
    return;
  }
  const double s = gapped_probe(*gapped);
  double residual = -kInf;
  Scenario sc{*gapped, PerturbationState{0.0, s, -s, 0.0, 0.0}, integ};
  run_watched(sc, [&](const PerturbationState& st, const RhsResult&) {
    residual = std::max({residual, st.d_dl - s, -st.d_dl, st.d_dr, -s - st.d_dr});
  });
  out.push_back(pass_fail("demand-bracketing", residual, 1e-8,
                          describe(*gapped) + " ic(" + format_double(s) + "," + format_double(-s) + ")"));
}

void full_coverage_checks(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& full,
                          const IntegratorConfig& integ) {
  if (!full || !(full_probe(*full) > 0.0)) {
    out.push_back(skipped("border-utility-nonnegative",
                          "inapplicable: needs full coverage below the threshold"));
    out.push_back(skipped("symmetry-preservation",
                          "inapplicable: needs full coverage below the threshold"));
    return;
  }
  const double s = full_probe(*full);
  double worst_utility = -kInf;
  double worst_symmetry = -kInf;
  Scenario sc{*full, PerturbationState{0.0, s, s, s, s}, integ};
  run_watched(sc, [&](const PerturbationState& st, const RhsResult& rhs) {
    const BorderUtilities& u = rhs.utilities;
    worst_utility =
        std::max(worst_utility, -std::min({u.u1d_left, u.u2d_left, u.u1d_right, u.u2d_right}));
    worst_symmetry = std::max({worst_symmetry, std::fabs(st.d_dl - st.d_dr),
                               std::fabs(st.d_sl - st.d_sr)});
  });
  const std::string detail = describe(*full) + " symmetric ic " + format_double(s);
  out.push_back(pass_fail("border-utility-nonnegative", worst_utility, 1e-8, detail));
  out.push_back(pass_fail("symmetry-preservation", worst_symmetry, 1e-9, detail));
}

void drift_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& gapped,
                 const IntegratorConfig& integ) {
  if (!gapped) {
    out.push_back(skipped("supply-drift-bound", "inapplicable: needs a gapped structure"));
    return;
  }
  const ModelParams& p = gapped->params;
  const double s = gapped_probe(*gapped);
  const double scale = p.ep * p.eq * p.a * p.g0 / 4.0;
  double residual = -kInf;
  Scenario sc{*gapped, PerturbationState{0.0, s, -0.6 * s, 0.4 * s, 0.4 * s}, integ};
  run_watched(sc, [&](const PerturbationState& st, const RhsResult& rhs) {
    const double bound = scale * (st.d_dl * st.d_dl + st.d_dr * st.d_dr);
    residual = std::max(residual,
                        std::max(std::fabs(rhs.dd_sl), std::fabs(rhs.dd_sr)) - bound);
  });
  out.push_back(pass_fail("supply-drift-bound", residual, 1e-10, describe(*gapped)));
}

void envelope_suite_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& gapped,
                          const IntegratorConfig& integ) {
  if (!gapped) {
    out.push_back(skipped("decay-envelope", "inapplicable: needs a gapped structure"));
    return;
  }
  const double s = gapped_probe(*gapped);
  double residual = -kInf;
  for (double delta0 : {s, -s}) {
    Scenario sc{*gapped, PerturbationState{0.0, delta0, delta0, 0.0, 0.0}, integ};
    const Trajectory traj = integrate(sc.initial, sc.spec, sc.config);
    residual = std::max(residual, envelope_check(traj, *gapped, delta0));
  }
  out.push_back(pass_fail("decay-envelope", residual, 1e-6,
                          describe(*gapped) + " |delta0|=" + format_double(s)));
}

void limit_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& gapped,
                 const IntegratorConfig& integ) {
  if (!gapped) {
    out.push_back(skipped("limit-producer-utility", "inapplicable: needs a gapped structure"));
    return;
  }
  const ModelParams& p = gapped->params;
  const double s = gapped_probe(*gapped);
  Scenario sc{*gapped, PerturbationState{0.0, s, 0.0, 0.0, 0.0}, integ};
  const Trajectory traj = integrate(sc.initial, sc.spec, sc.config);
  const auto [u1, u2] = neutral_limit_check(traj, *gapped);
  const double target = p.ep * p.eq * gapped->ld * (p.f0 * p.g0 - p.c);
  const double residual = std::max(std::fabs(u1 - target), std::fabs(u2 - target));
  out.push_back(pass_fail("limit-producer-utility", residual, 1e-6,
                          "target " + format_double(target)));
}

void witness_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& full,
                   const IntegratorConfig& integ) {
  if (!full) {
    out.push_back(skipped("divergence-witness", "inapplicable: needs a full-coverage structure"));
    return;
  }
  const LinearSystem sys = linear_coefficients(*full);
  const double l_star = full->params.zero_surplus_distance();
  if (full->lc >= l_star - 1e-12 || !(sys.k_const > 0.0)) {
    out.push_back(skipped("divergence-witness", "inapplicable: growth coefficient K is not positive"));
    return;
  }
  double residual = -kInf;
  int used = 0;
  for (double probe : {1e-1, 1e-2, 1e-3, 1e-4}) {
    if (!(2.0 * full->lc + probe < 2.0 * l_star)) continue;
    ++used;
    const PerturbationState w = instability_witness(*full, probe);
    const double eps_d = std::min(probe / 2.0, sys.k_const * probe / (4.0 * sys.m_const));
    double min_d = kInf;
    double min_s = kInf;
    Scenario sc{*full, w, integ};
    const Trajectory traj = run_watched(sc, [&](const PerturbationState& st, const RhsResult&) {
      min_d = std::min({min_d, st.d_dl, st.d_dr});
      min_s = std::min({min_s, st.d_sl, st.d_sr});
    });
    residual = std::max({residual, eps_d - min_d, w.d_sl - min_s});
    if (traj.termination == Termination::converged_below_epsilon) residual = kInf;
  }
  if (used == 0) {
    out.push_back(skipped("divergence-witness", "inapplicable: no probe meets the smallness condition"));
    return;
  }
  out.push_back(pass_fail("divergence-witness", residual, 1e-9,
                          std::to_string(used) + " probe decades, lower bounds eps_d and delta_s(0)"));
}

void rk4_check(std::vector<CheckResult>& out, const IntegratorConfig& integ) {
  // always runs on built-in full-coverage sets; the integrator settings
  // (notably dt) come from the session so a sloppy dt is caught here. The
  // second set has a fast decaying mode that a coarse step cannot track.
  IntegratorConfig cfg = integ;
  cfg.t_max = 10.0;
  cfg.sample_stride = 1;
  ModelParams stiff{1.0, 1.0, 1.0, 0.5, 1.0, 4.0, 0.8, 2};
  double residual = 0.0;
  for (const EquilibriumSpec& spec :
       {full_builtin(), EquilibriumSpec::make(stiff, stiff.community_half_width())}) {
    const LinearSystem sys = linear_coefficients(spec);
    const double d0 = 0.05;
    const Trajectory traj = integrate(PerturbationState{0.0, d0, d0, d0, d0}, spec, cfg);
    for (const TrajectorySample& s : traj.samples) {
      const auto [ld, ls] = linear_solution(sys, d0, d0, s.state.t);
      residual = std::max({residual, std::fabs(s.state.d_dl - ld), std::fabs(s.state.d_dr - ld),
                           std::fabs(s.state.d_sl - ls), std::fabs(s.state.d_sr - ls)});
    }
  }
  out.push_back(pass_fail("rk4-vs-linear-solution", residual, 1e-6,
                          "built-in full-coverage sets, dt=" + format_double(cfg.dt)));
}

void threshold_check(std::vector<CheckResult>& out, const std::optional<EquilibriumSpec>& threshold,
                     const IntegratorConfig& integ) {
  if (!threshold) {
    out.push_back(skipped("threshold-indeterminate", "inapplicable: structure is not at the threshold"));
    return;
  }
  const LinearSystem sys = linear_coefficients(*threshold);
  const StabilityVerdict v = classify(*threshold, default_probe_delta(*threshold), integ);
  double residual = std::fabs(sys.k_const);
  if (v.verdict != Verdict::indeterminate) residual = kInf;
  out.push_back(pass_fail("threshold-indeterminate", residual, 1e-12,
                          "verdict " + verdict_name(v.verdict)));
}

}  // namespace

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  IntegratorConfig integ;
  std::optional<EquilibriumSpec> cfg_spec;
  std::optional<ModelParams> fixed;
  if (opts.config) {
    integ.dt = opts.config->integrator.dt;
    integ.eps_converged = opts.config->integrator.eps_converged;
    integ.sample_stride = opts.config->integrator.sample_stride;
    cfg_spec = spec_from_config(*opts.config);
    fixed = opts.config->params;
  }

  std::optional<EquilibriumSpec> gapped;
  std::optional<EquilibriumSpec> full;
  std::optional<EquilibriumSpec> threshold;
  if (cfg_spec) {
    const double l_star = cfg_spec->params.zero_surplus_distance();
    if (cfg_spec->kind == StructureKind::gapped) {
      gapped = cfg_spec;
    } else {
      full = cfg_spec;
      if (cfg_spec->lc >= l_star - 1e-12) threshold = cfg_spec;
    }
  } else {
    gapped = gapped_builtin();
    full = full_builtin();
    threshold = threshold_builtin();
  }

  std::vector<CheckResult> out;
  oracle_checks(out, fixed);
  argmax_check(out, fixed);
  rk4_check(out, integ);
  trap_check(out, gapped, full, integ);
  bracketing_check(out, gapped, integ);
  full_coverage_checks(out, full, integ);
  drift_check(out, gapped, integ);
  envelope_suite_check(out, gapped, integ);
  limit_check(out, gapped, integ);
  witness_check(out, full, integ);
  threshold_check(out, threshold, integ);
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::none_of(results.begin(), results.end(),
                      [](const CheckResult& r) { return r.status == Status::fail; });
}

std::string format_results(const std::vector<CheckResult>& results) {
  std::string out;
  int passed = 0, failed = 0, skipped_n = 0;
  for (const CheckResult& r : results) {
    switch (r.status) {
      case Status::pass:
        ++passed;
        out += "PASS " + r.name + "  residual=" + format_double(r.residual) +
               " tol=" + format_double(r.tolerance);
        break;
      case Status::fail:
        ++failed;
        out += "FAIL " + r.name + "  residual=" + format_double(r.residual) +
               " tol=" + format_double(r.tolerance);
        break;
      case Status::skipped:
        ++skipped_n;
        out += "SKIP " + r.name + "  skipped (" + r.detail + ")";
        break;
    }
    if (r.status != Status::skipped && !r.detail.empty()) out += "  [" + r.detail + "]";
    out += '\n';
  }
  out += "RESULT: " + std::to_string(passed) + " passed, " + std::to_string(failed) +
         " failed, " + std::to_string(skipped_n) + " skipped\n";
  return out;
}

}  // namespace commstab::verify
