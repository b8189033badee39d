#include "commstab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "commstab/io.hpp"

namespace commstab {

double PerturbationState::max_abs_delta() const {
  return std::max(std::max(std::fabs(d_dl), std::fabs(d_dr)),
                  std::max(std::fabs(d_sl), std::fabs(d_sr)));
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::reached_t_max: return "reached_t_max";
    case Termination::state_invalid: return "state_invalid";
    case Termination::converged_below_epsilon: return "converged_below_epsilon";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
  if (!(eps_converged >= 0.0)) throw std::invalid_argument("eps_converged must be >= 0");
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
}

std::optional<RhsResult> eval_rhs(const PerturbationState& state, const EquilibriumSpec& spec) {
  const CommunityPairState cs = spec.pair_state(state.d_dl, state.d_dr, state.d_sl, state.d_sr);
  if (!cs.valid()) return std::nullopt;

  const double big_l = spec.params.big_l;
  const TorusPoint border_left = torus_point(-spec.lc + spec.ld + state.d_dl, big_l);
  const TorusPoint border_right = torus_point(spec.lc - spec.ld + state.d_dr, big_l);

  BorderUtilities u{};
  u.u1d_left = consumer_utility(1, border_left, cs);
  u.u2d_left = consumer_utility(2, border_left, cs);
  u.u1d_right = consumer_utility(1, border_right, cs);
  u.u2d_right = consumer_utility(2, border_right, cs);
  u.u1s = producer_utility(1, cs);
  u.u2s = producer_utility(2, cs);

  RhsResult r{};
  r.dd_dl = u.u1d_left - std::max(0.0, u.u2d_left);
  r.dd_dr = std::max(0.0, u.u1d_right) - u.u2d_right;
  r.dd_sl = u.u1s - std::max(0.0, u.u2s);
  r.dd_sr = std::max(0.0, u.u1s) - u.u2s;
  r.utilities = u;
  return r;
}

namespace {

void check_initial_constraints(const PerturbationState& s, const EquilibriumSpec& spec) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("initial state rejected: " + msg +
                                " (set enforce_initial_constraints=false to override)");
  };
  if (s.d_sl != s.d_sr) fail("the supply offsets must start equal");
  if (spec.kind == StructureKind::full_coverage) {
    if (s.d_dl != s.d_dr) fail("full coverage requires equal demand offsets");
  } else {
    // the two demand boundaries must not start past each other
    if (!(s.d_dl < 2.0 * spec.lc - 2.0 * spec.ld + s.d_dr)) {
      fail("demand boundaries must leave a gap between the communities");
    }
  }
}

PerturbationState advance(const PerturbationState& s, double dt, const RhsResult& k) {
  return PerturbationState{s.t + dt, s.d_dl + dt * k.dd_dl, s.d_dr + dt * k.dd_dr,
                           s.d_sl + dt * k.dd_sl, s.d_sr + dt * k.dd_sr};
}

TrajectorySample make_sample(const PerturbationState& s, const RhsResult& r) {
  return TrajectorySample{s, r.utilities.u1d_left, r.utilities.u2d_left, r.utilities.u1d_right,
                          r.utilities.u2d_right};
}

}  // namespace

Trajectory integrate(const PerturbationState& initial, const EquilibriumSpec& spec,
                     const IntegratorConfig& config, const StepObserver& observer) {
  config.validate();
  if (config.enforce_initial_constraints) check_initial_constraints(initial, spec);

  const auto n_steps = static_cast<long long>(std::ceil(config.t_max / config.dt - 1e-9));
  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(n_steps / config.sample_stride) + 2);

  PerturbationState y = initial;
  y.t = 0.0;
  long long last_recorded = -1;

  for (long long i = 0;; ++i) {
    const std::optional<RhsResult> k1 = eval_rhs(y, spec);
    if (!k1) {
      if (i == 0) {
        const std::string reason = spec.pair_state(y.d_dl, y.d_dr, y.d_sl, y.d_sr).invalid_reason();
        throw std::invalid_argument("initial state rejected: " + reason);
      }
      // the previous step walked out of the model; keep the last valid state
      traj.termination = Termination::state_invalid;
      return traj;
    }
    if (observer) observer(y, *k1);
    if (i % config.sample_stride == 0) {
      traj.samples.push_back(make_sample(y, *k1));
      last_recorded = i;
    }
    auto record_final = [&] {
      if (last_recorded != i) traj.samples.push_back(make_sample(y, *k1));
    };
    if (y.max_abs_delta() < config.eps_converged) {
      record_final();
      traj.termination = Termination::converged_below_epsilon;
      return traj;
    }
    if (i >= n_steps) {
      record_final();
      traj.termination = Termination::reached_t_max;
      return traj;
    }

    const double dt = config.dt;
    const std::optional<RhsResult> k2 = eval_rhs(advance(y, dt / 2.0, *k1), spec);
    const std::optional<RhsResult> k3 = k2 ? eval_rhs(advance(y, dt / 2.0, *k2), spec) : std::nullopt;
    const std::optional<RhsResult> k4 = k3 ? eval_rhs(advance(y, dt, *k3), spec) : std::nullopt;
    if (!k4) {
      record_final();
      traj.termination = Termination::state_invalid;
      return traj;
    }
    const PerturbationState next{
        static_cast<double>(i + 1) * dt,
        y.d_dl + dt / 6.0 * (k1->dd_dl + 2.0 * k2->dd_dl + 2.0 * k3->dd_dl + k4->dd_dl),
        y.d_dr + dt / 6.0 * (k1->dd_dr + 2.0 * k2->dd_dr + 2.0 * k3->dd_dr + k4->dd_dr),
        y.d_sl + dt / 6.0 * (k1->dd_sl + 2.0 * k2->dd_sl + 2.0 * k3->dd_sl + k4->dd_sl),
        y.d_sr + dt / 6.0 * (k1->dd_sr + 2.0 * k2->dd_sr + 2.0 * k3->dd_sr + k4->dd_sr)};
    y = next;
  }
}

LinearSystem linear_coefficients(const EquilibriumSpec& spec) {
  if (spec.kind != StructureKind::full_coverage) {
    throw std::invalid_argument("linear_coefficients expects a full-coverage structure");
  }
  const ModelParams& p = spec.params;
  const double budget = p.ep * p.eq;
  return LinearSystem{budget * (-2.0 * p.c + 2.0 * p.f0 * p.g0 - 2.0 * spec.lc * p.a * p.g0),
                      budget * 2.0 * spec.lc * p.a * p.g0};
}

LinearEigen linear_eigenvalues(const LinearSystem& sys) {
  const double k = sys.k_const;
  const double m = sys.m_const;
  const double root = std::sqrt(m * m + 4.0 * k * k);
  // lambda_plus via the product form; avoids cancellation when |k| << m
  const double lambda_plus = 2.0 * k * k / (m + root);
  return LinearEigen{lambda_plus, -m - lambda_plus};
}

std::pair<double, double> linear_solution(const LinearSystem& sys, double d0, double s0, double t) {
  const double k = sys.k_const;
  const double m = sys.m_const;
  if (k == 0.0) return {d0 * std::exp(-m * t), s0};
  const LinearEigen eig = linear_eigenvalues(sys);
  // eigenvectors (lambda, k); coefficients from the initial condition
  const double c_plus = (d0 - eig.lambda_minus * s0 / k) / (eig.lambda_plus - eig.lambda_minus);
  const double c_minus = s0 / k - c_plus;
  const double e_plus = std::exp(eig.lambda_plus * t);
  const double e_minus = std::exp(eig.lambda_minus * t);
  return {c_plus * eig.lambda_plus * e_plus + c_minus * eig.lambda_minus * e_minus,
          k * (c_plus * e_plus + c_minus * e_minus)};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,delta_dl,delta_dr,delta_sl,delta_sr,u1d_left,u2d_left,u1d_right,u2d_right\n";
  for (const TrajectorySample& s : traj.samples) {
    out += format_double(s.state.t);
    for (double v : {s.state.d_dl, s.state.d_dr, s.state.d_sl, s.state.d_sr, s.u1d_left,
                     s.u2d_left, s.u1d_right, s.u2d_right}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace commstab
