#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "commstab/equilibrium.hpp"

namespace commstab {

// Boundary offsets of the perturbed community pair at time t.
struct PerturbationState {
  double t = 0.0;
  double d_dl = 0.0;
  double d_dr = 0.0;
  double d_sl = 0.0;
  double d_sr = 0.0;

  double max_abs_delta() const;
};

// Utilities entering the boundary dynamics, evaluated at one state. The
// consumer values are taken at the two gap-facing demand boundary points;
// the producer values are location-independent.
struct BorderUtilities {
  double u1d_left;
  double u2d_left;
  double u1d_right;
  double u2d_right;
  double u1s;
  double u2s;
};

struct RhsResult {
  double dd_dl;
  double dd_dr;
  double dd_sl;
  double dd_sr;
  BorderUtilities utilities;
};

// Boundary ODE right-hand side; nullopt when the state is not a valid
// community pair (a width collapsed or wrapped past the circle).
std::optional<RhsResult> eval_rhs(const PerturbationState& state, const EquilibriumSpec& spec);

enum class Termination { reached_t_max, state_invalid, converged_below_epsilon };
std::string termination_name(Termination t);

struct TrajectorySample {
  PerturbationState state;
  double u1d_left;
  double u2d_left;
  double u1d_right;
  double u2d_right;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 50.0;
  double eps_converged = 1e-10;
  int sample_stride = 10;
  // Symmetric-start requirements of the perturbation model; disable only for
  // exploratory runs.
  bool enforce_initial_constraints = true;

  void validate() const;
};

// Called once per accepted step with the state and the fresh RHS evaluation
// at that state; used for invariant monitoring at full step resolution.
using StepObserver = std::function<void(const PerturbationState&, const RhsResult&)>;

// Classical fixed-step RK4. Samples every sample_stride steps plus the final
// state; stops early on convergence of max|delta| or on state collapse.
Trajectory integrate(const PerturbationState& initial, const EquilibriumSpec& spec,
                     const IntegratorConfig& config, const StepObserver& observer = {});

// Exact coefficients of the symmetric full-coverage boundary dynamics
// d(delta_d)/dt = K*delta_s - M*delta_d, d(delta_s)/dt = K*delta_d.
struct LinearSystem {
  double k_const;
  double m_const;
};

LinearSystem linear_coefficients(const EquilibriumSpec& spec);

struct LinearEigen {
  double lambda_plus;
  double lambda_minus;
};

LinearEigen linear_eigenvalues(const LinearSystem& sys);

// Closed-form solution (matrix exponential) of the linear system from
// (d0, s0); returns (delta_d(t), delta_s(t)).
std::pair<double, double> linear_solution(const LinearSystem& sys, double d0, double s0, double t);

// CSV export: header t,delta_dl,delta_dr,delta_sl,delta_sr,u1d_left,u2d_left,
// u1d_right,u2d_right with shortest round-trip number formatting.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace commstab
