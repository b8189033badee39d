#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "commstab/dynamics.hpp"

namespace commstab {

enum class Verdict { stable, neutral_stable, unstable, indeterminate };
std::string verdict_name(Verdict v);

// Classification outcome with the evidence that produced it; optional fields
// are filled only where they apply (envelopes for gapped structures,
// eigenvalues and witness data for full coverage).
struct StabilityVerdict {
  Verdict verdict = Verdict::indeterminate;
  double probe_delta = 0.0;
  std::optional<double> envelope_residual;
  // residual against the tighter delta0*B0*exp(-B0 t) variant of the bound;
  // reported for transparency, not part of the verdict
  std::optional<double> envelope_residual_statement;
  std::optional<std::pair<double, double>> limit_utilities;
  std::optional<double> supply_excursion;
  std::optional<LinearSystem> coefficients;
  std::optional<LinearEigen> eigenvalues;
  std::optional<PerturbationState> witness;
  std::optional<double> min_delta_d;
  std::optional<double> min_delta_s;
  std::string diagnostics;
};

// Decay-rate constant of the gapped boundary dynamics: ep*eq*lc*a*g0/2.
double envelope_constant(const EquilibriumSpec& spec);

// Largest probe magnitude for which the gapped decay argument is valid.
double admissible_delta(const EquilibriumSpec& spec);

// Initial state from which a full-coverage structure with positive growth
// coefficient provably never returns to rest.
PerturbationState instability_witness(const EquilibriumSpec& spec, double probe_delta);

// max over samples of |delta_dl(t)| - |delta0| * exp(-B0 t); nonpositive up
// to tolerance when the exponential envelope holds. Throws when the
// trajectory violates the envelope's preconditions.
double envelope_check(const Trajectory& traj, const EquilibriumSpec& spec, double delta0);

// Producer utilities at the end of a converged gapped trajectory. Throws on
// a non-convergent trajectory, carrying the final offsets in the message.
std::pair<double, double> neutral_limit_check(const Trajectory& traj, const EquilibriumSpec& spec);

// Probes the equilibrium with perturbations of size probe_delta and maps the
// outcome to neutral_stable (gapped), unstable (full coverage with positive
// growth), or indeterminate (threshold or unconfirmed evidence).
StabilityVerdict classify(const EquilibriumSpec& spec, double probe_delta,
                          const IntegratorConfig& config);

// classify at the base probe and three decades below it; disagreement across
// the grid downgrades the aggregate to indeterminate.
struct ProbeGridResult {
  std::vector<double> probes;
  std::vector<Verdict> verdicts;
  StabilityVerdict base;
  Verdict aggregate = Verdict::indeterminate;
};

ProbeGridResult classify_probe_grid(const EquilibriumSpec& spec, double base_probe,
                                    const IntegratorConfig& config);

double default_probe_delta(const EquilibriumSpec& spec);

// Structured text report, one "key: value" line per field that applies.
std::string verdict_report(const StabilityVerdict& v, const EquilibriumSpec& spec);

}  // namespace commstab
