#pragma once

#include <string>
#include <vector>

#include "commstab/community.hpp"
#include "commstab/model.hpp"

namespace commstab {

enum class StructureKind { full_coverage, gapped };

// N equal communities tiling the torus, every demand interval of half-width
// ld centered on its community. kind is full_coverage exactly when ld == lc.
struct EquilibriumSpec {
  ModelParams params;
  double lc;
  double ld;
  StructureKind kind;

  static EquilibriumSpec make(const ModelParams& params, double ld);

  // Center of community k, k in [0, n_comm).
  double center(int k) const;

  // Pair state around the boundary between two adjacent communities.
  CommunityPairState pair_state(double d_dl, double d_dr, double d_sl, double d_sr) const;
};

// Demand half-width that puts the gap-facing boundary consumer exactly at
// zero utility: f0/a - c/(a*g0).
double equilibrium_ld(const ModelParams& params);

// Full-coverage structures are Nash equilibria iff lc stays within the
// zero-surplus distance; gapped ones iff ld sits exactly at it (1e-12 slack).
bool check_ne_full(const EquilibriumSpec& spec);
bool check_ne_gap(const EquilibriumSpec& spec);

struct DeviationWitness {
  double agent;           // coordinate of the deviating agent
  std::string deviation;  // e.g. "abstain", "join-left", "join-right"
  double gain;
};

struct AuditReport {
  bool is_ne;
  double worst_violation;  // largest deviation gain found (may be <= 0)
  std::vector<DeviationWitness> witnesses;
};

// Samples consumers and producers over the torus and checks every allowed
// deviation against the current allocation. Gains above 1e-9 are violations.
AuditReport best_response_audit(const EquilibriumSpec& spec, int n_samples, double grid_step);

}  // namespace commstab
