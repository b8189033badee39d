#pragma once

#include <string>

#include "commstab/model.hpp"

namespace commstab {

// Two adjacent communities centered at -lc and +lc with perturbed boundaries.
// d_dl / d_dr move the gap-facing demand boundaries of communities 1 / 2,
// d_sl / d_sr move the shared supply boundary near 0.
struct CommunityPairState {
  ModelParams params;
  double lc;  // unperturbed supply half-width
  double ld;  // unperturbed demand half-width, 0 < ld <= lc
  double d_dl = 0.0;
  double d_dr = 0.0;
  double d_sl = 0.0;
  double d_sr = 0.0;

  TorusInterval demand_interval(int which) const;
  TorusInterval supply_interval(int which) const;
  double demand_width(int which) const;
  double supply_width(int which) const;

  // Empty when the state is usable: positive widths, widths at most the full
  // circle, 2*lc <= big_l, 0 < ld <= lc.
  std::string invalid_reason() const;
  bool valid() const { return invalid_reason().empty(); }
};

// Content point maximizing demand-side reach: the demand interval's midpoint.
TorusPoint optimal_content(int which, const CommunityPairState& state);

// Exact integral of max{0, f0 - a*d(center, z)} dz over the interval.
double triangle_integral(TorusPoint center, TorusInterval interval, const ModelParams& params);

// Expected utility of a consumer at y who joins community `which`.
double consumer_utility(int which, TorusPoint y, const CommunityPairState& state);

// Expected utility of a producer serving community `which`; the flat
// production ability makes it independent of the producer's location.
double producer_utility(int which, const CommunityPairState& state);

// Reference implementations: midpoint quadrature / exhaustive grid search.
double consumer_utility_oracle(int which, TorusPoint y, const CommunityPairState& state,
                               double quad_step);
double producer_utility_oracle(int which, const CommunityPairState& state, double quad_step);
TorusPoint optimal_content_oracle(int which, const CommunityPairState& state, double grid_step);

}  // namespace commstab
