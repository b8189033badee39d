#pragma once

#include <string>

namespace commstab {

// Scalar constants of the content market. Interest in an item decays
// linearly with torus distance from its topic, production ability is flat.
struct ModelParams {
  double f0;     // interest at zero distance, in (0, 1]
  double a;      // interest decay per unit distance, > 0
  double g0;     // production ability, in (0, 1]
  double c;      // consumption cost per item, > 0
  double ep;     // consumption budget, in (0, 1]
  double eq;     // production budget, > 0
  double big_l;  // torus half-length, > 0
  int n_comm;    // number of communities, >= 2

  // Throws std::invalid_argument naming the offending field. Also rejects
  // f0 * g0 <= c, which would leave no distance with positive surplus.
  void validate() const;

  // Distance at which expected surplus g0*f(d) - c crosses zero.
  double zero_surplus_distance() const { return f0 / a - c / (a * g0); }

  // Half-width of one community's supply cell when n_comm cells tile the torus.
  double community_half_width() const { return big_l / n_comm; }
};

// Canonical coordinate on the circle [-L, L).
struct TorusPoint {
  double x;
};

double wrap_coordinate(double x, double big_l);
TorusPoint torus_point(double x, double big_l);

// Shortest arc length between two canonical coordinates, in [0, L].
double torus_distance(TorusPoint p, TorusPoint q, double big_l);

// Half-open arc [lo, lo + length) winding counterclockwise; length in [0, 2L].
struct TorusInterval {
  TorusPoint lo;
  double length;

  TorusPoint midpoint(double big_l) const;
  bool contains(TorusPoint p, double big_l) const;
};

// Probability that a consumer at y is interested in content at x:
// max{0, f0 - a * d(x, y)}.
double interest_prob(TorusPoint x, TorusPoint y, const ModelParams& params);

// Probability that a producer at y can produce content at x (flat at g0).
double production_ability(TorusPoint x, TorusPoint y, const ModelParams& params);

}  // namespace commstab
