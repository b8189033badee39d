#include "commstab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace commstab {

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid params: " + msg); };
  if (!(f0 > 0.0 && f0 <= 1.0)) fail("f0 must be in (0, 1]");
  if (!(a > 0.0)) fail("a must be > 0");
  if (!(g0 > 0.0 && g0 <= 1.0)) fail("g0 must be in (0, 1]");
  if (!(c > 0.0)) fail("c must be > 0");
  if (!(ep > 0.0 && ep <= 1.0)) fail("ep must be in (0, 1]");
  if (!(eq > 0.0)) fail("eq must be > 0");
  if (!(big_l > 0.0)) fail("big_l must be > 0");
  if (n_comm < 2) fail("n_comm must be an integer >= 2");
  if (!(f0 * g0 > c)) fail("f0*g0 must exceed c, otherwise no interaction is ever profitable");
}

double wrap_coordinate(double x, double big_l) {
  const double two_l = 2.0 * big_l;
  double r = std::fmod(x + big_l, two_l);
  if (r < 0.0) r += two_l;
  double out = r - big_l;
  // fmod can land exactly on the open end after rounding
  if (out >= big_l) out = -big_l;
  return out;
}

TorusPoint torus_point(double x, double big_l) { return TorusPoint{wrap_coordinate(x, big_l)}; }

double torus_distance(TorusPoint p, TorusPoint q, double big_l) {
  const double diff = std::fabs(p.x - q.x);  // in [0, 2L) for canonical inputs
  return std::min(diff, 2.0 * big_l - diff);
}

TorusPoint TorusInterval::midpoint(double big_l) const {
  return torus_point(lo.x + length / 2.0, big_l);
}

bool TorusInterval::contains(TorusPoint p, double big_l) const {
  double u = wrap_coordinate(p.x - lo.x, big_l);
  if (u < 0.0) u += 2.0 * big_l;  // arc position measured from lo, in [0, 2L)
  return u < length;
}

double interest_prob(TorusPoint x, TorusPoint y, const ModelParams& params) {
  return std::max(0.0, params.f0 - params.a * torus_distance(x, y, params.big_l));
}

double production_ability(TorusPoint, TorusPoint, const ModelParams& params) { return params.g0; }

}  // namespace commstab
