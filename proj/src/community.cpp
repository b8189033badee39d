#include "commstab/community.hpp"

#include <cmath>
#include <stdexcept>

#include "commstab/parallel.hpp"

namespace commstab {

namespace {

void require_which(int which) {
  if (which != 1 && which != 2) throw std::invalid_argument("community index must be 1 or 2");
}

// Antiderivative of the clipped triangle kernel in center-relative
// coordinates, odd in u and evaluated on [-L, L].
double triangle_antiderivative(double u, double reach, const ModelParams& p) {
  const double m = std::min(std::fabs(u), reach);
  const double area = p.f0 * m - p.a * m * m / 2.0;
  return u < 0.0 ? -area : area;
}

}  // namespace

TorusInterval CommunityPairState::demand_interval(int which) const {
  require_which(which);
  if (which == 1) return {torus_point(-lc - ld, params.big_l), 2.0 * ld + d_dl};
  return {torus_point(lc - ld + d_dr, params.big_l), 2.0 * ld - d_dr};
}

TorusInterval CommunityPairState::supply_interval(int which) const {
  require_which(which);
  if (which == 1) return {torus_point(-2.0 * lc, params.big_l), 2.0 * lc + d_sl};
  return {torus_point(d_sr, params.big_l), 2.0 * lc - d_sr};
}

double CommunityPairState::demand_width(int which) const {
  require_which(which);
  return which == 1 ? 2.0 * ld + d_dl : 2.0 * ld - d_dr;
}

double CommunityPairState::supply_width(int which) const {
  require_which(which);
  return which == 1 ? 2.0 * lc + d_sl : 2.0 * lc - d_sr;
}

std::string CommunityPairState::invalid_reason() const {
  if (!(lc > 0.0)) return "lc must be > 0";
  if (!(ld > 0.0 && ld <= lc)) return "ld must be in (0, lc]";
  if (2.0 * lc > params.big_l) return "two communities of half-width lc exceed the torus";
  const double two_l = 2.0 * params.big_l;
  for (int which : {1, 2}) {
    if (!(demand_width(which) > 0.0)) return "demand width of community " + std::to_string(which) + " collapsed";
    if (demand_width(which) > two_l) return "demand width of community " + std::to_string(which) + " exceeds the circle";
    if (!(supply_width(which) > 0.0)) return "supply width of community " + std::to_string(which) + " collapsed";
    if (supply_width(which) > two_l) return "supply width of community " + std::to_string(which) + " exceeds the circle";
  }
  return {};
}

TorusPoint optimal_content(int which, const CommunityPairState& state) {
  require_which(which);
  const double x = which == 1 ? -state.lc + state.d_dl / 2.0 : state.lc + state.d_dr / 2.0;
  return torus_point(x, state.params.big_l);
}

double triangle_integral(TorusPoint center, TorusInterval interval, const ModelParams& p) {
  if (interval.length <= 0.0) return 0.0;
  const double reach = std::min(p.f0 / p.a, p.big_l);
  const double lo = wrap_coordinate(interval.lo.x - center.x, p.big_l);
  const double hi = lo + interval.length;
  auto h = [&](double u) { return triangle_antiderivative(u, reach, p); };
  if (hi <= p.big_l) return h(hi) - h(lo);
  // interval wraps past +L; add the piece that re-enters at -L
  return (h(p.big_l) - h(lo)) + (h(hi - 2.0 * p.big_l) - h(-p.big_l));
}

double consumer_utility(int which, TorusPoint y, const CommunityPairState& state) {
  const ModelParams& p = state.params;
  const TorusPoint xstar = optimal_content(which, state);
  const double surplus = p.g0 * interest_prob(xstar, y, p) - p.c;
  return p.ep * p.eq * state.supply_width(which) * surplus;
}

double producer_utility(int which, const CommunityPairState& state) {
  const ModelParams& p = state.params;
  const TorusPoint xstar = optimal_content(which, state);
  const TorusInterval demand = state.demand_interval(which);
  return p.ep * p.eq * (p.g0 * triangle_integral(xstar, demand, p) - p.c * demand.length);
}

namespace {

constexpr std::size_t kQuadChunk = 8192;

// Midpoint rule over a wrapped interval; cells are independent, the partial
// sums fold in chunk order.
template <class Term>
double midpoint_quadrature(TorusInterval interval, double step, double big_l, Term term) {
  if (interval.length <= 0.0) return 0.0;
  const auto cells = static_cast<std::size_t>(std::ceil(interval.length / step));
  const double h = interval.length / static_cast<double>(cells);
  const double sum = par::chunked_reduce(
      cells, kQuadChunk, 0.0,
      [&](std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const double z = interval.lo.x + (static_cast<double>(i) + 0.5) * h;
          acc += term(torus_point(z, big_l));
        }
        return acc;
      },
      [](double acc, double partial) { return acc + partial; });
  return h * sum;
}

}  // namespace

double consumer_utility_oracle(int which, TorusPoint y, const CommunityPairState& state,
                               double quad_step) {
  const ModelParams& p = state.params;
  const TorusPoint xstar = optimal_content(which, state);
  const double integral = midpoint_quadrature(
      state.supply_interval(which), quad_step, p.big_l,
      [&](TorusPoint z) { return production_ability(xstar, z, p) * interest_prob(xstar, y, p) - p.c; });
  return p.ep * p.eq * integral;
}

double producer_utility_oracle(int which, const CommunityPairState& state, double quad_step) {
  const ModelParams& p = state.params;
  const TorusPoint xstar = optimal_content(which, state);
  const double integral = midpoint_quadrature(
      state.demand_interval(which), quad_step, p.big_l,
      [&](TorusPoint z) { return p.g0 * interest_prob(xstar, z, p) - p.c; });
  return p.ep * p.eq * integral;
}

TorusPoint optimal_content_oracle(int which, const CommunityPairState& state, double grid_step) {
  const ModelParams& p = state.params;
  const TorusInterval demand = state.demand_interval(which);
  const auto points = static_cast<std::size_t>(std::ceil(2.0 * p.big_l / grid_step));

  struct Best {
    double value;
    double coord;
  };
  auto better = [](const Best& lhs, const Best& rhs) {
    if (lhs.value != rhs.value) return lhs.value > rhs.value;
    return lhs.coord < rhs.coord;  // ties break toward the smaller coordinate
  };
  const Best best = par::chunked_reduce(
      points, 1024, Best{-1.0, 0.0},
      [&](std::size_t begin, std::size_t end) {
        Best acc{-1.0, 0.0};
        for (std::size_t i = begin; i < end; ++i) {
          const double x = -p.big_l + static_cast<double>(i) * grid_step;
          if (x >= p.big_l) break;
          const Best cand{p.g0 * triangle_integral(TorusPoint{x}, demand, p), x};
          if (better(cand, acc)) acc = cand;
        }
        return acc;
      },
      [&](Best acc, Best partial) { return better(partial, acc) ? partial : acc; });
  return TorusPoint{best.coord};
}

}  // namespace commstab
