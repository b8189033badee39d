#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "commstab/community.hpp"
#include "commstab/verify.hpp"

using namespace commstab;

namespace {

ModelParams base_params() { return ModelParams{1.0, 1.0, 1.0, 0.5, 1.0, 1.0, 2.0, 2}; }

CommunityPairState rest_state() {
  CommunityPairState s{};
  s.params = base_params();
  s.lc = 1.0;
  s.ld = 0.5;
  return s;
}

}  // namespace

TEST_CASE("intervals follow the boundary-offset conventions") {
  CommunityPairState s = rest_state();
  s.d_dl = 0.2;
  s.d_dr = -0.1;
  s.d_sl = 0.05;
  s.d_sr = -0.03;
  CHECK(s.demand_interval(1).lo.x == doctest::Approx(-1.5));
  CHECK(s.demand_width(1) == doctest::Approx(1.2));
  CHECK(s.demand_interval(2).lo.x == doctest::Approx(0.4));
  CHECK(s.demand_width(2) == doctest::Approx(1.1));
  CHECK(s.supply_interval(1).lo.x == -2.0);
  CHECK(s.supply_width(1) == doctest::Approx(2.05));
  CHECK(s.supply_interval(2).lo.x == doctest::Approx(-0.03));
  CHECK(s.supply_width(2) == doctest::Approx(2.03));
  CHECK(s.valid());

  s.d_dr = 1.0;  // collapses community 2's demand
  CHECK(s.invalid_reason().find("demand width of community 2") != std::string::npos);
}

TEST_CASE("optimal content sits at the demand midpoint") {
  CommunityPairState s = rest_state();
  CHECK(optimal_content(1, s).x == doctest::Approx(-1.0));
  CHECK(optimal_content(2, s).x == doctest::Approx(1.0));
  s.d_dl = 0.2;
  CHECK(optimal_content(1, s).x == doctest::Approx(-0.9));
  s.d_dr = -0.1;
  CHECK(optimal_content(2, s).x == doctest::Approx(0.95));
}

TEST_CASE("triangle integral matches hand-computed areas") {
  const ModelParams p = base_params();
  CHECK(triangle_integral(TorusPoint{0.0}, {torus_point(-0.5, 2.0), 1.0}, p) ==
        doctest::Approx(0.75));
  CHECK(triangle_integral(TorusPoint{0.0}, {torus_point(-1.0, 2.0), 2.0}, p) ==
        doctest::Approx(1.0));
  ModelParams wide = p;
  wide.big_l = 4.0;
  CHECK(triangle_integral(TorusPoint{0.0}, {torus_point(2.0, 4.0), 1.0}, wide) == 0.0);
  // interval [1.8, 2) u [-2, -1.2) wraps past the seam
  ModelParams gentle = p;
  gentle.a = 0.5;
  CHECK(triangle_integral(TorusPoint{0.0}, {torus_point(1.8, 2.0), 1.0}, gentle) ==
        doctest::Approx(0.17).epsilon(1e-12));
  CHECK(triangle_integral(TorusPoint{0.0}, {torus_point(0.3, 2.0), 0.0}, p) == 0.0);
}

TEST_CASE("consumer utility at the rest state takes its closed-form values") {
  const CommunityPairState s = rest_state();
  CHECK(consumer_utility(1, TorusPoint{-1.0}, s) == doctest::Approx(1.0));
  CHECK(consumer_utility(1, TorusPoint{-0.5}, s) == 0.0);
  CHECK(consumer_utility(1, TorusPoint{0.0}, s) == doctest::Approx(-1.0));
  CHECK(consumer_utility(2, TorusPoint{1.0}, s) == doctest::Approx(1.0));
}

TEST_CASE("producer utility is independent of location and matches hand values") {
  CommunityPairState s = rest_state();
  CHECK(producer_utility(1, s) == doctest::Approx(0.25));
  CHECK(producer_utility(2, s) == doctest::Approx(0.25));
  s.d_dl = 0.2;
  CHECK(producer_utility(1, s) == doctest::Approx(0.24));
  CHECK(producer_utility(2, s) == doctest::Approx(0.25));
}

TEST_CASE("widening one side mirrors shrinking the other") {
  for (double shift : {0.05, 0.2, 0.4, -0.1}) {
    CommunityPairState left = rest_state();
    left.d_dl = shift;
    CommunityPairState right = rest_state();
    right.d_dr = -shift;
    CHECK(producer_utility(1, left) == doctest::Approx(producer_utility(2, right)).epsilon(1e-12));
  }
}

TEST_CASE("closed forms agree with quadrature oracles on random states") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const CommunityPairState s = verify::random_pair_state(rng, std::nullopt, false);
    const int which = 1 + static_cast<int>(i % 2);
    const TorusPoint y = torus_point(pos(rng) * s.params.big_l, s.params.big_l);
    const double cu = consumer_utility(which, y, s);
    const double cu_ref = consumer_utility_oracle(which, y, s, 1e-4);
    CHECK(std::fabs(cu - cu_ref) <= 1e-6 * (1.0 + std::fabs(cu_ref)));
    const double pu = producer_utility(which, s);
    const double pu_ref = producer_utility_oracle(which, s, 1e-4);
    CHECK(std::fabs(pu - pu_ref) <= 1e-6 * (1.0 + std::fabs(pu_ref)));
  }
}

TEST_CASE("oracles return zero for an empty interval") {
  CommunityPairState s = rest_state();
  s.d_sl = -2.0;  // community 1 supply width hits zero
  CHECK(consumer_utility_oracle(1, TorusPoint{-1.0}, s, 1e-4) == 0.0);
  CHECK(consumer_utility(1, TorusPoint{-1.0}, s) == 0.0);
}

TEST_CASE("closed-form content choice wins against exhaustive search") {
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 200; ++i) {
    const CommunityPairState s = verify::random_pair_state(rng, std::nullopt, true);
    const int which = 1 + static_cast<int>(i % 2);
    const TorusInterval demand = s.demand_interval(which);
    const TorusPoint closed = optimal_content(which, s);
    const TorusPoint searched = optimal_content_oracle(which, s, 1e-3);
    const double obj_closed = s.params.g0 * triangle_integral(closed, demand, s.params);
    const double obj_searched = s.params.g0 * triangle_integral(searched, demand, s.params);
    CHECK(obj_closed >= obj_searched - 1e-12);
    CHECK(torus_distance(closed, searched, s.params.big_l) <= 2e-3);
  }
}

TEST_CASE("utilities stay inside the budget bound") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const CommunityPairState s = verify::random_pair_state(rng, std::nullopt, false);
    const ModelParams& p = s.params;
    const double bound =
        p.ep * p.eq * 2.0 * p.big_l * std::max(p.c, p.g0 * p.f0) + 1e-12;
    const int which = 1 + static_cast<int>(i % 2);
    const TorusPoint y = torus_point(pos(rng) * p.big_l, p.big_l);
    CHECK(std::fabs(consumer_utility(which, y, s)) <= bound);
    CHECK(std::fabs(producer_utility(which, s)) <= bound);
  }
}

TEST_CASE("boundary-consumer utility changes sign with the demand width") {
  const ModelParams p = base_params();
  const double two_lstar = 2.0 * p.zero_surplus_distance();
  for (double d_dl : {-0.3, 0.0, 0.14, 0.2, 0.35}) {
    CommunityPairState s = rest_state();
    s.d_dl = d_dl;
    const TorusPoint border = torus_point(-s.lc + s.ld + s.d_dl, p.big_l);
    const double u = consumer_utility(1, border, s);
    const double spread = 2.0 * s.ld + d_dl;
    if (spread < two_lstar - 1e-10) {
      CHECK(u > 0.0);
    } else if (spread > two_lstar + 1e-10) {
      CHECK(u < 0.0);
    } else {
      CHECK(u == 0.0);
    }
  }
}
