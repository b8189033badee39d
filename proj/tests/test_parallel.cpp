#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "commstab/community.hpp"
#include "commstab/parallel.hpp"

using namespace commstab;

namespace {

struct ParallelToggle {
  bool saved = par::enabled();
  ~ParallelToggle() { par::enabled() = saved; }
};

CommunityPairState sample_state() {
  CommunityPairState s{};
  s.params = ModelParams{1.0, 1.0, 1.0, 0.5, 1.0, 1.0, 2.0, 2};
  s.lc = 1.0;
  s.ld = 0.5;
  s.d_dl = 0.17;
  s.d_dr = -0.09;
  s.d_sl = 0.03;
  s.d_sr = 0.03;
  return s;
}

}  // namespace

TEST_CASE("chunked reduction is bitwise identical with the toggle on and off") {
  std::mt19937_64 rng(8);
  std::vector<double> data(100000);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (double& d : data) d = val(rng);

  auto sum_chunked = [&] {
    return par::chunked_reduce(
        data.size(), std::size_t{1024}, 0.0,
        [&](std::size_t begin, std::size_t end) {
          double acc = 0.0;
          for (std::size_t i = begin; i < end; ++i) acc += data[i];
          return acc;
        },
        [](double acc, double partial) { return acc + partial; });
  };

  ParallelToggle guard;
  par::enabled() = false;
  const double serial = sum_chunked();
  par::enabled() = true;
  const double parallel = sum_chunked();
  CHECK(serial == parallel);

  const double plain = std::accumulate(data.begin(), data.end(), 0.0);
  CHECK(std::fabs(serial - plain) <= 1e-9 * (1.0 + std::fabs(plain)));
}

TEST_CASE("chunked reduction handles empty input and odd chunk sizes") {
  auto count = [](std::size_t n, std::size_t chunk) {
    return par::chunked_reduce(
        n, chunk, std::size_t{0},
        [](std::size_t begin, std::size_t end) { return end - begin; },
        [](std::size_t acc, std::size_t partial) { return acc + partial; });
  };
  CHECK(count(0, 16) == 0);
  CHECK(count(1, 16) == 1);
  CHECK(count(1000, 7) == 1000);
  CHECK(count(1000, 0) == 1000);  // zero chunk falls back to one element
  CHECK(count(5, 100) == 5);
}

TEST_CASE("parallel_for touches each index exactly once in both modes") {
  ParallelToggle guard;
  for (bool mode : {false, true}) {
    par::enabled() = mode;
    std::vector<int> hits(5003, 0);
    par::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("worker count reports the active mode") {
  ParallelToggle guard;
  par::enabled() = false;
  CHECK(par::worker_count() == 1);
  par::enabled() = true;
  CHECK(par::worker_count() >= 1);
}

TEST_CASE("quadrature oracles are unchanged by the parallel toggle") {
  const CommunityPairState s = sample_state();
  ParallelToggle guard;
  par::enabled() = false;
  const double pu_serial = producer_utility_oracle(1, s, 1e-5);
  const double cu_serial = consumer_utility_oracle(2, TorusPoint{0.9}, s, 1e-5);
  const TorusPoint argmax_serial = optimal_content_oracle(1, s, 1e-4);
  par::enabled() = true;
  CHECK(producer_utility_oracle(1, s, 1e-5) == pu_serial);
  CHECK(consumer_utility_oracle(2, TorusPoint{0.9}, s, 1e-5) == cu_serial);
  CHECK(optimal_content_oracle(1, s, 1e-4).x == argmax_serial.x);
}

TEST_CASE("argmax plateaus resolve deterministically toward the leftmost point") {
  // demand twice as wide as the interest reach: every content point that
  // fits the whole triangle inside the interval is optimal
  CommunityPairState s{};
  s.params = ModelParams{1.0, 2.0, 1.0, 0.5, 1.0, 1.0, 2.0, 2};
  s.lc = 1.0;
  s.ld = 0.9;

  const TorusPoint grid = optimal_content_oracle(1, s, 1e-4);
  const TorusPoint closed = optimal_content(1, s);
  const TorusInterval demand = s.demand_interval(1);
  const double obj_grid = triangle_integral(grid, demand, s.params);
  const double obj_closed = triangle_integral(closed, demand, s.params);
  CHECK(std::fabs(obj_grid - obj_closed) <= 1e-12);
  // plateau spans [-1.4, -0.6]; the scan settles on its left edge
  CHECK(grid.x == doctest::Approx(-1.4).epsilon(1e-3));

  ParallelToggle guard;
  par::enabled() = false;
  const double serial_pick = optimal_content_oracle(1, s, 1e-4).x;
  par::enabled() = true;
  CHECK(optimal_content_oracle(1, s, 1e-4).x == serial_pick);
}
