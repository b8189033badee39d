#include "commstab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "commstab/parallel.hpp"

namespace commstab {

namespace {
constexpr double kNeSlack = 1e-12;
constexpr double kGainTolerance = 1e-9;
constexpr std::size_t kMaxWitnesses = 8;
}  // namespace

EquilibriumSpec EquilibriumSpec::make(const ModelParams& params, double ld) {
  params.validate();
  const double lc = params.community_half_width();
  if (!(ld > 0.0 && ld <= lc)) {
    throw std::invalid_argument("l_d must be in (0, " + std::to_string(lc) + "]; got " +
                                std::to_string(ld));
  }
  const StructureKind kind = ld == lc ? StructureKind::full_coverage : StructureKind::gapped;
  return EquilibriumSpec{params, lc, ld, kind};
}

double EquilibriumSpec::center(int k) const {
  return wrap_coordinate(-params.big_l + (2.0 * k + 1.0) * lc, params.big_l);
}

CommunityPairState EquilibriumSpec::pair_state(double d_dl, double d_dr, double d_sl,
                                               double d_sr) const {
  return CommunityPairState{params, lc, ld, d_dl, d_dr, d_sl, d_sr};
}

double equilibrium_ld(const ModelParams& params) {
  params.validate();
  return params.zero_surplus_distance();
}

bool check_ne_full(const EquilibriumSpec& spec) {
  if (spec.kind != StructureKind::full_coverage) {
    throw std::invalid_argument("check_ne_full expects a full-coverage structure");
  }
  return spec.lc <= spec.params.zero_surplus_distance() + kNeSlack;
}

bool check_ne_gap(const EquilibriumSpec& spec) {
  if (spec.kind != StructureKind::gapped) {
    throw std::invalid_argument("check_ne_gap expects a gapped structure");
  }
  return std::fabs(spec.ld - spec.params.zero_surplus_distance()) <= kNeSlack;
}

namespace {

struct Accum {
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<DeviationWitness> witnesses;
};

void note(Accum& acc, double agent, const char* deviation, double gain) {
  acc.worst = std::max(acc.worst, gain);
  if (gain > kGainTolerance) acc.witnesses.push_back({agent, deviation, gain});
}

Accum merge(Accum acc, const Accum& partial) {
  acc.worst = std::max(acc.worst, partial.worst);
  acc.witnesses.insert(acc.witnesses.end(), partial.witnesses.begin(), partial.witnesses.end());
  return acc;
}

// Utility of a consumer at y in the community centered at m: the whole
// unperturbed supply cell of width 2*lc serves it.
double join_utility(const EquilibriumSpec& spec, double y, double m) {
  const ModelParams& p = spec.params;
  const double d = torus_distance(TorusPoint{y}, TorusPoint{m}, p.big_l);
  return p.ep * p.eq * 2.0 * spec.lc * (p.g0 * std::max(0.0, p.f0 - p.a * d) - p.c);
}

}  // namespace

AuditReport best_response_audit(const EquilibriumSpec& spec, int n_samples, double grid_step) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  const ModelParams& p = spec.params;
  const int n_comm = p.n_comm;
  const double big_l = p.big_l;
  const auto n = static_cast<std::size_t>(n_samples);

  auto sample_coord = [&](std::size_t j) {
    return -big_l + (static_cast<double>(j) + 0.5) * (2.0 * big_l / static_cast<double>(n));
  };
  auto cell_of = [&](double y) {
    auto k = static_cast<int>(std::floor((y + big_l) / (2.0 * spec.lc)));
    return std::clamp(k, 0, n_comm - 1);
  };

  // Consumers: compare staying put against abstaining or joining a neighbor.
  Accum consumers = par::chunked_reduce(
      n, std::size_t{64}, Accum{},
      [&](std::size_t begin, std::size_t end) {
        Accum acc;
        for (std::size_t j = begin; j < end; ++j) {
          const double y = sample_coord(j);
          const int k = cell_of(y);
          const double m = spec.center(k);
          const double offset = y - m;
          const bool covered = offset >= -spec.ld && offset < spec.ld;
          if (covered) {
            const double current = join_utility(spec, y, m);
            note(acc, y, "abstain", -current);
            note(acc, y, "join-left", join_utility(spec, y, spec.center((k + n_comm - 1) % n_comm)) - current);
            note(acc, y, "join-right", join_utility(spec, y, spec.center((k + 1) % n_comm)) - current);
          } else {
            // in the gap; joining either flanking community is the deviation
            const int left = offset >= spec.ld ? k : (k + n_comm - 1) % n_comm;
            const int right = (left + 1) % n_comm;
            note(acc, y, "join-left", join_utility(spec, y, spec.center(left)));
            note(acc, y, "join-right", join_utility(spec, y, spec.center(right)));
          }
        }
        return acc;
      },
      merge);

  // Producers: the flat ability makes utilities location-independent, so the
  // content grid scan is shared by every sample and every community.
  const CommunityPairState base = spec.pair_state(0.0, 0.0, 0.0, 0.0);
  const TorusInterval demand = base.demand_interval(1);
  const double at_center = triangle_integral(optimal_content(1, base), demand, p);
  const double current_s = producer_utility(1, base);
  const auto grid_points = static_cast<std::size_t>(std::ceil(2.0 * big_l / grid_step));
  double grid_best = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = -big_l + static_cast<double>(i) * grid_step;
    if (x >= big_l) break;
    grid_best = std::max(grid_best, triangle_integral(TorusPoint{x}, demand, p));
  }
  const double move_gain = p.ep * p.eq * p.g0 * (grid_best - at_center);

  Accum producers = par::chunked_reduce(
      n, std::size_t{64}, Accum{},
      [&](std::size_t begin, std::size_t end) {
        Accum acc;
        for (std::size_t j = begin; j < end; ++j) {
          const double z = sample_coord(j);
          note(acc, z, "move-content", move_gain);
          note(acc, z, "switch-community", 0.0);
          note(acc, z, "abstain", -current_s);
        }
        return acc;
      },
      merge);

  Accum all = merge(std::move(consumers), producers);
  std::sort(all.witnesses.begin(), all.witnesses.end(),
            [](const DeviationWitness& lhs, const DeviationWitness& rhs) {
              if (lhs.gain != rhs.gain) return lhs.gain > rhs.gain;
              if (lhs.agent != rhs.agent) return lhs.agent < rhs.agent;
              return lhs.deviation < rhs.deviation;
            });
  if (all.witnesses.size() > kMaxWitnesses) all.witnesses.resize(kMaxWitnesses);
  return AuditReport{all.worst <= kGainTolerance, all.worst, std::move(all.witnesses)};
}

}  // namespace commstab
