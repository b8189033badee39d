// Times the OpenMP kernels against the serial reference path and checks that
// both produce bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "commstab/equilibrium.hpp"
#include "commstab/parallel.hpp"
#include "commstab/stability.hpp"

using namespace commstab;

namespace {

double time_ms(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

struct Row {
  std::string name;
  double serial_ms;
  double parallel_ms;
  bool identical;
};

template <class Fn>
Row compare(const std::string& name, Fn kernel) {
  Row row{name, 0.0, 0.0, false};
  par::enabled() = false;
  std::string serial_digest;
  row.serial_ms = time_ms([&] { serial_digest = kernel(); });
  par::enabled() = true;
  std::string parallel_digest;
  row.parallel_ms = time_ms([&] { parallel_digest = kernel(); });
  row.identical = serial_digest == parallel_digest;
  return row;
}

std::string digest_double(double v) {
  char buf[32];
  std::memcpy(buf, &v, sizeof v);
  return std::string(buf, sizeof v);
}

}  // namespace

int main() {
  ModelParams params{1.0, 1.0, 1.0, 0.5, 1.0, 1.0, 2.0, 2};
  CommunityPairState state{params, 1.0, 0.5, 0.1, -0.05, 0.2, -0.1};
  const EquilibriumSpec gapped = EquilibriumSpec::make(params, 0.5);

  std::vector<Row> rows;
  rows.push_back(compare("producer quadrature (step 2e-8)", [&] {
    return digest_double(producer_utility_oracle(1, state, 2e-8));
  }));
  rows.push_back(compare("consumer quadrature (step 2e-8)", [&] {
    return digest_double(consumer_utility_oracle(1, torus_point(-0.9, params.big_l), state, 2e-8));
  }));
  rows.push_back(compare("content argmax grid (step 2e-8)", [&] {
    return digest_double(optimal_content_oracle(1, state, 2e-8).x);
  }));
  rows.push_back(compare("best-response audit (2e6 samples)", [&] {
    const AuditReport a = best_response_audit(gapped, 2000000, 1e-6);
    return digest_double(a.worst_violation) + (a.is_ne ? "1" : "0");
  }));
  rows.push_back(compare("classify gapped (8 runs, dt 1e-4)", [&] {
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    const StabilityVerdict v = classify(gapped, 0.05, cfg);
    return verdict_name(v.verdict) + digest_double(v.envelope_residual.value_or(-1.0)) +
           digest_double(v.supply_excursion.value_or(-1.0));
  }));

  std::printf("%-36s %12s %12s %9s %s\n", "kernel", "serial ms", "openmp ms", "speedup",
              "identical");
  for (const Row& r : rows) {
    std::printf("%-36s %12.1f %12.1f %8.2fx %s\n", r.name.c_str(), r.serial_ms, r.parallel_ms,
                r.serial_ms / r.parallel_ms, r.identical ? "yes" : "NO");
  }
  bool all_identical = true;
  for (const Row& r : rows) all_identical = all_identical && r.identical;
  if (!all_identical) {
    std::fprintf(stderr, "serial and parallel kernels disagree\n");
    return 1;
  }
  return 0;
}
