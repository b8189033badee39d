#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "commstab/dynamics.hpp"

namespace commstab {

// Raised with a message carrying the offending line or field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One simulation setup: model constants, community structure, initial
// boundary offsets, integrator settings, and the classify probe size.
// Flat "key = value" text with '#' comments.
struct RunConfig {
  ModelParams params{};
  std::optional<double> l_d;  // absent: min(equilibrium demand width, lc)
  double delta_dl0 = 0.0;
  double delta_dr0 = 0.0;
  double delta_sl0 = 0.0;
  double delta_sr0 = 0.0;
  IntegratorConfig integrator{};
  std::optional<double> probe_delta;
};

RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::string& path);

// Canonical form: fixed key order, shortest round-trip numbers. Parsing the
// output reproduces the config byte for byte.
std::string serialize_run_config(const RunConfig& cfg);

double config_ld(const RunConfig& cfg);
EquilibriumSpec spec_from_config(const RunConfig& cfg);
PerturbationState initial_state_from_config(const RunConfig& cfg);

}  // namespace commstab
