#include "commstab/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "commstab/io.hpp"

namespace commstab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, const std::string& where) {
  const std::string v = trim(value);
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last || v.empty()) {
    throw ConfigError(where + ": cannot parse number '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& value, const std::string& where) {
  const double v = parse_number(value, where);
  const double rounded = std::nearbyint(v);
  if (std::fabs(v - rounded) > 0.0) throw ConfigError(where + ": expected an integer, got '" + trim(value) + "'");
  return static_cast<int>(rounded);
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (entries.count(key)) {
      throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " +
                        std::to_string(entries[key].second) + ")");
    }
    entries[key] = {value, line_no};
  }

  RunConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, std::string>> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::pair<std::string, std::string> out{it->second.first,
                                            origin + ":" + std::to_string(it->second.second) +
                                                ": key '" + key + "'"};
    entries.erase(it);
    return out;
  };
  auto required = [&](const std::string& key, double& slot) {
    const auto kv = take(key);
    if (!kv) throw ConfigError(origin + ": missing required key '" + key + "'");
    slot = parse_number(kv->first, kv->second);
  };
  auto optional_num = [&](const std::string& key, double& slot) {
    if (const auto kv = take(key)) slot = parse_number(kv->first, kv->second);
  };

  required("f0", cfg.params.f0);
  required("a", cfg.params.a);
  required("g0", cfg.params.g0);
  required("c", cfg.params.c);
  required("ep", cfg.params.ep);
  required("eq", cfg.params.eq);
  required("big_l", cfg.params.big_l);
  {
    const auto kv = take("n_comm");
    if (!kv) throw ConfigError(origin + ": missing required key 'n_comm'");
    cfg.params.n_comm = parse_int(kv->first, kv->second);
  }
  if (const auto kv = take("l_d")) cfg.l_d = parse_number(kv->first, kv->second);
  optional_num("delta_dl0", cfg.delta_dl0);
  optional_num("delta_dr0", cfg.delta_dr0);
  optional_num("delta_sl0", cfg.delta_sl0);
  optional_num("delta_sr0", cfg.delta_sr0);
  optional_num("dt", cfg.integrator.dt);
  optional_num("t_max", cfg.integrator.t_max);
  optional_num("eps_converged", cfg.integrator.eps_converged);
  if (const auto kv = take("sample_stride")) cfg.integrator.sample_stride = parse_int(kv->first, kv->second);
  if (const auto kv = take("probe_delta")) cfg.probe_delta = parse_number(kv->first, kv->second);

  if (!entries.empty()) {
    const auto& [key, value_line] = *entries.begin();
    throw ConfigError(origin + ":" + std::to_string(value_line.second) + ": unknown key '" + key + "'");
  }

  try {
    cfg.params.validate();
    cfg.integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path), path);
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::string out;
  auto emit = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  emit("f0", format_double(cfg.params.f0));
  emit("a", format_double(cfg.params.a));
  emit("g0", format_double(cfg.params.g0));
  emit("c", format_double(cfg.params.c));
  emit("ep", format_double(cfg.params.ep));
  emit("eq", format_double(cfg.params.eq));
  emit("big_l", format_double(cfg.params.big_l));
  emit("n_comm", std::to_string(cfg.params.n_comm));
  if (cfg.l_d) emit("l_d", format_double(*cfg.l_d));
  emit("delta_dl0", format_double(cfg.delta_dl0));
  emit("delta_dr0", format_double(cfg.delta_dr0));
  emit("delta_sl0", format_double(cfg.delta_sl0));
  emit("delta_sr0", format_double(cfg.delta_sr0));
  emit("dt", format_double(cfg.integrator.dt));
  emit("t_max", format_double(cfg.integrator.t_max));
  emit("eps_converged", format_double(cfg.integrator.eps_converged));
  emit("sample_stride", std::to_string(cfg.integrator.sample_stride));
  if (cfg.probe_delta) emit("probe_delta", format_double(*cfg.probe_delta));
  return out;
}

double config_ld(const RunConfig& cfg) {
  if (cfg.l_d) return *cfg.l_d;
  // default to the equilibrium width, capped by the community cell
  return std::min(equilibrium_ld(cfg.params), cfg.params.community_half_width());
}

EquilibriumSpec spec_from_config(const RunConfig& cfg) {
  try {
    return EquilibriumSpec::make(cfg.params, config_ld(cfg));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

PerturbationState initial_state_from_config(const RunConfig& cfg) {
  return PerturbationState{0.0, cfg.delta_dl0, cfg.delta_dr0, cfg.delta_sl0, cfg.delta_sr0};
}

}  // namespace commstab
