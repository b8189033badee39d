#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "commstab/config.hpp"

using namespace commstab;

namespace {

const char* kBaseText =
    "# two communities on a circle of half-length 2\n"
    "f0 = 1\n"
    "a = 1\n"
    "g0 = 1\n"
    "c = 0.5\n"
    "ep = 1\n"
    "eq = 1\n"
    "big_l = 2\n"
    "n_comm = 2\n";

std::string expect_config_error(const std::string& text) {
  try {
    parse_run_config(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected a config error for:\n" << text);
  return {};
}

}  // namespace

TEST_CASE("a minimal config parses with documented defaults") {
  const RunConfig cfg = parse_run_config(kBaseText);
  CHECK(cfg.params.f0 == 1.0);
  CHECK(cfg.params.c == 0.5);
  CHECK(cfg.params.big_l == 2.0);
  CHECK(cfg.params.n_comm == 2);
  CHECK(!cfg.l_d.has_value());
  CHECK(cfg.delta_dl0 == 0.0);
  CHECK(cfg.delta_sr0 == 0.0);
  CHECK(cfg.integrator.dt == 1e-3);
  CHECK(cfg.integrator.t_max == 50.0);
  CHECK(cfg.integrator.eps_converged == 1e-10);
  CHECK(cfg.integrator.sample_stride == 10);
  CHECK(!cfg.probe_delta.has_value());
}

TEST_CASE("optional keys, comments, and spacing are honored") {
  const std::string text = std::string(kBaseText) +
                           "\n"
                           "l_d = 0.4   # below the equilibrium width\n"
                           "delta_dl0 = 0.05\n"
                           "delta_sr0 = -0.01\n"
                           "dt = 5e-4\n"
                           "t_max=20\n"
                           "sample_stride = 5\n"
                           "probe_delta = 0.125\n";
  const RunConfig cfg = parse_run_config(text);
  CHECK(cfg.l_d == 0.4);
  CHECK(cfg.delta_dl0 == 0.05);
  CHECK(cfg.delta_sr0 == -0.01);
  CHECK(cfg.integrator.dt == 5e-4);
  CHECK(cfg.integrator.t_max == 20.0);
  CHECK(cfg.integrator.sample_stride == 5);
  CHECK(cfg.probe_delta == 0.125);
}

TEST_CASE("the demand width defaults to the equilibrium value capped by the cell") {
  const RunConfig cfg = parse_run_config(kBaseText);
  CHECK(config_ld(cfg) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spec_from_config(cfg).kind == StructureKind::gapped);

  // a narrow cell caps the default at full coverage
  std::string narrow(kBaseText);
  narrow.replace(narrow.find("big_l = 2"), 9, "big_l = 0.8");
  const RunConfig capped = parse_run_config(narrow);
  CHECK(config_ld(capped) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(spec_from_config(capped).kind == StructureKind::full_coverage);

  const RunConfig explicit_ld = parse_run_config(std::string(kBaseText) + "l_d = 0.3\n");
  CHECK(config_ld(explicit_ld) == 0.3);
}

TEST_CASE("serialization round-trips byte for byte") {
  const std::string text = std::string(kBaseText) +
                           "l_d = 0.5\n"
                           "delta_dl0 = 0.05\n"
                           "dt = 5e-4\n"
                           "probe_delta = 0.01\n";
  const RunConfig cfg = parse_run_config(text);
  const std::string canon = serialize_run_config(cfg);
  const RunConfig reparsed = parse_run_config(canon);
  CHECK(serialize_run_config(reparsed) == canon);
  CHECK(canon.find("f0 = 1\n") == 0);
  CHECK(canon.find("probe_delta = 0.01\n") != std::string::npos);

  const RunConfig no_optionals = parse_run_config(kBaseText);
  const std::string canon2 = serialize_run_config(no_optionals);
  CHECK(canon2.find("l_d") == std::string::npos);
  CHECK(canon2.find("probe_delta") == std::string::npos);
  CHECK(serialize_run_config(parse_run_config(canon2)) == canon2);
}

TEST_CASE("the initial state copies the four offsets at time zero") {
  const std::string text = std::string(kBaseText) +
                           "delta_dl0 = 0.05\n"
                           "delta_dr0 = -0.05\n"
                           "delta_sl0 = 0.01\n"
                           "delta_sr0 = 0.01\n";
  const PerturbationState st = initial_state_from_config(parse_run_config(text));
  CHECK(st.t == 0.0);
  CHECK(st.d_dl == 0.05);
  CHECK(st.d_dr == -0.05);
  CHECK(st.d_sl == 0.01);
  CHECK(st.d_sr == 0.01);
}

TEST_CASE("malformed lines are reported with their location") {
  std::string msg = expect_config_error(std::string(kBaseText) + "just words\n");
  CHECK(msg.find("test.cfg:10: expected 'key = value'") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "mystery = 1\n");
  CHECK(msg.find("test.cfg:10: unknown key 'mystery'") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "f0 = 0.9\n");
  CHECK(msg.find("test.cfg:10: duplicate key 'f0' (first set on line 2)") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "dt = fast\n");
  CHECK(msg.find("test.cfg:10: key 'dt': cannot parse number 'fast'") != std::string::npos);

  msg = expect_config_error(
      "f0 = 1\na = 1\ng0 = 1\nc = 0.5\nep = 1\neq = 1\nbig_l = 2\nn_comm = 2.5\n");
  CHECK(msg.find("expected an integer") != std::string::npos);

  msg = expect_config_error("f0 = 1\na = 1\ng0 = 1\nc = 0.5\nep = 1\neq = 1\nbig_l = 2\n");
  CHECK(msg.find("test.cfg: missing required key 'n_comm'") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "= 1\n");
  CHECK(msg.find("empty key") != std::string::npos);
}

TEST_CASE("model and integrator validation run at parse time") {
  std::string text(kBaseText);
  text.replace(text.find("c = 0.5"), 7, "c = 1.5");
  std::string msg = expect_config_error(text);
  CHECK(msg.find("test.cfg: invalid params: f0*g0 must exceed c") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "dt = -1\n");
  CHECK(msg.find("dt must be > 0") != std::string::npos);

  msg = expect_config_error(std::string(kBaseText) + "sample_stride = 0\n");
  CHECK(msg.find("sample_stride must be >= 1") != std::string::npos);
}

TEST_CASE("an oversized demand width surfaces as a config error") {
  const RunConfig cfg = parse_run_config(std::string(kBaseText) + "l_d = 1.5\n");
  CHECK_THROWS_AS(spec_from_config(cfg), ConfigError);
}

TEST_CASE("loading a missing file reports the path") {
  try {
    load_run_config("/nonexistent/run.cfg");
    FAIL_CHECK("expected the missing file to be reported");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/run.cfg") != std::string::npos);
  }
}
