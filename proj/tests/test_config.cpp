#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dephasim/config.hpp"

using namespace dephasim;
using Catch::Matchers::WithinAbs;

namespace {

const std::filesystem::path kConfigDir = DEPHASIM_CONFIG_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string validation_field(const std::string& text) {
  try {
    parse_config(text, kConfigDir);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("explicit fig2d config", "[config]") {
  const RunConfig cfg = parse_config(slurp(kConfigDir / "fig2d.json"), kConfigDir);
  const auto& p = std::get<QubitBosonParams>(cfg.model);
  REQUIRE(p.segments.size() == 3);
  CHECK(p.segments[0].duration == 2.0);
  CHECK(p.segments[0].alpha == complex(0.0, 0.0));
  CHECK(p.segments[1].alpha == complex(0.5, 0.5));
  CHECK(p.segments[2].alpha == complex(0.0, 0.0));
  CHECK(p.segments[1].gamma == 0.0);
  CHECK(std::get<ThermalSpec>(cfg.initial_env).theta == 2.0);
  CHECK(cfg.cutoff == 64);
  CHECK(cfg.steps == 601);
  CHECK_FALSE(cfg.amplitudes.has_value());
  CHECK_FALSE(cfg.outputs.negativity);
}

TEST_CASE("minimal config fills defaults", "[config]") {
  const RunConfig cfg = parse_config(R"({
    "model": {"type": "qubit-boson", "segments": [{"duration": 6}]},
    "initial_env": {"coherent": {"re": 0.5}}
  })");
  CHECK_FALSE(cfg.cutoff.has_value());
  CHECK(cfg.t_max == 6.0);
  CHECK(cfg.steps == 601);
  const auto& p = std::get<QubitBosonParams>(cfg.model);
  CHECK(p.beta == 1.0);
  CHECK(p.segments[0].gamma == 0.0);
  CHECK(std::get<CoherentSpec>(cfg.initial_env).zeta == complex(0.5, 0.0));
}

TEST_CASE("presets", "[config]") {
  REQUIRE(preset_names().size() == 9);
  const double thetas[] = {0.0, 0.5, 1.0, 2.0};
  for (int k = 0; k < 4; ++k) {
    const RunConfig cfg = preset(std::string("fig2") + static_cast<char>('a' + k));
    CHECK(std::get<ThermalSpec>(cfg.initial_env).theta == thetas[k]);
    const auto& p = std::get<QubitBosonParams>(cfg.model);
    REQUIRE(p.segments.size() == 3);
    CHECK(p.segments[1].alpha == complex(0.5, 0.5));
    CHECK(p.segments[0].duration + p.segments[1].duration == 4.0);
    CHECK(p.beta == 1.0);
    CHECK(cfg.cutoff == 64);
  }
  CHECK(std::get<QubitBosonParams>(preset("fig2e").model).segments[0].alpha == complex(0.0, 0.0));
  const RunConfig f = preset("fig2f");
  CHECK(std::get<QubitBosonParams>(f.model).segments[0].alpha == complex(0.5, 0.5));
  CHECK(f.time_offset == 2.0);
  const complex z3a = std::get<CoherentSpec>(preset("fig3a").initial_env).zeta;
  CHECK_THAT(std::abs(z3a), WithinAbs(0.5, 1e-15));
  CHECK_THAT(std::arg(z3a), WithinAbs(M_PI / 4, 1e-15));
  CHECK_THAT(std::abs(std::get<CoherentSpec>(preset("fig3b").initial_env).zeta), WithinAbs(0.25, 1e-15));
  CHECK(std::get<CoherentSpec>(preset("fig3c").initial_env).zeta == complex(0.5, 0.0));
  CHECK_THROWS_AS(preset("fig9z"), ValidationError);
}

TEST_CASE("preset key seeds and overrides", "[config]") {
  const RunConfig cfg = parse_config(R"({"preset": "fig2d", "time": {"steps": 101}, "cutoff": 32})");
  CHECK(cfg.name == "fig2d");
  CHECK(cfg.steps == 101);
  CHECK(cfg.cutoff == 32);
  CHECK(std::get<ThermalSpec>(cfg.initial_env).theta == 2.0);

  const RunConfig g = parse_config(R"({"preset": "fig2d",
      "model": {"type": "qubit-boson", "segments": [
        {"duration": 2, "gamma": 0.7}, {"duration": 2, "alpha": [0.5, 0.5], "gamma": 0.7},
        {"duration": 2, "gamma": 0.7}]}})");
  for (const auto& s : std::get<QubitBosonParams>(g.model).segments) CHECK(s.gamma == 0.7);
}

TEST_CASE("schedule and matrix files", "[config]") {
  const RunConfig cfg = parse_config(slurp(kConfigDir / "qutrit.json"), kConfigDir);
  const auto& s = std::get<SegmentSchedule>(cfg.model);
  CHECK(s.system_dim == 3);
  CHECK(s.env_dim == 2);
  CHECK(cfg.system_dim() == 3);
  const auto& m = std::get<MatrixSpec>(cfg.initial_env);
  CHECK_THAT(m.rho(0, 0).real(), WithinAbs(0.5, 1e-15));
  CHECK(cfg.outputs.negativity);
}

TEST_CASE("complex number forms", "[config]") {
  const RunConfig cfg = parse_config(R"({
    "model": {"type": "qubit-boson", "segments": [{"duration": 1, "alpha": {"abs": 1, "arg": 0.5}}]},
    "initial_env": {"fock": {"n": 1}},
    "amplitudes": [0.6, [0, 0.8]]
  })");
  const complex a = std::get<QubitBosonParams>(cfg.model).segments[0].alpha;
  CHECK_THAT(std::abs(a - std::polar(1.0, 0.5)), WithinAbs(0.0, 1e-15));
  REQUIRE(cfg.amplitudes);
  CHECK((*cfg.amplitudes)[1] == complex(0.0, 0.8));
}

TEST_CASE("validation errors name the field", "[config]") {
  CHECK(validation_field(slurp(kConfigDir / "bad_steps.json")) == "time.steps");
  CHECK(validation_field(R"({"preset": "fig2d", "initial_env": {"thermal": {"theta": 1}, "coherent": {"re": 1}}})") ==
        "initial_env");
  CHECK(validation_field(R"({"preset": "fig2d", "initial_env": {}})") == "initial_env");
  CHECK(validation_field(R"({"preset": "fig2d", "bogus": 1})") == "bogus");
  CHECK(validation_field(R"({"preset": "fig2d", "time": {"tmax": 1}})") == "time.tmax");
  CHECK(validation_field(R"({"preset": "fig2d", "time": {"t_max": 7}})") == "time.t_max");
  CHECK(validation_field(R"({"preset": "fig2d", "time": {"t_max": 0}})") == "time.t_max");
  CHECK(validation_field(R"({"preset": "fig2d", "cutoff": 1000})") == "cutoff");
  CHECK(validation_field(R"({"preset": "fig2d", "cutoff": "big"})") == "cutoff");
  CHECK(validation_field(R"({"preset": "fig2d", "amplitudes": [1, 1]})") == "amplitudes");
  CHECK(validation_field(R"({"preset": "fig2d", "amplitudes": [1, 0, 0]})") == "amplitudes");
  CHECK(validation_field(R"({"preset": "fig2d", "outputs": {"negativity": 1}})") == "outputs.negativity");
  CHECK(validation_field(R"({"preset": "fig2d", "tolerances": {"verdict": -1}})") == "tolerances.verdict");
  CHECK(validation_field(R"({"initial_env": {"thermal": {"theta": 1}}})") == "model");
  CHECK(validation_field(R"({"model": {"type": "qubit-boson", "segments": [{"duration": 1}]}})") == "initial_env");
  CHECK(validation_field(R"({"model": {"type": "magic"}, "initial_env": {"fock": {"n": 0}}})") == "model.type");
  CHECK(validation_field(R"({"model": {"type": "qubit-boson", "segments": [{"duration": -1}]},
                             "initial_env": {"fock": {"n": 0}}})") == "model.segments[0].duration");
  CHECK(validation_field(R"({"model": {"type": "qubit-boson", "beta": 0, "segments": [{"duration": 1}]},
                             "initial_env": {"fock": {"n": 0}}})") == "model.beta");
  CHECK(validation_field(R"({"preset": "fig2d", "initial_env": {"thermal": {"theta": -1}}})") ==
        "initial_env.thermal.theta");
  CHECK(validation_field(R"({"model": {"type": "schedule", "file": "missing.json"},
                             "initial_env": {"fock": {"n": 0}}})") == "model.file");
  CHECK(validation_field(R"({"model": {"type": "schedule", "file": "qutrit_schedule.json"},
                             "initial_env": {"fock": {"n": 0}}, "cutoff": 5})") == "cutoff");
  CHECK(validation_field(R"([1, 2])") == "config");
}

TEST_CASE("malformed JSON reports line and column", "[config]") {
  try {
    parse_config(slurp(kConfigDir / "malformed.json"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.is_validation());
  }
  try {
    parse_config("{\"a\": }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 7);
  }
}
