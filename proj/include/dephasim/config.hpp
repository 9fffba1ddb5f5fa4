#pragma once

// Run configuration: JSON parsing, validation and the figure presets.
//
// {
//   "preset":      "fig2d",                      optional, seeds every field
//   "model":       {"type": "qubit-boson", "beta": 1,
//                   "segments": [{"duration": 2, "alpha": [0.5, 0.5], "gamma": 0}]}
//                | {"type": "schedule", "file": "schedule.json"},
//   "initial_env": {"thermal": {"theta": 2}} | {"coherent": {"re": 0, "im": 0}}
//                | {"fock": {"n": 0}} | {"matrix": {"file": "rho.json"}},
//   "amplitudes":  [[re, im], ...],              default: equal superposition
//   "time":        {"t_max": 6, "steps": 601, "offset": 0},  t_max defaults to
//                                                the model duration
//   "cutoff":      64 | "auto",
//   "outputs":     {"entanglement": true, "coherence": true, "type1": true,
//                   "type2": true, "negativity": false},
//   "tolerances":  {"verdict": 1e-8, "cutoff_tail": 1e-12}
// }
//
// Complex numbers are written as a number, [re, im] or {"abs": r, "arg": phi}.
// Matrices (schedule and matrix files) are arrays of rows of complex numbers.
// A schedule file is {"system_dim": N, "env_dim": d,
//                     "segments": [{"duration": t, "generators": [V_0, ...]}]}.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dephasim/dephasing.hpp"
#include "dephasim/fock.hpp"
#include "dephasim/qubit_boson.hpp"

namespace dephasim {

struct OutputFlags {
  bool entanglement = true;
  bool coherence = true;
  bool type1 = true;
  bool type2 = true;
  bool negativity = false;
};

struct RunTolerances {
  double verdict = 1e-8;
  double cutoff_tail = 1e-12;
};

using ModelSpec = std::variant<QubitBosonParams, SegmentSchedule>;

struct RunConfig {
  std::string name;  ///< preset id, empty for user configs
  ModelSpec model;
  EnvSpec initial_env;
  std::optional<std::vector<complex>> amplitudes;  ///< default: equal superposition
  double t_max = 6.0;
  int steps = 601;
  double time_offset = 0.0;  ///< added to reported times only
  std::optional<int> cutoff;  ///< nullopt = "auto"
  OutputFlags outputs;
  RunTolerances tolerances;

  std::size_t system_dim() const {
    if (const auto* s = std::get_if<SegmentSchedule>(&model)) return s->system_dim;
    return 2;
  }
  double model_duration() const {
    return std::visit([](const auto& m) { return m.total_duration(); }, model);
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!keys.count(item.key())) {
      throw ValidationError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

inline const json& require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  return j;
}

inline double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
  return v;
}

inline int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ValidationError(field, "expected an integer");
  return j.get<int>();
}

inline bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ValidationError(field, "expected true or false");
  return j.get<bool>();
}

inline complex get_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {get_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {get_number(j[0], field + "[0]"), get_number(j[1], field + "[1]")};
  }
  if (j.is_object()) {
    reject_unknown(j, field, {"abs", "arg"});
    if (!j.contains("abs") || !j.contains("arg")) {
      throw ValidationError(field, "polar form needs both abs and arg");
    }
    return std::polar(get_number(j["abs"], field + ".abs"), get_number(j["arg"], field + ".arg"));
  }
  throw ValidationError(field, "expected a number, [re, im] or {abs, arg}");
}

inline ComplexMatrix get_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ValidationError(field, "expected an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ValidationError(field, "matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = get_complex(row[static_cast<std::size_t>(c)],
                            field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, byte);
    throw ParseError(line, col, e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(field, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SegmentSchedule parse_schedule(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"system_dim", "env_dim", "segments"});
  for (const char* key : {"system_dim", "env_dim", "segments"}) {
    if (!j.contains(key)) throw ValidationError(field + "." + key, "missing");
  }
  SegmentSchedule s;
  const int n = get_int(j["system_dim"], field + ".system_dim");
  const int d = get_int(j["env_dim"], field + ".env_dim");
  if (n < 2) throw ValidationError(field + ".system_dim", "must be >= 2");
  if (d < 2) throw ValidationError(field + ".env_dim", "must be >= 2");
  s.system_dim = static_cast<std::size_t>(n);
  s.env_dim = d;
  const json& segs = j["segments"];
  if (!segs.is_array()) throw ValidationError(field + ".segments", "expected an array");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string sf = field + ".segments[" + std::to_string(k) + "]";
    require_object(segs[k], sf);
    reject_unknown(segs[k], sf, {"duration", "generators"});
    if (!segs[k].contains("duration") || !segs[k].contains("generators")) {
      throw ValidationError(sf, "needs duration and generators");
    }
    Segment seg;
    seg.duration = get_number(segs[k]["duration"], sf + ".duration");
    const json& gens = segs[k]["generators"];
    if (!gens.is_array()) throw ValidationError(sf + ".generators", "expected an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      seg.generators.push_back(
          get_matrix(gens[i], sf + ".generators[" + std::to_string(i) + "]"));
    }
    s.segments.push_back(std::move(seg));
  }
  try {
    validate_schedule(s);
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
  return s;
}

inline QubitBosonParams parse_qubit_boson(const json& j, QubitBosonParams base) {
  reject_unknown(j, "model", {"type", "beta", "segments"});
  if (j.contains("beta")) base.beta = get_number(j["beta"], "model.beta");
  if (base.beta == 0.0) throw ValidationError("model.beta", "must be non-zero");
  if (j.contains("segments")) {
    const json& segs = j["segments"];
    if (!segs.is_array() || segs.empty()) {
      throw ValidationError("model.segments", "expected a non-empty array");
    }
    base.segments.clear();
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const std::string sf = "model.segments[" + std::to_string(k) + "]";
      require_object(segs[k], sf);
      reject_unknown(segs[k], sf, {"duration", "alpha", "gamma"});
      if (!segs[k].contains("duration")) throw ValidationError(sf + ".duration", "missing");
      AlphaSegment seg;
      seg.duration = get_number(segs[k]["duration"], sf + ".duration");
      if (!(seg.duration > 0.0)) throw ValidationError(sf + ".duration", "must be > 0");
      if (segs[k].contains("alpha")) seg.alpha = get_complex(segs[k]["alpha"], sf + ".alpha");
      if (segs[k].contains("gamma")) seg.gamma = get_number(segs[k]["gamma"], sf + ".gamma");
      base.segments.push_back(seg);
    }
  }
  if (base.segments.empty()) throw ValidationError("model.segments", "missing");
  return base;
}

inline EnvSpec parse_initial_env(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "initial_env");
  reject_unknown(j, "initial_env", {"thermal", "coherent", "fock", "matrix"});
  if (j.size() != 1) throw ValidationError("initial_env", "exactly one variant must be set");
  const auto& [key, value] = *j.items().begin();
  const std::string field = "initial_env." + key;
  require_object(value, field);
  if (key == "thermal") {
    reject_unknown(value, field, {"theta"});
    if (!value.contains("theta")) throw ValidationError(field + ".theta", "missing");
    const double theta = get_number(value["theta"], field + ".theta");
    if (theta < 0.0) throw ValidationError(field + ".theta", "must be >= 0");
    return ThermalSpec{theta};
  }
  if (key == "coherent") {
    reject_unknown(value, field, {"re", "im"});
    const double re = value.contains("re") ? get_number(value["re"], field + ".re") : 0.0;
    const double im = value.contains("im") ? get_number(value["im"], field + ".im") : 0.0;
    return CoherentSpec{{re, im}};
  }
  if (key == "fock") {
    reject_unknown(value, field, {"n"});
    if (!value.contains("n")) throw ValidationError(field + ".n", "missing");
    const int n = get_int(value["n"], field + ".n");
    if (n < 0) throw ValidationError(field + ".n", "must be >= 0");
    return FockSpec{n};
  }
  reject_unknown(value, field, {"file"});
  if (!value.contains("file") || !value["file"].is_string()) {
    throw ValidationError(field + ".file", "expected a path");
  }
  const std::string text = read_file(base_dir / value["file"].get<std::string>(), field + ".file");
  const ComplexMatrix rho = get_matrix(parse_json(text), field + ".file");
  try {
    (void)density_from_matrix(rho);
  } catch (const Error& e) {
    throw ValidationError(field + ".file", e.what());
  }
  return MatrixSpec{rho};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Presets. Figure 2: Gibbs states at k_B T / Gamma in {0, 0.5, 1, 2} under the
// three-step alpha(t) with alpha / beta = (1 + i) / 2 switched on at t = 2 and
// off at t = 4; (e) constant alpha = 0 and (f) constant alpha != 0 at
// theta = 2, the latter displayed from t = 2. Figure 3: coherent states
// zeta in {0.5 e^{i pi/4}, 0.25 e^{i pi/4}, 0.5} under the same schedule.

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2a", "fig2b", "fig2c", "fig2d", "fig2e",
                                              "fig2f", "fig3a", "fig3b", "fig3c"};
  return names;
}

inline constexpr complex kPresetAlpha{0.5, 0.5};
inline constexpr int kPresetCutoff = 64;

inline RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.name = name;
  cfg.cutoff = kPresetCutoff;
  cfg.t_max = 6.0;
  cfg.steps = 601;
  const QubitBosonParams steps = step_params(kPresetAlpha, 2.0, 2.0, 2.0, 1.0, kPresetCutoff);
  const double quarter_turn = std::numbers::pi / 4.0;

  if (name == "fig2a" || name == "fig2b" || name == "fig2c" || name == "fig2d") {
    static const double thetas[] = {0.0, 0.5, 1.0, 2.0};
    cfg.model = steps;
    cfg.initial_env = ThermalSpec{thetas[name[4] - 'a']};
  } else if (name == "fig2e") {
    cfg.model = QubitBosonParams{1.0, {{6.0, 0.0, 0.0}}, kPresetCutoff};
    cfg.initial_env = ThermalSpec{2.0};
  } else if (name == "fig2f") {
    cfg.model = QubitBosonParams{1.0, {{4.0, kPresetAlpha, 0.0}}, kPresetCutoff};
    cfg.initial_env = ThermalSpec{2.0};
    cfg.t_max = 4.0;
    cfg.steps = 401;
    cfg.time_offset = 2.0;
  } else if (name == "fig3a") {
    cfg.model = steps;
    cfg.initial_env = CoherentSpec{std::polar(0.5, quarter_turn)};
  } else if (name == "fig3b") {
    cfg.model = steps;
    cfg.initial_env = CoherentSpec{std::polar(0.25, quarter_turn)};
  } else if (name == "fig3c") {
    cfg.model = steps;
    cfg.initial_env = CoherentSpec{complex{0.5, 0.0}};
  } else {
    throw ValidationError("preset", "unknown preset '" + name + "'");
  }
  return cfg;
}

/// Parse and validate a JSON run configuration. Relative file paths are
/// resolved against `base_dir`.
inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
  using detail::json;
  const json root = detail::parse_json(text);
  detail::require_object(root, "config");
  detail::reject_unknown(root, "",
                         {"preset", "model", "initial_env", "amplitudes", "time", "cutoff",
                          "outputs", "tolerances"});

  RunConfig cfg;
  cfg.cutoff = std::nullopt;
  bool have_model = false;
  bool have_env = false;
  bool have_t_max = false;
  if (root.contains("preset")) {
    if (!root["preset"].is_string()) throw ValidationError("preset", "expected a string");
    cfg = preset(root["preset"].get<std::string>());
    have_model = have_env = have_t_max = true;
  }

  if (root.contains("model")) {
    const json& m = detail::require_object(root["model"], "model");
    if (!m.contains("type") || !m["type"].is_string()) {
      throw ValidationError("model.type", "expected \"qubit-boson\" or \"schedule\"");
    }
    const std::string type = m["type"].get<std::string>();
    if (type == "qubit-boson") {
      QubitBosonParams base;
      if (const auto* prev = std::get_if<QubitBosonParams>(&cfg.model); prev && have_model) base = *prev;
      else base.segments.clear();
      cfg.model = detail::parse_qubit_boson(m, base);
    } else if (type == "schedule") {
      detail::reject_unknown(m, "model", {"type", "file"});
      if (!m.contains("file") || !m["file"].is_string()) {
        throw ValidationError("model.file", "expected a path");
      }
      const std::string schedule_text =
          detail::read_file(base_dir / m["file"].get<std::string>(), "model.file");
      cfg.model = detail::parse_schedule(detail::parse_json(schedule_text), "model.file");
    } else {
      throw ValidationError("model.type", "unknown model type '" + type + "'");
    }
    have_model = true;
  }
  if (!have_model) throw ValidationError("model", "missing");

  if (root.contains("initial_env")) {
    cfg.initial_env = detail::parse_initial_env(root["initial_env"], base_dir);
    have_env = true;
  }
  if (!have_env) throw ValidationError("initial_env", "missing");

  if (root.contains("amplitudes")) {
    const json& a = root["amplitudes"];
    if (!a.is_array()) throw ValidationError("amplitudes", "expected an array");
    std::vector<complex> c;
    for (std::size_t k = 0; k < a.size(); ++k) {
      c.push_back(detail::get_complex(a[k], "amplitudes[" + std::to_string(k) + "]"));
    }
    cfg.amplitudes = std::move(c);
  }

  if (root.contains("time")) {
    const json& t = detail::require_object(root["time"], "time");
    detail::reject_unknown(t, "time", {"t_max", "steps", "offset"});
    if (t.contains("t_max")) {
      cfg.t_max = detail::get_number(t["t_max"], "time.t_max");
      have_t_max = true;
    }
    if (t.contains("steps")) cfg.steps = detail::get_int(t["steps"], "time.steps");
    if (t.contains("offset")) cfg.time_offset = detail::get_number(t["offset"], "time.offset");
  }

  if (root.contains("cutoff")) {
    const json& c = root["cutoff"];
    if (c.is_string() && c.get<std::string>() == "auto") {
      cfg.cutoff = std::nullopt;
    } else if (c.is_number_integer()) {
      cfg.cutoff = c.get<int>();
    } else {
      throw ValidationError("cutoff", "expected an integer or \"auto\"");
    }
  }

  if (root.contains("outputs")) {
    const json& o = detail::require_object(root["outputs"], "outputs");
    detail::reject_unknown(o, "outputs", {"entanglement", "coherence", "type1", "type2", "negativity"});
    auto flag = [&](const char* key, bool& slot) {
      if (o.contains(key)) slot = detail::get_bool(o[key], std::string("outputs.") + key);
    };
    flag("entanglement", cfg.outputs.entanglement);
    flag("coherence", cfg.outputs.coherence);
    flag("type1", cfg.outputs.type1);
    flag("type2", cfg.outputs.type2);
    flag("negativity", cfg.outputs.negativity);
  }

  if (root.contains("tolerances")) {
    const json& t = detail::require_object(root["tolerances"], "tolerances");
    detail::reject_unknown(t, "tolerances", {"verdict", "cutoff_tail"});
    if (t.contains("verdict")) cfg.tolerances.verdict = detail::get_number(t["verdict"], "tolerances.verdict");
    if (t.contains("cutoff_tail")) {
      cfg.tolerances.cutoff_tail = detail::get_number(t["cutoff_tail"], "tolerances.cutoff_tail");
    }
  }

  // cross-field validation
  const double duration = cfg.model_duration();
  if (!have_t_max) cfg.t_max = duration;
  if (cfg.steps < 2) throw ValidationError("time.steps", "must be >= 2");
  if (!(cfg.t_max > 0.0)) throw ValidationError("time.t_max", "must be > 0");
  if (cfg.t_max > duration * (1.0 + 1e-12)) {
    throw ValidationError("time.t_max", "exceeds the model duration " + std::to_string(duration));
  }
  if (cfg.cutoff && (*cfg.cutoff < 2 || *cfg.cutoff > kMaxCutoff)) {
    throw ValidationError("cutoff", "must lie in [2, " + std::to_string(kMaxCutoff) + "]");
  }
  if (const auto* s = std::get_if<SegmentSchedule>(&cfg.model)) {
    if (cfg.cutoff && *cfg.cutoff != s->env_dim) {
      throw ValidationError("cutoff", "must equal the schedule env_dim or be \"auto\"");
    }
  }
  if (const auto* m = std::get_if<MatrixSpec>(&cfg.initial_env)) {
    if (cfg.cutoff && *cfg.cutoff != m->rho.rows()) {
      throw ValidationError("cutoff", "must equal the environment matrix dimension or be \"auto\"");
    }
  }
  if (cfg.amplitudes) {
    if (cfg.amplitudes->size() != cfg.system_dim()) {
      throw ValidationError("amplitudes", "expected " + std::to_string(cfg.system_dim()) + " entries");
    }
    try {
      (void)PointerAmplitudes(*cfg.amplitudes);
    } catch (const Error& e) {
      throw ValidationError("amplitudes", e.what());
    }
  }
  if (!(cfg.tolerances.verdict > 0.0)) throw ValidationError("tolerances.verdict", "must be > 0");
  if (!(cfg.tolerances.cutoff_tail > 0.0)) {
    throw ValidationError("tolerances.cutoff_tail", "must be > 0");
  }
  return cfg;
}

}  // namespace dephasim
