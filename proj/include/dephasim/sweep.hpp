#pragma once

// Time sweeps over a RunConfig, CSV serialization and cutoff convergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dephasim/config.hpp"
#include "dephasim/entanglement.hpp"

namespace dephasim {

struct SweepRow {
  double t = 0.0;
  std::optional<double> entanglement;
  std::optional<double> coherence_norm;
  std::optional<double> type1_max;
  std::optional<double> type2_max;
  std::optional<double> negativity;
  int cutoff = 0;
};

/// Immutable model assembled once per sweep.
struct SweepModel {
  int cutoff = 0;
  PropagatorEngine engine;
  EnvDensity env0;
  PointerAmplitudes amplitudes;
  std::vector<std::string> notes;  ///< truncation and renormalization remarks
};

/// Cutoff a config resolves to: the explicit value, the fixed dimension of a
/// schedule/matrix model, or the policy choice for "auto".
inline int resolve_cutoff(const RunConfig& cfg) {
  if (const auto* s = std::get_if<SegmentSchedule>(&cfg.model)) return static_cast<int>(s->env_dim);
  if (const auto* m = std::get_if<MatrixSpec>(&cfg.initial_env)) return static_cast<int>(m->rho.rows());
  if (cfg.cutoff) return *cfg.cutoff;
  const auto& p = std::get<QubitBosonParams>(cfg.model);
  return suggest_cutoff(cfg.initial_env, p.max_displacement(), cfg.tolerances.cutoff_tail);
}

inline SweepModel build_model(const RunConfig& cfg, std::optional<int> cutoff_override = std::nullopt) {
  const int cutoff = cutoff_override ? *cutoff_override : resolve_cutoff(cfg);
  const FockSpace space(cutoff);
  SegmentSchedule schedule;
  std::vector<std::string> notes;
  if (const auto* p = std::get_if<QubitBosonParams>(&cfg.model)) {
    QubitBosonParams params = *p;
    params.cutoff = cutoff;
    schedule = build_schedule(params);
    const double amp = intrinsic_amplitude(cfg.initial_env) + params.max_displacement();
    if (auto w = cutoff_warning(amp, space)) notes.push_back(*w);
  } else {
    schedule = std::get<SegmentSchedule>(cfg.model);
    if (schedule.env_dim != cutoff) {
      throw Error(ErrorCode::DimensionMismatch, "schedule env_dim differs from the cutoff");
    }
  }
  EnvDensity env = make_env(cfg.initial_env, space);
  if (std::holds_alternative<CoherentSpec>(cfg.initial_env)) {
    notes.push_back("coherent state truncated at cutoff " + std::to_string(cutoff) +
                    " and renormalized (retained mass " + std::to_string(env.retained_mass) + ")");
  }
  PointerAmplitudes c = cfg.amplitudes ? PointerAmplitudes(*cfg.amplitudes)
                                       : PointerAmplitudes::equal_superposition(schedule.system_dim);
  return {cutoff, PropagatorEngine(std::move(schedule)), std::move(env), std::move(c), std::move(notes)};
}

/// t_k = t_max k / (steps - 1) plus every segment boundary inside (0, t_max)
/// that does not already coincide with a grid point.
inline std::vector<double> sweep_times(double t_max, int steps, const std::vector<double>& boundaries) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(steps) + boundaries.size());
  for (int k = 0; k < steps; ++k) times.push_back(t_max * k / (steps - 1));
  const double dt = t_max / (steps - 1);
  for (double b : boundaries) {
    if (b <= 0.0 || b >= t_max) continue;
    const double nearest = std::round(b / dt) * dt;
    if (std::abs(nearest - b) > 1e-12 * std::max(1.0, t_max)) times.push_back(b);
  }
  std::sort(times.begin(), times.end());
  return times;
}

inline SweepRow sweep_row(const SweepModel& model, const RunConfig& cfg, double t) {
  ReportOptions opts;
  opts.negativity = cfg.outputs.negativity;
  opts.verdict_tolerance = cfg.tolerances.verdict;
  const EntanglementReport rep = make_report(model.engine.at(t), model.env0, model.amplitudes, opts);
  SweepRow row;
  row.t = t + cfg.time_offset;
  row.cutoff = model.cutoff;
  if (cfg.outputs.entanglement) row.entanglement = rep.E;
  if (cfg.outputs.coherence) row.coherence_norm = rep.coherence_norm;
  if (cfg.outputs.type1) row.type1_max = rep.max_type1();
  if (cfg.outputs.type2 && !rep.type2.empty()) row.type2_max = rep.max_type2();
  row.negativity = rep.negativity;
  return row;
}

inline std::vector<SweepRow> run_sweep(const SweepModel& model, const RunConfig& cfg) {
  std::vector<SweepRow> rows;
  for (double t : sweep_times(cfg.t_max, cfg.steps, model.engine.boundaries())) {
    rows.push_back(sweep_row(model, cfg, t));
  }
  return rows;
}

inline std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  return run_sweep(build_model(cfg), cfg);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "t,entanglement,coherence_norm,type1_max,type2_max,negativity,cutoff";

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

}  // namespace detail

/// Writes the header and one line per row; returns the bytes written.
inline std::size_t emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no rows to emit");
  std::string text = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    text += detail::format_real(r.t) + ',' + detail::format_optional(r.entanglement) + ',' +
            detail::format_optional(r.coherence_norm) + ',' + detail::format_optional(r.type1_max) +
            ',' + detail::format_optional(r.type2_max) + ',' + detail::format_optional(r.negativity) +
            ',' + std::to_string(r.cutoff) + '\n';
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing CSV");
  return text.size();
}

inline std::size_t emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return emit_csv(rows, out);
}

/// Inverse of emit_csv.
inline std::vector<SweepRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::ParseError, "CSV header mismatch");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
      fields.push_back(line.substr(start, pos - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 7) throw Error(ErrorCode::ParseError, "CSV row has wrong field count");
    auto opt = [](const std::string& f) -> std::optional<double> {
      if (f.empty()) return std::nullopt;
      return std::stod(f);
    };
    SweepRow r;
    r.t = std::stod(fields[0]);
    r.entanglement = opt(fields[1]);
    r.coherence_norm = opt(fields[2]);
    r.type1_max = opt(fields[3]);
    r.type2_max = opt(fields[4]);
    r.negativity = opt(fields[5]);
    r.cutoff = std::stoi(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceReport {
  int cutoff = 0;
  int doubled_cutoff = 0;
  double max_delta_entanglement = 0.0;
  double max_delta_coherence = 0.0;
  std::size_t points = 0;
};

namespace detail {

inline double max_abs_delta(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b,
                            std::optional<double> SweepRow::*field) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a[k].*field;
    const auto& y = b[k].*field;
    if (x && y) worst = std::max(worst, std::abs(*x - *y));
  }
  return worst;
}

}  // namespace detail

/// Runs the sweep at the resolved cutoff and at twice that cutoff.
inline ConvergenceReport convergence_report(const RunConfig& cfg) {
  if (std::holds_alternative<SegmentSchedule>(cfg.model) ||
      std::holds_alternative<MatrixSpec>(cfg.initial_env)) {
    throw ValidationError("cutoff", "fixed-dimension models cannot be refined");
  }
  const int cutoff = resolve_cutoff(cfg);
  if (2 * cutoff > kMaxCutoff) {
    throw Error(ErrorCode::CutoffCapExceeded,
                "doubling cutoff " + std::to_string(cutoff) + " exceeds " + std::to_string(kMaxCutoff));
  }
  RunConfig cfg_all = cfg;
  cfg_all.outputs.entanglement = cfg_all.outputs.coherence = true;
  cfg_all.outputs.negativity = false;
  const auto lo = run_sweep(build_model(cfg_all, cutoff), cfg_all);
  const auto hi = run_sweep(build_model(cfg_all, 2 * cutoff), cfg_all);
  ConvergenceReport rep;
  rep.cutoff = cutoff;
  rep.doubled_cutoff = 2 * cutoff;
  rep.points = lo.size();
  rep.max_delta_entanglement = detail::max_abs_delta(lo, hi, &SweepRow::entanglement);
  rep.max_delta_coherence = detail::max_abs_delta(lo, hi, &SweepRow::coherence_norm);
  return rep;
}

inline void print_convergence(const ConvergenceReport& r, std::ostream& out) {
  out << "cutoff,doubled_cutoff,points,max_delta_entanglement,max_delta_coherence\n"
      << r.cutoff << ',' << r.doubled_cutoff << ',' << r.points << ','
      << detail::format_real(r.max_delta_entanglement) << ','
      << detail::format_real(r.max_delta_coherence) << '\n';
}

}  // namespace dephasim
