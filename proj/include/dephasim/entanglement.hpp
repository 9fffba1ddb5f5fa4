#pragma once

// Separability criteria and the qubit entanglement measure for joint states
// produced by pure dephasing from a product state with a pure system state.
//
// Type 1: R_ii(t) = R_jj(t) for all i != j (N - 1 independent conditions).
// Type 2: [w_i w_j^dag, w_k w_l^dag] = 0 ((N-1)(N-2)/2 independent; none for
//         qubits).
// Qubit measure: E = 4 |c_0|^2 |c_1|^2 (1 - F(R_00, R_11)).

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dephasim/dephasing.hpp"
#include "dephasim/linalg.hpp"

namespace dephasim {

inline constexpr double kDefaultVerdictTolerance = 1e-8;

namespace detail {

inline double qee_prefactor(const PointerAmplitudes& c) {
  if (c.size() != 2) {
    throw Error(ErrorCode::NotQubit,
                "entanglement measure needs a qubit, got dimension " + std::to_string(c.size()));
  }
  return 4.0 * std::norm(c[0]) * std::norm(c[1]);
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

/// E from the two conditional environment states.
inline double qee_measure(const PointerAmplitudes& c, const ComplexMatrix& r00,
                          const ComplexMatrix& r11, const LinalgTolerances& tol = {}) {
  const double prefactor = detail::qee_prefactor(c);
  if (r00.rows() != r11.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "conditional states differ in dimension");
  }
  return detail::clamp_unit(prefactor * (1.0 - fidelity(r00, r11, tol)));
}

/// E from the propagators. F is unitarily invariant, so with R(0) = A A^dag
///   F(w_0 R w_0^dag, w_1 R w_1^dag) = ||A^dag w_0^dag w_1 A||_tr^2,
/// which needs no eigensolver on the evolved states.
inline double qee_measure(const PointerAmplitudes& c, const EnvDensity& env0,
                          const ConditionalPropagatorSet& props) {
  const double prefactor = detail::qee_prefactor(c);
  if (props.w.size() != 2) throw Error(ErrorCode::NotQubit, "expected two propagators");
  const ComplexMatrix relative = props.w[0].adjoint() * props.w[1];
  const ComplexMatrix overlap = env0.factor.adjoint() * relative * env0.factor;
  const double root = trace_norm(overlap);
  return detail::clamp_unit(prefactor * (1.0 - root * root));
}

struct Type1Residual {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;    ///< trace distance between R_ii and R_jj
  bool independent = true;  ///< part of the (0, j) basis of N - 1 conditions
};

struct Type2Residual {
  std::size_t i = 0, j = 0, k = 0, l = 0;
  double norm = 0.0;  ///< ||[w_i w_j^dag, w_k w_l^dag]||_F
};

/// Independent pairs (0, j) first; with `include_derived` the remaining
/// pairs (i, j), 0 < i < j, follow flagged as derived.
inline std::vector<Type1Residual> type1_residuals(const JointStateBlocks& b,
                                                  bool include_derived = true,
                                                  const LinalgTolerances& tol = {}) {
  std::vector<Type1Residual> out;
  const std::size_t n = b.system_dim();
  for (std::size_t j = 1; j < n; ++j) {
    out.push_back({0, j, trace_distance(b.R(0, 0), b.R(j, j), tol), true});
  }
  if (include_derived) {
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        out.push_back({i, j, trace_distance(b.R(i, i), b.R(j, j), tol), false});
      }
    }
  }
  return out;
}

/// Independent enumeration: w_i w_0^dag against w_j w_0^dag for
/// 1 <= i < j <= N - 1. Empty for qubits.
inline std::vector<Type2Residual> type2_residuals(const ConditionalPropagatorSet& props) {
  const std::size_t n = props.w.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "type-2 criteria need N >= 2");
  std::vector<Type2Residual> out;
  std::vector<ComplexMatrix> rel(n);
  for (std::size_t i = 1; i < n; ++i) rel[i] = props.w[i] * props.w[0].adjoint();
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back({i, 0, j, 0, commutator(rel[i], rel[j]).norm()});
    }
  }
  return out;
}

/// Every distinct unordered pair of products w_i w_j^dag (i != j), for
/// diagnostics beyond the independent set.
inline std::vector<Type2Residual> type2_residuals_all(const ConditionalPropagatorSet& props) {
  const std::size_t n = props.w.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  std::vector<Type2Residual> out;
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const auto [i, j] = pairs[a];
    const ComplexMatrix left = props.w[i] * props.w[j].adjoint();
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const auto [k, l] = pairs[b];
      const ComplexMatrix right = props.w[k] * props.w[l].adjoint();
      out.push_back({i, j, k, l, commutator(left, right).norm()});
    }
  }
  return out;
}

enum class CriterionType { Type1, Type2 };

struct Witness {
  CriterionType type = CriterionType::Type1;
  std::vector<std::size_t> indices;
  double residual = 0.0;

  std::string describe() const {
    std::string s = type == CriterionType::Type1 ? "type-1 (" : "type-2 (";
    for (std::size_t n = 0; n < indices.size(); ++n) {
      if (n) s += ",";
      s += std::to_string(indices[n]);
    }
    return s + ") residual " + std::to_string(residual);
  }
};

struct SeparabilityVerdict {
  bool entangled = false;
  std::optional<Witness> witness;  ///< largest violated criterion

  bool separable() const noexcept { return !entangled; }
};

inline SeparabilityVerdict separability_verdict(const std::vector<Type1Residual>& type1,
                                                const std::vector<Type2Residual>& type2,
                                                double tol = kDefaultVerdictTolerance) {
  SeparabilityVerdict v;
  double worst = tol;
  for (const auto& r : type1) {
    if (r.distance > worst) {
      worst = r.distance;
      v.entangled = true;
      v.witness = Witness{CriterionType::Type1, {r.i, r.j}, r.distance};
    }
  }
  for (const auto& r : type2) {
    if (r.norm > worst) {
      worst = r.norm;
      v.entangled = true;
      v.witness = Witness{CriterionType::Type2, {r.i, r.j, r.k, r.l}, r.norm};
    }
  }
  return v;
}

/// Valid only for joint states grown from a product state with a pure system
/// state; that is the caller's contract.
inline SeparabilityVerdict separability_verdict(const JointStateBlocks& blocks,
                                                const ConditionalPropagatorSet& props,
                                                double tol = kDefaultVerdictTolerance) {
  return separability_verdict(type1_residuals(blocks), type2_residuals(props), tol);
}

struct EntanglementReport {
  double t = 0.0;
  std::optional<double> E;  ///< qubits only
  std::vector<Type1Residual> type1;
  std::vector<Type2Residual> type2;
  std::optional<double> negativity;
  std::optional<double> coherence_norm;  ///< |rho_01(t)| / |rho_01(0)| when rho_01(0) != 0
  SeparabilityVerdict verdict;

  double max_type1() const {
    double m = 0.0;
    for (const auto& r : type1) m = std::max(m, r.distance);
    return m;
  }
  double max_type2() const {
    double m = 0.0;
    for (const auto& r : type2) m = std::max(m, r.norm);
    return m;
  }
};

struct ReportOptions {
  bool negativity = false;
  double verdict_tolerance = kDefaultVerdictTolerance;
};

/// Everything reported at one time point. Only the diagonal blocks R_ii and
/// Tr R_01 are formed unless negativity needs the full joint state.
inline EntanglementReport make_report(const ConditionalPropagatorSet& props,
                                      const EnvDensity& env0, const PointerAmplitudes& c,
                                      const ReportOptions& opts = {}) {
  const std::size_t n = props.w.size();
  if (c.size() != n) throw Error(ErrorCode::DimensionMismatch, "amplitude count mismatch");
  EntanglementReport rep;
  rep.t = props.t;
  if (n == 2) rep.E = qee_measure(c, env0, props);

  std::vector<ComplexMatrix> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = props.w[i] * env0.matrix * props.w[i].adjoint();
    diag[i] = 0.5 * (diag[i] + diag[i].adjoint()).eval();
  }
  for (std::size_t j = 1; j < n; ++j) rep.type1.push_back({0, j, trace_distance(diag[0], diag[j]), true});
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      rep.type1.push_back({i, j, trace_distance(diag[i], diag[j]), false});
  rep.type2 = type2_residuals(props);

  const double initial = std::abs(c[0] * std::conj(c[1]));
  if (initial > 0.0) {
    // Tr(w_0 R w_1^dag) = sum of (w_1^dag w_0) .* R^T
    const ComplexMatrix left = props.w[1].adjoint() * props.w[0];
    const complex tr = (left.array() * env0.matrix.transpose().array()).sum();
    rep.coherence_norm = std::abs(tr);
  }
  if (opts.negativity) {
    const JointStateBlocks blocks = blocks_from_propagators(props, env0, c);
    rep.negativity = negativity(joint_state(blocks), static_cast<Eigen::Index>(n),
                                env0.matrix.rows());
  }
  rep.verdict = separability_verdict(rep.type1, rep.type2, opts.verdict_tolerance);
  return rep;
}

}  // namespace dephasim
