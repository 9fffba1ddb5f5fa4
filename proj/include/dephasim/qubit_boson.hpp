#pragma once

// Qubit coupled to one bosonic mode through
//   H(t) = sigma_z (x) [alpha(t) a^dag + alpha(t)^* a + beta a^dag a + gamma(t)],
// i.e. V_0 = +[...], V_1 = -[...], with alpha and gamma piecewise constant.
// Units: hbar = 1, times measured in 1 / beta.

#include <cmath>
#include <complex>
#include <vector>

#include "dephasim/dephasing.hpp"
#include "dephasim/fock.hpp"

namespace dephasim {

struct AlphaSegment {
  double duration = 0.0;
  complex alpha{0.0, 0.0};
  double gamma = 0.0;
};

struct QubitBosonParams {
  double beta = 1.0;
  std::vector<AlphaSegment> segments;
  int cutoff = 64;

  void validate() const {
    if (beta == 0.0 || !std::isfinite(beta)) {
      throw Error(ErrorCode::InvalidArgument, "beta must be finite and non-zero");
    }
    if (segments.empty()) throw Error(ErrorCode::EmptySchedule, "no alpha segments");
    for (const auto& s : segments) {
      if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
        throw Error(ErrorCode::InvalidArgument, "segment durations must be > 0");
      }
    }
    (void)FockSpace(cutoff);
  }

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }

  /// Bound on the displacement the dynamics can impose: each segment moves
  /// a coherent amplitude on a circle of radius |alpha / beta|, so by at
  /// most 2 |alpha / beta|.
  double max_displacement() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += 2.0 * std::abs(s.alpha) / std::abs(beta);
    return sum;
  }
};

/// alpha = 0 on [0, t1), alpha on [t1, t1 + t2), 0 on [t1 + t2, t1 + t2 + t3].
inline QubitBosonParams step_params(complex alpha, double t1, double t2, double t3,
                                    double beta = 1.0, int cutoff = 64) {
  return {beta, {{t1, 0.0, 0.0}, {t2, alpha, 0.0}, {t3, 0.0, 0.0}}, cutoff};
}

/// alpha a^dag + alpha^* a + beta n + gamma.
inline ComplexMatrix boson_generator(complex alpha, double beta, double gamma,
                                     const FockSpace& space) {
  const ComplexMatrix a = annihilation(space);
  ComplexMatrix v = alpha * a.adjoint() + std::conj(alpha) * a + beta * number_operator(space);
  v.diagonal().array() += gamma;
  return v;
}

inline SegmentSchedule build_schedule(const QubitBosonParams& p) {
  p.validate();
  const FockSpace space(p.cutoff);
  SegmentSchedule s{2, space.dim(), {}};
  for (const auto& seg : p.segments) {
    const ComplexMatrix v0 = boson_generator(seg.alpha, p.beta, seg.gamma, space);
    s.segments.push_back({seg.duration, {v0, -v0}});
  }
  return s;
}

enum class Branch { Zero = 0, One = 1 };

/// Which global phase the closed-form pieces carry.
enum class PhaseConvention {
  /// Only Phi = -/+ (|alpha|^2 / beta^2) sin(beta t).
  Published,
  /// Adds the term +/- |alpha|^2 t / beta, so the piece equals
  /// exp(-i V t) exactly, not just up to a phase.
  Exact,
};

namespace detail {

inline double branch_sign(Branch b) { return b == Branch::Zero ? 1.0 : -1.0; }

inline ComplexMatrix number_rotation(double angle, const FockSpace& space) {
  ComplexMatrix out = ComplexMatrix::Zero(space.dim(), space.dim());
  for (Eigen::Index n = 0; n < space.dim(); ++n) {
    out(n, n) = std::exp(-I_unit * angle * static_cast<double>(n));
  }
  return out;
}

}  // namespace detail

/// Displacement amplitude lambda = (alpha / beta)(e^{-/+ i beta t} - 1) of
/// the closed-form piece.
inline complex analytic_displacement(complex alpha, double beta, double t, Branch branch) {
  const double s = detail::branch_sign(branch);
  return alpha / beta * (std::exp(-I_unit * s * beta * t) - 1.0);
}

/// Closed-form propagator of a constant-alpha segment (gamma = 0):
///   e^{Y} e^{i Phi} e^{-/+ i beta n t},  Y = lambda a^dag - lambda^* a.
/// The displacement uses the Laguerre matrix elements, so it is only
/// meaningful on the trusted low-Fock block.
inline ComplexMatrix analytic_propagator_piece(complex alpha, double beta, double t,
                                               Branch branch, const FockSpace& space,
                                               PhaseConvention convention = PhaseConvention::Published) {
  if (beta == 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be non-zero");
  const double s = detail::branch_sign(branch);
  const double ratio2 = std::norm(alpha) / (beta * beta);
  double phase = -s * ratio2 * std::sin(beta * t);
  if (convention == PhaseConvention::Exact) phase += s * std::norm(alpha) * t / beta;
  const complex lambda = analytic_displacement(alpha, beta, t, branch);
  return std::exp(I_unit * phase) * displacement(lambda, space) *
         detail::number_rotation(s * beta * t, space);
}

/// w_branch(t) for a full piecewise schedule assembled from closed-form
/// pieces (later segments act on the left). gamma contributes
/// e^{-/+ i gamma tau} only under the exact convention.
inline ComplexMatrix analytic_propagator(const QubitBosonParams& p, double t, Branch branch,
                                         PhaseConvention convention = PhaseConvention::Published) {
  p.validate();
  const FockSpace space(p.cutoff);
  const double s = detail::branch_sign(branch);
  ComplexMatrix w = ComplexMatrix::Identity(space.dim(), space.dim());
  double start = 0.0;
  for (const auto& seg : p.segments) {
    if (t <= start) break;
    const double tau = std::min(seg.duration, t - start);
    ComplexMatrix piece = seg.alpha == complex{0.0, 0.0}
                              ? detail::number_rotation(s * p.beta * tau, space)
                              : analytic_propagator_piece(seg.alpha, p.beta, tau, branch, space,
                                                          convention);
    if (convention == PhaseConvention::Exact) piece *= std::exp(-I_unit * s * seg.gamma * tau);
    w = piece * w;
    start += seg.duration;
  }
  return w;
}

/// |Tr(e^{-2 i n t} rho_th)| = (1 - q) / |1 - q e^{-2 i t}|, q = e^{-1/theta}:
/// the normalized coherence while alpha = 0 (beta = 1), untruncated.
inline double phase1_coherence_oracle(double theta, double t) {
  if (theta < 0.0) throw Error(ErrorCode::InvalidArgument, "theta must be >= 0");
  if (theta == 0.0) return 1.0;
  const double q = std::exp(-1.0 / theta);
  return (1.0 - q) / std::abs(1.0 - q * std::exp(-2.0 * I_unit * t));
}

}  // namespace dephasim
