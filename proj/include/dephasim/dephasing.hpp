#pragma once

// Time-dependent pure-dephasing engine. The Hamiltonian is
//   H(t) = sum_i |i><i| (x) V_i(t)
// with piecewise-constant environment generators V_i. Each pointer state i
// drives a conditional unitary w_i(t) on the environment, and for a product
// initial state (sum_i c_i |i>) (x) R(0) the joint state is
//   sigma(t) = sum_ij c_i c_j^* |i><j| (x) w_i R(0) w_j^dag.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dephasim/fock.hpp"
#include "dephasim/linalg.hpp"

namespace dephasim {

class PointerAmplitudes {
 public:
  explicit PointerAmplitudes(std::vector<complex> c, double tol = 1e-10) : c_(std::move(c)) {
    if (c_.empty()) throw Error(ErrorCode::InvalidArgument, "no pointer amplitudes");
    double norm = 0.0;
    for (const auto& v : c_) norm += std::norm(v);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol) {
      throw Error(ErrorCode::InvalidArgument,
                  "pointer amplitudes have squared norm " + std::to_string(norm));
    }
  }

  /// (1, ..., 1) / sqrt(n)
  static PointerAmplitudes equal_superposition(std::size_t n) {
    return PointerAmplitudes(std::vector<complex>(n, 1.0 / std::sqrt(static_cast<double>(n))));
  }

  std::size_t size() const noexcept { return c_.size(); }
  const complex& operator[](std::size_t i) const { return c_[i]; }
  const std::vector<complex>& values() const noexcept { return c_; }

 private:
  std::vector<complex> c_;
};

struct Segment {
  double duration = 0.0;
  std::vector<ComplexMatrix> generators;  // one Hermitian V_i per pointer state
};

struct SegmentSchedule {
  std::size_t system_dim = 0;
  Eigen::Index env_dim = 0;
  std::vector<Segment> segments;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
};

struct ScheduleDiagnostics {
  /// Largest ||V - V^dag||_F per segment.
  std::vector<double> hermiticity_residuals;
  double total_duration = 0.0;
};

/// Structural check. The pure-dephasing commutation condition holds by
/// construction (generators act on the environment only, pointer basis
/// fixed), so only Hermiticity, shapes and durations are checked.
inline ScheduleDiagnostics validate_schedule(const SegmentSchedule& s,
                                             double hermitian_tol = LinalgTolerances{}.hermitian) {
  if (s.segments.empty()) throw Error(ErrorCode::EmptySchedule, "schedule has no segments");
  if (s.system_dim == 0 || s.env_dim <= 0) {
    throw Error(ErrorCode::DimensionMismatch, "schedule dimensions must be positive");
  }
  ScheduleDiagnostics diag;
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    const Segment& seg = s.segments[k];
    const std::string where = "segment " + std::to_string(k);
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
      throw Error(ErrorCode::InvalidArgument, where + " has non-positive duration");
    }
    if (seg.generators.size() != s.system_dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  where + " has " + std::to_string(seg.generators.size()) +
                      " generators, expected " + std::to_string(s.system_dim));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < seg.generators.size(); ++i) {
      const ComplexMatrix& v = seg.generators[i];
      if (v.rows() != s.env_dim || v.cols() != s.env_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    where + " generator " + std::to_string(i) + " has wrong dimension");
      }
      detail::require_finite(v, "generator");
      const double r = hermiticity_residual(v);
      if (r > hermitian_tol * std::max(1.0, v.norm())) {
        throw Error(ErrorCode::NotHermitianGenerator,
                    where + " generator " + std::to_string(i) + " residual " + std::to_string(r));
      }
      worst = std::max(worst, r);
    }
    diag.hermiticity_residuals.push_back(worst);
    diag.total_duration += seg.duration;
  }
  return diag;
}

struct ConditionalPropagatorSet {
  double t = 0.0;
  std::vector<ComplexMatrix> w;
};

/// Evaluates w_i(t) for a fixed schedule. Construction diagonalizes every
/// generator and memoizes the propagators at segment boundaries; afterwards
/// the object is read-only and can be queried from several threads.
///
/// Inside segment k (elapsed tau) the propagator is
///   w_i(t) = exp(-i V_i^(k) tau) * w_i(T_k),
/// the exponential being taken exactly from the generator's spectrum.
class PropagatorEngine {
 public:
  explicit PropagatorEngine(SegmentSchedule schedule) : schedule_(std::move(schedule)) {
    validate_schedule(schedule_);
    const auto n = schedule_.system_dim;
    const auto d = schedule_.env_dim;
    eig_.resize(schedule_.segments.size());
    boundaries_.push_back(0.0);
    endpoints_.emplace_back(n, ComplexMatrix::Identity(d, d));
    for (std::size_t k = 0; k < schedule_.segments.size(); ++k) {
      const Segment& seg = schedule_.segments[k];
      std::vector<ComplexMatrix> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        eig_[k].push_back(hermitian_eig(seg.generators[i]));
        next[i] = unitary_exp(eig_[k][i], seg.duration) * endpoints_.back()[i];
      }
      endpoints_.push_back(std::move(next));
      boundaries_.push_back(boundaries_.back() + seg.duration);
    }
  }

  const SegmentSchedule& schedule() const noexcept { return schedule_; }
  double total_duration() const noexcept { return boundaries_.back(); }
  /// Segment start times followed by the total duration.
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }

  ConditionalPropagatorSet at(double t) const {
    const double total = total_duration();
    const double slack = 1e-12 * std::max(1.0, total);
    if (!(t >= 0.0) || t > total + slack) {
      throw Error(ErrorCode::TimeOutOfRange,
                  "t = " + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
    }
    t = std::min(t, total);
    // first segment whose end lies beyond t; t == total lands in the last one
    const auto it = std::upper_bound(boundaries_.begin() + 1, boundaries_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
    k = std::min(k, schedule_.segments.size() - 1);
    const double tau = t - boundaries_[k];

    ConditionalPropagatorSet out{t, {}};
    out.w.reserve(schedule_.system_dim);
    for (std::size_t i = 0; i < schedule_.system_dim; ++i) {
      if (tau == 0.0) {
        out.w.push_back(endpoints_[k][i]);
      } else {
        out.w.push_back(unitary_exp(eig_[k][i], tau) * endpoints_[k][i]);
      }
    }
    return out;
  }

 private:
  SegmentSchedule schedule_;
  std::vector<std::vector<HermitianEigen>> eig_;           // [segment][pointer]
  std::vector<std::vector<ComplexMatrix>> endpoints_;      // [boundary][pointer]
  std::vector<double> boundaries_;
};

inline ConditionalPropagatorSet propagators_at(const SegmentSchedule& s, double t) {
  return PropagatorEngine(s).at(t);
}

/// Blocks R_ij(t) = w_i R(0) w_j^dag, stored row-major.
struct JointStateBlocks {
  PointerAmplitudes c;
  std::vector<ComplexMatrix> blocks;

  std::size_t system_dim() const noexcept { return c.size(); }
  const ComplexMatrix& R(std::size_t i, std::size_t j) const {
    return blocks.at(i * system_dim() + j);
  }
};

inline JointStateBlocks blocks_from_propagators(const ConditionalPropagatorSet& props,
                                                const EnvDensity& env0,
                                                const PointerAmplitudes& c) {
  const std::size_t n = props.w.size();
  if (c.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(c.size()) + " amplitudes for " + std::to_string(n) +
                    " conditional propagators");
  }
  for (const auto& w : props.w) {
    if (w.rows() != env0.matrix.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "environment state dimension " + std::to_string(env0.matrix.rows()) +
                      " does not match propagators of dimension " + std::to_string(w.rows()));
    }
  }
  JointStateBlocks out{c, std::vector<ComplexMatrix>(n * n)};
  std::vector<ComplexMatrix> left(n);
  for (std::size_t i = 0; i < n; ++i) left[i] = props.w[i] * env0.matrix;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      out.blocks[i * n + j] = left[i] * props.w[j].adjoint();
      if (i == j) {
        // exact Hermitian symmetry for the conditional states
        out.blocks[i * n + i] = 0.5 * (out.blocks[i * n + i] + out.blocks[i * n + i].adjoint()).eval();
      } else {
        out.blocks[j * n + i] = out.blocks[i * n + j].adjoint();
      }
    }
  }
  return out;
}

inline JointStateBlocks blocks_at(const SegmentSchedule& s, const EnvDensity& env0,
                                  const PointerAmplitudes& c, double t) {
  if (env0.matrix.rows() != s.env_dim) {
    throw Error(ErrorCode::DimensionMismatch, "environment does not match schedule env_dim");
  }
  return blocks_from_propagators(propagators_at(s, t), env0, c);
}

/// sigma = sum_ij c_i c_j^* |i><j| (x) R_ij, system index major.
inline ComplexMatrix joint_state(const JointStateBlocks& b) {
  const auto n = static_cast<Eigen::Index>(b.system_dim());
  const auto d = b.R(0, 0).rows();
  ComplexMatrix sigma(n * d, n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const complex weight = b.c[i] * std::conj(b.c[j]);
      sigma.block(i * d, j * d, d, d) = weight * b.R(i, j);
    }
  }
  return sigma;
}

/// Reduced system element rho_ij(t) = c_i c_j^* Tr R_ij(t).
inline complex coherence(const JointStateBlocks& b, std::size_t i, std::size_t j) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "coherence needs i != j");
  if (i >= b.system_dim() || j >= b.system_dim()) {
    throw Error(ErrorCode::InvalidArgument, "pointer index out of range");
  }
  return b.c[i] * std::conj(b.c[j]) * b.R(i, j).trace();
}

/// |rho_ij(t)| / |rho_ij(0)|; Tr R_ij(0) = 1 so rho_ij(0) = c_i c_j^*.
inline double normalized_coherence(const JointStateBlocks& b, std::size_t i, std::size_t j) {
  const double initial = std::abs(b.c[i] * std::conj(b.c[j]));
  if (initial == 0.0) {
    throw Error(ErrorCode::ZeroInitialCoherence,
                "c_" + std::to_string(i) + " c_" + std::to_string(j) + " vanishes");
  }
  return std::abs(coherence(b, i, j)) / initial;
}

}  // namespace dephasim
