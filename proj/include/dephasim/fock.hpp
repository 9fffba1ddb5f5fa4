#pragma once

// Truncated single bosonic mode: ladder operators, Gibbs/coherent/Fock
// states, the displacement operator in closed form and cutoff selection.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dephasim/linalg.hpp"

namespace dephasim {

/// Basis |0>, ..., |cutoff - 1>.
class FockSpace {
 public:
  explicit FockSpace(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 2) {
      throw Error(ErrorCode::InvalidArgument,
                  "Fock cutoff must be at least 2, got " + std::to_string(cutoff));
    }
  }

  int cutoff() const noexcept { return cutoff_; }
  Eigen::Index dim() const noexcept { return cutoff_; }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  int cutoff_;
};

/// Initial environment state. `factor` satisfies factor * factor^dag = matrix
/// and is built exactly for the analytic states (no eigensolver noise).
struct EnvDensity {
  FockSpace space;
  ComplexMatrix matrix;
  ComplexMatrix factor;
  /// Norm^2 retained by the truncation before renormalization (1 for states
  /// that fit exactly).
  double retained_mass = 1.0;
};

inline ComplexMatrix annihilation(const FockSpace& space) {
  const auto n = space.dim();
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

inline ComplexMatrix creation(const FockSpace& space) { return annihilation(space).adjoint(); }

inline ComplexMatrix number_operator(const FockSpace& space) {
  const auto n = space.dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) out(k, k) = static_cast<double>(k);
  return out;
}

namespace detail {

inline EnvDensity pure_env(const FockSpace& space, ComplexVector psi, double retained) {
  psi /= psi.norm();
  return {space, psi * psi.adjoint(), ComplexMatrix(psi), retained};
}

inline EnvDensity diagonal_env(const FockSpace& space, const RealVector& probs) {
  const auto n = space.dim();
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = 0; k < n; ++k) {
    rho(k, k) = probs[k];
    if (probs[k] > 0.0) support.push_back(k);
  }
  ComplexMatrix factor = ComplexMatrix::Zero(n, static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    factor(support[c], static_cast<Eigen::Index>(c)) = std::sqrt(probs[support[c]]);
  }
  return {space, rho, factor, 1.0};
}

}  // namespace detail

inline EnvDensity fock_state(int n, const FockSpace& space) {
  if (n < 0 || n >= space.cutoff()) {
    throw Error(ErrorCode::InvalidArgument,
                "Fock level " + std::to_string(n) + " outside cutoff " +
                    std::to_string(space.cutoff()));
  }
  ComplexVector psi = ComplexVector::Zero(space.dim());
  psi[n] = 1.0;
  return detail::pure_env(space, psi, 1.0);
}

/// Gibbs state of Gamma a^dag a at k_B T / Gamma = theta, renormalized on the
/// truncated basis. theta = 0 is the vacuum.
inline EnvDensity thermal_state(double theta, const FockSpace& space) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be finite and >= 0");
  }
  if (theta == 0.0) return fock_state(0, space);
  const double q = std::exp(-1.0 / theta);
  RealVector p(space.dim());
  double w = 1.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    p[k] = w;
    w *= q;
  }
  p /= p.sum();
  EnvDensity env = detail::diagonal_env(space, p);
  // geometric tail beyond the cutoff
  env.retained_mass = 1.0 - std::pow(q, space.cutoff());
  return env;
}

/// Fock amplitudes e^{-|z|^2/2} z^n / sqrt(n!) for n < cutoff (unnormalized).
inline ComplexVector coherent_amplitudes(complex zeta, const FockSpace& space) {
  ComplexVector psi(space.dim());
  psi[0] = std::exp(-0.5 * std::norm(zeta));
  for (Eigen::Index k = 1; k < psi.size(); ++k) {
    psi[k] = psi[k - 1] * zeta / std::sqrt(static_cast<double>(k));
  }
  return psi;
}

/// Coherent state |zeta>, truncated and then renormalized.
inline EnvDensity coherent_state(complex zeta, const FockSpace& space) {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) {
    throw Error(ErrorCode::NonFinite, "coherent amplitude is not finite");
  }
  const ComplexVector psi = coherent_amplitudes(zeta, space);
  return detail::pure_env(space, psi, psi.squaredNorm());
}

/// Wrap an arbitrary density matrix. Validates Hermiticity, trace and PSD.
inline EnvDensity density_from_matrix(const ComplexMatrix& rho, const LinalgTolerances& tol = {}) {
  require_density(rho, tol, "environment density");
  return {FockSpace(static_cast<int>(rho.rows())), rho, psd_factor(rho, tol), 1.0};
}

/// D(lambda) = exp(lambda a^dag - lambda^* a) with entries from the
/// associated-Laguerre closed form,
///   <n+k|D|n> = e^{-x/2} lambda^k / sqrt(k!) * g_n,  x = |lambda|^2,
/// where g_n = sqrt(n! k! / (n+k)!) L_n^{(k)}(x) obeys the normalized
/// three-term recurrence below; <n|D|n+k> uses (-lambda^*)^k instead.
inline ComplexMatrix displacement(complex lambda, const FockSpace& space) {
  const auto dim = space.dim();
  const double x = std::norm(lambda);
  const double envelope = std::exp(-0.5 * x);
  ComplexMatrix d = ComplexMatrix::Zero(dim, dim);

  complex up = 1.0;    // lambda^k / sqrt(k!)
  complex down = 1.0;  // (-lambda^*)^k / sqrt(k!)
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (k > 0) {
      const double root_k = std::sqrt(static_cast<double>(k));
      up *= lambda / root_k;
      down *= -std::conj(lambda) / root_k;
    }
    double g_prev = 0.0;
    double g = 1.0;
    for (Eigen::Index n = 0; n + k < dim; ++n) {
      d(n + k, n) = envelope * up * g;
      if (k > 0) d(n, n + k) = envelope * down * g;
      const double nn = static_cast<double>(n);
      const double kk = static_cast<double>(k);
      const double g_next =
          ((2.0 * nn + kk + 1.0 - x) * g - std::sqrt(nn * (nn + kk)) * g_prev) /
          std::sqrt((nn + 1.0) * (nn + kk + 1.0));
      g_prev = g;
      g = g_next;
    }
  }
  return d;
}

/// Size of the leading Fock block on which a truncated operator that
/// displaces by at most `amplitude` reproduces the untruncated one:
/// floor((sqrt(cutoff) - 2 |amplitude|)^2). Level n sits at phase-space
/// radius sqrt(n); the factor 2 leaves room for the spread of the displaced
/// state before it reaches the truncation edge.
inline Eigen::Index trusted_block(double amplitude, const FockSpace& space) {
  const double radius = std::sqrt(static_cast<double>(space.cutoff())) - 2.0 * std::abs(amplitude);
  if (radius <= 0.0) return 0;
  return std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(radius * radius)), space.dim());
}

// ---------------------------------------------------------------------------
// Cutoff policy.

struct ThermalSpec {
  double theta = 0.0;
};
struct CoherentSpec {
  complex zeta{0.0, 0.0};
};
struct FockSpec {
  int n = 0;
};
struct MatrixSpec {
  ComplexMatrix rho;
};

using EnvSpec = std::variant<ThermalSpec, CoherentSpec, FockSpec, MatrixSpec>;

inline EnvDensity make_env(const EnvSpec& spec, const FockSpace& space) {
  return std::visit(
      [&](const auto& s) -> EnvDensity {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ThermalSpec>) {
          return thermal_state(s.theta, space);
        } else if constexpr (std::is_same_v<T, CoherentSpec>) {
          return coherent_state(s.zeta, space);
        } else if constexpr (std::is_same_v<T, FockSpec>) {
          return fock_state(s.n, space);
        } else {
          if (s.rho.rows() != space.dim()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "environment matrix has dimension " + std::to_string(s.rho.rows()) +
                            ", cutoff is " + std::to_string(space.cutoff()));
          }
          return density_from_matrix(s.rho);
        }
      },
      spec);
}

/// Probability mass of the untruncated state on levels >= cutoff.
inline double tail_mass(const EnvSpec& spec, int cutoff) {
  if (const auto* th = std::get_if<ThermalSpec>(&spec)) {
    if (th->theta == 0.0) return 0.0;
    return std::exp(-static_cast<double>(cutoff) / th->theta);
  }
  if (const auto* co = std::get_if<CoherentSpec>(&spec)) {
    // Poisson tail summed upward from the cutoff; no cancellation.
    const double x = std::norm(co->zeta);
    if (x == 0.0) return 0.0;
    double log_term = -x + cutoff * std::log(x) - std::lgamma(cutoff + 1.0);
    double sum = 0.0;
    for (int n = cutoff; n < cutoff + 2000; ++n) {
      const double term = std::exp(log_term);
      sum += term;
      if (n > x && term < 1e-18 * sum) break;
      log_term += std::log(x) - std::log(n + 1.0);
    }
    return sum;
  }
  if (const auto* fo = std::get_if<FockSpec>(&spec)) return fo->n >= cutoff ? 1.0 : 0.0;
  return 0.0;
}

/// Amplitude already carried by the initial state (|zeta| or sqrt(n)).
inline double intrinsic_amplitude(const EnvSpec& spec) {
  if (const auto* co = std::get_if<CoherentSpec>(&spec)) return std::abs(co->zeta);
  if (const auto* fo = std::get_if<FockSpec>(&spec)) return std::sqrt(static_cast<double>(fo->n));
  return 0.0;
}

inline constexpr int kMinCutoff = 16;
inline constexpr int kMaxCutoff = 512;

/// Smallest cutoff in {16, 32, ..., 512} whose tail mass is below `tol` and
/// for which the largest expected displacement amplitude obeys
/// |lambda|^2 <= cutoff / 4. `max_displacement` bounds the displacement the
/// dynamics adds on top of the initial state.
inline int suggest_cutoff(const EnvSpec& spec, double max_displacement, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff tolerance must be > 0");
  if (const auto* m = std::get_if<MatrixSpec>(&spec)) return static_cast<int>(m->rho.rows());
  const double amp = intrinsic_amplitude(spec) + std::abs(max_displacement);
  for (int cutoff = kMinCutoff; cutoff <= kMaxCutoff; cutoff *= 2) {
    if (tail_mass(spec, cutoff) < tol && amp * amp <= cutoff / 4.0) return cutoff;
  }
  throw Error(ErrorCode::CutoffCapExceeded,
              "no cutoff up to " + std::to_string(kMaxCutoff) + " meets the truncation policy");
}

/// Message when |amp|^2 exceeds cutoff / 4, otherwise nothing.
inline std::optional<std::string> cutoff_warning(double amplitude, const FockSpace& space) {
  if (amplitude * amplitude <= space.cutoff() / 4.0) return std::nullopt;
  return "amplitude " + std::to_string(amplitude) + " is large for cutoff " +
         std::to_string(space.cutoff()) + "; truncation errors may be significant";
}

}  // namespace dephasim
