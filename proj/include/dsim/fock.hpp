#pragma once

// Truncated Fock-space primitives for a single cavity mode.
//
// Quadrature convention: X_theta = (a e^{-i theta} + a^dag e^{i theta}) / 2, so a
// coherent state |alpha> has <X_theta> = Re(alpha e^{-i theta}) and vacuum
// variance 1/4.

#include <cmath>
#include <algorithm>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dsim/common.hpp"

namespace dsim {

template <typename Scalar = Real>
struct FieldState {
  ComplexVectorX<Scalar> amps;

  Index n_max() const { return amps.size(); }
  Scalar norm2() const { return amps.squaredNorm(); }
};

/// Measured quadrature angle and eigenvalue. theta is kept in [0, 2pi).
template <typename Scalar = Real>
struct QuadratureSpec {
  Scalar theta = 0;
  Scalar chi = 0;

  QuadratureSpec() = default;
  QuadratureSpec(Scalar theta_in, Scalar chi_in) : theta(wrap(theta_in)), chi(chi_in) {}

  static Scalar wrap(Scalar t) {
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    Scalar w = std::fmod(t, two_pi);
    if (w < 0) w += two_pi;
    if (w >= two_pi) w = 0;
    return w;
  }
};

/// Husimi Q samples: values(i, j) = Q(x_axis[i] + i y_axis[j]).
template <typename Scalar = Real>
struct QGrid {
  RealVectorX<Scalar> x_axis;
  RealVectorX<Scalar> y_axis;
  RealMatrixX<Scalar> values;

  /// sum(Q) dx dy, which approximates the trace of the sampled density.
  Scalar integrated_weight() const {
    const Scalar dx = x_axis.size() > 1 ? x_axis[1] - x_axis[0] : Scalar(1);
    const Scalar dy = y_axis.size() > 1 ? y_axis[1] - y_axis[0] : Scalar(1);
    return values.sum() * dx * dy;
  }
};

/// Coefficients e^{-|alpha|^2/2} alpha^m / sqrt(m!) for m < n_max. The tail beyond
/// n_max is dropped without renormalising.
template <typename Scalar>
FieldState<Scalar> coherent_state(std::complex<Scalar> alpha, Index n_max) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw InvalidInput("coherent_state: non-finite amplitude");
  if (n_max < 1) throw InvalidInput("coherent_state: n_max must be >= 1");

  FieldState<Scalar> s{ComplexVectorX<Scalar>::Zero(n_max)};
  const Scalar r = std::abs(alpha);
  if (r == 0) {
    s.amps[0] = 1;
    return s;
  }
  // log-space magnitude keeps large |alpha| from underflowing the vacuum term
  const Scalar log_r = std::log(r);
  const Scalar phase = std::arg(alpha);
  for (Index m = 0; m < n_max; ++m) {
    const Scalar md = static_cast<Scalar>(m);
    const Scalar log_mag = -r * r / 2 + md * log_r - std::lgamma(md + 1) / 2;
    s.amps[m] = std::polar(std::exp(log_mag), md * phase);
  }
  return s;
}

template <typename Scalar>
FieldState<Scalar> coherent_state(Scalar alpha, Index n_max) {
  return coherent_state(std::complex<Scalar>(alpha, 0), n_max);
}

/// Annihilation operator a, with a|m> = sqrt(m)|m-1>.
template <typename Scalar>
ComplexMatrixX<Scalar> annihilation_operator(Index n_max) {
  ComplexMatrixX<Scalar> a = ComplexMatrixX<Scalar>::Zero(n_max, n_max);
  for (Index m = 1; m < n_max; ++m) a(m - 1, m) = std::sqrt(static_cast<Scalar>(m));
  return a;
}

template <typename Scalar>
ComplexMatrixX<Scalar> number_operator(Index n_max) {
  ComplexMatrixX<Scalar> n = ComplexMatrixX<Scalar>::Zero(n_max, n_max);
  for (Index m = 0; m < n_max; ++m) n(m, m) = static_cast<Scalar>(m);
  return n;
}

/// <n|X_theta|m> = (sqrt(m) e^{-i theta} delta_{n,m-1} + sqrt(n) e^{i theta} delta_{n,m+1}) / 2.
/// Entries are written in conjugate pairs, so the result is exactly Hermitian.
template <typename Scalar>
ComplexMatrixX<Scalar> quadrature_operator(Scalar theta, Index n_max) {
  ComplexMatrixX<Scalar> x = ComplexMatrixX<Scalar>::Zero(n_max, n_max);
  const std::complex<Scalar> down = std::polar(Scalar(0.5), -theta);
  for (Index m = 1; m < n_max; ++m) {
    const Scalar s = std::sqrt(static_cast<Scalar>(m));
    x(m - 1, m) = s * down;
    x(m, m - 1) = std::conj(x(m - 1, m));
  }
  return x;
}

/// Continuum-normalised amplitudes <n|chi_theta>, so that
/// integral d chi <n|chi><chi|m> = delta_nm. With q = sqrt(2) chi these are
/// 2^{1/4} e^{i theta n} psi_n(q), where psi_n is the normalised Hermite function.
///
/// The Hermite functions come from the three-term recurrence
///   psi_{n+1} = sqrt(2/(n+1)) q psi_n - sqrt(n/(n+1)) psi_{n-1},
/// which stays O(1) for all n. The only range limit is the seed
/// psi_0 = pi^{-1/4} e^{-q^2/2}: |chi| above ~26 underflows it and is rejected.
template <typename Scalar>
ComplexVectorX<Scalar> quadrature_amplitudes(const QuadratureSpec<Scalar>& spec, Index n_max) {
  if (n_max < 1) throw InvalidInput("quadrature_amplitudes: n_max must be >= 1");
  if (!std::isfinite(spec.chi) || !std::isfinite(spec.theta))
    throw InvalidInput("quadrature_amplitudes: non-finite quadrature");
  const Scalar q = std::sqrt(Scalar(2)) * spec.chi;
  if (q * q / 2 > Scalar(700))
    throw NumericRangeError("quadrature_amplitudes: |chi| too large for the Hermite recurrence");

  RealVectorX<Scalar> psi(n_max);
  psi[0] = std::pow(std::numbers::pi_v<Scalar>, Scalar(-0.25)) * std::exp(-q * q / 2);
  if (n_max > 1) psi[1] = std::sqrt(Scalar(2)) * q * psi[0];
  for (Index n = 1; n + 1 < n_max; ++n) {
    const Scalar nd = static_cast<Scalar>(n);
    psi[n + 1] = std::sqrt(2 / (nd + 1)) * q * psi[n] - std::sqrt(nd / (nd + 1)) * psi[n - 1];
    if (!std::isfinite(psi[n + 1]))
      throw NumericRangeError("quadrature_amplitudes: Hermite recurrence overflow");
  }

  const Scalar scale = std::pow(Scalar(2), Scalar(0.25));
  ComplexVectorX<Scalar> out(n_max);
  for (Index n = 0; n < n_max; ++n)
    out[n] = std::polar(scale * psi[n], spec.theta * static_cast<Scalar>(n));
  return out;
}

/// Eigenstate of X_theta with eigenvalue chi, normalised to one in the truncated space.
template <typename Scalar>
FieldState<Scalar> quadrature_eigenstate(const QuadratureSpec<Scalar>& spec, Index n_max) {
  ComplexVectorX<Scalar> b = quadrature_amplitudes(spec, n_max);
  const Scalar n = b.norm();
  if (!(n > 0)) throw NumericRangeError("quadrature_eigenstate: vanishing eigenstate");
  return {b / n};
}

template <typename Scalar>
std::complex<Scalar> overlap(const FieldState<Scalar>& a, const FieldState<Scalar>& b) {
  if (a.n_max() != b.n_max()) throw InvalidInput("overlap: truncation dimensions differ");
  return a.amps.dot(b.amps);  // Eigen's dot conjugates the left operand
}

template <typename Scalar>
std::complex<Scalar> expectation(const ComplexMatrixX<Scalar>& op, const FieldState<Scalar>& s) {
  if (op.rows() != s.n_max() || op.cols() != s.n_max())
    throw InvalidInput("expectation: operator/state dimension mismatch");
  return s.amps.dot(op * s.amps);
}

template <typename Scalar>
ComplexMatrixX<Scalar> projector(const FieldState<Scalar>& s) {
  return s.amps * s.amps.adjoint();
}

/// Q(beta) = <beta|rho|beta> / pi on the grid beta = x + i y.
template <typename Scalar>
QGrid<Scalar> husimi_q(const ComplexMatrixX<Scalar>& rho, const RealVectorX<Scalar>& x_axis,
                       const RealVectorX<Scalar>& y_axis) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw InvalidInput("husimi_q: density operator must be square");
  const Index n_max = rho.rows();

  // rho = sum_k w_k |v_k><v_k|, so Q needs one inner product per eigenvector
  Eigen::SelfAdjointEigenSolver<ComplexMatrixX<Scalar>> eig(rho);
  const RealVectorX<Scalar>& w = eig.eigenvalues();
  const Scalar w_cut = w.cwiseAbs().maxCoeff() * Scalar(1e-15);
  std::vector<Index> kept;
  for (Index k = 0; k < w.size(); ++k)
    if (std::abs(w[k]) > w_cut) kept.push_back(k);

  QGrid<Scalar> grid{x_axis, y_axis, RealMatrixX<Scalar>::Zero(x_axis.size(), y_axis.size())};
  const Scalar inv_pi = 1 / std::numbers::pi_v<Scalar>;
  for (Index i = 0; i < x_axis.size(); ++i) {
    for (Index j = 0; j < y_axis.size(); ++j) {
      const auto beta = coherent_state(std::complex<Scalar>(x_axis[i], y_axis[j]), n_max);
      Scalar q = 0;
      for (Index k : kept) q += w[k] * std::norm(beta.amps.dot(eig.eigenvectors().col(k)));
      // eigenvalue round-off can push Q a hair below zero
      grid.values(i, j) = std::max(Scalar(0), q * inv_pi);
    }
  }
  return grid;
}

template <typename Scalar>
RealVectorX<Scalar> uniform_axis(Scalar lo, Scalar hi, Index samples) {
  if (samples < 2) throw InvalidInput("uniform_axis: need at least two samples");
  return RealVectorX<Scalar>::LinSpaced(samples, lo, hi);
}

}  // namespace dsim
