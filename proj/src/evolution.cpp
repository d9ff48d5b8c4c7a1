#include "dsim/evolution.hpp"

#include <cmath>
#include <limits>

namespace dsim {

namespace {

Real sinc(Real y) { return y == 0 ? Real(1) : std::sin(y) / y; }

// cos(k x) at a node evaluates to ~1e-16 rather than zero because pi/2 is not
// representable; snap it so node rows are exactly the identity.
Real snapped_cos(Real arg) {
  const Real c = std::cos(arg);
  return std::abs(c) < 16 * std::numeric_limits<Real>::epsilon() ? Real(0) : c;
}

struct DispersiveTerms {
  Real A;
  Real B;
  Real cross_amp;
};

DispersiveTerms dispersive_terms(Level level, Index m, Real x, const InteractionParams& p) {
  const CouplingPair g = coupling_at(x, p);
  const Real photons = level == Level::b ? static_cast<Real>(m + 1) : static_cast<Real>(m);
  return {g.g2 * g.g2 * std::norm(p.epsilon), g.g1 * g.g1 * photons, g.g1 * g.g2};
}

FieldState<Real> zero_field(Index n_max) { return {VectorXc::Zero(n_max)}; }

}  // namespace

void InteractionParams::validate() const {
  if (!std::isfinite(epsilon.real()) || !std::isfinite(epsilon.imag()))
    throw InvalidInput("interaction: non-finite epsilon");
  if (!(theta_int > 0) || !std::isfinite(theta_int))
    throw InvalidInput("interaction: theta_int must be positive");
  if (!std::isfinite(g_ratio)) throw InvalidInput("interaction: non-finite g_ratio");
  if (!(k_c > 0) || std::abs(k_q - 3 * k_c) > 1e-12 * k_c)
    throw InvalidInput("interaction: wavenumbers must satisfy k_q = 3 k_c");
  if (!(detuning_ratio > 0) || !std::isfinite(detuning_ratio))
    throw InvalidInput("interaction: detuning_ratio must be positive");
  if (coupling_time && (!(*coupling_time > 0) || !std::isfinite(*coupling_time)))
    throw InvalidInput("interaction: coupling_time must be positive");
}

CouplingPair coupling_at(Real x, const InteractionParams& params) {
  return {snapped_cos(params.k_q * x), params.g_ratio * snapped_cos(params.k_c * x)};
}

PropagatorTerms propagator_terms(Index m, const CouplingPair& g, const InteractionParams& params) {
  const Real delta = params.detuning_ratio;
  const Real t = params.resolved_coupling_time();
  const Real classical = g.g2 * g.g2 * std::norm(params.epsilon);

  PropagatorTerms out;
  out.Lambda = classical + g.g1 * g.g1 * static_cast<Real>(m + 1);
  out.Lambda_bar = classical + g.g1 * g.g1 * static_cast<Real>(m);
  out.mu = out.Lambda + delta * delta / 4;
  out.mu_bar = out.Lambda_bar + delta * delta / 4;
  const Real s = std::sqrt(out.mu);
  const Real s_bar = std::sqrt(out.mu_bar);
  out.R = std::cos(s * t);
  out.R_bar = std::cos(s_bar * t);
  out.S = std::sin(s * t) / s;
  out.S_bar = std::sin(s_bar * t) / s_bar;
  return out;
}

Complex phase_ratio(Real s, Real theta) {
  // (e^{iy} - 1)/y = i sinc(y) - sin(y/2) sinc(y/2), y = s theta
  const Real y = s * theta;
  return theta * Complex(-std::sin(y / 2) * sinc(y / 2), sinc(y));
}

Complex bracket_over_lambda(Real Lambda, Real detuning, Real time) {
  // With s = Delta/2 + delta:
  //   e^{-i Delta t/2}(cos st + i (Delta/2s) sin st) - 1
  //     = (e^{i delta t} - 1) - i (delta/s) sin(st) e^{-i Delta t/2}
  // and delta / Lambda = 1 / (s + Delta/2).
  const Real half = detuning / 2;
  const Real s = std::sqrt(Lambda + half * half);
  const Real inv = 1 / (s + half);
  const Real delta = Lambda * inv;
  const Complex tail = Complex(0, -std::sin(s * time) / s) * std::polar(Real(1), -half * time);
  return inv * (phase_ratio(delta, time) + tail);
}

DispersiveCoefficient dispersive_coefficient(Level level_in, Index m, Real x,
                                             const InteractionParams& params) {
  const DispersiveTerms d = dispersive_terms(level_in, m, x, params);
  const Complex f = phase_ratio(d.A + d.B, params.theta_int);
  if (level_in == Level::b) {
    return {1.0 + d.A * f,
            d.cross_amp * params.epsilon * std::sqrt(static_cast<Real>(m + 1)) * f};
  }
  return {1.0 + d.B * f,
          d.cross_amp * std::conj(params.epsilon) * std::sqrt(static_cast<Real>(m)) * f};
}

Real effective_hamiltonian_phase(Index m, Level level, Real x, const InteractionParams& params) {
  const DispersiveTerms d = dispersive_terms(level, m, x, params);
  return (d.A + d.B) * params.theta_int;
}

ExactElements exact_elements(Level level_in, Index m, const CouplingPair& g,
                             const InteractionParams& params) {
  const Real delta = params.detuning_ratio;
  const Real t = params.resolved_coupling_time();
  const Real classical = g.g2 * g.g2 * std::norm(params.epsilon);

  if (level_in == Level::b) {
    // U_bb and U_cb act through functions of a a^dag = m + 1
    const Real photons = static_cast<Real>(m + 1);
    const Real Lambda = classical + g.g1 * g.g1 * photons;
    const Complex q = bracket_over_lambda(Lambda, delta, t);
    const Real mu = Lambda + delta * delta / 4;
    const Real sn = std::sin(std::sqrt(mu) * t);
    return {1.0 + classical * q, g.g1 * g.g2 * params.epsilon * std::sqrt(photons) * q,
            classical * sn * sn / mu};
  }
  // U_cc uses a^dag a = m; U_bc acts after a, where a a^dag on |m-1> is again m
  const Real photons = static_cast<Real>(m);
  const Real Lambda = classical + g.g1 * g.g1 * photons;
  const Complex q = bracket_over_lambda(Lambda, delta, t);
  const Real mu = Lambda + delta * delta / 4;
  const Real sn = std::sin(std::sqrt(mu) * t);
  return {1.0 + g.g1 * g.g1 * photons * q,
          g.g1 * g.g2 * std::conj(params.epsilon) * std::sqrt(photons) * q,
          g.g1 * g.g1 * photons * sn * sn / mu};
}

namespace {

// Shared assembly for both rows: coefficient(m) returns (same, cross, leak).
template <typename Coefficients>
RowResult assemble_row(Level level_in, const FieldState<Real>& field_in, Real tail_tolerance,
                       Coefficients&& coefficient) {
  const Index n = field_in.n_max();
  const Level other = level_in == Level::b ? Level::c : Level::b;
  const Index shift = level_in == Level::b ? 1 : -1;

  FieldState<Real> same = zero_field(n);
  FieldState<Real> cross = zero_field(n);
  RowResult out;
  bool any_cross = false;

  for (Index m = 0; m < n; ++m) {
    const Complex c = field_in.amps[m];
    const auto [u_same, u_cross, leak] = coefficient(m);
    same.amps[m] = u_same * c;
    out.leak += leak * std::norm(c);
    if (u_cross == Complex(0, 0)) continue;
    any_cross = true;
    const Index target = m + shift;
    const Complex moved = u_cross * c;
    if (target < 0) continue;  // only reached when m = 0 for level c, where sqrt(m) = 0
    if (target >= n) {
      out.truncation_loss += std::norm(moved);
    } else {
      cross.amps[target] = moved;
    }
  }

  if (out.truncation_loss > tail_tolerance)
    throw TruncationError("interaction pushed weight " + std::to_string(out.truncation_loss) +
                          " above the Fock truncation");

  out.branches.push_back({level_in, std::move(same)});
  if (any_cross) out.branches.push_back({other, std::move(cross)});
  return out;
}

}  // namespace

RowResult dispersive_row(Level level_in, const FieldState<Real>& field_in, Real x,
                         const InteractionParams& params, Real tail_tolerance) {
  params.validate();
  return assemble_row(level_in, field_in, tail_tolerance, [&](Index m) {
    const DispersiveCoefficient d = dispersive_coefficient(level_in, m, x, params);
    return ExactElements{d.same, d.cross, 0};
  });
}

RowResult exact_row(Level level_in, const FieldState<Real>& field_in, Real x,
                    const InteractionParams& params, Real tail_tolerance) {
  params.validate();
  const CouplingPair g = coupling_at(x, params);
  return assemble_row(level_in, field_in, tail_tolerance,
                      [&](Index m) { return exact_elements(level_in, m, g, params); });
}

}  // namespace dsim
