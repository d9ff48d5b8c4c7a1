#pragma once

// Atom-field interaction in the three-level Lambda scheme. The quantum field
// drives |a>-|c>, the classical field drives |a>-|b>; both share the detuning
// Delta. Positions are in units of 1/k' (classical-field wavenumber), so the
// quantum field has wavenumber 3 and the common node sits at x = pi/2.

#include <optional>
#include <vector>

#include "dsim/common.hpp"
#include "dsim/fock.hpp"

namespace dsim {

struct InteractionParams {
  Complex epsilon{0, 0};
  Real theta_int = kPi;  ///< dispersive phase g^2 t / Delta
  Real g_ratio = 1;      ///< g' / g
  Real k_q = 3;
  Real k_c = 1;
  Real detuning_ratio = 200;            ///< Delta / g, exact elements only
  std::optional<Real> coupling_time{};  ///< g t; defaults to theta_int * detuning_ratio

  Real resolved_coupling_time() const {
    return coupling_time ? *coupling_time : theta_int * detuning_ratio;
  }

  /// Throws InvalidInput when the parameter set breaks the model's invariants.
  void validate() const;
};

/// Couplings in units of g: g1 = cos(k_q x), g2 = g_ratio cos(k_c x).
struct CouplingPair {
  Real g1 = 0;
  Real g2 = 0;
};

CouplingPair coupling_at(Real x, const InteractionParams& params);

/// Scalar values of the closed-form propagator functions on a Fock index m, in units of g.
/// The unbarred quantities use the a a^dag ordering (m + 1), the barred ones a^dag a (m).
struct PropagatorTerms {
  Real Lambda = 0, Lambda_bar = 0;
  Real mu = 0, mu_bar = 0;
  Real R = 0, R_bar = 0;
  Real S = 0, S_bar = 0;
};

PropagatorTerms propagator_terms(Index m, const CouplingPair& g, const InteractionParams& params);

struct LevelBranch {
  Level level;
  FieldState<Real> field;
};

/// Output of one row of the evolution operator applied to a field.
struct RowResult {
  std::vector<LevelBranch> branches;
  Real leak = 0;              ///< weight escaped to |a> (exact elements only)
  Real truncation_loss = 0;   ///< weight shifted above n_max - 1 and dropped
};

/// Per-Fock-index dispersive coefficients, as multipliers of the input amplitude c_m.
/// `same` maps |m> to |m> in the input level; `cross` maps |m> to |m +- 1> in the
/// other level (+1 for b -> c, -1 for c -> b).
struct DispersiveCoefficient {
  Complex same;
  Complex cross;
};

DispersiveCoefficient dispersive_coefficient(Level level_in, Index m, Real x,
                                             const InteractionParams& params);

/// Accumulated dispersive phase (A + B) Theta for Fock index m, where
/// A = g_ratio^2 cos^2(k_c x)|eps|^2 and B = cos^2(k_q x) (m + 1) for b, m for c.
Real effective_hamiltonian_phase(Index m, Level level, Real x, const InteractionParams& params);

/// Large-detuning map of one internal level: same = 1 + A f (b) or 1 + B f (c) and
/// cross proportional to f, with f = (e^{i(A+B)Theta} - 1)/(A+B). At a common node (A + B = 0) the map is the identity and only the input
/// level's branch is returned; with eps = 0 the cross branch is identically zero and
/// is omitted as well.
///
/// Throws TruncationError when the weight pushed past the top Fock level exceeds
/// `tail_tolerance`.
RowResult dispersive_row(Level level_in, const FieldState<Real>& field_in, Real x,
                         const InteractionParams& params, Real tail_tolerance = 1e-12);

/// Same map with the finite-detuning propagator elements U_bb, U_cb, U_cc, U_bc.
/// The Lambda -> 0 limit is handled analytically (see bracket_over_lambda).
RowResult exact_row(Level level_in, const FieldState<Real>& field_in, Real x,
                    const InteractionParams& params, Real tail_tolerance = 1e-12);

/// Per-index exact elements (same-level, cross-level) and the |a> population for
/// unit input on |m>. Exposed for tests.
struct ExactElements {
  Complex same;
  Complex cross;
  Real leak;
};

ExactElements exact_elements(Level level_in, Index m, const CouplingPair& g,
                             const InteractionParams& params);

/// [e^{-i Delta t/2}(cos(s t) + i (Delta/2) sin(s t)/s) - 1] / Lambda with
/// s = sqrt(Lambda + Delta^2/4), evaluated without cancellation. Finite at Lambda = 0.
Complex bracket_over_lambda(Real Lambda, Real detuning, Real time);

/// (e^{i s Theta} - 1) / s, finite at s = 0 (value i Theta).
Complex phase_ratio(Real s, Real theta);

}  // namespace dsim
