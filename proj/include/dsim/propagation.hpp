#pragma once

// Free flight from the cavity exit to the screen and the observables read off the
// screen. Time t' is in units of 2m/(hbar k'^2) and x in 1/k', so the free
// Hamiltonian is p^2 with p = -i d/dx and a plane wave of wavenumber k picks up
// the phase k^2 t'.

#include <optional>

#include "dsim/common.hpp"
#include "dsim/interferometer.hpp"

namespace dsim {

/// Coefficient u in the spectral kernel exp(-i u k^2 t').
inline constexpr Real kKineticScale = 1;

struct FlightSpec {
  Real t_prime = 3;
};

/// Probability allowed in the outer sixteenth of the grid on either side before a
/// propagated state is treated as aliased.
inline constexpr Real kAliasingThreshold = 1e-6;

/// Propagates every level block of every factor with the free kernel.
/// Throws GridError if the result reaches the grid edges.
AtomDensity free_propagate(const AtomDensity& rho, const FlightSpec& flight);

/// Fraction of the position probability in the edge bands of the grid.
Real boundary_probability(const AtomDensity& rho);

/// Screen intensity over x' in units of lambda_CF (x' = x / 2pi), normalised so that
/// sum(intensity) * dx' = 1.
struct ScreenPattern {
  VectorXr x_axis;
  VectorXr intensity;

  Real dx() const { return x_axis.size() > 1 ? x_axis[1] - x_axis[0] : Real(1); }
};

ScreenPattern screen_distribution(const AtomDensity& rho);

/// Region of x' (lambda_CF units) used by the fringe estimator.
struct VisibilityWindow {
  Real centre = 0.125;  ///< slit midpoint pi/4 expressed in lambda_CF
  Real half_width = 4;  ///< covers ~2 fringe periods at t' = 3
};

/// Fringe contrast with a marker for "no fringes". `value` is empty when the window
/// holds fewer than two interior local extrema.
struct Visibility {
  std::optional<Real> value;
  Index extrema = 0;

  bool defined() const { return value.has_value(); }
};

/// (I_max - I_min) / (I_max + I_min) over each adjacent pair of interior extrema in
/// the window, averaged over pairs.
Visibility fringe_visibility(const ScreenPattern& pattern, VisibilityWindow window = {});

/// sqrt(sum (p - q)^2 dx') between two patterns on the same axis.
Real l2_distance(const ScreenPattern& p, const ScreenPattern& q);

/// max_j |I_j - I_mirror(j)| / max I for reflection about `centre` (lambda_CF units).
/// The centre must coincide with a grid point or a half-step between two.
Real mirror_asymmetry(const ScreenPattern& pattern, Real centre);

}  // namespace dsim
