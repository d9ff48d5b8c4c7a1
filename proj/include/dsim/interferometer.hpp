#pragma once

// Position (x) ⊗ internal level {b, c} ⊗ Fock (m) state of the atom behind the
// double slit, the position-dependent interaction with the cavity fields, and the
// two readouts of the field: partial trace and quadrature projection.
//
// Position amplitudes are grid-sampled and normalised as sum_i |psi_i|^2 = 1
// (i.e. they already carry sqrt(dx)).

#include <vector>

#include "dsim/common.hpp"
#include "dsim/evolution.hpp"
#include "dsim/fock.hpp"

namespace dsim {

/// Slit centres and Gaussian width, in units of 1/k'. The top slit faces the common
/// antinode (x = 0); the bottom one the common node a quarter classical wavelength away.
struct SlitGeometry {
  Real x_top = 0;
  Real x_bottom = kPi / 2;
  Real sigma = 0.05;

  Real midpoint() const { return (x_top + x_bottom) / 2; }
  void validate() const;
};

/// c_up |top>(cos phi |c> + sin phi |b>) + c_down |bottom>|c>.
struct PreparationParams {
  Complex c_up{1 / std::numbers::sqrt2, 0};
  Complex c_down{1 / std::numbers::sqrt2, 0};
  Real phi = 0;

  void validate() const;
};

/// Periodic grid on [x_min, x_max) with `points` samples. The default is centred on
/// the slit midpoint and wide enough for the t' = 3 spreading of sigma = 0.05 packets.
struct GridSpec {
  Real x_min = kPi / 4 - 400;
  Real x_max = kPi / 4 + 400;
  Index points = 65536;
};

struct PositionGrid {
  Real x_min = 0;
  Real dx = 1;
  Index points = 0;

  static PositionGrid from(const GridSpec& spec);
  Real x(Index i) const { return x_min + dx * static_cast<Real>(i); }
  Real x_max() const { return x(points); }
  bool operator==(const PositionGrid&) const = default;
};

enum class InteractionMode { dispersive, exact };

/// Where the coupling is evaluated for an amplitude at grid point x.
///  - slit_point: at the centre of the slit whose half-line contains x (path model).
///  - position_resolved: at x itself, so the kick varies across each packet.
enum class KickModel { slit_point, position_resolved };

/// Amplitudes are stored only over a window of the grid that holds the slit packets
/// (zero elsewhere). Rows are level-major: row = level * window + (i - offset).
struct JointState {
  PositionGrid grid;
  SlitGeometry geometry;
  Index offset = 0;
  Index window = 0;
  MatrixXc amps;  ///< (kLevels * window) x n_max
  Real leak = 0;
  Real truncation_loss = 0;

  Index n_max() const { return amps.cols(); }
  Index row(Level s, Index local) const { return level_index(s) * window + local; }
  Real norm2() const { return amps.squaredNorm(); }

  /// Fock vector at a window-local grid point and level.
  FieldState<Real> field_at(Index local, Level s) const {
    return {amps.row(row(s, local)).transpose()};
  }
};

/// Relative eigenvalue floor for dropping density components. Eigenvalues of the
/// Gram matrix carry round-off of order n_max * eps, so anything lower is noise.
inline constexpr Real kRankCutoff = 1e-13;

/// rho(i,s; j,s') over the full grid, held in factored form rho = F F^dagger.
/// Rows of F are level-major (row = s * points + i); each column is one
/// (unnormalised) pure component. Hermiticity and positivity hold by construction.
struct AtomDensity {
  PositionGrid grid;
  MatrixXc factors;

  Index dimension() const { return kLevels * grid.points; }
  Index rank() const { return factors.cols(); }
  Complex element(Index i, Level s, Index j, Level sp) const;
  Real trace() const { return factors.squaredNorm(); }
  Real purity() const;
  /// Diagonal sum_s rho(i,s; i,s) per grid point.
  VectorXr position_diagonal() const;
  /// Dense (2N x 2N) matrix. Only for small test grids.
  MatrixXc dense() const;
  void normalize();
  /// Replace F by an orthogonal factorisation with eigenvalues below
  /// `relative_cutoff * largest` dropped.
  void compress(Real relative_cutoff = kRankCutoff);
};

struct QuadratureReadout {
  AtomDensity atom;  ///< renormalised pure projector
  Real density = 0;  ///< probability density of the outcome chi
};

/// Throws ConfigError when the grid misses either slit by less than 6 sigma or
/// cannot resolve the packet's momentum spread.
JointState build_initial(const PreparationParams& prep, const SlitGeometry& geom, Complex alpha,
                         const GridSpec& grid, Index n_max);

JointState interact(const JointState& state, const InteractionParams& params,
                    InteractionMode mode = InteractionMode::dispersive,
                    KickModel kick = KickModel::slit_point, Real tail_tolerance = 1e-12);

struct TraceOptions {
  bool compress = true;
};

AtomDensity trace_out_field(const JointState& state, TraceOptions options = {});

QuadratureReadout condition_on_quadrature(const JointState& state,
                                          const QuadratureSpec<Real>& spec);

VectorXr quadrature_pdf(const JointState& state, Real theta, const VectorXr& chi_samples);

/// Field density after tracing position and level, renormalised to unit trace.
MatrixXc field_density(const JointState& state);

/// Outcome chi in [lo, hi] maximising the quadrature pdf: scan at `step`, then
/// golden-section refinement inside the best bracket. Exact ties keep the lowest chi.
Real most_probable_chi(const JointState& state, Real theta, Real lo = -7, Real hi = 7,
                       Real step = 0.05);

/// Position probability on either side of the slit midpoint.
struct PathWeights {
  Real top = 0;
  Real bottom = 0;
};

PathWeights path_weights(const AtomDensity& rho, const SlitGeometry& geom);

}  // namespace dsim
