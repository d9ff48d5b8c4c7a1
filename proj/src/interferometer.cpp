#include "dsim/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace dsim {

namespace {

constexpr Real kWindowHalfWidthSigmas = 20;  // exp(-100) amplitude at the window edge
constexpr Real kSlitMarginSigmas = 6;

// Orthogonal factor G with G G^dagger = F F^dagger, dropping negligible components.
MatrixXc orthogonal_factor(const MatrixXc& f, Real relative_cutoff) {
  if (f.cols() == 0) return f;
  const MatrixXc gram = f.adjoint() * f;
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(gram);
  const VectorXr& w = eig.eigenvalues();  // ascending
  const Real top = w.maxCoeff();
  if (!(top > 0)) return MatrixXc(f.rows(), 0);
  std::vector<Index> kept;
  for (Index k = w.size() - 1; k >= 0; --k)
    if (w[k] > relative_cutoff * top) kept.push_back(k);
  MatrixXc v(gram.rows(), static_cast<Index>(kept.size()));
  for (Index j = 0; j < v.cols(); ++j) v.col(j) = eig.eigenvectors().col(kept[j]);
  return f * v;
}

AtomDensity embed(const JointState& state, const MatrixXc& window_factors) {
  AtomDensity rho;
  rho.grid = state.grid;
  const Index n = state.grid.points;
  rho.factors = MatrixXc::Zero(kLevels * n, window_factors.cols());
  for (int s = 0; s < kLevels; ++s)
    rho.factors.block(s * n + state.offset, 0, state.window, window_factors.cols()) =
        window_factors.block(s * state.window, 0, state.window, window_factors.cols());
  return rho;
}

Real slit_point_for(Real x, const SlitGeometry& geom) {
  const bool top_side = (x < geom.midpoint()) == (geom.x_top < geom.x_bottom);
  return top_side ? geom.x_top : geom.x_bottom;
}

Real pdf_at(const JointState& state, Real theta, Real chi) {
  const VectorXc b = quadrature_amplitudes(QuadratureSpec<Real>(theta, chi), state.n_max());
  return (state.amps * b.conjugate()).squaredNorm();
}

}  // namespace

void SlitGeometry::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ConfigError("slit width must be positive");
  if (!std::isfinite(x_top) || !std::isfinite(x_bottom) || x_top == x_bottom)
    throw ConfigError("slit centres must be distinct and finite");
}

void PreparationParams::validate() const {
  const Real total = std::norm(c_up) + std::norm(c_down);
  if (std::abs(total - 1) > 1e-12)
    throw ConfigError("path amplitudes must satisfy |c_up|^2 + |c_down|^2 = 1");
  if (!std::isfinite(phi)) throw ConfigError("phi must be finite");
}

PositionGrid PositionGrid::from(const GridSpec& spec) {
  if (spec.points < 16) throw ConfigError("grid needs at least 16 points");
  if (!(spec.x_max > spec.x_min) || !std::isfinite(spec.x_min) || !std::isfinite(spec.x_max))
    throw ConfigError("grid bounds must satisfy x_min < x_max");
  return {spec.x_min, (spec.x_max - spec.x_min) / static_cast<Real>(spec.points), spec.points};
}

Complex AtomDensity::element(Index i, Level s, Index j, Level sp) const {
  const Index n = grid.points;
  return factors.row(level_index(s) * n + i).dot(factors.row(level_index(sp) * n + j));
}

Real AtomDensity::purity() const {
  const Real tr = trace();
  if (!(tr > 0)) return 0;
  return (factors.adjoint() * factors).squaredNorm() / (tr * tr);
}

VectorXr AtomDensity::position_diagonal() const {
  const Index n = grid.points;
  VectorXr d = VectorXr::Zero(n);
  for (int s = 0; s < kLevels; ++s) d += factors.middleRows(s * n, n).rowwise().squaredNorm();
  return d;
}

MatrixXc AtomDensity::dense() const { return factors * factors.adjoint(); }

void AtomDensity::normalize() {
  const Real tr = trace();
  if (!(tr > 0)) throw InvalidInput("atom density has zero trace");
  factors /= std::sqrt(tr);
}

void AtomDensity::compress(Real relative_cutoff) {
  factors = orthogonal_factor(factors, relative_cutoff);
}

JointState build_initial(const PreparationParams& prep, const SlitGeometry& geom, Complex alpha,
                         const GridSpec& grid_spec, Index n_max) {
  prep.validate();
  geom.validate();
  const PositionGrid grid = PositionGrid::from(grid_spec);

  const Real lo = std::min(geom.x_top, geom.x_bottom);
  const Real hi = std::max(geom.x_top, geom.x_bottom);
  const Real margin = kSlitMarginSigmas * geom.sigma;
  if (lo - margin < grid.x_min || hi + margin > grid.x_max())
    throw ConfigError("grid does not cover both slits with a 6 sigma margin");
  // momentum cutoff pi/dx must reach 10 momentum widths 1/(2 sigma)
  if (kPi / grid.dx < 10 / (2 * geom.sigma))
    throw ConfigError("grid spacing too coarse for the slit width");

  JointState state;
  state.grid = grid;
  state.geometry = geom;
  const Real reach = kWindowHalfWidthSigmas * geom.sigma;
  const Index first = std::max<Index>(0, static_cast<Index>(std::ceil((lo - reach - grid.x_min) / grid.dx)));
  const Index last = std::min<Index>(grid.points - 1,
                                     static_cast<Index>(std::floor((hi + reach - grid.x_min) / grid.dx)));
  state.offset = first;
  state.window = last - first + 1;

  auto packet = [&](Real centre) {
    VectorXr g(state.window);
    for (Index w = 0; w < state.window; ++w) {
      const Real d = grid.x(first + w) - centre;
      g[w] = std::exp(-d * d / (4 * geom.sigma * geom.sigma));
    }
    return VectorXr(g / g.norm());
  };
  const VectorXr top = packet(geom.x_top);
  const VectorXr bottom = packet(geom.x_bottom);

  const VectorXc path_c =
      (prep.c_up * std::cos(prep.phi)) * top.cast<Complex>() + prep.c_down * bottom.cast<Complex>();
  const VectorXc path_b = (prep.c_up * std::sin(prep.phi)) * top.cast<Complex>();
  const VectorXc field = coherent_state(alpha, n_max).amps;

  state.amps.resize(kLevels * state.window, n_max);
  state.amps.middleRows(level_index(Level::b) * state.window, state.window) =
      path_b * field.transpose();
  state.amps.middleRows(level_index(Level::c) * state.window, state.window) =
      path_c * field.transpose();
  return state;
}

JointState interact(const JointState& state, const InteractionParams& params, InteractionMode mode,
                    KickModel kick, Real tail_tolerance) {
  params.validate();
  JointState out = state;
  out.amps.setZero();
  const Real unlimited = std::numeric_limits<Real>::infinity();

  for (Index w = 0; w < state.window; ++w) {
    const Real x = state.grid.x(state.offset + w);
    const Real x_eval = kick == KickModel::slit_point ? slit_point_for(x, state.geometry) : x;
    for (Level s : {Level::b, Level::c}) {
      const Index r = state.row(s, w);
      if (exactly_zero(state.amps.row(r))) continue;
      const FieldState<Real> in = state.field_at(w, s);
      const RowResult row = mode == InteractionMode::dispersive
                                ? dispersive_row(s, in, x_eval, params, unlimited)
                                : exact_row(s, in, x_eval, params, unlimited);
      for (const LevelBranch& br : row.branches)
        out.amps.row(out.row(br.level, w)) += br.field.amps.transpose();
      out.leak += row.leak;
      out.truncation_loss += row.truncation_loss;
    }
  }
  if (out.truncation_loss - state.truncation_loss > tail_tolerance)
    throw TruncationError("interaction pushed weight " + std::to_string(out.truncation_loss) +
                          " above the Fock truncation");
  return out;
}

AtomDensity trace_out_field(const JointState& state, TraceOptions options) {
  if (!(state.norm2() > 0)) throw InvalidInput("trace_out_field: zero-norm state");
  AtomDensity rho =
      embed(state, options.compress ? orthogonal_factor(state.amps, kRankCutoff) : state.amps);
  rho.normalize();
  return rho;
}

QuadratureReadout condition_on_quadrature(const JointState& state,
                                          const QuadratureSpec<Real>& spec) {
  const VectorXc b = quadrature_amplitudes(spec, state.n_max());
  const VectorXc a = state.amps * b.conjugate();
  const Real density = a.squaredNorm();
  if (!(density >= 1e-300))
    throw ImpossibleOutcome("quadrature outcome chi = " + std::to_string(spec.chi) +
                            " has vanishing probability density");
  QuadratureReadout out{embed(state, a / std::sqrt(density)), density};
  return out;
}

VectorXr quadrature_pdf(const JointState& state, Real theta, const VectorXr& chi_samples) {
  MatrixXc basis(state.n_max(), chi_samples.size());
  for (Index k = 0; k < chi_samples.size(); ++k)
    basis.col(k) = quadrature_amplitudes(QuadratureSpec<Real>(theta, chi_samples[k]), state.n_max());
  return (state.amps * basis.conjugate()).colwise().squaredNorm().transpose();
}

MatrixXc field_density(const JointState& state) {
  MatrixXc rho = state.amps.transpose() * state.amps.conjugate();
  const Real tr = rho.trace().real();
  if (!(tr > 0)) throw InvalidInput("field_density: zero-norm state");
  return rho / tr;
}

Real most_probable_chi(const JointState& state, Real theta, Real lo, Real hi, Real step) {
  if (!(hi > lo) || !(step > 0)) throw InvalidInput("most_probable_chi: bad search range");
  const Index samples = static_cast<Index>(std::floor((hi - lo) / step)) + 1;
  VectorXr chis(samples);
  for (Index k = 0; k < samples; ++k) chis[k] = lo + step * static_cast<Real>(k);
  const VectorXr pdf = quadrature_pdf(state, theta, chis);

  Index best = 0;
  for (Index k = 1; k < samples; ++k)
    if (pdf[k] > pdf[best]) best = k;

  Real a = chis[std::max<Index>(0, best - 1)];
  Real b = chis[std::min<Index>(samples - 1, best + 1)];
  const Real inv_phi = (std::sqrt(Real(5)) - 1) / 2;
  Real c = b - inv_phi * (b - a);
  Real d = a + inv_phi * (b - a);
  Real fc = pdf_at(state, theta, c);
  Real fd = pdf_at(state, theta, d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = pdf_at(state, theta, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = pdf_at(state, theta, d);
    }
  }
  const Real refined = (a + b) / 2;
  return pdf_at(state, theta, refined) >= pdf[best] ? refined : chis[best];
}

PathWeights path_weights(const AtomDensity& rho, const SlitGeometry& geom) {
  const VectorXr d = rho.position_diagonal();
  PathWeights w;
  for (Index i = 0; i < d.size(); ++i) {
    const bool top_side = slit_point_for(rho.grid.x(i), geom) == geom.x_top;
    (top_side ? w.top : w.bottom) += d[i];
  }
  return w;
}

}  // namespace dsim
