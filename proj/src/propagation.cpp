#include "dsim/propagation.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace dsim {

namespace {

VectorXr angular_wavenumbers(const PositionGrid& grid) {
  const Index n = grid.points;
  VectorXr k(n);
  const Real dk = 2 * kPi / (static_cast<Real>(n) * grid.dx);
  for (Index j = 0; j < n; ++j) k[j] = dk * static_cast<Real>(j < (n + 1) / 2 ? j : j - n);
  return k;
}

}  // namespace

Real boundary_probability(const AtomDensity& rho) {
  const VectorXr d = rho.position_diagonal();
  const Index band = std::max<Index>(1, d.size() / 16);
  const Real total = d.sum();
  if (!(total > 0)) return 0;
  return (d.head(band).sum() + d.tail(band).sum()) / total;
}

AtomDensity free_propagate(const AtomDensity& rho, const FlightSpec& flight) {
  if (!(flight.t_prime >= 0) || !std::isfinite(flight.t_prime))
    throw InvalidInput("free_propagate: t' must be finite and non-negative");
  AtomDensity out = rho;
  if (flight.t_prime == 0) return out;

  const Index n = rho.grid.points;
  const VectorXr k = angular_wavenumbers(rho.grid);
  VectorXc kernel(n);
  for (Index j = 0; j < n; ++j)
    kernel[j] = std::polar(Real(1), -kKineticScale * k[j] * k[j] * flight.t_prime);

  Eigen::FFT<Real> fft;
  std::vector<Complex> in(static_cast<size_t>(n));
  std::vector<Complex> spec(static_cast<size_t>(n));
  for (Index col = 0; col < out.factors.cols(); ++col) {
    for (int s = 0; s < kLevels; ++s) {
      auto block = out.factors.col(col).segment(s * n, n);
      if (exactly_zero(block)) continue;
      for (Index j = 0; j < n; ++j) in[j] = block[j];
      fft.fwd(spec, in);
      for (Index j = 0; j < n; ++j) spec[j] *= kernel[j];
      fft.inv(in, spec);  // Eigen's inverse includes the 1/n factor
      for (Index j = 0; j < n; ++j) block[j] = in[j];
    }
  }

  const Real edge = boundary_probability(out);
  if (edge > kAliasingThreshold)
    throw GridError("propagated state reaches the grid boundary (edge probability " +
                    std::to_string(edge) + "); enlarge the grid");
  return out;
}

ScreenPattern screen_distribution(const AtomDensity& rho) {
  const Real scale = 1 / (2 * kPi);
  ScreenPattern p;
  const Index n = rho.grid.points;
  p.x_axis.resize(n);
  for (Index i = 0; i < n; ++i) p.x_axis[i] = rho.grid.x(i) * scale;
  const VectorXr d = rho.position_diagonal();
  const Real total = d.sum();
  if (!(total > 0)) throw InvalidInput("screen_distribution: zero-trace density");
  p.intensity = d / (total * rho.grid.dx * scale);
  return p;
}

Visibility fringe_visibility(const ScreenPattern& pattern, VisibilityWindow window) {
  const Real lo = window.centre - window.half_width;
  const Real hi = window.centre + window.half_width;
  std::vector<Index> idx;
  for (Index i = 0; i < pattern.x_axis.size(); ++i)
    if (pattern.x_axis[i] >= lo && pattern.x_axis[i] <= hi) idx.push_back(i);

  Visibility out;
  if (idx.size() < 3) return out;

  // Differences below the round-off floor of the peak count as flat.
  const Real floor = 1e-14 * pattern.intensity.maxCoeff();
  std::vector<Real> extrema;
  int last_sign = 0;
  for (size_t j = 1; j < idx.size(); ++j) {
    const Real diff = pattern.intensity[idx[j]] - pattern.intensity[idx[j - 1]];
    const int sign = diff > floor ? 1 : (diff < -floor ? -1 : 0);
    if (sign == 0) continue;
    // the extremum is the sample where the slope flipped
    if (last_sign != 0 && sign != last_sign) extrema.push_back(pattern.intensity[idx[j - 1]]);
    last_sign = sign;
  }
  out.extrema = static_cast<Index>(extrema.size());
  if (extrema.size() < 2) return out;

  Real acc = 0;
  for (size_t j = 0; j + 1 < extrema.size(); ++j) {
    const Real hi_v = std::max(extrema[j], extrema[j + 1]);
    const Real lo_v = std::min(extrema[j], extrema[j + 1]);
    acc += (hi_v - lo_v) / (hi_v + lo_v);
  }
  out.value = acc / static_cast<Real>(extrema.size() - 1);
  return out;
}

Real l2_distance(const ScreenPattern& p, const ScreenPattern& q) {
  if (p.x_axis.size() != q.x_axis.size() ||
      (p.x_axis.size() > 0 && std::abs(p.x_axis[0] - q.x_axis[0]) > 1e-12))
    throw InvalidInput("l2_distance: patterns live on different axes");
  return std::sqrt((p.intensity - q.intensity).squaredNorm() * p.dx());
}

Real mirror_asymmetry(const ScreenPattern& pattern, Real centre) {
  const Index n = pattern.x_axis.size();
  const Real pos = (centre - pattern.x_axis[0]) / pattern.dx();
  const Real twice = std::round(2 * pos);
  if (std::abs(2 * pos - twice) > 1e-6)
    throw InvalidInput("mirror_asymmetry: centre is not on the grid's half-step lattice");
  const Index sum = static_cast<Index>(twice);  // i + mirror(i)
  Real worst = 0;
  for (Index i = 0; i < n; ++i) {
    const Index j = sum - i;
    if (j < 0 || j >= n) continue;
    worst = std::max(worst, std::abs(pattern.intensity[i] - pattern.intensity[j]));
  }
  return worst / pattern.intensity.maxCoeff();
}

}  // namespace dsim
