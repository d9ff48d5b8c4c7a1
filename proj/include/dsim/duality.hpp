#pragma once

// Preparation-side complementarity: visibility V0, distinguishability D0 and
// path/internal-state concurrence C0 of the two-path state
//   c_up |top>|Phi_up> + c_down |bottom>|Phi_down>,  gamma = <Phi_up|Phi_down>.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "dsim/common.hpp"

namespace dsim {

template <typename Scalar = Real>
struct DualityMetrics {
  Scalar V0 = 0;
  Scalar D0 = 0;
  Scalar C0 = 0;
  Scalar residual = 0;  ///< V0^2 + D0^2 + C0^2 - 1
};

template <typename Scalar>
DualityMetrics<Scalar> metrics(std::complex<Scalar> c_up, std::complex<Scalar> c_down,
                               std::complex<Scalar> gamma) {
  const Scalar p_up = std::norm(c_up);
  const Scalar p_down = std::norm(c_down);
  if (std::abs(p_up + p_down - 1) > Scalar(1e-12))
    throw InvalidInput("metrics: path amplitudes are not normalised");
  const Scalar g2 = std::norm(gamma);
  if (g2 > 1 + Scalar(1e-12)) throw InvalidInput("metrics: |gamma| > 1");

  const Scalar cross = 2 * std::abs(c_up) * std::abs(c_down);
  DualityMetrics<Scalar> out;
  out.D0 = std::abs(p_up - p_down);
  out.V0 = cross * std::abs(gamma);
  out.C0 = cross * std::sqrt(std::max(Scalar(0), 1 - g2));
  out.residual = out.V0 * out.V0 + out.D0 * out.D0 + out.C0 * out.C0 - 1;
  return out;
}

/// gamma = <Phi_up|Phi_down> for Phi_up = cos(phi)|c> + sin(phi)|b>, Phi_down = |c>.
template <typename Scalar>
Scalar gamma_of_phi(Scalar phi) {
  return std::cos(phi);
}

enum class SphereCaseName { V1, VD, D1, DC, C1, CV, VDC };

inline constexpr std::array<SphereCaseName, 7> kAllSphereCases{
    SphereCaseName::V1, SphereCaseName::VD, SphereCaseName::D1, SphereCaseName::DC,
    SphereCaseName::C1, SphereCaseName::CV, SphereCaseName::VDC};

inline std::string_view to_string(SphereCaseName n) {
  switch (n) {
    case SphereCaseName::V1: return "V1";
    case SphereCaseName::VD: return "VD";
    case SphereCaseName::D1: return "D1";
    case SphereCaseName::DC: return "DC";
    case SphereCaseName::C1: return "C1";
    case SphereCaseName::CV: return "CV";
    case SphereCaseName::VDC: return "VDC";
  }
  return "?";
}

inline SphereCaseName parse_sphere_case(std::string_view name) {
  for (SphereCaseName n : kAllSphereCases)
    if (to_string(n) == name) return n;
  throw InvalidInput("unknown sphere case '" + std::string(name) + "'");
}

/// Preparation with real non-negative path amplitudes.
template <typename Scalar = Real>
struct SphereCase {
  SphereCaseName name;
  Scalar c_up;
  Scalar c_down;
  Scalar phi;
};

/// The seven marked points of the V0-D0-C0 sphere. Intermediate points solve their
/// defining equalities: VD needs cos 2u = sin 2u (u = pi/8) with gamma = 1; DC the
/// same u with gamma = 0; CV needs |gamma| = sqrt(1 - gamma^2) (phi = pi/4); VDC
/// needs D0 = 1/sqrt(3), i.e. cos 2u = 1/sqrt(3), together with phi = pi/4.
template <typename Scalar = Real>
SphereCase<Scalar> sphere_case(SphereCaseName name) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar h = 1 / std::sqrt(Scalar(2));
  switch (name) {
    case SphereCaseName::V1: return {name, h, h, 0};
    case SphereCaseName::D1: return {name, 1, 0, 0};
    case SphereCaseName::C1: return {name, h, h, pi / 2};
    case SphereCaseName::VD: return {name, std::cos(pi / 8), std::sin(pi / 8), 0};
    case SphereCaseName::DC: return {name, std::cos(pi / 8), std::sin(pi / 8), pi / 2};
    case SphereCaseName::CV: return {name, h, h, pi / 4};
    case SphereCaseName::VDC: {
      const Scalar u = std::acos(1 / std::sqrt(Scalar(3))) / 2;
      return {name, std::cos(u), std::sin(u), pi / 4};
    }
  }
  throw InvalidInput("unknown sphere case");
}

template <typename Scalar>
DualityMetrics<Scalar> metrics(const SphereCase<Scalar>& c) {
  return metrics<Scalar>(c.c_up, c.c_down, gamma_of_phi(c.phi));
}

}  // namespace dsim
