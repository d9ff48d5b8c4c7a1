#pragma once

// Experiment configuration: a JSON document whose keys mirror the fields below.
// Unknown keys are rejected.
//
//   {
//     "stage": 2,
//     "case": "V1"                      // or {"c_up": .., "c_down": .., "phi": ..}
//     "alpha": 2.8284271247461903,      // complex values: number or [re, im]
//     "epsilon": 0,
//     "theta_int": 3.141592653589793,
//     "mode": "dispersive",             // or "exact"
//     "kick": "slit",                   // or "resolved"
//     "readout": "trace",               // or {"theta": .., "chi": .. | "most-probable"}
//     "t_prime": 3,
//     "extra_t_primes": [1, 2],
//     "qgrid": false,
//     "quadrature_pdf_theta": null,
//     "numeric": { "n_max": 96, "x_min": .., "x_max": .., "points": 65536, ... }
//   }

#include <optional>
#include <string>
#include <vector>

#include "dsim/duality.hpp"
#include "dsim/evolution.hpp"
#include "dsim/interferometer.hpp"

#include <json.hpp>

namespace dsim {

struct ReadoutSpec {
  enum class Kind { trace, quadrature };
  Kind kind = Kind::trace;
  Real theta = 0;
  std::optional<Real> chi;  ///< empty: use the most probable outcome

  bool operator==(const ReadoutSpec&) const = default;
};

struct NumericSpec {
  Index n_max = 96;
  GridSpec grid{};
  Real sigma = 0.05;
  Real tail_tolerance = 1e-12;
  Real detuning_ratio = 200;
  std::optional<Real> coupling_time;
  Real g_ratio = 1;
  Real visibility_half_width = 4;
  Real qgrid_extent = 7;
  Index qgrid_samples = 141;
  Real norm_tolerance = 1e-12;
  Real purity_tolerance = 1e-10;

  bool operator==(const NumericSpec& o) const {
    return n_max == o.n_max && grid.x_min == o.grid.x_min && grid.x_max == o.grid.x_max &&
           grid.points == o.grid.points && sigma == o.sigma &&
           tail_tolerance == o.tail_tolerance && detuning_ratio == o.detuning_ratio &&
           coupling_time == o.coupling_time && g_ratio == o.g_ratio &&
           visibility_half_width == o.visibility_half_width && qgrid_extent == o.qgrid_extent &&
           qgrid_samples == o.qgrid_samples && norm_tolerance == o.norm_tolerance &&
           purity_tolerance == o.purity_tolerance;
  }
};

struct ExperimentConfig {
  int stage = 1;
  std::optional<SphereCaseName> named_case = SphereCaseName::V1;
  PreparationParams prep{};  ///< resolved from named_case when that is set
  Complex alpha{std::sqrt(8.0), 0};
  Complex epsilon{0, 0};
  Real theta_int = kPi;
  InteractionMode mode = InteractionMode::dispersive;
  KickModel kick = KickModel::slit_point;
  ReadoutSpec readout{};
  Real t_prime = 3;
  std::vector<Real> extra_t_primes;
  bool qgrid = false;
  std::optional<Real> quadrature_pdf_theta;
  NumericSpec numeric{};

  /// Resolves the named case into `prep` and applies the stage rules
  /// (stage 2 forces epsilon = 0). Throws ConfigError on invalid values.
  void normalize();

  void set_case(SphereCaseName name);
  void set_case(const PreparationParams& explicit_prep);

  InteractionParams interaction() const;
  SlitGeometry geometry() const;

  bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Applies the keys present in `overrides` on top of `base` (same schema).
ExperimentConfig merge_config(const ExperimentConfig& base, const nlohmann::json& overrides);

}  // namespace dsim
