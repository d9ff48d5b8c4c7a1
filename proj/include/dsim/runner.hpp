#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsim/config.hpp"
#include "dsim/duality.hpp"
#include "dsim/fock.hpp"
#include "dsim/interferometer.hpp"
#include "dsim/propagation.hpp"

#include <json.hpp>

namespace dsim {

struct RunDiagnostics {
  Real leak = 0;
  Real truncation_loss = 0;
  Real joint_norm = 0;        ///< norm^2 of the post-interaction joint state
  Real trace_drift = 0;       ///< |tr rho(t') - tr rho(0)|
  Real purity_before = 0;
  Real purity_drift = 0;
  Real boundary_probability = 0;
  Index density_rank = 0;
  std::optional<Real> chi_used;
  std::optional<Real> readout_density;
};

struct RunResult {
  ExperimentConfig config;
  ScreenPattern pattern;
  std::vector<std::pair<Real, ScreenPattern>> extra_patterns;
  DualityMetrics<Real> metrics;
  Visibility visibility;
  std::optional<QGrid<Real>> qgrid;
  std::optional<std::pair<VectorXr, VectorXr>> quadrature_pdf;  ///< (chi, density)
  RunDiagnostics diagnostics;
};

/// Builds the state, interacts (stage >= 2), reads out the field, flies to the screen
/// and evaluates the pattern. Throws ToleranceFailure when the propagation
/// invariants (trace, purity) drift beyond the configured tolerances.
RunResult run(const ExperimentConfig& config);

/// Atom density right before free flight, for callers that need more than the pattern.
AtomDensity prepare_atom_density(const ExperimentConfig& config, RunDiagnostics* diagnostics = nullptr);

JointState prepare_joint_state(const ExperimentConfig& config, RunDiagnostics* diagnostics = nullptr);

struct SweepPoint {
  Real epsilon = 0;
  QGrid<Real> qgrid;
  Real overlap_with_initial = 0;  ///< <alpha| rho_field |alpha>
};

/// Top-path-only preparation in level b (phi = pi/2) or c (phi = 0), one field
/// snapshot per epsilon. Stage and case in `base` are ignored.
std::vector<SweepPoint> epsilon_sweep(const ExperimentConfig& base, const std::vector<Real>& epsilons,
                                      Level level);

/// All seven sphere cases with shared numerics; results follow kAllSphereCases order.
std::vector<RunResult> sphere_suite(const ExperimentConfig& base, int stage,
                                    std::optional<Complex> alpha = std::nullopt,
                                    std::optional<Complex> epsilon = std::nullopt);

nlohmann::json metrics_json(const RunResult& result);
nlohmann::json diagnostics_json(const RunResult& result);

/// pattern.csv, metrics.json, diagnostics.json and config.json, plus qgrid.csv,
/// quadrature_pdf.csv and pattern_t<t'>.csv when present.
void write_run(const RunResult& result, const std::string& directory);

void write_sweep(const std::vector<SweepPoint>& sweep, Level level, const std::string& directory);

}  // namespace dsim
