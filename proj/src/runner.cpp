#include "dsim/runner.hpp"

#include <cmath>
#include <filesystem>

#include "dsim/io.hpp"

namespace dsim {

using nlohmann::json;

namespace {

std::string t_label(Real t) {
  std::string s = format_number(t);
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

VectorXr qgrid_axis(const NumericSpec& n) {
  return uniform_axis<Real>(-n.qgrid_extent, n.qgrid_extent, n.qgrid_samples);
}

/// Atom density after the field readout: traced, or conditioned on a quadrature outcome.
AtomDensity read_out(const JointState& state, const ExperimentConfig& config, RunDiagnostics* diagnostics) {
  if (config.readout.kind == ReadoutSpec::Kind::trace) return trace_out_field(state);

  const Real theta = config.readout.theta;
  const Real chi = config.readout.chi ? *config.readout.chi : most_probable_chi(state, theta);
  QuadratureReadout r = condition_on_quadrature(state, QuadratureSpec<Real>(theta, chi));
  if (diagnostics) {
    diagnostics->chi_used = chi;
    diagnostics->readout_density = r.density;
  }
  return std::move(r.atom);
}

}  // namespace

JointState prepare_joint_state(const ExperimentConfig& config, RunDiagnostics* diagnostics) {
  JointState state = build_initial(config.prep, config.geometry(), config.alpha,
                                   config.numeric.grid, config.numeric.n_max);
  if (config.stage >= 2)
    state = interact(state, config.interaction(), config.mode, config.kick,
                     config.numeric.tail_tolerance);
  if (diagnostics) {
    diagnostics->leak = state.leak;
    diagnostics->truncation_loss = state.truncation_loss;
    diagnostics->joint_norm = state.norm2();
  }
  return state;
}

AtomDensity prepare_atom_density(const ExperimentConfig& config, RunDiagnostics* diagnostics) {
  return read_out(prepare_joint_state(config, diagnostics), config, diagnostics);
}

RunResult run(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  config.normalize();

  RunResult result;
  result.config = config;
  RunDiagnostics& diag = result.diagnostics;

  JointState state = prepare_joint_state(config, &diag);
  const AtomDensity rho = read_out(state, config, &diag);
  diag.density_rank = rho.rank();
  diag.purity_before = rho.purity();
  const Real trace_before = rho.trace();

  auto fly = [&](Real t_prime) {
    const AtomDensity out = free_propagate(rho, FlightSpec{t_prime});
    const Real drift = std::abs(out.trace() - trace_before);
    const Real purity_drift = std::abs(out.purity() - diag.purity_before);
    if (drift > config.numeric.norm_tolerance)
      throw ToleranceFailure("free flight changed the trace by " + std::to_string(drift));
    if (purity_drift > config.numeric.purity_tolerance)
      throw ToleranceFailure("free flight changed the purity by " + std::to_string(purity_drift));
    diag.trace_drift = std::max(diag.trace_drift, drift);
    diag.purity_drift = std::max(diag.purity_drift, purity_drift);
    diag.boundary_probability = std::max(diag.boundary_probability, boundary_probability(out));
    return screen_distribution(out);
  };

  result.pattern = fly(config.t_prime);
  for (Real t : config.extra_t_primes) result.extra_patterns.emplace_back(t, fly(t));

  VisibilityWindow window;
  window.centre = config.geometry().midpoint() / (2 * kPi);
  window.half_width = config.numeric.visibility_half_width;
  result.visibility = fringe_visibility(result.pattern, window);
  result.metrics = metrics<Real>(config.prep.c_up, config.prep.c_down,
                                 gamma_of_phi(config.prep.phi));

  if (config.qgrid) {
    const VectorXr axis = qgrid_axis(config.numeric);
    result.qgrid = husimi_q<Real>(field_density(state), axis, axis);
  }
  if (config.quadrature_pdf_theta) {
    const VectorXr chis = VectorXr::LinSpaced(561, -7, 7);
    result.quadrature_pdf = std::make_pair(chis, quadrature_pdf(state, *config.quadrature_pdf_theta, chis));
  }
  return result;
}

std::vector<SweepPoint> epsilon_sweep(const ExperimentConfig& base, const std::vector<Real>& epsilons,
                                      Level level) {
  ExperimentConfig config = base;
  config.stage = 3;
  config.set_case(PreparationParams{{1, 0}, {0, 0}, level == Level::b ? kPi / 2 : 0});
  config.normalize();

  const FieldState<Real> initial = coherent_state(config.alpha, config.numeric.n_max);
  const VectorXr axis = qgrid_axis(config.numeric);

  std::vector<SweepPoint> out;
  out.reserve(epsilons.size());
  for (Real eps : epsilons) {
    config.epsilon = eps;
    const JointState state = prepare_joint_state(config);
    const MatrixXc rho = field_density(state);
    SweepPoint p;
    p.epsilon = eps;
    p.qgrid = husimi_q<Real>(rho, axis, axis);
    p.overlap_with_initial = initial.amps.dot(rho * initial.amps).real();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RunResult> sphere_suite(const ExperimentConfig& base, int stage, std::optional<Complex> alpha,
                                    std::optional<Complex> epsilon) {
  ExperimentConfig config = base;
  config.stage = stage;
  if (alpha) config.alpha = *alpha;
  if (epsilon) config.epsilon = *epsilon;

  std::vector<RunResult> out;
  for (SphereCaseName name : kAllSphereCases) {
    config.set_case(name);
    out.push_back(run(config));
  }
  return out;
}

json metrics_json(const RunResult& r) {
  json doc;
  doc["V0"] = r.metrics.V0;
  doc["D0"] = r.metrics.D0;
  doc["C0"] = r.metrics.C0;
  doc["residual"] = r.metrics.residual;
  doc["visibility"] = r.visibility.value ? json(*r.visibility.value) : json(nullptr);
  doc["fringes_detected"] = r.visibility.defined();
  doc["visibility_extrema"] = r.visibility.extrema;
  return doc;
}

json diagnostics_json(const RunResult& r) {
  const RunDiagnostics& d = r.diagnostics;
  json doc;
  doc["leak"] = d.leak;
  doc["truncation_loss"] = d.truncation_loss;
  doc["joint_norm"] = d.joint_norm;
  doc["trace_drift"] = d.trace_drift;
  doc["purity_before"] = d.purity_before;
  doc["purity_drift"] = d.purity_drift;
  doc["boundary_probability"] = d.boundary_probability;
  doc["density_rank"] = d.density_rank;
  doc["chi_used"] = d.chi_used ? json(*d.chi_used) : json(nullptr);
  doc["readout_density"] = d.readout_density ? json(*d.readout_density) : json(nullptr);
  return doc;
}

void write_run(const RunResult& r, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);

  write_file((dir / "pattern.csv").string(), [&](std::ostream& o) { write_pattern_csv(o, r.pattern); });
  for (const auto& [t, pattern] : r.extra_patterns)
    write_file((dir / ("pattern_t" + t_label(t) + ".csv")).string(),
               [&](std::ostream& o) { write_pattern_csv(o, pattern); });
  write_file((dir / "metrics.json").string(), [&](std::ostream& o) { o << metrics_json(r).dump(2) << '\n'; });
  write_file((dir / "diagnostics.json").string(),
             [&](std::ostream& o) { o << diagnostics_json(r).dump(2) << '\n'; });
  write_file((dir / "config.json").string(), [&](std::ostream& o) { o << to_json(r.config).dump(2) << '\n'; });
  if (r.qgrid)
    write_file((dir / "qgrid.csv").string(), [&](std::ostream& o) { write_qgrid_csv(o, *r.qgrid); });
  if (r.quadrature_pdf)
    write_file((dir / "quadrature_pdf.csv").string(), [&](std::ostream& o) {
      write_series_csv(o, "chi", "density", r.quadrature_pdf->first, r.quadrature_pdf->second);
    });
}

void write_sweep(const std::vector<SweepPoint>& sweep, Level level, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  json summary;
  summary["level"] = level_name(level);
  summary["points"] = json::array();
  for (const SweepPoint& p : sweep) {
    const std::string file = "qgrid_eps" + t_label(p.epsilon) + ".csv";
    write_file((dir / file).string(), [&](std::ostream& o) { write_qgrid_csv(o, p.qgrid); });
    summary["points"].push_back(
        {{"epsilon", p.epsilon}, {"overlap_with_initial", p.overlap_with_initial}, {"qgrid", file}});
  }
  write_file((dir / "sweep.json").string(), [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
}

}  // namespace dsim
