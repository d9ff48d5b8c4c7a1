// duality-sim: command-line front end for the double-slit / double-cavity simulator.
//
//   duality-sim run --config cfg.json [--out dir] [--stage 2 --alpha 1 ...]
//   duality-sim sweep-epsilon --level b --values 0,1,3,5,9 [--config cfg.json] [--out dir]
//   duality-sim sphere --stage 2 [--alpha 1] [--readout quadrature --theta 1.5708] [--out dir]
//
// Exit codes: 0 success, 2 configuration error, 3 numeric tolerance failure, 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsim/config.hpp"
#include "dsim/io.hpp"
#include "dsim/runner.hpp"

using nlohmann::json;

namespace {

struct Overrides {
  std::optional<int> stage;
  std::optional<std::string> case_name;
  std::optional<std::string> alpha;
  std::optional<std::string> epsilon;
  std::optional<double> t_prime;
  std::optional<std::string> mode;
  std::optional<std::string> kick;
  std::optional<std::string> readout;
  std::optional<double> theta;
  std::optional<std::string> chi;
  bool qgrid = false;

  void attach(CLI::App* app, bool with_stage) {
    if (with_stage) app->add_option("--stage", stage, "Experiment stage (1, 2 or 3)");
    app->add_option("--case", case_name, "Sphere case name (V1, VD, D1, DC, C1, CV, VDC)");
    app->add_option("--alpha", alpha, "Quantum field amplitude, 're' or 're,im'");
    app->add_option("--epsilon", epsilon, "Classical field amplitude, 're' or 're,im'");
    app->add_option("--t-prime", t_prime, "Free-flight time in scaled units");
    app->add_option("--mode", mode, "dispersive or exact");
    app->add_option("--kick", kick, "slit or resolved");
    app->add_option("--readout", readout, "trace or quadrature");
    app->add_option("--theta", theta, "Quadrature angle for the readout");
    app->add_option("--chi", chi, "Quadrature outcome or 'most-probable'");
    app->add_flag("--qgrid", qgrid, "Emit the Husimi Q grid of the field");
  }

  static json complex_value(const std::string& text) {
    const auto comma = text.find(',');
    try {
      if (comma == std::string::npos) return std::stod(text);
      return json::array({std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))});
    } catch (const std::exception&) {
      throw dsim::ConfigError("cannot parse complex value '" + text + "'");
    }
  }

  json to_json() const {
    json doc = json::object();
    if (stage) doc["stage"] = *stage;
    if (case_name) doc["case"] = *case_name;
    if (alpha) doc["alpha"] = complex_value(*alpha);
    if (epsilon) doc["epsilon"] = complex_value(*epsilon);
    if (t_prime) doc["t_prime"] = *t_prime;
    if (mode) doc["mode"] = *mode;
    if (kick) doc["kick"] = *kick;
    if (qgrid) doc["qgrid"] = true;

    const bool quadrature_requested = (readout && *readout == "quadrature") || theta || chi;
    if (readout && *readout != "quadrature" && *readout != "trace")
      throw dsim::ConfigError("--readout must be 'trace' or 'quadrature'");
    if (readout && *readout == "trace") {
      if (theta || chi) throw dsim::ConfigError("--theta/--chi need --readout quadrature");
      doc["readout"] = "trace";
    } else if (quadrature_requested) {
      json r = json::object();
      r["theta"] = theta.value_or(0.0);
      if (!chi || *chi == "most-probable") {
        r["chi"] = "most-probable";
      } else {
        try {
          r["chi"] = std::stod(*chi);
        } catch (const std::exception&) {
          throw dsim::ConfigError("--chi must be a number or 'most-probable'");
        }
      }
      doc["readout"] = r;
    }
    return doc;
  }
};

dsim::ExperimentConfig base_config(const std::optional<std::string>& path) {
  return path ? dsim::load_config(*path) : dsim::ExperimentConfig{};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw dsim::ConfigError("cannot parse list value '" + item + "'");
    }
  }
  if (out.empty()) throw dsim::ConfigError("empty value list");
  return out;
}

void print_summary(const dsim::RunResult& r, const std::string& label) {
  std::cout << label << "  V0=" << dsim::format_number(r.metrics.V0)
            << " D0=" << dsim::format_number(r.metrics.D0) << " C0=" << dsim::format_number(r.metrics.C0)
            << " visibility=";
  if (r.visibility.value)
    std::cout << dsim::format_number(*r.visibility.value);
  else
    std::cout << "none";
  if (r.diagnostics.chi_used) std::cout << " chi=" << dsim::format_number(*r.diagnostics.chi_used);
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-slit which-path simulator with quantum and classical cavity fields"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::string out_dir = "out";
  Overrides run_over;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_over.attach(run_cmd, true);

  std::string level = "b";
  std::string values = "0,1,3,5,9";
  auto* sweep_cmd = app.add_subcommand("sweep-epsilon", "Field phase-space snapshots versus epsilon");
  sweep_cmd->add_option("--level", level, "Atomic level of the top-path preparation (b or c)")
      ->check(CLI::IsMember({"b", "c"}));
  sweep_cmd->add_option("--values", values, "Comma-separated epsilon values");
  sweep_cmd->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  int sphere_stage = 1;
  Overrides sphere_over;
  auto* sphere_cmd = app.add_subcommand("sphere", "Run all seven sphere cases");
  sphere_cmd->add_option("--stage", sphere_stage, "Experiment stage")->required()->check(CLI::Range(1, 3));
  sphere_cmd->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  sphere_cmd->add_option("--out", out_dir, "Output directory");
  sphere_over.attach(sphere_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      auto config = dsim::merge_config(base_config(config_path), run_over.to_json());
      const auto result = dsim::run(config);
      dsim::write_run(result, out_dir);
      print_summary(result, "stage " + std::to_string(result.config.stage));
    } else if (*sweep_cmd) {
      const auto config = base_config(config_path);
      const dsim::Level lvl = level == "b" ? dsim::Level::b : dsim::Level::c;
      const auto sweep = dsim::epsilon_sweep(config, parse_list(values), lvl);
      dsim::write_sweep(sweep, lvl, out_dir);
      for (const auto& p : sweep)
        std::cout << "epsilon=" << dsim::format_number(p.epsilon)
                  << " overlap=" << dsim::format_number(p.overlap_with_initial) << '\n';
    } else if (*sphere_cmd) {
      json over = sphere_over.to_json();
      over["stage"] = sphere_stage;
      const auto config = dsim::merge_config(base_config(config_path), over);
      const auto results = dsim::sphere_suite(config, sphere_stage);
      for (size_t i = 0; i < results.size(); ++i) {
        const std::string name(dsim::to_string(dsim::kAllSphereCases[i]));
        dsim::write_run(results[i], out_dir + "/" + name);
        print_summary(results[i], name);
      }
    }
  } catch (const dsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const dsim::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const dsim::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
