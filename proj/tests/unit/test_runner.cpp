#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsim/runner.hpp"

using namespace dsim;
namespace fs = std::filesystem;

namespace {

const Real kRoot8 = std::sqrt(8.0);

ExperimentConfig config_for(int stage, SphereCaseName name, Complex alpha = kRoot8, Complex eps = 0) {
  ExperimentConfig c;
  c.stage = stage;
  c.set_case(name);
  c.alpha = alpha;
  c.epsilon = eps;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dsim_test_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Real visibility_or_zero(const RunResult& r) { return r.visibility.value.value_or(0); }

}  // namespace

TEST_CASE("config echo reparses to an equal config") {
  ExperimentConfig c = config_for(3, SphereCaseName::VDC, Complex(1, -0.5), Complex(3, 0.25));
  c.mode = InteractionMode::exact;
  c.kick = KickModel::position_resolved;
  c.readout = {ReadoutSpec::Kind::quadrature, 0.7, 1.25};
  c.extra_t_primes = {1, 2};
  c.qgrid = true;
  c.quadrature_pdf_theta = 0.3;
  c.numeric.n_max = 64;
  c.normalize();
  CHECK(parse_config(to_json(c)) == c);

  ExperimentConfig explicit_prep = config_for(1, SphereCaseName::V1);
  explicit_prep.set_case(PreparationParams{Complex(0.6, 0), Complex(0, 0.8), 0.4});
  explicit_prep.readout = {ReadoutSpec::Kind::quadrature, kPi / 2, std::nullopt};
  explicit_prep.normalize();
  CHECK(parse_config(to_json(explicit_prep)) == explicit_prep);

  // dump and reparse through text as the CLI does
  const auto text = to_json(c).dump();
  CHECK(parse_config(nlohmann::json::parse(text)) == c);
}

TEST_CASE("config parsing rejects invalid documents") {
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"stage", 2}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"numeric", {{"n_maxx", 3}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"stage", 4}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"case", "V7"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"mode", "fast"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"case", {{"c_up", 1}, {"c_down", 1}, {"phi", 0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::array()), ConfigError);
}

TEST_CASE("stage rules") {
  ExperimentConfig c = config_for(2, SphereCaseName::V1, kRoot8, 3);
  c.normalize();
  CHECK(c.epsilon == Complex(0, 0));

  const ExperimentConfig overridden = merge_config(config_for(1, SphereCaseName::V1), {{"stage", 3}, {"epsilon", 5}});
  CHECK(overridden.stage == 3);
  CHECK(overridden.epsilon == Complex(5, 0));
}

TEST_CASE("stage 2 is stage 3 with epsilon = 0") {
  const RunResult two = run(config_for(2, SphereCaseName::VD, kRoot8, 3));
  const RunResult three = run(config_for(3, SphereCaseName::VD, kRoot8, 0));
  CHECK(two.pattern.intensity == three.pattern.intensity);
  CHECK(two.pattern.x_axis == three.pattern.x_axis);
}

TEST_CASE("identical configs write identical files") {
  ExperimentConfig c = config_for(3, SphereCaseName::CV, 1.0, 3);
  c.readout = {ReadoutSpec::Kind::quadrature, kPi / 2, std::nullopt};
  c.qgrid = true;
  c.quadrature_pdf_theta = kPi / 2;
  c.extra_t_primes = {1.5};
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  write_run(run(c), a.string());
  write_run(run(c), b.string());
  Index files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    const fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    ++files;
  }
  for (const char* name : {"pattern.csv", "metrics.json", "diagnostics.json", "config.json", "qgrid.csv",
                           "quadrature_pdf.csv", "pattern_t1p5.csv"})
    CHECK(fs::exists(a / name));
  CHECK(files == 7);

  const nlohmann::json metrics = nlohmann::json::parse(slurp(a / "metrics.json"));
  for (const char* key : {"V0", "D0", "C0", "residual"}) CHECK(metrics.contains(key));
  CHECK(parse_config(nlohmann::json::parse(slurp(a / "config.json"))) == run(c).config);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run examples") {
  SUBCASE("stage 1 V1 shows full fringes") {
    const RunResult r = run(config_for(1, SphereCaseName::V1));
    REQUIRE(r.visibility.defined());
    CHECK(*r.visibility.value >= 0.95);
    CHECK(r.diagnostics.trace_drift < 1e-12);
    CHECK(r.diagnostics.purity_drift < 1e-10);
  }
  SUBCASE("stage 2 V1 at alpha = sqrt 8 loses the fringes") {
    const RunResult r = run(config_for(2, SphereCaseName::V1));
    CHECK(visibility_or_zero(r) <= 1e-3);
  }
  SUBCASE("stage 3 V1 at epsilon = 3 shows partial fringes") {
    const RunResult r = run(config_for(3, SphereCaseName::V1, kRoot8, 3));
    REQUIRE(r.visibility.defined());
    CHECK(*r.visibility.value > 0.05);
    CHECK(*r.visibility.value < 0.95);
  }
  SUBCASE("metrics echo the preparation") {
    const RunResult r = run(config_for(1, SphereCaseName::DC));
    CHECK(r.metrics.V0 == doctest::Approx(0).scale(1));
    CHECK(r.metrics.D0 == doctest::Approx(1 / std::sqrt(2.0)));
  }
}

TEST_CASE("epsilon sweep examples") {
  const ExperimentConfig base;
  const std::vector<Real> eps{0, 1, 3, 5, 9};
  const auto b = epsilon_sweep(base, eps, Level::b);
  const auto c = epsilon_sweep(base, eps, Level::c);
  REQUIRE(b.size() == 5);
  REQUIRE(c.size() == 5);
  CHECK(b[0].overlap_with_initial == doctest::Approx(1).epsilon(1e-10));
  CHECK(b[3].overlap_with_initial < b[0].overlap_with_initial);
  CHECK(b[3].overlap_with_initial < 0.5);
  CHECK(c[4].overlap_with_initial > c[0].overlap_with_initial);
  CHECK(c[0].overlap_with_initial < 1e-12);

  Index i = 0, j = 0;
  b[0].qgrid.values.maxCoeff(&i, &j);
  CHECK(std::abs(b[0].qgrid.x_axis[i] - kRoot8) <= 0.1);
  CHECK(std::abs(b[0].qgrid.y_axis[j]) <= 0.1);
}

TEST_CASE("sphere suite examples") {
  const ExperimentConfig base;
  SUBCASE("stage 1: D1 and C1 are fringe-free") {
    const auto suite = sphere_suite(base, 1);
    REQUIRE(suite.size() == 7);
    for (SphereCaseName n : {SphereCaseName::D1, SphereCaseName::C1}) {
      const RunResult& r = suite[static_cast<size_t>(n)];
      CAPTURE(to_string(n));
      CHECK(r.config.named_case == n);
      CHECK(visibility_or_zero(r) <= 1e-3);
    }
  }
  SUBCASE("stage 2: smaller alpha keeps more fringes") {
    const auto strong = sphere_suite(base, 2, Complex(kRoot8, 0));
    const auto weak = sphere_suite(base, 2, Complex(1, 0));
    for (SphereCaseName n : {SphereCaseName::V1, SphereCaseName::VD, SphereCaseName::CV, SphereCaseName::VDC}) {
      CAPTURE(to_string(n));
      const auto k = static_cast<size_t>(n);
      CHECK(visibility_or_zero(weak[k]) > visibility_or_zero(strong[k]));
    }
  }
  SUBCASE("stage 2 with quadrature readout at pi/2 restores the stage 1 patterns") {
    ExperimentConfig eraser = base;
    eraser.readout = {ReadoutSpec::Kind::quadrature, kPi / 2, std::nullopt};
    const auto erased = sphere_suite(eraser, 2);
    const auto plain = sphere_suite(base, 1);
    for (size_t k = 0; k < erased.size(); ++k) {
      CAPTURE(to_string(kAllSphereCases[k]));
      CHECK(l2_distance(erased[k].pattern, plain[k].pattern) < 1e-2);
    }
  }
}
