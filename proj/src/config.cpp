#include "dsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

Real as_real(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const Real x = v.get<Real>();
  if (!std::isfinite(x)) throw ConfigError(std::string("'") + key + "' must be finite");
  return x;
}

Complex as_complex(const json& v, const char* key) {
  if (v.is_number()) return {as_real(v, key), 0};
  if (v.is_array() && v.size() == 2) return {as_real(v[0], key), as_real(v[1], key)};
  throw ConfigError(std::string("'") + key + "' must be a number or [re, im]");
}

json complex_json(Complex z) {
  if (z.imag() == 0) return z.real();
  return json::array({z.real(), z.imag()});
}

InteractionMode parse_mode(const std::string& s) {
  if (s == "dispersive") return InteractionMode::dispersive;
  if (s == "exact") return InteractionMode::exact;
  throw ConfigError("mode must be 'dispersive' or 'exact'");
}

KickModel parse_kick(const std::string& s) {
  if (s == "slit") return KickModel::slit_point;
  if (s == "resolved") return KickModel::position_resolved;
  throw ConfigError("kick must be 'slit' or 'resolved'");
}

std::string as_string(const json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

Index as_index(const json& v, const char* key) {
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<Index>();
}

void merge_numeric(NumericSpec& n, const json& obj) {
  reject_unknown(obj,
                 {"n_max", "x_min", "x_max", "points", "sigma", "tail_tolerance", "detuning_ratio",
                  "coupling_time", "g_ratio", "visibility_half_width", "qgrid_extent",
                  "qgrid_samples", "norm_tolerance", "purity_tolerance"},
                 "numeric");
  if (obj.contains("n_max")) n.n_max = as_index(obj["n_max"], "n_max");
  if (obj.contains("x_min")) n.grid.x_min = as_real(obj["x_min"], "x_min");
  if (obj.contains("x_max")) n.grid.x_max = as_real(obj["x_max"], "x_max");
  if (obj.contains("points")) n.grid.points = as_index(obj["points"], "points");
  if (obj.contains("sigma")) n.sigma = as_real(obj["sigma"], "sigma");
  if (obj.contains("tail_tolerance")) n.tail_tolerance = as_real(obj["tail_tolerance"], "tail_tolerance");
  if (obj.contains("detuning_ratio")) n.detuning_ratio = as_real(obj["detuning_ratio"], "detuning_ratio");
  if (obj.contains("coupling_time")) {
    if (obj["coupling_time"].is_null()) n.coupling_time.reset();
    else n.coupling_time = as_real(obj["coupling_time"], "coupling_time");
  }
  if (obj.contains("g_ratio")) n.g_ratio = as_real(obj["g_ratio"], "g_ratio");
  if (obj.contains("visibility_half_width"))
    n.visibility_half_width = as_real(obj["visibility_half_width"], "visibility_half_width");
  if (obj.contains("qgrid_extent")) n.qgrid_extent = as_real(obj["qgrid_extent"], "qgrid_extent");
  if (obj.contains("qgrid_samples")) n.qgrid_samples = as_index(obj["qgrid_samples"], "qgrid_samples");
  if (obj.contains("norm_tolerance")) n.norm_tolerance = as_real(obj["norm_tolerance"], "norm_tolerance");
  if (obj.contains("purity_tolerance"))
    n.purity_tolerance = as_real(obj["purity_tolerance"], "purity_tolerance");
}

void merge_readout(ReadoutSpec& r, const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s != "trace") throw ConfigError("readout must be 'trace' or a quadrature object");
    r = ReadoutSpec{};
    return;
  }
  reject_unknown(v, {"theta", "chi"}, "readout");
  r.kind = ReadoutSpec::Kind::quadrature;
  r.theta = v.contains("theta") ? as_real(v["theta"], "theta") : 0;
  r.chi.reset();
  if (v.contains("chi")) {
    const json& chi = v["chi"];
    if (chi.is_string()) {
      if (chi.get<std::string>() != "most-probable")
        throw ConfigError("readout chi must be a number or 'most-probable'");
    } else {
      r.chi = as_real(chi, "chi");
    }
  }
}

}  // namespace

void ExperimentConfig::set_case(SphereCaseName name) {
  named_case = name;
  const SphereCase<Real> c = sphere_case(name);
  prep = PreparationParams{c.c_up, c.c_down, c.phi};
}

void ExperimentConfig::set_case(const PreparationParams& explicit_prep) {
  named_case.reset();
  prep = explicit_prep;
}

void ExperimentConfig::normalize() {
  if (stage < 1 || stage > 3) throw ConfigError("stage must be 1, 2 or 3");
  if (named_case) set_case(*named_case);
  if (stage == 2) epsilon = 0;
  if (numeric.n_max < 2) throw ConfigError("n_max must be at least 2");
  if (!(t_prime >= 0)) throw ConfigError("t_prime must be non-negative");
  for (Real t : extra_t_primes)
    if (!(t >= 0)) throw ConfigError("extra_t_primes must be non-negative");
  if (!(theta_int > 0)) throw ConfigError("theta_int must be positive");
  if (!(numeric.tail_tolerance > 0)) throw ConfigError("tail_tolerance must be positive");
  if (numeric.qgrid_samples < 2) throw ConfigError("qgrid_samples must be at least 2");
  prep.validate();
  geometry().validate();
  try {
    interaction().validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  (void)PositionGrid::from(numeric.grid);
}

InteractionParams ExperimentConfig::interaction() const {
  InteractionParams p;
  p.epsilon = epsilon;
  p.theta_int = theta_int;
  p.g_ratio = numeric.g_ratio;
  p.detuning_ratio = numeric.detuning_ratio;
  p.coupling_time = numeric.coupling_time;
  return p;
}

SlitGeometry ExperimentConfig::geometry() const {
  SlitGeometry g;
  g.sigma = numeric.sigma;
  return g;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return stage == o.stage && named_case == o.named_case && prep.c_up == o.prep.c_up &&
         prep.c_down == o.prep.c_down && prep.phi == o.prep.phi && alpha == o.alpha &&
         epsilon == o.epsilon && theta_int == o.theta_int && mode == o.mode && kick == o.kick &&
         readout == o.readout && t_prime == o.t_prime && extra_t_primes == o.extra_t_primes &&
         qgrid == o.qgrid && quadrature_pdf_theta == o.quadrature_pdf_theta &&
         numeric == o.numeric;
}

ExperimentConfig merge_config(const ExperimentConfig& base, const json& doc) {
  ExperimentConfig c = base;
  try {
    reject_unknown(doc,
                   {"stage", "case", "alpha", "epsilon", "theta_int", "mode", "kick", "readout",
                    "t_prime", "extra_t_primes", "qgrid", "quadrature_pdf_theta", "numeric"},
                   "config");
    if (doc.contains("stage")) c.stage = static_cast<int>(as_index(doc["stage"], "stage"));
    if (doc.contains("case")) {
      const json& v = doc["case"];
      if (v.is_string()) {
        c.set_case(parse_sphere_case(v.get<std::string>()));
      } else {
        reject_unknown(v, {"c_up", "c_down", "phi"}, "case");
        if (!v.contains("c_up") || !v.contains("c_down") || !v.contains("phi"))
          throw ConfigError("explicit case needs c_up, c_down and phi");
        c.set_case(PreparationParams{as_complex(v["c_up"], "c_up"),
                                     as_complex(v["c_down"], "c_down"), as_real(v["phi"], "phi")});
      }
    }
    if (doc.contains("alpha")) c.alpha = as_complex(doc["alpha"], "alpha");
    if (doc.contains("epsilon")) c.epsilon = as_complex(doc["epsilon"], "epsilon");
    if (doc.contains("theta_int")) c.theta_int = as_real(doc["theta_int"], "theta_int");
    if (doc.contains("mode")) c.mode = parse_mode(as_string(doc["mode"], "mode"));
    if (doc.contains("kick")) c.kick = parse_kick(as_string(doc["kick"], "kick"));
    if (doc.contains("readout")) merge_readout(c.readout, doc["readout"]);
    if (doc.contains("t_prime")) c.t_prime = as_real(doc["t_prime"], "t_prime");
    if (doc.contains("extra_t_primes")) {
      const json& v = doc["extra_t_primes"];
      if (!v.is_array()) throw ConfigError("'extra_t_primes' must be an array");
      c.extra_t_primes.clear();
      for (const json& t : v) c.extra_t_primes.push_back(as_real(t, "extra_t_primes"));
    }
    if (doc.contains("qgrid")) {
      if (!doc["qgrid"].is_boolean()) throw ConfigError("'qgrid' must be a boolean");
      c.qgrid = doc["qgrid"].get<bool>();
    }
    if (doc.contains("quadrature_pdf_theta")) {
      const json& v = doc["quadrature_pdf_theta"];
      if (v.is_null()) c.quadrature_pdf_theta.reset();
      else c.quadrature_pdf_theta = as_real(v, "quadrature_pdf_theta");
    }
    if (doc.contains("numeric")) merge_numeric(c.numeric, doc["numeric"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  c.normalize();
  return c;
}

ExperimentConfig parse_config(const json& doc) { return merge_config(ExperimentConfig{}, doc); }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["stage"] = c.stage;
  if (c.named_case) {
    doc["case"] = std::string(to_string(*c.named_case));
  } else {
    doc["case"] = {{"c_up", complex_json(c.prep.c_up)},
                   {"c_down", complex_json(c.prep.c_down)},
                   {"phi", c.prep.phi}};
  }
  doc["alpha"] = complex_json(c.alpha);
  doc["epsilon"] = complex_json(c.epsilon);
  doc["theta_int"] = c.theta_int;
  doc["mode"] = c.mode == InteractionMode::dispersive ? "dispersive" : "exact";
  doc["kick"] = c.kick == KickModel::slit_point ? "slit" : "resolved";
  if (c.readout.kind == ReadoutSpec::Kind::trace) {
    doc["readout"] = "trace";
  } else {
    doc["readout"] = {{"theta", c.readout.theta}};
    if (c.readout.chi) doc["readout"]["chi"] = *c.readout.chi;
    else doc["readout"]["chi"] = "most-probable";
  }
  doc["t_prime"] = c.t_prime;
  doc["extra_t_primes"] = c.extra_t_primes;
  doc["qgrid"] = c.qgrid;
  doc["quadrature_pdf_theta"] =
      c.quadrature_pdf_theta ? json(*c.quadrature_pdf_theta) : json(nullptr);
  const NumericSpec& n = c.numeric;
  doc["numeric"] = {{"n_max", n.n_max},
                    {"x_min", n.grid.x_min},
                    {"x_max", n.grid.x_max},
                    {"points", n.grid.points},
                    {"sigma", n.sigma},
                    {"tail_tolerance", n.tail_tolerance},
                    {"detuning_ratio", n.detuning_ratio},
                    {"coupling_time", n.coupling_time ? json(*n.coupling_time) : json(nullptr)},
                    {"g_ratio", n.g_ratio},
                    {"visibility_half_width", n.visibility_half_width},
                    {"qgrid_extent", n.qgrid_extent},
                    {"qgrid_samples", n.qgrid_samples},
                    {"norm_tolerance", n.norm_tolerance},
                    {"purity_tolerance", n.purity_tolerance}};
  return doc;
}

}  // namespace dsim
