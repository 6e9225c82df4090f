#include "oddlimit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace oddlimit {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + s + "'");
  }
}

long to_long(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + s + "'");
  }
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + s + "'");
}

void set_landau(LandauParams& p, const std::string& name, double v) {
  if (name == "alpha") p.alpha = v;
  else if (name == "a") p.a = v;
  else if (name == "gamma_re") p.gamma.real(v);
  else if (name == "gamma_im") p.gamma.imag(v);
  else if (name == "b_re") p.b.real(v);
  else if (name == "b_im") p.b.imag(v);
  else throw ConfigError("unknown landau parameter '" + name + "'");
}

void set_laser(LaserParams& p, const std::string& name, double v) {
  if (name == "delta") p.delta = v;
  else if (name == "alpha") p.alpha = v;
  else if (name == "eta") p.eta = v;
  else if (name == "phi") p.phi = v;
  else if (name == "epsilon") p.epsilon = v;
  else if (name == "pump") p.pump = v;
  else if (name == "omega") p.omega = v;
  else if (name == "b0") p.b0 = v;
  else if (name == "beta") p.beta = v;
  else throw ConfigError("unknown laser parameter '" + name + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> m;
  auto num = [&m](const std::string& key, std::function<void(RunConfig&, double)> f) {
    m[key] = [key, f](RunConfig& c, const std::string& v) { f(c, to_double(key, v)); };
  };
  m["run.model"] = [](RunConfig& c, const std::string& v) { c.model = v; };
  num("run.tol", [](RunConfig& c, double v) { c.tol = v; });
  num("run.mu_max", [](RunConfig& c, double v) { c.mu_max = v; });
  m["run.seed"] = [](RunConfig& c, const std::string& v) {
    c.seed = static_cast<std::uint64_t>(to_long("run.seed", v));
  };
  m["run.jobs"] = [](RunConfig& c, const std::string& v) {
    c.jobs = static_cast<int>(to_long("run.jobs", v));
  };

  for (const char* k : {"alpha", "a", "gamma_re", "gamma_im", "b_re", "b_im"}) {
    const std::string name = k;
    num("landau." + name, [name](RunConfig& c, double v) { set_landau(c.landau, name, v); });
  }
  m["landau.branch"] = [](RunConfig& c, const std::string& v) { c.branch = v; };
  m["landau.control"] = [](RunConfig& c, const std::string& v) { c.control = v; };

  for (const char* k :
       {"delta", "alpha", "eta", "phi", "epsilon", "pump", "omega", "b0", "beta"}) {
    const std::string name = k;
    num("laser." + name, [name](RunConfig& c, double v) { set_laser(c.laser, name, v); });
  }
  m["laser.orbit_file"] = [](RunConfig& c, const std::string& v) { c.orbit_file = v; };

  num("simulate.periods", [](RunConfig& c, double v) { c.simulate.periods = v; });
  m["simulate.history"] = [](RunConfig& c, const std::string& v) { c.simulate.history = v; };
  num("simulate.perturb", [](RunConfig& c, double v) { c.simulate.perturb = v; });
  m["simulate.samples_per_period"] = [](RunConfig& c, const std::string& v) {
    c.simulate.samples_per_period = static_cast<int>(to_long("simulate.samples_per_period", v));
  };

  num("stability.perturb", [](RunConfig& c, double v) { c.stability.perturb = v; });
  m["stability.horizon"] = [](RunConfig& c, const std::string& v) {
    c.stability.horizon = static_cast<int>(to_long("stability.horizon", v));
  };

  for (const char* ax : {"x", "y"}) {
    const std::string a = ax;
    auto axis = [a](RunConfig& c) -> ScanAxis& { return a == "x" ? c.scan.x : c.scan.y; };
    m["scan." + a] = [axis](RunConfig& c, const std::string& v) { axis(c).param = v; };
    num("scan." + a + "_min", [axis](RunConfig& c, double v) { axis(c).min = v; });
    num("scan." + a + "_max", [axis](RunConfig& c, double v) { axis(c).max = v; });
    m["scan." + a + "_steps"] = [axis, a](RunConfig& c, const std::string& v) {
      axis(c).steps = static_cast<int>(to_long("scan." + a + "_steps", v));
    };
  }
  m["scan.classify"] = [](RunConfig& c, const std::string& v) {
    c.scan.classify = to_bool("scan.classify", v);
  };
  m["scan.classify_excluded"] = [](RunConfig& c, const std::string& v) {
    c.scan.classify_excluded = to_bool("scan.classify_excluded", v);
  };
  m["scan.max_cells"] = [](RunConfig& c, const std::string& v) {
    c.scan.max_cells = to_long("scan.max_cells", v);
  };
  return m;
}

}  // namespace

void RunConfig::set_param(const std::string& name, double v) {
  if (model == "landau") {
    set_landau(landau, name, v);
  } else {
    set_laser(laser, name, v);
  }
}

void RunConfig::validate() const {
  if (model != "landau" && model != "laser") throw ConfigError("model must be landau or laser");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(mu_max > 1.0)) throw ConfigError("mu_max must exceed 1");
  if (jobs < 0) throw ConfigError("jobs must be nonnegative");
  if (branch != "antiphase" && branch != "synchronized") {
    throw ConfigError("landau.branch must be antiphase or synchronized");
  }
  if (control != "equivariant" && control != "standard") {
    throw ConfigError("landau.control must be equivariant or standard");
  }
  if (model == "landau" && branch == "synchronized" && control == "equivariant") {
    throw ConfigError("the synchronized branch has no half-period swap symmetry; use control = standard");
  }
  if (simulate.history != "orbit" && simulate.history != "perturbed") {
    throw ConfigError("simulate.history must be orbit or perturbed");
  }
  if (!(simulate.periods > 0.0) || simulate.samples_per_period < 1) {
    throw ConfigError("simulate.periods and samples_per_period must be positive");
  }
  if (stability.horizon < 2) throw ConfigError("stability.horizon must be at least 2");
  for (const ScanAxis* a : {&scan.x, &scan.y}) {
    if (a->steps < 1) throw ConfigError("scan steps must be at least 1");
    if (!std::isfinite(a->min) || !std::isfinite(a->max)) throw ConfigError("scan range must be finite");
    RunConfig probe = *this;
    probe.set_param(a->param, a->min);
  }
  if (static_cast<long>(scan.x.steps) * scan.y.steps > scan.max_cells) {
    throw ConfigError("scan exceeds max_cells");
  }
  if (model == "landau") {
    landau.validate();
  } else {
    laser.validate();
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::describe() const {
  std::vector<std::pair<std::string, std::string>> d;
  d.emplace_back("run.model", model);
  d.emplace_back("run.tol", fmt(tol));
  d.emplace_back("run.mu_max", fmt(mu_max));
  d.emplace_back("run.seed", std::to_string(seed));
  if (model == "landau") {
    d.emplace_back("landau.alpha", fmt(landau.alpha));
    d.emplace_back("landau.a", fmt(landau.a));
    d.emplace_back("landau.gamma_re", fmt(landau.gamma.real()));
    d.emplace_back("landau.gamma_im", fmt(landau.gamma.imag()));
    d.emplace_back("landau.b_re", fmt(landau.b.real()));
    d.emplace_back("landau.b_im", fmt(landau.b.imag()));
    d.emplace_back("landau.branch", branch);
    d.emplace_back("landau.control", control);
  } else {
    d.emplace_back("laser.delta", fmt(laser.delta));
    d.emplace_back("laser.alpha", fmt(laser.alpha));
    d.emplace_back("laser.eta", fmt(laser.eta));
    d.emplace_back("laser.phi", fmt(laser.phi));
    d.emplace_back("laser.epsilon", fmt(laser.epsilon));
    d.emplace_back("laser.pump", fmt(laser.pump));
    d.emplace_back("laser.omega", fmt(laser.omega));
    d.emplace_back("laser.b0", fmt(laser.b0));
    d.emplace_back("laser.beta", fmt(laser.beta));
    if (!orbit_file.empty()) d.emplace_back("laser.orbit_file", orbit_file);
  }
  d.emplace_back("simulate.periods", fmt(simulate.periods));
  d.emplace_back("simulate.history", simulate.history);
  d.emplace_back("simulate.perturb", fmt(simulate.perturb));
  d.emplace_back("simulate.samples_per_period", std::to_string(simulate.samples_per_period));
  d.emplace_back("stability.perturb", fmt(stability.perturb));
  d.emplace_back("stability.horizon", std::to_string(stability.horizon));
  for (const auto& [name, a] : {std::pair{"x", &scan.x}, std::pair{"y", &scan.y}}) {
    const std::string p = std::string("scan.") + name;
    d.emplace_back(p, a->param);
    d.emplace_back(p + "_min", fmt(a->min));
    d.emplace_back(p + "_max", fmt(a->max));
    d.emplace_back(p + "_steps", std::to_string(a->steps));
  }
  d.emplace_back("scan.classify", scan.classify ? "true" : "false");
  d.emplace_back("scan.classify_excluded", scan.classify_excluded ? "true" : "false");
  return d;
}

RunConfig default_config(const std::string& model) {
  RunConfig c;
  c.model = model;
  if (model == "landau") {
    c.scan.x = {"b_re", -1.0, 0.5, 16};
    c.scan.y = {"alpha", -0.5, 0.75, 6};
  }
  return c;
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::string model = "landau";
  if (auto m = tree.get_optional<std::string>("run.model")) model = *m;
  RunConfig c = default_config(model);
  const auto table = setters();
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : keys) {
      const std::string full = section + "." + key;
      auto it = table.find(full);
      if (it == table.end()) throw ConfigError("config: unknown key '" + full + "'");
      it->second(c, value.data());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace oddlimit
