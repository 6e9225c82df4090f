#pragma once

// INI configuration: one section per model plus run, simulate, stability and
// scan sections. Unknown sections or keys are rejected. See docs/config.md.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oddlimit/dynsys.hpp"

namespace oddlimit {

struct SimulateSpec {
  double periods = 10.0;
  std::string history = "orbit";  // orbit | perturbed
  double perturb = 1e-3;          // relative to orbit amplitude
  int samples_per_period = 20;
};

struct StabilitySpec {
  double perturb = 1e-3;
  int horizon = 60;
};

struct ScanAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
};

struct ScanSpec {
  ScanAxis x{"beta", 0.0, 6.283185307179586, 40};
  ScanAxis y{"b0", 0.0, 0.5, 40};
  bool classify = true;
  bool classify_excluded = true;
  long max_cells = 100000;
};

struct RunConfig {
  std::string model = "landau";  // landau | laser
  double tol = 1e-10;
  double mu_max = 50.0;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: hardware concurrency

  LandauParams landau{0.5, 0.5, {1.0, 0.0}, {-0.5, 0.0}};
  std::string branch = "antiphase";    // antiphase | synchronized
  std::string control = "equivariant";  // equivariant | standard

  LaserParams laser;
  std::string orbit_file;

  SimulateSpec simulate;
  StabilitySpec stability;
  ScanSpec scan;

  void validate() const;
  // Sets a model parameter by name (as used by scan axes).
  void set_param(const std::string& name, double value);
  // Resolved settings as ordered key = value pairs, for provenance headers.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

RunConfig default_config(const std::string& model);
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace oddlimit
