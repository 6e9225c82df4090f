// oddlimit: analyze / scan / simulate / find-orbit.
//
// Exit codes: 0 ok, 1 other failure, 2 configuration, 3 convergence or
// integration failure, 4 hypothesis violation.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oddlimit/app.hpp"

using namespace oddlimit;

namespace {

struct Common {
  std::string config;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file");
  cmd->add_option("--model", c.model, "landau or laser (overrides run.model)");
  cmd->add_option("--out", c.out, "output file");
  cmd->add_option("--seed", c.seed, "random seed (overrides run.seed)");
  cmd->add_option("--tol", c.tol, "integration tolerance (overrides run.tol)");
  cmd->add_option("--jobs", c.jobs, "worker threads for scans (0: all cores)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? default_config(c.model.empty() ? "landau" : c.model)
                                   : load_config(c.config);
  if (!c.model.empty() && c.model != cfg.model) {
    if (!c.config.empty()) {
      cfg.model = c.model;
    } else {
      cfg = default_config(c.model);
    }
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.tol) cfg.tol = *c.tol;
  if (c.jobs) cfg.jobs = *c.jobs;
  cfg.validate();
  return cfg;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

int analyze(const Common& c, const std::string& cmdline) {
  const RunConfig cfg = resolve(c);
  const AnalyzeResult r = run_analyze(cfg);
  std::cout << to_text(r.floquet) << to_text(r.verdict);
  if (r.certificate) {
    std::cout << "certificate_residual = " << r.certificate->residual << '\n'
              << "certificate_valid = " << (r.certificate->valid ? "true" : "false") << '\n';
  }
  if (!c.out.empty()) {
    auto f = open_out(c.out);
    f << provenance_header(cmdline, cfg);
    write_analyze_csv(f, r);
  }
  return 0;
}

int scan(const Common& c, const std::string& cmdline) {
  const RunConfig cfg = resolve(c);
  const std::vector<ScanCell> cells = run_scan(cfg, cfg.jobs);
  std::ostringstream body;
  body << provenance_header(cmdline, cfg);
  write_scan_csv(body, cells);
  if (c.out.empty()) {
    std::cout << body.str();
  } else {
    open_out(c.out) << body.str();
    int black = 0, white = 0, gray = 0, other = 0;
    for (const auto& cell : cells) {
      if (cell.region == "black") ++black;
      else if (cell.region == "white") ++white;
      else if (cell.region == "gray") ++gray;
      else ++other;
    }
    std::cout << "cells " << cells.size() << ": black " << black << ", white " << white
              << ", gray " << gray << ", inconclusive " << other << '\n';
  }
  return 0;
}

int simulate(const Common& c, const std::string& cmdline) {
  const RunConfig cfg = resolve(c);
  const SimulationOutput s = run_simulate(cfg);
  std::ostringstream body;
  body << provenance_header(cmdline, cfg);
  write_simulation_csv(body, s);
  if (c.out.empty()) {
    std::cout << body.str();
  } else {
    open_out(c.out) << body.str();
    double worst = 0.0;
    for (double d : s.deviation) worst = std::max(worst, d);
    std::cout << "samples " << s.times.size() << ", max deviation " << worst
              << ", fitted rate per period " << s.fitted_rate
              << (s.escaped ? ", escaped" : "") << '\n';
  }
  return 0;
}

int find_orbit(const Common& c) {
  const RunConfig cfg = resolve(c);
  const Problem p = build_problem(cfg);
  const Orbit& o = p.orbit;
  std::cout << std::setprecision(15);
  std::cout << "[orbit]\nmodel = " << cfg.model << "\nperiod = " << o.period() << '\n';
  if (o.omega()) std::cout << "omega = " << *o.omega() << '\n';
  std::cout << "closure_defect = " << o.closure_defect() << '\n';
  std::cout << "ode_residual = " << o.ode_residual() << '\n';
  if (c.out.empty()) return 0;
  if (o.trajectory()) {
    save_orbit(c.out, o);
  } else {
    // Closed-form orbits are refined by shooting so that a trajectory exists to store.
    ShootingProblem sp;
    sp.sys = p.sys;
    sp.guess = o.state(0.0);
    sp.period_guess = o.period();
    const ShootingResult r = solve_shooting(sp, std::min(1e-8, 100.0 * cfg.tol));
    save_orbit(c.out, r.orbit);
  }
  std::cout << "written = " << c.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Odd-number limitation analysis for (equivariant) delayed feedback control"};
  app.set_version_flag("--version", std::string(ODDLIMIT_VERSION));
  app.require_subcommand(1);
  Common common;
  auto* a = app.add_subcommand("analyze", "criterion verdict and instability certificate");
  auto* s = app.add_subcommand("scan", "two-parameter region map");
  auto* m = app.add_subcommand("simulate", "controlled delay system from an orbit history");
  auto* f = app.add_subcommand("find-orbit", "locate the target orbit and store it");
  for (auto* cmd : {a, s, m, f}) add_common(cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmdline = command_line(argc, argv);
  try {
    if (*a) return analyze(common, cmdline);
    if (*s) return scan(common, cmdline);
    if (*m) return simulate(common, cmdline);
    if (*f) return find_orbit(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << '\n';
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return 3;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failed at t = " << e.time() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
