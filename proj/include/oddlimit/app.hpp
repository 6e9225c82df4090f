#pragma once

// Composition layer behind the command-line tool: builds the target orbit and
// control for a configuration and runs analyze / scan / simulate / find-orbit.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oddlimit/config.hpp"
#include "oddlimit/ddesim.hpp"
#include "oddlimit/oddnumber.hpp"

namespace oddlimit {

struct Problem {
  SystemDef sys;
  Orbit orbit;
  CriterionKind kind = CriterionKind::finite;
  SymmetryAction action;
  std::optional<S1Generator> rotation;  // set for the s1 criterion and for phase alignment
  GainMatrix gain;
  ControlLaw law;
};

Problem build_problem(const RunConfig& c);
GainMatrix gain_of(const RunConfig& c);
CriterionContext prepare(const Problem& p, const RunConfig& c);

struct AnalyzeResult {
  FloquetReport floquet;
  CriterionVerdict verdict;
  std::optional<CertificateReport> certificate;
};

AnalyzeResult run_analyze(const RunConfig& c);

struct ScanCell {
  double x = 0.0;
  double y = 0.0;
  std::string status = "ok";
  int N = 0;
  double expression = 0.0;
  bool excluded = false;
  std::string region;      // black | white | gray | inconclusive
  std::string simulation;  // stable | unstable | inconclusive | skipped
  double rate = 0.0;
  std::optional<double> mu_star;
};

std::vector<ScanCell> run_scan(const RunConfig& c, int jobs);

struct SimulationOutput {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> deviation;
  bool escaped = false;
  double escape_time = 0.0;
  double fitted_rate = 0.0;  // per period, from the second half of the deviation series
};

SimulationOutput run_simulate(const RunConfig& c);

// Provenance header lines (each starting with '#').
std::string provenance_header(const std::string& command_line, const RunConfig& c);

void write_analyze_csv(std::ostream& os, const AnalyzeResult& r);
void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells);
void write_simulation_csv(std::ostream& os, const SimulationOutput& s);

}  // namespace oddlimit
