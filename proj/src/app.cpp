#include "oddlimit/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace oddlimit {

GainMatrix gain_of(const RunConfig& c) {
  if (c.model == "landau") return landau_system(c.landau).gain;
  return laser_system_rotating(c.laser).gain;
}

Problem build_problem(const RunConfig& c) {
  c.validate();
  Problem p;
  if (c.model == "landau") {
    const LandauModel m = landau_system(c.landau);
    p.sys = m.system;
    p.gain = m.gain;
    p.orbit = c.branch == "antiphase" ? landau_antiphase_orbit(c.landau)
                                      : landau_synchronized_orbit(c.landau);
    if (c.control == "equivariant") {
      p.kind = CriterionKind::finite;
      p.action = m.swap;
      p.law = equivariant_control(p.gain, m.swap);
    } else {
      p.kind = CriterionKind::standard;
      p.action = {Mat::Identity(4, 4), p.orbit.period()};
      p.law = standard_control(p.gain, p.orbit.period());
    }
    return p;
  }
  LaserParams lp = c.laser;
  if (!c.orbit_file.empty()) {
    // The orbit file fixes the frame frequency.
    LaserParams probe = lp;
    const Orbit o = load_orbit(c.orbit_file, laser_system_rotating(probe).system.rhs);
    if (!o.omega()) throw ConfigError("laser orbit file carries no frame frequency");
    lp.omega = *o.omega();
    const LaserModel m = laser_system_rotating(lp);
    p.sys = m.system;
    p.orbit = Orbit(o.period(), *o.trajectory(), m.system.rhs, o.omega());
    p.rotation = m.rotation;
    p.gain = m.gain;
  } else {
    const ShootingResult r = laser_reference_orbit(lp, std::min(1e-8, 100.0 * c.tol));
    lp.omega = *r.omega;
    const LaserModel m = laser_system_rotating(lp);
    p.sys = m.system;
    p.orbit = Orbit(r.orbit.period(), *r.orbit.trajectory(), m.system.rhs, r.omega);
    p.rotation = m.rotation;
    p.gain = m.gain;
  }
  p.kind = CriterionKind::s1;
  p.action = {Mat::Identity(6, 6), p.orbit.period()};
  p.law = standard_control(p.gain, p.orbit.period());
  return p;
}

CriterionContext prepare(const Problem& p, const RunConfig& c) {
  CriterionOptions o;
  o.tol = c.tol;
  o.mu_max = c.mu_max;
  switch (p.kind) {
    case CriterionKind::finite:
      return prepare_finite(p.sys, p.orbit, p.action, o);
    case CriterionKind::standard:
      return prepare_standard(p.sys, p.orbit, o);
    case CriterionKind::s1:
      return prepare_s1(p.sys, p.orbit, *p.rotation, o);
  }
  throw PreconditionError("unknown criterion kind");
}

AnalyzeResult run_analyze(const RunConfig& c) {
  const Problem p = build_problem(c);
  const CriterionContext ctx = prepare(p, c);
  AnalyzeResult r;
  r.floquet = ctx.floquet;
  r.verdict = evaluate(ctx, p.gain);
  if (r.verdict.excluded) {
    if (auto mu = find_unstable_root(ctx, p.gain, r.verdict)) {
      const CertificateReport cert = verify_certificate(ctx, p.gain, *mu);
      r.verdict.certificate = Certificate{*mu, cert.nu};
      r.certificate = cert;
    }
  }
  return r;
}

namespace {

bool gain_only(const RunConfig& c, const std::string& name) {
  if (c.model == "landau") return name == "b_re" || name == "b_im";
  return name == "b0" || name == "beta";
}

double axis_value(const ScanAxis& a, int i) {
  if (a.steps == 1) return a.min;
  return a.min + (a.max - a.min) * i / (a.steps - 1);
}

ScanCell scan_cell(const RunConfig& base, const ScanAxis& xa, const ScanAxis& ya, int i, int j,
                   const Problem* shared_problem, const CriterionContext* shared_ctx) {
  ScanCell cell;
  cell.x = axis_value(xa, i);
  cell.y = axis_value(ya, j);
  RunConfig c = base;
  try {
    c.set_param(xa.param, cell.x);
    c.set_param(ya.param, cell.y);
    std::optional<Problem> own_problem;
    std::optional<CriterionContext> own_ctx;
    if (!shared_problem) {
      own_problem = build_problem(c);
      own_ctx = prepare(*own_problem, c);
    }
    const Problem& p = shared_problem ? *shared_problem : *own_problem;
    const CriterionContext& ctx = shared_ctx ? *shared_ctx : *own_ctx;
    const GainMatrix k = gain_of(c);
    const CriterionVerdict v = evaluate(ctx, k);
    cell.N = v.N;
    cell.expression = v.expression;
    cell.excluded = v.excluded;
    if (v.excluded) {
      cell.region = "black";
      try {
        cell.mu_star = find_unstable_root(ctx, k, v);
      } catch (const ConvergenceError&) {
        cell.status = "root-search-failed";
      }
    } else {
      cell.region = "inconclusive";
    }
    cell.simulation = "skipped";
    const bool simulate = v.excluded ? base.scan.classify_excluded : base.scan.classify;
    if (simulate) {
      StabilityOptions so;
      so.perturb_size = base.stability.perturb;
      so.horizon = base.stability.horizon;
      so.tol = base.tol;
      so.seed = base.seed + static_cast<std::uint64_t>(j) * 100003u + static_cast<std::uint64_t>(i);
      ControlLaw law = p.law;
      law.gain = k;
      const StabilityClassification s =
          classify_stability(p.sys, law, p.orbit, p.rotation ? &*p.rotation : nullptr, so);
      cell.simulation = to_string(s.verdict);
      cell.rate = s.transversal_rate;
      if (!v.excluded && !v.inconclusive) {
        if (s.verdict == Stability::stable) cell.region = "white";
        else if (s.verdict == Stability::unstable) cell.region = "gray";
      }
    }
  } catch (const HypothesisError&) {
    cell.status = "hypothesis";
    cell.region = "inconclusive";
  } catch (const ConvergenceError&) {
    cell.status = "convergence";
    cell.region = "inconclusive";
  } catch (const Error& e) {
    cell.status = "error";
    cell.region = "inconclusive";
  }
  return cell;
}

}  // namespace

std::vector<ScanCell> run_scan(const RunConfig& c, int jobs) {
  c.validate();
  const ScanAxis& xa = c.scan.x;
  const ScanAxis& ya = c.scan.y;
  std::optional<Problem> shared_problem;
  std::optional<CriterionContext> shared_ctx;
  if (gain_only(c, xa.param) && gain_only(c, ya.param)) {
    shared_problem = build_problem(c);
    shared_ctx = prepare(*shared_problem, c);
  }
  const int total = xa.steps * ya.steps;
  std::vector<ScanCell> cells(total);
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, total);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next++; idx < total; idx = next++) {
      const int j = idx / xa.steps, i = idx % xa.steps;
      cells[idx] = scan_cell(c, xa, ya, i, j, shared_problem ? &*shared_problem : nullptr,
                             shared_ctx ? &*shared_ctx : nullptr);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

SimulationOutput run_simulate(const RunConfig& c) {
  const Problem p = build_problem(c);
  const double T = p.orbit.period();
  Vec pert;
  if (c.simulate.history == "perturbed") {
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal;
    pert.resize(p.sys.dim);
    for (int i = 0; i < p.sys.dim; ++i) pert[i] = normal(rng);
    double amp = 0.0;
    for (int k = 0; k < 64; ++k) amp = std::max(amp, p.orbit.state(T * k / 64).norm());
    pert *= c.simulate.perturb * amp / pert.norm();
  }
  IntegratorOptions io;
  io.rtol = io.atol = c.tol;
  io.max_step = T / 200.0;
  const double t_end = c.simulate.periods * T;
  const DdeResult r = dde_integrate(p.sys, p.law, orbit_history(p.orbit, p.law.delay, pert), t_end, io);
  SimulationOutput out;
  out.escaped = r.escaped;
  out.escape_time = r.escape_time;
  const double reach = r.escaped ? r.traj.t1() : t_end;
  const double dt = T / c.simulate.samples_per_period;
  const S1Generator* rot = p.rotation ? &*p.rotation : nullptr;
  for (long k = 0;; ++k) {
    const double t = k * dt;
    if (t > reach + 1e-12 * T) break;
    const Vec x = r.traj.eval(std::min(t, reach));
    out.times.push_back(t);
    out.states.push_back(x);
    out.deviation.push_back(distance_to_orbit(x, p.orbit, rot));
  }
  const std::size_t n = out.deviation.size(), first = n / 2;
  if (n - first >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - first);
    for (std::size_t i = first; i < n; ++i) {
      const double x = out.times[i] / T, y = std::log(std::max(out.deviation[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.fitted_rate = std::exp((m * sxy - sx * sy) / (m * sxx - sx * sx));
  }
  return out;
}

std::string provenance_header(const std::string& command_line, const RunConfig& c) {
  std::ostringstream os;
  os << "# oddlimit " << ODDLIMIT_VERSION << '\n';
  os << "# command: " << command_line << '\n';
  for (const auto& [k, v] : c.describe()) os << "# " << k << " = " << v << '\n';
  return os.str();
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

}  // namespace

void write_analyze_csv(std::ostream& os, const AnalyzeResult& r) {
  const CriterionVerdict& v = r.verdict;
  os << "kind,N,hypothesis_ok,c11,c12,c21,c22,expression,excluded,inconclusive,mu_star,"
        "certificate_residual\n";
  auto c = [&](int i, int j) -> std::string {
    return i < v.c.rows() && j < v.c.cols() ? num(v.c(i, j)) : "";
  };
  os << to_string(v.kind) << ',' << v.N << ',' << (r.floquet.hypothesis_ok ? "true" : "false")
     << ',' << c(0, 0) << ',' << c(0, 1) << ',' << c(1, 0) << ',' << c(1, 1) << ','
     << num(v.expression) << ',' << (v.excluded ? "true" : "false") << ','
     << (v.inconclusive ? "true" : "false") << ','
     << (v.certificate ? num(v.certificate->mu) : "") << ','
     << (r.certificate ? num(r.certificate->residual) : "") << '\n';
}

void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
  os << "x,y,status,N,expression,excluded,region,simulation,rate,mu_star\n";
  for (const ScanCell& c : cells) {
    os << num(c.x) << ',' << num(c.y) << ',' << c.status << ',' << c.N << ','
       << num(c.expression) << ',' << (c.excluded ? "true" : "false") << ',' << c.region << ','
       << c.simulation << ',' << num(c.rate) << ',' << (c.mu_star ? num(*c.mu_star) : "") << '\n';
  }
}

void write_simulation_csv(std::ostream& os, const SimulationOutput& s) {
  os << "t";
  const int n = s.states.empty() ? 0 : static_cast<int>(s.states.front().size());
  for (int i = 0; i < n; ++i) os << ",x" << i;
  os << ",deviation\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    os << num(s.times[k]);
    for (int i = 0; i < n; ++i) os << ',' << num(s.states[k][i]);
    os << ',' << num(s.deviation[k]) << '\n';
  }
  if (s.escaped) os << "# escaped at t = " << num(s.escape_time) << '\n';
  os << "# fitted_rate_per_period = " << num(s.fitted_rate) << '\n';
}

}  // namespace oddlimit
