#include "oddlimit/orbit.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace oddlimit {

namespace {

constexpr const char* kMagic = "oddlimit-orbit";
constexpr int kFormatVersion = 1;

void put(std::ostream& os, double v) { os << ' ' << std::hexfloat << v << std::defaultfloat; }

double get(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw ConfigError("orbit file: unexpected end of data");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ConfigError("orbit file: bad number '" + tok + "'");
  return v;
}

void expect(std::istream& is, const std::string& key) {
  std::string tok;
  if (!(is >> tok) || tok != key) {
    throw ConfigError("orbit file: expected '" + key + "', found '" + tok + "'");
  }
}

}  // namespace

std::string orbit_to_text(const Orbit& o) {
  const DenseTrajectory* traj = o.trajectory();
  if (!traj || o.closed_form()) {
    throw PreconditionError("only trajectory-backed orbits can be serialized");
  }
  // Shifted or transformed views are not representable; serialize the base orbit.
  if ((o.state(0.0) - traj->eval(0.0)).norm() != 0.0) {
    throw PreconditionError("serialize the untransformed orbit");
  }
  std::ostringstream os;
  const int n = traj->dim();
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "dim " << n << '\n';
  os << "period";
  put(os, o.period());
  os << '\n';
  os << "omega";
  if (o.omega()) {
    put(os, *o.omega());
  } else {
    os << " none";
  }
  os << '\n';
  os << "end";
  put(os, traj->t1());
  const Vec e = traj->final_state();
  for (int i = 0; i < n; ++i) put(os, e[i]);
  os << '\n';
  os << "segments " << traj->segments().size() << '\n';
  for (const DenseSegment& s : traj->segments()) {
    os << "seg";
    put(os, s.t0);
    put(os, s.h);
    for (int c = 0; c < 5; ++c) {
      for (int i = 0; i < n; ++i) put(os, s.coeffs(i, c));
    }
    os << '\n';
  }
  return os.str();
}

Orbit orbit_from_text(const std::string& text, VectorField rhs) {
  std::istringstream is(text);
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kMagic) throw ConfigError("not an orbit file");
  if (version != kFormatVersion) {
    throw ConfigError("unsupported orbit file version " + std::to_string(version));
  }
  int n = 0;
  expect(is, "dim");
  if (!(is >> n) || n <= 0) throw ConfigError("orbit file: bad dimension");
  expect(is, "period");
  const double period = get(is);
  expect(is, "omega");
  std::optional<double> omega;
  {
    std::string tok;
    is >> tok;
    if (tok != "none") {
      char* end = nullptr;
      omega = std::strtod(tok.c_str(), &end);
      if (*end != '\0') throw ConfigError("orbit file: bad omega");
    }
  }
  expect(is, "end");
  const double end_time = get(is);
  Vec end_state(n);
  for (int i = 0; i < n; ++i) end_state[i] = get(is);
  std::size_t count = 0;
  expect(is, "segments");
  if (!(is >> count) || count == 0) throw ConfigError("orbit file: bad segment count");
  std::vector<DenseSegment> segs(count);
  for (auto& s : segs) {
    expect(is, "seg");
    s.t0 = get(is);
    s.h = get(is);
    s.coeffs.resize(n, 5);
    for (int c = 0; c < 5; ++c) {
      for (int i = 0; i < n; ++i) s.coeffs(i, c) = get(is);
    }
  }
  return Orbit(period, DenseTrajectory::from_parts(n, std::move(segs), end_time, end_state),
               std::move(rhs), omega);
}

void save_orbit(const std::string& path, const Orbit& o) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << orbit_to_text(o);
}

Orbit load_orbit(const std::string& path, VectorField rhs) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return orbit_from_text(ss.str(), std::move(rhs));
}

}  // namespace oddlimit
