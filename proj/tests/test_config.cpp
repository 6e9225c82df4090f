#include <sstream>

#include "doctest.h"
#include "oddlimit/app.hpp"
#include "oddlimit/config.hpp"

using namespace oddlimit;

TEST_CASE("shipped example configurations parse") {
  auto l = load_config(ODDLIMIT_SOURCE_DIR "/configs/landau.ini");
  CHECK(l.model == "landau");
  CHECK(l.landau.gamma == Complex(1, 1));
  CHECK(l.landau.b == Complex(0.3, 0.2));
  CHECK(l.simulate.history == "perturbed");
  CHECK(l.scan.x.param == "b_re");

  auto z = load_config(ODDLIMIT_SOURCE_DIR "/configs/laser.ini");
  CHECK(z.model == "laser");
  CHECK(z.laser.b0 == 0.3036);
  CHECK(z.laser.beta == 6.0);
  CHECK(z.scan.x.steps == 40);
}

TEST_CASE("defaults") {
  auto d = default_config("laser");
  CHECK(d.laser.phi == -1.24);
  CHECK(d.scan.x.param == "beta");
  auto e = parse_config("[run]\nmodel = landau\n");
  CHECK(e.landau.a == 0.5);
  CHECK(e.branch == "antiphase");
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config("[run]\nmodel = duffing\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[landau]\nalpah = 0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[landau]\nalpha = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[landau]\nalpha = 0.3x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[landau]\ngamma_re = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[landau]\nbranch = synchronized\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\ntol = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\nx = nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\nx_steps = 1000\ny_steps = 1000\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scan]\nclassify = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run\nmodel = laser\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("scan parameters route to the active model") {
  auto c = default_config("laser");
  c.set_param("b0", 0.2);
  CHECK(c.laser.b0 == 0.2);
  CHECK_THROWS_AS(c.set_param("b_re", 0.2), ConfigError);
  auto l = default_config("landau");
  l.set_param("b_re", -0.7);
  CHECK(l.landau.b.real() == -0.7);
}

TEST_CASE("provenance header lists resolved settings") {
  auto c = default_config("landau");
  const std::string h = provenance_header("oddlimit analyze", c);
  std::istringstream is(h);
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    CHECK(line.rfind("# ", 0) == 0);
    ++lines;
  }
  CHECK(lines > 10);
  CHECK(h.find("# landau.b_re = -0.5\n") != std::string::npos);
  CHECK(h.find("# command: oddlimit analyze\n") != std::string::npos);
}

TEST_CASE("analyze on the landau example") {
  auto c = load_config(ODDLIMIT_SOURCE_DIR "/configs/landau.ini");
  auto r = run_analyze(c);
  CHECK(r.verdict.excluded);
  REQUIRE(r.certificate);
  CHECK(r.certificate->valid);
  std::ostringstream os;
  write_analyze_csv(os, r);
  CHECK(os.str().rfind("kind,N,hypothesis_ok", 0) == 0);
}

TEST_CASE("scan is deterministic and agrees with single-point analysis") {
  auto c = default_config("landau");
  c.landau.gamma = {1, 1};
  c.scan.x = {"b_re", -0.8, 0.4, 3};
  c.scan.y = {"b_im", -0.2, 0.2, 2};
  c.scan.classify = false;
  auto a = run_scan(c, 2);
  auto b = run_scan(c, 1);
  REQUIRE(a.size() == 6);
  std::ostringstream sa, sb;
  write_scan_csv(sa, a);
  write_scan_csv(sb, b);
  CHECK(sa.str() == sb.str());
  for (const auto& cell : a) {
    auto one = c;
    one.landau.b = {cell.x, cell.y};
    auto r = run_analyze(one);
    CHECK(r.verdict.expression == doctest::Approx(cell.expression).epsilon(1e-12));
    CHECK(r.verdict.excluded == cell.excluded);
  }
}

TEST_CASE("simulation from the exact orbit stays on it") {
  auto c = default_config("landau");
  c.landau = {0.09, 0.05, {1, 1}, {0.2, -0.3}};
  c.simulate.history = "orbit";
  c.simulate.periods = 5;
  auto s = run_simulate(c);
  CHECK_FALSE(s.escaped);
  for (double d : s.deviation) CHECK(d < 1e-6);
  std::ostringstream os;
  write_simulation_csv(os, s);
  CHECK(os.str().rfind("t,x0,x1,x2,x3,deviation\n", 0) == 0);
}
