#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/errterm.hpp"

using namespace lyaplab;
using namespace lyaplab::errterm;
using devmaps::Complex;

namespace {

const fuchsian::Group& tri334() {
  static const auto g = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  return g;
}

const linrep::Representation& fuchsian_rep() {
  static const auto r = fuchsian::builtin_representation(tri334(), "fuchsian");
  return r;
}

devmaps::Covector covector(std::initializer_list<Complex> xs) {
  devmaps::Covector u(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (const Complex& x : xs) u(k++) = x;
  return u;
}

// ∫ dt / vol(t) = −coth(t/2) / (2π) for vol(t) = 2π(cosh t − 1).
double inverse_volume_integral(double a, double b) {
  return (1.0 / std::tanh(a / 2) - 1.0 / std::tanh(b / 2)) / (2.0 * std::numbers::pi);
}

oseledets::RunConfig config(double T, int samples, std::uint64_t seed) {
  oseledets::RunConfig c;
  c.T = T;
  c.samples = samples;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(10.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g.front() == 2.5);
  CHECK(g.back() == 10.0);
  CHECK_THROWS_AS(uniform_grid(0.0, 10), ValidationError);
  CHECK_THROWS_AS(uniform_grid(5.0, 0), ValidationError);
}

TEST_CASE("empty point set has zero error term") {
  const auto cf = count_in_balls(std::vector<HPoint>{}, HPoint::i(), uniform_grid(15.0, 300));
  const auto est = err_estimate(cf, 15.0);
  CHECK(est.value == 0.0);
  CHECK(est.averaged == 0.0);
  CHECK(est.unaveraged == 0.0);
  CHECK(est.spread == 0.0);
  CHECK(est.converged);
}

TEST_CASE("single point: step count and closed-form window") {
  const HPoint c = HPoint::i();
  const HPoint p(0.0, std::exp(1.3));  // distance 1.3
  const double T = 12.0;
  const auto cf = count_in_balls({p}, c, uniform_grid(T, 4000));
  for (std::size_t i = 0; i < cf.t.size(); ++i) {
    CHECK(cf.counts[i] == (cf.t[i] >= 1.3 ? 1 : 0));
    CHECK(cf.ambiguous[i] == 0);
  }
  const auto est = err_estimate(cf, T);
  const double expect = std::numbers::pi * inverse_volume_integral(0.6 * T, T) / (0.4 * T);
  CHECK(est.value == doctest::Approx(expect).epsilon(1e-4));
  CHECK(est.unaveraged == doctest::Approx(std::numbers::pi / hyp::ball_volume(T)).epsilon(1e-12));
  CHECK(est.tail_T.size() == 3);
  CHECK(est.tail_T.back() == T);
  CHECK(est.converged);
  // The running average decays like 1/T, the window like e^{−0.6T}.
  CHECK(est.averaged > 100.0 * est.value);
}

TEST_CASE("property: point-set counts agree with orbit enumeration") {
  const auto& g = tri334();
  const HPoint z0 = g.domain.interior_point();
  const auto orbit = fuchsian::orbit_points(g, z0, 6.0);
  std::vector<HPoint> pts;
  for (const auto& p : orbit.points) pts.push_back(p.point);
  const auto cf = count_in_balls(pts, z0, uniform_grid(6.0, 120));
  for (std::size_t i = 0; i < cf.t.size(); ++i) {
    CHECK(cf.counts[i] == static_cast<long>(orbit.count_within(cf.t[i])));
  }

  gen::Rng rng(401);
  for (int c = 0; c < 30; ++c) {
    std::vector<HPoint> random;
    const int n = gen::integer(rng, 0, 40);
    for (int k = 0; k < n; ++k) random.push_back(gen::point(rng));
    const HPoint centre = gen::point(rng);
    const auto rcf = count_in_balls(random, centre, uniform_grid(gen::uniform(rng, 1, 10), 60));
    for (std::size_t i = 1; i < rcf.counts.size(); ++i) CHECK(rcf.counts[i] >= rcf.counts[i - 1]);
    CHECK(rcf.counts.back() <= n);
  }
}

TEST_CASE("property: finite bad loci have vanishing error term") {
  gen::Rng rng(402);
  const auto v3 = devmaps::veronese_dev(3);
  const auto cf = count_in_balls(v3, covector({1.0, 0.0, 1.0}), HPoint(0.0, 2.0), uniform_grid(20.0, 400));
  CHECK(cf.source == CountFunction::Source::devmap);
  CHECK(err_estimate(cf, 20.0).value < 1e-3);
  for (int c = 0; c < 20; ++c) {
    const int n = gen::integer(rng, 2, 5);
    devmaps::Covector u(n);
    for (int k = 0; k < n; ++k) u(k) = {gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const auto dev = devmaps::veronese_dev(n);
    const HPoint centre(gen::uniform(rng, -1, 1), std::exp(gen::uniform(rng, -1, 1)));
    const auto est = err_estimate(count_in_balls(dev, u, centre, uniform_grid(20.0, 400)), 20.0);
    INFO("case " << c);
    CHECK(est.value < 1e-3);
    CHECK(est.converged);
  }
}

TEST_CASE("property: counts do not depend on the covector scale") {
  gen::Rng rng(403);
  const auto v4 = devmaps::veronese_dev(4);
  devmaps::Frame2 y0;
  const Complex I(0.0, 1.0);
  y0 << std::cos(I), std::sin(I), -std::sin(I), std::cos(I);
  const auto ode = devmaps::ode_dev([](Complex) { return Complex(2.0); }, HPoint::i(), y0);
  for (int c = 0; c < 10; ++c) {
    devmaps::Covector u(4);
    for (int k = 0; k < 4; ++k) u(k) = {gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const Complex scale(gen::uniform(rng, 0.1, 5), gen::uniform(rng, -5, 5));
    const HPoint centre = gen::point(rng);
    const auto grid = uniform_grid(6.0, 60);
    CHECK(count_in_balls(v4, u, centre, grid).counts == count_in_balls(v4, scale * u, centre, grid).counts);
  }
  const auto u = covector({1.0, -1.0 / std::tan(Complex(0.3, 1.2))});
  const auto grid = uniform_grid(2.5, 50);
  const auto a = count_in_balls(ode, u, HPoint(0.5, 1.0), grid);
  const auto b = count_in_balls(ode, Complex(0.0, 3.0) * u, HPoint(0.5, 1.0), grid);
  CHECK(a.counts == b.counts);
  CHECK(a.counts.back() > 0);
}

TEST_CASE("orbit calibration recovers pi over the covolume") {
  const auto& g = tri334();
  const auto cal = orbit_calibration(g, 10.0, 400);
  CHECK(cal.target == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(cal.orbit_size > 1000);
  CHECK(std::abs(cal.err.value - cal.target) < 0.1 * cal.target);

  // A different centre and a coarser grid give the same answer.
  const HPoint moved = hyp::geodesic_flow(hyp::UnitTangent(g.domain.interior_point(), 2.5), 0.7).base;
  const auto shifted = orbit_calibration(g, 10.0, 400, moved);
  CHECK(std::abs(shifted.err.value - cal.err.value) < 0.1 * cal.err.value);
  const auto coarse = orbit_calibration(g, 10.0, 200);
  CHECK(std::abs(coarse.err.value - cal.err.value) < 0.01 * cal.err.value);
}

TEST_CASE("estimator validation") {
  const auto cf = count_in_balls({HPoint(0.0, 3.0)}, HPoint::i(), uniform_grid(10.0, 49));
  CHECK_THROWS_AS(err_estimate(cf, 10.0), ValidationError);
  const auto ok = count_in_balls({HPoint(0.0, 3.0)}, HPoint::i(), uniform_grid(10.0, 100));
  CHECK_THROWS_AS(err_estimate(ok, 12.0), ValidationError);
  CHECK_NOTHROW(err_estimate(ok, 10.0));
  // Truncating to an earlier T uses the nodes up to it.
  CHECK_THROWS_AS(err_estimate(ok, 4.0), ValidationError);  // only 40 nodes
  CHECK(err_estimate(ok, 6.0).tail_T.back() == doctest::Approx(6.0));

  CountFunction bad = ok;
  bad.counts[10] = 5;
  CHECK_THROWS_AS(bad.validate(), std::logic_error);
  CountFunction zero = ok;
  zero.t[0] = 0.0;
  CHECK_THROWS_AS(zero.validate(), ValidationError);
  CountFunction ragged = ok;
  ragged.counts.pop_back();
  CHECK_THROWS_AS(ragged.validate(), ValidationError);
}

TEST_CASE("sum rules on the first exponent") {
  const auto& dom = tri334().domain;
  const auto grid = uniform_grid(20.0, 400);
  const HPoint centre(0.3, 1.7);

  const auto fu = oseledets::estimate_spectrum(dom, fuchsian_rep(), config(2000, 64, 501));
  const auto e1 = err_estimate(count_in_balls(devmaps::identity_dev(fuchsian_rep()), covector({1.0, Complex(0.2, -0.9)}),
                                              centre, grid),
                               20.0);
  const auto r1 = sum_rule_check(fu, 1, {1, 1}, e1);
  CHECK(r1.passed);
  CHECK(r1.rhs == doctest::Approx(1.0).epsilon(1e-3));

  const auto sym2 = linrep::sym_power(fuchsian_rep(), 2);
  const auto s2 = oseledets::estimate_spectrum(dom, sym2, config(2000, 64, 502));
  const auto e2 = err_estimate(
      count_in_balls(devmaps::veronese_dev(3, &fuchsian_rep()), covector({1.0, 0.5, Complex(0.1, 2.0)}), centre, grid),
      20.0);
  CHECK(sum_rule_check(s2, 1, {2, 1}, e2).passed);

  const auto triv = oseledets::estimate_spectrum(dom, linrep::trivial(2, 2, tri334().relations), config(200, 8, 503));
  const auto r0 = sum_rule_check(triv, 1, {0, 1}, ErrEstimate{});
  CHECK(r0.passed);
  CHECK(std::abs(r0.lhs) < 1e-12);
  CHECK(r0.rhs == 0.0);

  // A wrong degree ratio is rejected.
  CHECK_FALSE(sum_rule_check(fu, 1, {1, 2}, e1).passed);

  auto c = config(200, 8, 504);
  c.normalization = oseledets::Normalization::minus1;
  const auto m1 = oseledets::estimate_spectrum(dom, fuchsian_rep(), c);
  CHECK_THROWS_AS(sum_rule_check(m1, 1, {1, 1}, e1), ConfigError);
  CHECK_THROWS_AS(sum_rule_check(fu, 1, {1, 0}, e1), ValidationError);
}

TEST_CASE("CSV output") {
  const auto cf = count_in_balls({HPoint(0.0, 3.0), HPoint(1.0, 1.0)}, HPoint::i(), uniform_grid(5.0, 50));
  const auto est = err_estimate(cf, 5.0);
  std::ostringstream out;
  write_err_csv(out, cf, est);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,count,count_over_vol,running_err");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      last = line;
      continue;
    }
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 50);
  CHECK(last.rfind("# err=", 0) == 0);
  for (const char* key : {"tail@3=", "tail@4=", "tail@5=", "spread=", ",converged=", "averaged=", "unaveraged="}) {
    INFO(std::string(key) << " in " << last);
    CHECK(last.find(key) != std::string::npos);
  }
}
