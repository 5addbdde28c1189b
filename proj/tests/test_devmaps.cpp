#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "lyaplab/devmaps.hpp"
#include "lyaplab/errors.hpp"

using namespace lyaplab;
using namespace lyaplab::devmaps;

namespace {

const Complex I(0.0, 1.0);

const fuchsian::Group& tri334() {
  static const auto g = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  return g;
}

const linrep::Representation& fuchsian_rep() {
  static const auto r = fuchsian::builtin_representation(tri334(), "fuchsian");
  return r;
}

ProjPoint proj(std::initializer_list<Complex> xs) {
  ProjPoint p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (const Complex& x : xs) p(k++) = x;
  return p;
}

// Closed-form frame for constant φ = c: Y(z) = exp((z − z₀)A)·Y₀ with
// A = [[0, 1], [−c/2, 0]].
Frame2 constant_phi_frame(Complex c, Complex z0, const Frame2& y0, Complex z) {
  const Complex k = std::sqrt(c / 2.0), h = z - z0;
  Frame2 e;
  e << std::cos(k * h), std::sin(k * h) / k, -k * std::sin(k * h), std::cos(k * h);
  return e * y0;
}

std::vector<HPoint> domain_points(gen::Rng& rng, int n) {
  std::vector<HPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back(gen::domain_point(rng, tri334().domain));
  return pts;
}

std::vector<Word> words(gen::Rng& rng, int n, int max_len) {
  std::vector<Word> ws;
  for (int i = 0; i < n; ++i) ws.push_back(gen::word(rng, tri334().num_generators(), max_len));
  return ws;
}

}  // namespace

TEST_CASE("identity chart values") {
  const auto dev = identity_dev(fuchsian_rep());
  CHECK(projective_distance(dev(HPoint::i()), proj({I, 1.0})) < 1e-15);
  CHECK(projective_distance(dev(HPoint(2.0, 3.0)), proj({Complex(2, 3), 1.0})) < 1e-15);
  const auto v2 = veronese_dev(2, &fuchsian_rep());
  gen::Rng rng(301);
  for (int k = 0; k < 50; ++k) {
    const HPoint z = gen::point(rng);
    CHECK((v2(z) - dev(z)).norm() == 0.0);
  }
  CHECK_THROWS_AS(identity_dev(linrep::sym_power(fuchsian_rep(), 2)), ValidationError);
  CHECK_THROWS_AS(veronese_dev(1), ValidationError);
}

TEST_CASE("veronese coordinates are descending powers") {
  const auto dev = veronese_dev(4);
  const Complex z(0.3, 0.8);
  const ProjPoint p = dev(HPoint(z));
  CHECK(std::abs(p(0) - z * z * z) < 1e-15);
  CHECK(std::abs(p(1) - z * z) < 1e-15);
  CHECK(std::abs(p(2) - z) < 1e-15);
  CHECK(p(3) == Complex(1.0));
}

TEST_CASE("property: algebraic developing maps are equivariant") {
  gen::Rng rng(302);
  const auto pts = domain_points(rng, 10);
  const auto ws = words(rng, 100, 6);
  CHECK(equivariance_residual(identity_dev(fuchsian_rep()), tri334(), ws, pts) < 1e-9);
  CHECK(equivariance_residual(veronese_dev(3, &fuchsian_rep()), tri334(), ws, pts) < 1e-7);
  CHECK(equivariance_residual(veronese_dev(4, &fuchsian_rep()), tri334(), ws, pts) < 1e-7);
  // Without an equivariance rep the check is a configuration error.
  CHECK_THROWS_AS(equivariance_residual(veronese_dev(3), tri334(), ws, pts), ConfigError);
  // A mismatched representation is detected.
  const auto wrong = veronese_dev(3, &fuchsian_rep());
  auto broken = wrong;
  broken.equivariance = linrep::conjugate(broken.equivariance, gen::sl(rng, 3));
  CHECK(equivariance_residual(broken, tri334(), ws, pts) > 1e-3);
}

TEST_CASE("bad locus of algebraic maps") {
  const auto id = identity_dev(fuchsian_rep());
  // ⟨u, (z, 1)⟩ vanishes only at −i, outside ℍ.
  CHECK(bad_points(id, proj({1.0, I}), nullptr).empty());
  const auto in = bad_points(id, proj({1.0, -I}), nullptr);
  REQUIRE(in.size() == 1);
  CHECK(std::abs(in[0].z - I) < 1e-14);

  // z² + 1 has its only upper root at i, at distance log 2 from 2i.
  const auto v3 = veronese_dev(3);
  const ProjPoint u = proj({1.0, 0.0, 1.0});
  const HPoint c(0.0, 2.0);
  for (double t : {0.1, 0.5, 0.69, std::log(2.0) - 1e-6}) {
    INFO("t=" << t);
    CHECK(bad_locus_count(v3, u, hyp::BallSpec(c, t)).count == 0);
  }
  for (double t : {std::log(2.0) + 1e-6, 0.7, 1.5, 8.0}) {
    INFO("t=" << t);
    CHECK(bad_locus_count(v3, u, hyp::BallSpec(c, t)).count == 1);
  }
  const auto at = bad_locus_count(v3, u, hyp::BallSpec(c, std::log(2.0)));
  CHECK(at.count == 1);
  CHECK(at.ambiguous == 1);

  CHECK_THROWS_AS(bad_points(v3, proj({1.0, 0.0}), nullptr), ValidationError);
  CHECK_THROWS_AS(bad_points(v3, proj({0.0, 0.0, 0.0}), nullptr), ValidationError);
}

TEST_CASE("property: polynomial roots against constructed polynomials") {
  gen::Rng rng(303);
  for (int c = 0; c < 200; ++c) {
    INFO("case " << c);
    const int deg = gen::integer(rng, 1, 6);
    std::vector<Complex> roots;
    for (int k = 0; k < deg; ++k) roots.emplace_back(gen::uniform(rng, -3, 3), gen::uniform(rng, -3, 3));
    const Complex lead(gen::uniform(rng, 0.5, 2.0), gen::uniform(rng, -1.0, 1.0));
    std::vector<Complex> coeffs{lead};
    for (const Complex& r : roots) {
      coeffs.push_back(0.0);
      for (std::size_t j = coeffs.size() - 1; j > 0; --j) coeffs[j] -= r * coeffs[j - 1];
    }
    bool separated = true;
    for (std::size_t a = 0; a < roots.size(); ++a)
      for (std::size_t b = a + 1; b < roots.size(); ++b) separated = separated && std::abs(roots[a] - roots[b]) > 0.05;
    if (!separated) continue;
    const auto found = polynomial_roots(coeffs);
    REQUIRE(found.size() == roots.size());
    for (const Complex& r : roots) {
      double best = 1e9;
      for (const Complex& f : found) best = std::min(best, std::abs(f - r));
      CHECK(best < 1e-8);
    }
  }
  CHECK(polynomial_roots({1.0, -2.0, 1.0}).size() == 1);  // double root at 1
  const auto lin = polynomial_roots({0.0, 1.0, -2.0});    // degree drops
  REQUIRE(lin.size() == 1);
  CHECK(std::abs(lin[0] - 2.0) < 1e-14);
  CHECK(polynomial_roots({3.0}).empty());
  CHECK_THROWS_AS(polynomial_roots({0.0, 0.0}), ValidationError);
}

TEST_CASE("ode: zero differential reproduces the identity chart") {
  gen::Rng rng(304);
  const HPoint base(0.2, 1.3);
  const auto dev = ode_dev([](Complex) { return Complex(0.0); }, base, standard_frame(base));
  for (int k = 0; k < 30; ++k) {
    const HPoint z(gen::uniform(rng, -2, 2), std::exp(gen::uniform(rng, -1, 1)));
    CHECK(projective_distance(dev(z), proj({z.z(), 1.0})) < 1e-10);
  }
  CHECK_THROWS_AS(ode_dev(nullptr, base, standard_frame(base)), ValidationError);
  CHECK_THROWS_AS(ode_dev([](Complex) { return Complex(0.0); }, base, Frame2::Zero()), ValidationError);
}

TEST_CASE("ode: constant differentials match the matrix exponential") {
  gen::Rng rng(305);
  for (const Complex c : {Complex(2.0), Complex(1.0, 1.0), Complex(-0.5, 0.2)}) {
    const Complex z0(0.0, 1.0);
    Frame2 y0;
    y0 << Complex(1.0, 0.3), 0.5, Complex(0.0, -1.0), 2.0;
    const std::vector<Complex> path{z0, Complex(1.0, 1.5), Complex(-0.5, 2.0), Complex(0.3, 0.6)};
    const auto tr = ode_develop([c](Complex) { return c; }, y0, path);
    REQUIRE(tr.frames.size() == path.size());
    CHECK(tr.frames[0] == y0);
    for (std::size_t k = 1; k < path.size(); ++k) {
      INFO("c=" << c << " vertex " << k);
      const Frame2 expect = constant_phi_frame(c, z0, y0, path[k]);
      CHECK((tr.frames[k] - expect).norm() / expect.norm() < 1e-8);
    }
    CHECK(tr.steps > 0);
  }
}

TEST_CASE("ode: Wronskian and closed-loop monodromy") {
  const std::vector<Complex> path{Complex(0, 1), Complex(3, 1), Complex(3, 3), Complex(0, 3), Complex(0, 1)};
  double length = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) length += std::abs(path[k] - path[k - 1]);
  CHECK(length == doctest::Approx(10.0));
  for (const PhiOracle& phi : {PhiOracle([](Complex z) { return 1.0 / (z * z); }),
                               PhiOracle([](Complex z) { return std::exp(I * z); }),
                               PhiOracle([](Complex z) { return z * z - 1.0; })}) {
    const auto tr = ode_develop(phi, standard_frame(HPoint::i()), path);
    CHECK(tr.max_wronskian_drift < 1e-8);
    // φ is holomorphic on the simply connected half-plane: trivial monodromy.
    CHECK((tr.frames.back() - tr.frames.front()).norm() < 1e-7);
  }
}

TEST_CASE("property: changing the initial frame is a projective change of coordinates") {
  gen::Rng rng(306);
  const PhiOracle phi = [](Complex z) { return 0.5 / (z * z) + 0.1 * z; };
  const HPoint base = HPoint::i();
  for (int c = 0; c < 10; ++c) {
    Frame2 m;
    m << Complex(gen::uniform(rng, 0.5, 2), gen::uniform(rng, -1, 1)), Complex(gen::uniform(rng, -1, 1), 0.0), 0.0,
        Complex(gen::uniform(rng, 0.5, 2), gen::uniform(rng, -1, 1));
    const Frame2 y0 = standard_frame(base);
    const auto a = ode_dev(phi, base, y0), b = ode_dev(phi, base, y0 * m);
    const HPoint z(gen::uniform(rng, -1.5, 1.5), std::exp(gen::uniform(rng, -0.7, 0.7)));
    const ProjPoint sa = a(z);
    CHECK(projective_distance(b(z), m.transpose() * sa) < 1e-9);
    // m is upper triangular, so the first coordinate is rescaled only.
    CHECK(std::abs(b(z)(0) - m(0, 0) * sa(0)) < 1e-8 * std::abs(sa(0)) + 1e-12);
  }
}

TEST_CASE("ode: zeros of a constant differential against the closed form") {
  // φ = 2 with frame exp(iA) at i gives u₁ = cos z, u₂ = sin z, and
  // ⟨u, s⟩ ∝ sin(w − z) vanishes exactly on w + πℤ.
  Frame2 y0;
  y0 << std::cos(I), std::sin(I), -std::sin(I), std::cos(I);
  const auto dev = ode_dev([](Complex) { return Complex(2.0); }, HPoint::i(), y0);
  const Complex w(0.3, 1.2);
  const ProjPoint u = proj({1.0, -1.0 / std::tan(w)});
  const HPoint c(0.5, 1.0);
  long prev = 0;
  for (double t : {0.4, 1.0, 1.7, 2.2, 2.9, 3.4}) {
    long expect = 0;
    for (int n = -20; n <= 20; ++n) {
      const double d = hyp::hyp_dist(c, HPoint(w + std::numbers::pi * n));
      REQUIRE(std::abs(d - t) > 1e-3);
      if (d <= t) ++expect;
    }
    INFO("t=" << t);
    const auto r = bad_locus_count(dev, u, hyp::BallSpec(c, t));
    CHECK(r.count == expect);
    CHECK(r.ambiguous == 0);
    CHECK(r.count >= prev);
    prev = r.count;
  }
  CHECK(prev >= 3);
  const hyp::BallSpec ball(c, 2.2);
  const auto pts = bad_points(dev, u, &ball);
  for (const auto& p : pts) {
    const double n = std::round((p.z - w).real() / std::numbers::pi);
    CHECK(std::abs(p.z - (w + std::numbers::pi * n)) < 1e-8);
  }
  CHECK_THROWS_AS(bad_points(dev, u, nullptr), ValidationError);
}

TEST_CASE("property: nested balls give nondecreasing counts") {
  gen::Rng rng(307);
  const auto v4 = veronese_dev(4);
  for (int c = 0; c < 40; ++c) {
    ProjPoint u(4);
    for (int k = 0; k < 4; ++k) u(k) = {gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    const HPoint centre = gen::point(rng);
    long prev = 0;
    for (double t = 0.25; t <= 8.0; t += 0.25) {
      const long n = bad_locus_count(v4, u, hyp::BallSpec(centre, t)).count;
      CHECK(n >= prev);
      CHECK(n <= 3);
      prev = n;
    }
  }
}

TEST_CASE("weight-4 residual of quadratic differentials") {
  gen::Rng rng(308);
  const auto pts = domain_points(rng, 20);
  CHECK(phi_equivariance_residual([](Complex) { return Complex(0.0); }, tri334(), pts) == 0.0);
  CHECK(phi_equivariance_residual([](Complex) { return Complex(1.0); }, tri334(), pts) > 1e-3);
}

TEST_CASE("ode: a pole on the path is reported") {
  const PhiOracle pole = [](Complex z) { return 1.0 / std::pow(z - Complex(0.0, 2.0), 4); };
  CHECK_THROWS_AS(ode_develop(pole, standard_frame(HPoint::i()), {Complex(0, 1), Complex(0, 3)}), StiffnessError);
  CHECK_THROWS_AS(ode_develop(pole, standard_frame(HPoint::i()), {}), ValidationError);
}

TEST_CASE("projective distance") {
  CHECK(projective_distance(proj({1.0, 2.0}), proj({Complex(0, 3), Complex(0, 6)})) < 1e-15);
  CHECK(projective_distance(proj({1.0, 0.0}), proj({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(projective_distance(proj({0.0, 0.0}), proj({1.0, 0.0})), NumericError);
}
