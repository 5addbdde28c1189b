#include "lyaplab/devmaps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "lyaplab/errors.hpp"

namespace lyaplab::devmaps {

namespace odeint = boost::numeric::odeint;

// ------------------------------------------------------------- evaluators

ProjPoint dev_of_frame(const Frame2& y) {
  ProjPoint p(2);
  p << y(0, 0), y(0, 1);
  return p;
}

ProjPoint DevelopingMap::operator()(HPoint z) const {
  switch (kind) {
    case DevKind::identity:
    case DevKind::veronese: {
      ProjPoint p(target_dim);
      Complex power = 1.0;
      for (int k = target_dim - 1; k >= 0; --k) {
        p(k) = power;
        power *= z.z();
      }
      return p;
    }
    case DevKind::ode: {
      const OdeTrace tr = ode_develop(ode.phi, ode.init, {ode.base.z(), z.z()}, ode.opts);
      return dev_of_frame(tr.frames.back());
    }
  }
  throw std::logic_error("unhandled developing map kind");
}

DevelopingMap identity_dev(const linrep::Representation& rep2) {
  if (rep2.dim != 2) throw ValidationError("identity developing map needs a rank-2 representation");
  DevelopingMap d;
  d.kind = DevKind::identity;
  d.target_dim = 2;
  d.equivariance = rep2;
  return d;
}

DevelopingMap veronese_dev(int n, const linrep::Representation* rank2) {
  if (n < 2) throw ValidationError("Veronese map needs n >= 2");
  DevelopingMap d;
  d.kind = n == 2 ? DevKind::identity : DevKind::veronese;
  d.target_dim = n;
  if (rank2) d.equivariance = n == 2 ? *rank2 : linrep::sym_power(*rank2, n - 1);
  return d;
}

DevelopingMap ode_dev(PhiOracle phi, HPoint base, const Frame2& init, const OdeOptions& opts) {
  if (!phi) throw ValidationError("ode developing map needs a quadratic differential");
  if (!(std::abs(init.determinant()) > 0.0)) throw ValidationError("initial frame must be invertible");
  DevelopingMap d;
  d.kind = DevKind::ode;
  d.target_dim = 2;
  d.ode = OdeData{std::move(phi), base, init, opts};
  return d;
}

Frame2 standard_frame(HPoint base) {
  Frame2 y;
  y << base.z(), 1.0, 1.0, 0.0;
  return y;
}

// --------------------------------------------------------------------- ODE

namespace {

using State = std::array<double, 8>;

void pack(const Frame2& y, State& s) {
  for (int i = 0; i < 4; ++i) {
    s[2 * i] = y(i / 2, i % 2).real();
    s[2 * i + 1] = y(i / 2, i % 2).imag();
  }
}

Frame2 unpack(const State& s) {
  Frame2 y;
  for (int i = 0; i < 4; ++i) y(i / 2, i % 2) = {s[2 * i], s[2 * i + 1]};
  return y;
}

// Y' = h·[[0, 1], [−φ(a + τh)/2, 0]]·Y in the segment parameter τ ∈ [0, 1].
struct SegmentSystem {
  const PhiOracle& phi;
  Complex a, h;

  void operator()(const State& s, State& ds, double tau) const {
    const Complex q = -0.5 * phi(a + tau * h);
    for (int col = 0; col < 2; ++col) {
      const Complex u(s[2 * col], s[2 * col + 1]);
      const Complex du(s[4 + 2 * col], s[4 + 2 * col + 1]);
      const Complex d0 = h * du;
      const Complex d1 = h * q * u;
      ds[2 * col] = d0.real();
      ds[2 * col + 1] = d0.imag();
      ds[4 + 2 * col] = d1.real();
      ds[4 + 2 * col + 1] = d1.imag();
    }
  }
};

}  // namespace

OdeTrace ode_develop(const PhiOracle& phi, const Frame2& init, const std::vector<Complex>& path,
                     const OdeOptions& opts) {
  if (path.empty()) throw ValidationError("ODE path is empty");
  const Complex det0 = init.determinant();
  if (!(std::abs(det0) > 0.0)) throw ValidationError("initial frame must be invertible");
  OdeTrace out;
  out.frames.push_back(init);
  State state;
  pack(init, state);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Complex a = path[k - 1], b = path[k];
    if (a != b) {
      const SegmentSystem sys{phi, a, b - a};
      auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, 0.25, odeint::runge_kutta_dopri5<State>());
      try {
        out.steps += static_cast<long>(odeint::integrate_adaptive(stepper, sys, state, 0.0, 1.0, 0.05));
      } catch (const odeint::odeint_error& e) {
        throw StiffnessError(fmt::format("ODE step size collapsed on the segment from ({:g},{:g}) to ({:g},{:g}): {}",
                                         a.real(), a.imag(), b.real(), b.imag(), e.what()));
      }
      if (!std::all_of(state.begin(), state.end(), [](double v) { return std::isfinite(v); })) {
        throw StiffnessError(fmt::format("ODE solution blew up near ({:g},{:g})", b.real(), b.imag()));
      }
    }
    out.frames.push_back(unpack(state));
    out.max_wronskian_drift =
        std::max(out.max_wronskian_drift, std::abs(out.frames.back().determinant() - det0) / std::abs(det0));
  }
  return out;
}

// -------------------------------------------------------------- residuals

double projective_distance(const ProjPoint& a, const ProjPoint& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("zero vector is not a projective point");
  if (a.size() != b.size()) throw ValidationError("projective points of different dimension");
  // |a ∧ b| avoids the cancellation in 1 − |⟨a,b⟩|²/(|a|²|b|²) near zero.
  const ProjPoint x = a / na, y = b / nb;
  double wedge = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j) wedge += std::norm(x(i) * y(j) - x(j) * y(i));
  return std::min(1.0, std::sqrt(wedge));
}

double equivariance_residual(const DevelopingMap& dev, const fuchsian::Group& group, const std::vector<Word>& words,
                             const std::vector<HPoint>& points) {
  if (dev.equivariance.dim != dev.target_dim) throw ConfigError("developing map has no matching equivariance rep");
  double worst = 0.0;
  for (const Word& w : words) {
    const hyp::Mobius g = group.eval(w);
    const linrep::MatrixN rho = linrep::eval_word(dev.equivariance, w);
    for (const HPoint& z : points) {
      worst = std::max(worst, projective_distance(dev(g.apply(z)), rho * dev(z)));
    }
  }
  return worst;
}

double phi_equivariance_residual(const PhiOracle& phi, const fuchsian::Group& group,
                                 const std::vector<HPoint>& points) {
  double worst = 0.0;
  for (const hyp::Mobius& g : group.generators) {
    for (const HPoint& z : points) {
      const Complex d = g.derivative(z.z());
      const Complex pz = phi(z.z());
      worst = std::max(worst, std::abs(phi(g.apply(z.z())) * d * d - pz) / std::max(1.0, std::abs(pz)));
    }
  }
  return worst;
}

// ------------------------------------------------------------------- roots

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (!(scale > 0.0)) throw ValidationError("covector must not vanish");
  std::size_t lead = 0;
  while (lead < coeffs.size() && std::abs(coeffs[lead]) <= 1e-14 * scale) ++lead;
  const auto deg = static_cast<Eigen::Index>(coeffs.size() - lead) - 1;
  if (deg <= 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index j = 0; j < deg; ++j) companion(0, j) = -coeffs[lead + 1 + j] / coeffs[lead];
  for (Eigen::Index j = 1; j < deg; ++j) companion(j, j - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
  if (es.info() != Eigen::Success) throw NumericError("companion eigenvalue solver failed");

  auto eval = [&](Complex z, Complex& deriv) {
    Complex p = 0.0;
    deriv = 0.0;
    for (std::size_t k = lead; k < coeffs.size(); ++k) {
      deriv = deriv * z + p;
      p = p * z + coeffs[k];
    }
    return p;
  };
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < deg; ++i) {
    Complex z = es.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      Complex dp;
      const Complex p = eval(z, dp);
      if (std::abs(dp) == 0.0) break;
      const Complex step = p / dp;
      if (!(std::abs(step) < 1e-3 * (1.0 + std::abs(z)))) break;
      z -= step;
    }
    const bool seen = std::any_of(roots.begin(), roots.end(),
                                  [&](Complex r) { return std::abs(r - z) <= 1e-7 * (1.0 + std::abs(z)); });
    if (!seen) roots.push_back(z);
  }
  return roots;
}

// ------------------------------------------------------------ bad points

namespace {

Complex pairing(const Covector& u, const Frame2& y) { return u(0) * y(0, 0) + u(1) * y(0, 1); }
Complex pairing_derivative(const Covector& u, const Frame2& y) { return u(0) * y(1, 0) + u(1) * y(1, 1); }

struct WindingSolver {
  const DevelopingMap& dev;
  const Covector& u;
  const CountOptions& opts;
  hyp::BallSpec ball;
  Complex centre;  // Euclidean centre of the ball
  double radius;   // Euclidean radius
  std::vector<BadPoint> found;

  // Winding number of ⟨u, s⟩ around the square [x0, x0+w] × [y0, y0+w].
  long winding(double x0, double y0, double w) const {
    const std::array<Complex, 5> corners{Complex(x0, y0), Complex(x0 + w, y0), Complex(x0 + w, y0 + w),
                                         Complex(x0, y0 + w), Complex(x0, y0)};
    for (int per_edge = opts.edge_samples; per_edge <= opts.max_edge_samples; per_edge *= 2) {
      std::vector<Complex> path{dev.ode.base.z()};
      for (int e = 0; e < 4; ++e) {
        for (int j = 0; j < per_edge; ++j) {
          path.push_back(corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(j) / per_edge));
        }
      }
      path.push_back(corners[4]);
      const OdeTrace tr = ode_develop(dev.ode.phi, dev.ode.init, path, dev.ode.opts);
      double total = 0.0;
      bool fine = true;
      for (std::size_t k = 2; k < tr.frames.size(); ++k) {
        const Complex f0 = pairing(u, tr.frames[k - 1]), f1 = pairing(u, tr.frames[k]);
        if (f0 == 0.0 || f1 == 0.0) throw NumericError("bad locus meets a counting cell edge");
        const double step = std::arg(f1 / f0);
        if (std::abs(step) >= std::numbers::pi / 2) {
          fine = false;
          break;
        }
        total += step;
      }
      if (fine) return std::lround(total / (2.0 * std::numbers::pi));
    }
    throw NonConvergenceError("phase along a counting cell edge varies too fast");
  }

  bool outside(double x0, double y0, double w) const {
    const double dx = std::max({x0 - centre.real(), 0.0, centre.real() - (x0 + w)});
    const double dy = std::max({y0 - centre.imag(), 0.0, centre.imag() - (y0 + w)});
    return std::hypot(dx, dy) > radius;
  }

  // Newton iteration on ⟨u, s⟩ using the derivative row of the frame.
  std::optional<BadPoint> newton(double x0, double y0, double w) const {
    Complex z(x0 + w / 2, y0 + w / 2);
    for (int it = 0; it < 30; ++it) {
      const Frame2 y = ode_develop(dev.ode.phi, dev.ode.init, {dev.ode.base.z(), z}, dev.ode.opts).frames.back();
      const Complex d = pairing_derivative(u, y);
      if (d == 0.0) return std::nullopt;
      const Complex step = pairing(u, y) / d;
      z -= step;
      if (z.real() < x0 || z.real() > x0 + w || z.imag() < y0 || z.imag() > y0 + w) return std::nullopt;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) return BadPoint{z, 4.0 * std::abs(step) / z.imag() + 1e-12};
    }
    return std::nullopt;
  }

  void cell(double x0, double y0, double w, long wind, int depth) {
    if (wind == 0 || outside(x0, y0, w)) return;
    if (wind == 1) {
      if (auto p = newton(x0, y0, w)) {
        found.push_back(*p);
        return;
      }
    }
    if (depth >= opts.max_depth || w < opts.locate_tol * radius) {
      // A multiple zero (or a cluster below resolution) counts once.
      const Complex z(x0 + w / 2, y0 + w / 2);
      found.push_back({z, std::sqrt(2.0) * w / z.imag()});
      return;
    }
    const double h = w / 2;
    for (int q = 0; q < 4; ++q) {
      const double cx = x0 + (q % 2) * h, cy = y0 + (q / 2) * h;
      if (outside(cx, cy, h)) continue;
      cell(cx, cy, h, winding(cx, cy, h), depth + 1);
    }
  }
};

}  // namespace

std::vector<BadPoint> bad_points(const DevelopingMap& dev, const Covector& u, const hyp::BallSpec* ball,
                                 const CountOptions& opts) {
  if (u.size() != dev.target_dim) throw ValidationError("covector dimension does not match the developing map");
  if (!(u.norm() > 0.0)) throw ValidationError("covector must not vanish");
  std::vector<BadPoint> out;
  if (dev.kind != DevKind::ode) {
    // ⟨u, (z^{n−1}, …, 1)⟩ is the polynomial with coefficients u, leading first.
    const std::vector<Complex> coeffs(u.data(), u.data() + u.size());
    for (const Complex& r : polynomial_roots(coeffs)) {
      if (!(r.imag() > 1e-12 * (1.0 + std::abs(r)))) continue;
      const BadPoint p{r, 1e-10};
      if (ball && hyp::hyp_dist(ball->center, HPoint(r)) > ball->radius_t + opts.boundary_tol) continue;
      out.push_back(p);
    }
    return out;
  }
  if (!ball) throw ValidationError("ode developing maps need a ball to search");
  const double y = ball->center.y(), t = ball->radius_t;
  WindingSolver solver{dev, u, opts, *ball, Complex(ball->center.x(), y * std::cosh(t)), y * std::sinh(t), {}};
  // Slightly enlarged, off-centre square so cell edges avoid symmetric spots.
  const double w = 2.0 * solver.radius * (1.0 + 1e-3 * std::numbers::sqrt2);
  const double x0 = solver.centre.real() - solver.radius * (1.0 + 0.7e-3);
  const double y0 = std::max(solver.centre.imag() - solver.radius * (1.0 + 0.9e-3), 0.5 * y * std::exp(-t));
  if (t > 0.0) solver.cell(x0, y0, w, solver.winding(x0, y0, w), 0);
  for (const auto& p : solver.found) {
    if (hyp::hyp_dist(ball->center, HPoint(p.z)) <= t + std::max(opts.boundary_tol, p.error)) out.push_back(p);
  }
  return out;
}

CountResult bad_locus_count(const DevelopingMap& dev, const Covector& u, const hyp::BallSpec& ball,
                            const CountOptions& opts) {
  CountResult r;
  for (const BadPoint& p : bad_points(dev, u, &ball, opts)) {
    const double d = hyp::hyp_dist(ball.center, HPoint(p.z));
    if (std::abs(d - ball.radius_t) <= std::max(opts.boundary_tol, p.error)) ++r.ambiguous;
    if (d <= ball.radius_t) ++r.count;
  }
  return r;
}

}  // namespace lyaplab::devmaps
