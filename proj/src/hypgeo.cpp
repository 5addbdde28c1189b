#include "lyaplab/hypgeo.hpp"

#include <cmath>
#include <string>

#include "lyaplab/errors.hpp"

namespace lyaplab::hyp {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Rotation about i by `angle`; its derivative at i is e^{i·angle}.
Mobius rotation_about_i(double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return Mobius(c, s, -s, c);
}

}  // namespace

HPoint::HPoint(double x, double y) : x_(x), y_(y) {
  if (!std::isfinite(x) || !std::isfinite(y) || !(y > 0.0)) {
    throw ValidationError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") is not in the upper half-plane");
  }
}

double reduce_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

UnitTangent::UnitTangent(HPoint b, double a) : base(b), angle(reduce_angle(a)) {
  if (!std::isfinite(a)) throw ValidationError("unit tangent angle is not finite");
}

Mobius::Mobius(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!std::isfinite(det) || !(det > 0.0)) {
    throw ValidationError("Möbius matrix must have positive finite determinant");
  }
  const double s = std::sqrt(det);
  a_ = a / s;
  b_ = b / s;
  c_ = c / s;
  d_ = d / s;
}

Mobius Mobius::translation(double dx) { return {1.0, dx, 0.0, 1.0}; }

Mobius Mobius::dilation(double k) {
  if (!(k > 0.0)) throw ValidationError("dilation factor must be positive");
  const double r = std::sqrt(k);
  return {r, 0.0, 0.0, 1.0 / r};
}

Mobius Mobius::rotation(HPoint center, double angle) {
  const Mobius to_center = translation(center.x()) * dilation(center.y());
  return to_center * rotation_about_i(angle) * to_center.inverse();
}

Mobius Mobius::frame(const UnitTangent& ut) {
  return translation(ut.base.x()) * dilation(ut.base.y()) * rotation_about_i(ut.angle - kHalfPi);
}

Mobius Mobius::inverse() const { return {d_, -b_, -c_, a_}; }

Mobius Mobius::operator*(const Mobius& r) const {
  return {a_ * r.a_ + b_ * r.c_, a_ * r.b_ + b_ * r.d_, c_ * r.a_ + d_ * r.c_,
          c_ * r.b_ + d_ * r.d_};
}

Complex Mobius::apply(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }

HPoint Mobius::apply(HPoint z) const {
  const Complex w = apply(z.z());
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || !(w.imag() > 1e-300)) {
    throw NumericError("Möbius image degenerated to the boundary");
  }
  return HPoint(w);
}

Complex Mobius::derivative(Complex z) const {
  const Complex den = c_ * z + d_;
  return 1.0 / (den * den);
}

UnitTangent Mobius::apply(const UnitTangent& ut) const {
  return {apply(ut.base), ut.angle + std::arg(derivative(ut.base.z()))};
}

double hyp_dist(HPoint z, HPoint w) {
  return 2.0 * std::asinh(std::abs(z.z() - w.z()) / (2.0 * std::sqrt(z.y() * w.y())));
}

UnitTangent geodesic_flow(const UnitTangent& ut, double t) {
  if (!std::isfinite(t)) throw ValidationError("flow time must be finite");
  // Keep e^t comfortably inside double range.
  if (std::abs(t) > 20.0) return geodesic_flow(geodesic_flow(ut, t / 2.0), t / 2.0);
  const Mobius m = Mobius::frame(ut);
  const Complex w(0.0, std::exp(t));
  return {m.apply(HPoint(w)), std::arg(m.derivative(w)) + kHalfPi};
}

double ball_volume(double t) {
  if (!(t >= 0.0)) throw ValidationError("ball radius must be nonnegative");
  const double s = std::sinh(t / 2.0);
  return 4.0 * std::numbers::pi * s * s;
}

BallSpec::BallSpec(HPoint c, double t) : center(c), radius_t(t) {
  if (!(t >= 0.0)) throw ValidationError("ball radius must be nonnegative");
}

GeodesicLine GeodesicLine::through(HPoint p, HPoint q) {
  GeodesicLine g;
  const double dx = p.x() - q.x();
  if (std::abs(dx) <= 1e-14 * (1.0 + std::abs(p.x()) + std::abs(q.x()))) {
    if (std::abs(p.y() - q.y()) == 0.0) throw ValidationError("geodesic needs distinct points");
    g.vertical = true;
    g.offset = 0.5 * (p.x() + q.x());
    return g;
  }
  g.offset = (std::norm(p.z()) - std::norm(q.z())) / (2.0 * dx);
  g.radius = std::abs(p.z() - g.offset);
  return g;
}

int GeodesicLine::side_of(HPoint z, double tol) const {
  // Signed sinh of the distance to the line.
  const double s = vertical ? (z.x() - offset) / z.y()
                            : (std::norm(z.z() - offset) - radius * radius) / (2.0 * radius * z.y());
  if (std::abs(s) <= tol) return 0;
  return s > 0.0 ? 1 : -1;
}

double GeodesicLine::distance(HPoint z) const {
  const double s = vertical ? (z.x() - offset) / z.y()
                            : (std::norm(z.z() - offset) - radius * radius) / (2.0 * radius * z.y());
  return std::asinh(std::abs(s));
}

GeodesicLine GeodesicArc::carrier() const {
  // The carrier is the image of the imaginary axis; its ideal endpoints are
  // the images of 0 and ∞.
  const Mobius m = Mobius::frame(start);
  GeodesicLine g;
  if (std::abs(m.c()) < 1e-300 || std::abs(m.d()) < 1e-300) {
    g.vertical = true;
    g.offset = std::abs(m.c()) < 1e-300 ? m.b() / m.d() : m.a() / m.c();
    return g;
  }
  const double e0 = m.b() / m.d();
  const double e1 = m.a() / m.c();
  g.offset = 0.5 * (e0 + e1);
  g.radius = 0.5 * std::abs(e1 - e0);
  return g;
}

std::optional<double> arc_side_crossing(const GeodesicArc& arc, const GeodesicSegment& side,
                                        double tol) {
  const Mobius pull = Mobius::frame(arc.start).inverse();
  const Complex a = pull.apply(side.from.z());
  const Complex b = pull.apply(side.to.z());
  // The arc is now the imaginary axis above i. Re z is monotone along any
  // semicircle, so the segment meets the axis iff its ends straddle it.
  const double scale = std::abs(a) + std::abs(b);
  const bool a_on = std::abs(a.real()) <= tol * scale;
  const bool b_on = std::abs(b.real()) <= tol * scale;
  if (a_on && b_on) throw TangencyError("arc runs along the side geodesic");
  if (!a_on && !b_on && ((a.real() > 0.0) == (b.real() > 0.0))) return std::nullopt;

  double height = 0.0;
  if (a_on) {
    height = a.imag();
  } else if (b_on) {
    height = b.imag();
  } else {
    const double center = (std::norm(a) - std::norm(b)) / (2.0 * (a.real() - b.real()));
    const double h2 = std::norm(a) - 2.0 * center * a.real();
    if (!(h2 > 0.0)) return std::nullopt;
    height = std::sqrt(h2);
  }
  const double s = std::log(height);
  if (std::abs(s) <= tol) throw TangencyError("arc starts on the side");
  if (s < 0.0 || s > arc.length) return std::nullopt;
  return s;
}

double direction_towards(HPoint from, HPoint to) {
  const Complex w((to.x() - from.x()) / from.y(), to.y() / from.y());
  const Complex i(0.0, 1.0);
  return reduce_angle(std::arg((w - i) / (w + i)) + kHalfPi);
}

}  // namespace lyaplab::hyp
