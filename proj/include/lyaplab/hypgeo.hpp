#pragma once

// Hyperbolic plane geometry in the upper half-plane model, curvature -1.
//
// Geodesics are handled in closed form: every oriented geodesic is the image
// of the positive imaginary axis under the Möbius map `Mobius::frame`, and
// arc length along it is log(Im) after pulling back by that map. Nothing in
// this module time-steps.

#include <complex>
#include <numbers>
#include <optional>

namespace lyaplab::hyp {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Tolerances {
  double membership = 1e-12;  // degeneracy and membership predicates
  double flow = 1e-9;         // flow-property comparisons
};

class HPoint {
 public:
  // Throws ValidationError unless y > 0 and both coordinates are finite.
  HPoint(double x, double y);
  explicit HPoint(Complex z) : HPoint(z.real(), z.imag()) {}

  double x() const { return x_; }
  double y() const { return y_; }
  Complex z() const { return {x_, y_}; }

  static HPoint i() { return HPoint(0.0, 1.0); }

 private:
  double x_;
  double y_;
};

// Unit tangent vector: base point and the Euclidean direction angle of the
// tangent, reduced to [0, 2π). Angle π/2 points straight up.
struct UnitTangent {
  UnitTangent(HPoint b, double a);
  HPoint base;
  double angle;
};

double reduce_angle(double a);

// Orientation-preserving isometry z ↦ (az+b)/(cz+d) with real entries,
// always stored with ad − bc = 1.
class Mobius {
 public:
  Mobius() = default;
  // Rescales to unit determinant; throws ValidationError if det ≤ 0.
  Mobius(double a, double b, double c, double d);

  static Mobius identity() { return {}; }
  static Mobius translation(double dx);
  static Mobius dilation(double k);
  // Counter-clockwise rotation by `angle` about the point `center`.
  static Mobius rotation(HPoint center, double angle);
  // The map taking (i, π/2) to `ut`. Pulling back by its inverse puts the
  // geodesic through `ut` on the imaginary axis with `ut` at i.
  static Mobius frame(const UnitTangent& ut);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double trace() const { return a_ + d_; }
  double det() const { return a_ * d_ - b_ * c_; }

  Mobius inverse() const;
  Mobius operator*(const Mobius& rhs) const;

  // Throws NumericError when the image degenerates to the real axis.
  HPoint apply(HPoint z) const;
  // Action on all of C ∪ {∞} minus the pole; no half-plane check.
  Complex apply(Complex z) const;
  UnitTangent apply(const UnitTangent& ut) const;
  // (az+b)/(cz+d) derivative 1/(cz+d)^2.
  Complex derivative(Complex z) const;

 private:
  double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

double hyp_dist(HPoint z, HPoint w);

UnitTangent geodesic_flow(const UnitTangent& ut, double t);

// 4π sinh²(t/2); throws ValidationError for negative t.
double ball_volume(double t);

// Hyperbolic ball as a Euclidean disc: centre x + i·y·cosh t, radius y·sinh t.
struct BallSpec {
  BallSpec(HPoint c, double t);
  HPoint center;
  double radius_t;
  bool contains(HPoint z, double slack = 0.0) const { return hyp_dist(center, z) <= radius_t + slack; }
};

// Complete geodesic: vertical line Re z = offset, or the semicircle of the
// given centre (offset) and radius on the real axis.
struct GeodesicLine {
  bool vertical = false;
  double offset = 0.0;
  double radius = 0.0;

  static GeodesicLine through(HPoint p, HPoint q);
  // Sign of z relative to the line (0 within tol): outside (+) / inside (−)
  // of the semicircle, or right (+) / left (−) of the vertical line.
  int side_of(HPoint z, double tol = 0.0) const;
  double distance(HPoint z) const;
};

struct GeodesicSegment {
  HPoint from;
  HPoint to;
  GeodesicLine line() const { return GeodesicLine::through(from, to); }
};

// Oriented arc of the geodesic through `start`, of the given arc length.
struct GeodesicArc {
  UnitTangent start;
  double length;
  GeodesicLine carrier() const;
  HPoint point_at(double s) const { return geodesic_flow(start, s).base; }
};

// Smallest parameter s in (0, arc.length] at which the arc meets the closed
// side segment. Throws TangencyError if the arc starts on the side (|s| below
// tol) or runs along it.
std::optional<double> arc_side_crossing(const GeodesicArc& arc, const GeodesicSegment& side,
                                        double tol = 1e-12);

// Direction angle at `from` of the geodesic towards `to`.
double direction_towards(HPoint from, HPoint to);

}  // namespace lyaplab::hyp
