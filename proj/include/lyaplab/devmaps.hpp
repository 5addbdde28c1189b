#pragma once

// Equivariant developing maps s: ℍ → P^m and their bad loci
// {z : ⟨u, s(z)⟩ = 0} for a covector u.
//
// Three kinds: the identity chart z ↦ [z : 1] of the uniformizing
// representation, the Veronese curve z ↦ [z^{n−1} : … : z : 1] (the basis
// order matches linrep's monomial order, so Sym^{n−1} acts on it exactly),
// and ratios of solutions of u'' + ½φu = 0 for a quadratic differential φ.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "lyaplab/fuchsian.hpp"
#include "lyaplab/hypgeo.hpp"
#include "lyaplab/linrep.hpp"

namespace lyaplab::devmaps {

using Complex = std::complex<double>;
using hyp::HPoint;
using ProjPoint = Eigen::VectorXcd;
using Covector = Eigen::VectorXcd;
using Frame2 = Eigen::Matrix2cd;
using PhiOracle = std::function<Complex(Complex)>;

enum class DevKind { identity, veronese, ode };

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
};

// Solution frame Y = [[u₁, u₂], [u₁', u₂']] of Y' = [[0, 1], [−φ/2, 0]]·Y.
// The developing map is [u₁ : u₂].
struct OdeData {
  PhiOracle phi;
  HPoint base = HPoint::i();
  Frame2 init = Frame2::Identity();
  OdeOptions opts;
};

class DevelopingMap {
 public:
  DevKind kind = DevKind::identity;
  int target_dim = 2;  // m + 1 homogeneous coordinates
  // Acts on the target; empty (dim 0) when not supplied.
  linrep::Representation equivariance;
  OdeData ode;

  ProjPoint operator()(HPoint z) const;
};

DevelopingMap identity_dev(const linrep::Representation& rep2);
// `rank2`, when given, is raised to Sym^{n−1} for the equivariance rep.
DevelopingMap veronese_dev(int n, const linrep::Representation* rank2 = nullptr);
DevelopingMap ode_dev(PhiOracle phi, HPoint base, const Frame2& init, const OdeOptions& opts = {});

// Frame for which the φ = 0 solutions through `base` are (z, 1).
Frame2 standard_frame(HPoint base);

struct OdeTrace {
  std::vector<Frame2> frames;  // one per path vertex, frames[0] = init
  double max_wronskian_drift = 0.0;  // relative to det(init)
  long steps = 0;
};

// Integrates along the straight segments of `path` (a polyline in the
// domain of φ) with an adaptive Dormand–Prince 5(4) pair; steps are capped at
// a quarter of the current segment. Throws StiffnessError with the location
// when the step size collapses.
OdeTrace ode_develop(const PhiOracle& phi, const Frame2& init, const std::vector<Complex>& path,
                     const OdeOptions& opts = {});

ProjPoint dev_of_frame(const Frame2& y);

// Chordal distance sqrt(1 − |⟨a,b⟩|²/(|a|²|b|²)) between projective points.
double projective_distance(const ProjPoint& a, const ProjPoint& b);

// max over words w and points z of the projective distance between
// s(γz) and ρ(γ)s(z), with γ = group.eval(w) and ρ = dev.equivariance.
double equivariance_residual(const DevelopingMap& dev, const fuchsian::Group& group, const std::vector<Word>& words,
                             const std::vector<HPoint>& points);

// Relative weight-4 residual |φ(γz)γ'(z)² − φ(z)| / max(1, |φ(z)|) over
// the group generators and the given points.
double phi_equivariance_residual(const PhiOracle& phi, const fuchsian::Group& group,
                                 const std::vector<HPoint>& points);

struct CountOptions {
  double boundary_tol = 1e-9;   // hyperbolic distance to the sphere
  double locate_tol = 1e-8;     // cell size (relative to the ball) for ode zeros
  int max_depth = 40;
  int edge_samples = 16;
  int max_edge_samples = 4096;
};

struct BadPoint {
  Complex z;
  double error = 0.0;  // location uncertainty in hyperbolic distance
};

// Distinct points of the bad locus inside the closed ball (all of ℍ for the
// algebraic kinds when `ball` is null). The ode kind needs a ball.
std::vector<BadPoint> bad_points(const DevelopingMap& dev, const Covector& u, const hyp::BallSpec* ball,
                                 const CountOptions& opts = {});

struct CountResult {
  long count = 0;
  // Points whose distance to the sphere is within their uncertainty; the
  // true count lies in [count − ambiguous, count + ambiguous].
  long ambiguous = 0;
};

CountResult bad_locus_count(const DevelopingMap& dev, const Covector& u, const hyp::BallSpec& ball,
                            const CountOptions& opts = {});

// Roots of Σ_k c_k z^{deg−k} (leading coefficient first), merged when closer
// than 1e−7 relative.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs_leading_first);

}  // namespace lyaplab::devmaps
