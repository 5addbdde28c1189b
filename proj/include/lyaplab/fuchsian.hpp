#pragma once

// Cocompact Fuchsian groups: triangle groups Δ(p,q,r) realized on a doubled
// triangle (a kite) and genus-g surface groups on the regular 4g-gon. Ray
// tracing across the fundamental polygon produces the side-crossing coding
// that drives the cocycle engine.

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lyaplab/errors.hpp"
#include "lyaplab/hypgeo.hpp"
#include "lyaplab/linrep.hpp"
#include "lyaplab/word.hpp"

namespace lyaplab::fuchsian {

using hyp::HPoint;
using hyp::Mobius;
using hyp::UnitTangent;

struct GroupSpec {
  enum class Kind { triangle, surface };
  Kind kind = Kind::surface;
  int p = 0, q = 0, r = 0;
  int genus = 0;

  static GroupSpec triangle(int p, int q, int r);
  static GroupSpec surface(int genus);
  // "triangle:p,q,r" or "surface:g".
  static GroupSpec parse(std::string_view text);
  std::string to_string() const;
  // Hyperbolic area of the quotient orbifold (Gauss–Bonnet).
  double covolume() const;
  void validate() const;
};

struct Side {
  HPoint from;
  HPoint to;
  hyp::GeodesicLine line;
  int partner = -1;
  // Maps this side onto the partner and the domain onto its neighbour across
  // the partner; equivalently it pulls points just outside this side back in.
  Mobius pairing;
  int letter = 0;  // pairing as a one-letter word
  int interior_sign = 0;
};

class FundamentalDomain {
 public:
  FundamentalDomain(std::vector<HPoint> vertices, HPoint interior);

  const std::vector<HPoint>& vertices() const { return vertices_; }
  const std::vector<Side>& sides() const { return sides_; }
  std::vector<Side>& sides() { return sides_; }
  HPoint interior_point() const { return interior_; }

  // Closed-domain membership with a sinh-distance slack.
  bool contains(HPoint z, double tol = 1e-10) const;
  std::vector<double> interior_angles() const;
  double area() const;
  double inradius() const;  // from the interior point
  double diameter() const;
  double max_vertex_distance(HPoint z) const;
  // Upper bound on side crossings per unit length: a unit segment only meets
  // tiles inside the ball of radius 1/2 + diameter around its midpoint.
  double crossing_rate_bound() const;

 private:
  std::vector<HPoint> vertices_;
  std::vector<Side> sides_;
  HPoint interior_;
};

struct Group {
  GroupSpec spec;
  FundamentalDomain domain;
  std::vector<Mobius> generators;
  std::vector<Word> relations;

  Mobius eval(const Word& w) const;
  int num_generators() const { return static_cast<int>(generators.size()); }
};

Group build_group(const GroupSpec& spec);

struct CodingOptions {
  double vertex_tol = 1e-10;
  double perturbation = 1e-9;  // first angular nudge; grows ×10 per retry
  int max_retries = 3;
};

struct Crossing {
  double time = 0.0;  // cumulative arc length at the crossing
  int side = -1;      // side exited through
  int letter = 0;     // its pairing generator (one-letter word)
};

struct CodingStream {
  std::vector<Crossing> crossings;
  double total_time = 0.0;
  UnitTangent final_state{HPoint::i(), 0.0};
  int perturbations = 0;
  double total_perturbation = 0.0;
};

// Visitor variant: called once per crossing, in order. Avoids storing long
// streams.
using CrossingVisitor = std::function<void(const Crossing&)>;

CodingStream trace_geodesic(const FundamentalDomain& dom, const UnitTangent& start, double T,
                            const CodingOptions& opts, const CrossingVisitor& visit);

CodingStream code_geodesic(const FundamentalDomain& dom, const UnitTangent& start, double T,
                           const CodingOptions& opts = {});

struct PullBack {
  HPoint point;
  Word word;  // evaluating the word on `point` returns the input
};

PullBack pull_back(const Group& group, HPoint z, const CodingOptions& opts = {});

struct OrbitPoint {
  HPoint point;
  double distance;
  int tile;
};

class OrbitSet {
 public:
  std::vector<OrbitPoint> points;
  bool partial = false;

  Word word(std::size_t i) const;
  std::size_t size() const { return points.size(); }
  // Number of points with distance ≤ t (points are kept sorted by distance).
  std::size_t count_within(double t) const;

  struct TileLink {
    int parent;
    int letter;
  };
  std::vector<TileLink> tiles;
};

class OrbitBudgetExceeded : public ResourceError {
 public:
  OrbitBudgetExceeded(const std::string& what, std::shared_ptr<OrbitSet> partial)
      : ResourceError(what), partial_(std::move(partial)) {}
  const OrbitSet& partial_result() const { return *partial_; }

 private:
  std::shared_ptr<OrbitSet> partial_;
};

// Orbit points γz₀ with d(z₀, γz₀) ≤ t_max, each listed once, sorted by
// distance. Explores tiles breadth-first through side pairings.
OrbitSet orbit_points(const Group& group, HPoint z0, double t_max, std::size_t max_tiles = 40'000'000);

// Amalgam splitting for bending: the moved generators (0-based) lie on one
// side of the separating curve.
struct BendingSplit {
  std::vector<int> moved_generators;
  Word curve;
};

// Genus g ≥ 2: curve [a₁,b₁], handles 2..g moved.
BendingSplit default_split(const GroupSpec& spec);

// Conjugates the moved generators by exp(sX), X = P·diag(½,−½)·P⁻¹ from the
// eigen-decomposition of ρ(curve) (expanding eigenvalue first). Real s
// twists, imaginary s bends.
linrep::Representation bend_representation(const linrep::Representation& rep, const BendingSplit& split,
                                           std::complex<double> s);

// builtin:fuchsian | builtin:trivial | builtin:unitary-cube
linrep::Representation builtin_representation(const Group& group, std::string_view name);

}  // namespace lyaplab::fuchsian
