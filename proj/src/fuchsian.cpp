#include "lyaplab/fuchsian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

namespace lyaplab::fuchsian {

using hyp::Complex;
using hyp::hyp_dist;
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- GroupSpec

GroupSpec GroupSpec::triangle(int p, int q, int r) {
  GroupSpec s;
  s.kind = Kind::triangle;
  s.p = p;
  s.q = q;
  s.r = r;
  s.validate();
  return s;
}

GroupSpec GroupSpec::surface(int genus) {
  GroupSpec s;
  s.kind = Kind::surface;
  s.genus = genus;
  s.validate();
  return s;
}

namespace {

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto tok = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ValidationError("bad integer '" + std::string(tok) + "' in group spec");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

GroupSpec GroupSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ValidationError("group spec must look like triangle:p,q,r or surface:g");
  const auto kind = text.substr(0, colon);
  const auto args = parse_int_list(text.substr(colon + 1));
  if (kind == "triangle") {
    if (args.size() != 3) throw ValidationError("triangle group needs three orders");
    return triangle(args[0], args[1], args[2]);
  }
  if (kind == "surface") {
    if (args.size() != 1) throw ValidationError("surface group needs one genus");
    return surface(args[0]);
  }
  throw ValidationError("unknown group kind '" + std::string(kind) + "'");
}

std::string GroupSpec::to_string() const {
  return kind == Kind::triangle ? fmt::format("triangle:{},{},{}", p, q, r) : fmt::format("surface:{}", genus);
}

void GroupSpec::validate() const {
  if (kind == Kind::triangle) {
    if (p < 2 || q < 2 || r < 2) throw ValidationError("triangle orders must be >= 2");
    const long long P = p, Q = q, R = r;
    if (Q * R + P * R + P * Q >= P * Q * R) throw ValidationError("triangle group is not hyperbolic");
  } else if (genus < 2) {
    throw ValidationError("surface genus must be >= 2");
  }
}

double GroupSpec::covolume() const {
  if (kind == Kind::triangle) return 2.0 * (kPi - kPi / p - kPi / q - kPi / r);
  return 4.0 * kPi * (genus - 1);
}

// -------------------------------------------------------- FundamentalDomain

FundamentalDomain::FundamentalDomain(std::vector<HPoint> vertices, HPoint interior)
    : vertices_(std::move(vertices)), interior_(interior) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw ValidationError("polygon needs at least three vertices");
  for (std::size_t j = 0; j < n; ++j) {
    Side s{vertices_[j], vertices_[(j + 1) % n], hyp::GeodesicLine::through(vertices_[j], vertices_[(j + 1) % n]),
           -1, Mobius::identity(), 0, 0};
    s.interior_sign = s.line.side_of(interior_);
    if (s.interior_sign == 0) throw ValidationError("interior point lies on a side");
    sides_.push_back(s);
  }
}

bool FundamentalDomain::contains(HPoint z, double tol) const {
  return std::all_of(sides_.begin(), sides_.end(), [&](const Side& s) {
    const int sg = s.line.side_of(z, tol);
    return sg == 0 || sg == s.interior_sign;
  });
}

std::vector<double> FundamentalDomain::interior_angles() const {
  const std::size_t n = vertices_.size();
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    const HPoint v = vertices_[k];
    const double fwd = hyp::direction_towards(v, vertices_[(k + 1) % n]);
    const double back = hyp::direction_towards(v, vertices_[(k + n - 1) % n]);
    const double d = hyp::reduce_angle(fwd - back);
    out.push_back(std::min(d, hyp::kTwoPi - d));
  }
  return out;
}

double FundamentalDomain::area() const {
  const auto angles = interior_angles();
  double sum = 0.0;
  for (double a : angles) sum += a;
  return (static_cast<double>(vertices_.size()) - 2.0) * kPi - sum;
}

double FundamentalDomain::inradius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : sides_) r = std::min(r, s.line.distance(interior_));
  return r;
}

double FundamentalDomain::diameter() const {
  double d = 0.0;
  for (const auto& a : vertices_)
    for (const auto& b : vertices_) d = std::max(d, hyp_dist(a, b));
  return d;
}

double FundamentalDomain::max_vertex_distance(HPoint z) const {
  double d = 0.0;
  for (const auto& v : vertices_) d = std::max(d, hyp_dist(z, v));
  return d;
}

double FundamentalDomain::crossing_rate_bound() const {
  return hyp::ball_volume(0.5 + diameter()) / area();
}

Mobius Group::eval(const Word& w) const {
  Mobius out;
  for (int l : w) {
    const int g = generator_index(l);
    if (g < 0 || g >= num_generators()) throw ValidationError("word letter out of range");
    out = out * (is_inverse_letter(l) ? generators[g].inverse() : generators[g]);
  }
  return out;
}

// ------------------------------------------------------------ construction

namespace {

void set_pairing(FundamentalDomain& dom, int side, int partner, const Mobius& m, int letter) {
  auto& s = dom.sides()[side];
  s.partner = partner;
  s.pairing = m;
  s.letter = letter;
}

// Every pairing must carry its side onto the partner (reversing the boundary
// orientation) and push the domain across the partner.
void check_pairings(const FundamentalDomain& dom) {
  for (std::size_t j = 0; j < dom.sides().size(); ++j) {
    const Side& s = dom.sides()[j];
    const Side& t = dom.sides()[s.partner];
    const double err = hyp_dist(s.pairing.apply(s.from), t.to) + hyp_dist(s.pairing.apply(s.to), t.from);
    if (err > 1e-8) throw std::logic_error(fmt::format("side {} pairing misplaced by {}", j, err));
    if (dom.contains(s.pairing.apply(dom.interior_point()), 0.0)) {
      throw std::logic_error(fmt::format("side {} pairing maps the domain to itself", j));
    }
  }
}

Group build_triangle(const GroupSpec& spec) {
  const double al = kPi / spec.p, be = kPi / spec.q, ga = kPi / spec.r;
  // Hyperbolic law of cosines for the angle-π/r vertex opposite AB, and AC.
  const double ab = std::acosh((std::cos(ga) + std::cos(al) * std::cos(be)) / (std::sin(al) * std::sin(be)));
  const double ac = std::acosh((std::cos(be) + std::cos(al) * std::cos(ga)) / (std::sin(al) * std::sin(ga)));
  const HPoint a_pt = HPoint::i();
  const HPoint b_pt(0.0, std::exp(ab));
  const HPoint c_pt = hyp::geodesic_flow(UnitTangent(a_pt, kPi / 2 - al), ac).base;
  const HPoint c_mirror(-c_pt.x(), c_pt.y());

  // Kite incentre: on the symmetry axis, equidistant from AC and CB.
  const auto line_ac = hyp::GeodesicLine::through(a_pt, c_pt);
  const auto line_cb = hyp::GeodesicLine::through(c_pt, b_pt);
  double lo = 0.0, hi = ab;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const HPoint p(0.0, std::exp(mid));
    if (line_ac.distance(p) < line_cb.distance(p)) lo = mid;
    else hi = mid;
  }
  const HPoint incenter(0.0, std::exp(0.5 * (lo + hi)));

  Group g{spec, FundamentalDomain({a_pt, c_pt, b_pt, c_mirror}, incenter), {}, {}};
  const Mobius a = Mobius::rotation(a_pt, -2.0 * al);
  const Mobius b = Mobius::rotation(b_pt, -2.0 * be);
  const Mobius c = (a * b).inverse();
  g.generators = {a, b, c};
  g.relations = {Word(spec.p, 1), Word(spec.q, 2), Word(spec.r, 3), Word{1, 2, 3}};
  // Sides: 0 = A→C, 1 = C→B, 2 = B→C', 3 = C'→A.
  set_pairing(g.domain, 3, 0, a, 1);
  set_pairing(g.domain, 0, 3, a.inverse(), -1);
  set_pairing(g.domain, 1, 2, b, 2);
  set_pairing(g.domain, 2, 1, b.inverse(), -2);
  check_pairings(g.domain);
  return g;
}

using C2 = std::array<Complex, 4>;  // row-major complex 2×2

C2 mul(const C2& x, const C2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

Group build_surface(const GroupSpec& spec) {
  const int n = 4 * spec.genus;
  const double cot = 1.0 / std::tan(kPi / n);
  // Regular n-gon with vertex angle 2π/n: cosh(circumradius) = cot²(π/n),
  // cosh(inradius) = cot(π/n).
  const double circum = std::acosh(cot * cot);
  const double in = std::acosh(cot);
  const Complex I(0.0, 1.0);
  const C2 cayley{I, I, -1.0, 1.0};  // disc → half-plane
  const C2 cayley_inv{0.5, -0.5 * I, 0.5, 0.5 * I};
  auto to_half_plane = [&](Complex w) { return (cayley[0] * w + cayley[1]) / (cayley[2] * w + cayley[3]); };

  std::vector<HPoint> verts;
  for (int k = 0; k < n; ++k) verts.emplace_back(to_half_plane(std::tanh(circum / 2) * std::polar(1.0, 2 * kPi * k / n)));

  auto rot = [](double phi) { return C2{std::polar(1.0, phi / 2), 0.0, 0.0, std::polar(1.0, -phi / 2)}; };
  const C2 trans{std::cosh(in), std::sinh(in), std::sinh(in), std::cosh(in)};  // by 2·inradius
  auto facing = [&](int k) { return kPi * (2 * k + 1) / n; };
  // Disc isometry carrying side k onto side m and the polygon across side m.
  auto pairing = [&](int k, int m) {
    const C2 disc = mul(rot(facing(m)), mul(trans, rot(kPi - facing(k))));
    const C2 h = mul(cayley, mul(disc, cayley_inv));
    const Complex det = h[0] * h[3] - h[1] * h[2];
    const Complex s = std::sqrt(det);
    return Mobius((h[0] / s).real(), (h[1] / s).real(), (h[2] / s).real(), (h[3] / s).real());
  };

  Group g{spec, FundamentalDomain(verts, HPoint::i()), {}, {}};
  Word relation;
  for (int j = 0; j < spec.genus; ++j) {
    const Mobius a = pairing(4 * j + 2, 4 * j);
    const Mobius b = pairing(4 * j + 1, 4 * j + 3);
    const int la = 2 * j + 1, lb = 2 * j + 2;
    g.generators.push_back(a);
    g.generators.push_back(b);
    set_pairing(g.domain, 4 * j + 2, 4 * j, a, la);
    set_pairing(g.domain, 4 * j, 4 * j + 2, a.inverse(), -la);
    set_pairing(g.domain, 4 * j + 1, 4 * j + 3, b, lb);
    set_pairing(g.domain, 4 * j + 3, 4 * j + 1, b.inverse(), -lb);
    relation = concat(relation, commutator({la}, {lb}));
  }
  g.relations = {relation};
  check_pairings(g.domain);
  return g;
}

}  // namespace

Group build_group(const GroupSpec& spec) {
  spec.validate();
  return spec.kind == GroupSpec::Kind::triangle ? build_triangle(spec) : build_surface(spec);
}

// -------------------------------------------------------------- ray tracing

namespace {

struct Exit {
  double s = std::numeric_limits<double>::infinity();
  int side = -1;
};

Exit find_exit(const FundamentalDomain& dom, const UnitTangent& ut, int entry) {
  const Mobius pull = Mobius::frame(ut).inverse();
  const auto& verts = dom.vertices();
  const std::size_t n = verts.size();
  std::array<Complex, 64> small{};
  std::vector<Complex> big;
  Complex* mapped = small.data();
  if (n > small.size()) {
    big.resize(n);
    mapped = big.data();
  }
  for (std::size_t v = 0; v < n; ++v) mapped[v] = pull.apply(verts[v].z());
  Exit best;
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(j) == entry) continue;
    const Complex a = mapped[j];
    const Complex b = mapped[(j + 1) % n];
    const double xa = a.real(), xb = b.real();
    if ((xa > 0.0 && xb > 0.0) || (xa < 0.0 && xb < 0.0) || xa == xb) continue;
    // Pulled back, the ray is the imaginary axis above i and arc length is
    // log(Im); the side's semicircle meets the axis at height sqrt(h2).
    const double center = (std::norm(a) - std::norm(b)) / (2.0 * (xa - xb));
    const double h2 = std::norm(a) - 2.0 * center * xa;
    if (!(h2 > 0.0)) continue;
    const double s = 0.5 * std::log(h2);
    if (s > 0.0 && s < best.s) {
      best.s = s;
      best.side = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace

CodingStream trace_geodesic(const FundamentalDomain& dom, const UnitTangent& start, double T,
                            const CodingOptions& opts, const CrossingVisitor& visit) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("coding time must be positive");
  CodingStream out;
  UnitTangent ut = start;
  int entry = -1;
  double elapsed = 0.0;
  const double rate = dom.crossing_rate_bound();
  const auto max_crossings = static_cast<long>(std::ceil(rate * T)) + 8;
  long count = 0;
  for (;;) {
    const double remaining = T - elapsed;
    Exit ex;
    UnitTangent exit_state = ut;
    double nudge = opts.perturbation;
    for (int attempt = 0;; ++attempt) {
      ex = find_exit(dom, ut, entry);
      if (ex.side < 0) throw NumericError(fmt::format("no exit side found after {} crossings", count));
      if (ex.s >= remaining) break;
      exit_state = hyp::geodesic_flow(ut, ex.s);
      const Side& side = dom.sides()[ex.side];
      const bool vertex_hit = hyp_dist(exit_state.base, side.from) < opts.vertex_tol ||
                              hyp_dist(exit_state.base, side.to) < opts.vertex_tol;
      if (!vertex_hit) break;
      if (attempt >= opts.max_retries) {
        throw DegenerateError(fmt::format("geodesic keeps hitting vertices at t = {}", elapsed + ex.s));
      }
      ut.angle = hyp::reduce_angle(ut.angle + nudge);
      ++out.perturbations;
      out.total_perturbation += nudge;
      nudge *= 10.0;
    }
    if (ex.s >= remaining) {
      out.final_state = hyp::geodesic_flow(ut, remaining);
      out.total_time = T;
      return out;
    }
    const Side& side = dom.sides()[ex.side];
    elapsed += ex.s;
    ut = side.pairing.apply(exit_state);
    entry = side.partner;
    if (++count > max_crossings) throw NumericError("crossing count exceeds the domain's compactness bound");
    const Crossing c{elapsed, ex.side, side.letter};
    if (visit) visit(c);
  }
}

CodingStream code_geodesic(const FundamentalDomain& dom, const UnitTangent& start, double T,
                           const CodingOptions& opts) {
  std::vector<Crossing> crossings;
  CodingStream out = trace_geodesic(dom, start, T, opts, [&](const Crossing& c) { crossings.push_back(c); });
  out.crossings = std::move(crossings);
  return out;
}

PullBack pull_back(const Group& group, HPoint z, const CodingOptions& opts) {
  const FundamentalDomain& dom = group.domain;
  const HPoint p = dom.interior_point();
  const double d = hyp_dist(p, z);
  const long bound = static_cast<long>(10.0 * (1.0 + d / dom.inradius()));
  Mobius acc;
  Word word;
  long steps = 0;
  auto step = [&](const Side& s) {
    if (++steps > bound) throw NonConvergenceError("pull-back did not converge");
    acc = s.pairing * acc;
    word.push_back(-s.letter);
  };
  if (d > 1e-14) {
    trace_geodesic(dom, UnitTangent(p, hyp::direction_towards(p, z)), d, opts,
                   [&](const Crossing& c) { step(dom.sides()[c.side]); });
  }
  HPoint zp = acc.apply(z);
  // Vertex nudges can leave the endpoint a hair outside; walk back in.
  while (!dom.contains(zp, 1e-9)) {
    const Side* worst = nullptr;
    double worst_d = 0.0;
    for (const auto& s : dom.sides()) {
      if (s.line.side_of(zp) == -s.interior_sign && s.line.distance(zp) > worst_d) {
        worst_d = s.line.distance(zp);
        worst = &s;
      }
    }
    if (!worst) break;
    step(*worst);
    zp = acc.apply(z);
  }
  return {zp, free_reduce(word)};
}

// ------------------------------------------------------------------- orbits

namespace {

// Hash grid on ℍ with cells of roughly constant hyperbolic size: row k holds
// log y ∈ [kh, (k+1)h), columns are h·e^{kh} wide.
class SpatialIndex {
 public:
  explicit SpatialIndex(double cell = 0.25) : h_(cell) {}

  // Index of a stored point within `tol` of z, or -1.
  int find(HPoint z, double tol, const std::vector<HPoint>& store) const {
    const auto k = row(z.y());
    const double dx = 2.0 * z.y() * tol + 1e-300;
    for (long long kr = k - 1; kr <= k + 1; ++kr) {
      const double w = width(kr);
      const auto j0 = static_cast<long long>(std::floor((z.x() - dx) / w));
      const auto j1 = static_cast<long long>(std::floor((z.x() + dx) / w));
      for (long long j = j0; j <= j1; ++j) {
        auto it = head_.find(key(kr, j));
        for (int idx = it == head_.end() ? -1 : it->second; idx >= 0; idx = next_[idx]) {
          if (hyp_dist(store[idx], z) < tol) return idx;
        }
      }
    }
    return -1;
  }

  void insert(HPoint z, int idx) {
    const auto k = row(z.y());
    const auto j = static_cast<long long>(std::floor(z.x() / width(k)));
    if (static_cast<std::size_t>(idx) >= next_.size()) next_.resize(static_cast<std::size_t>(idx) + 1, -1);
    auto [it, fresh] = head_.try_emplace(key(k, j), idx);
    if (!fresh) {
      next_[idx] = it->second;
      it->second = idx;
    }
  }

 private:
  long long row(double y) const { return static_cast<long long>(std::floor(std::log(y) / h_)); }
  double width(long long k) const { return h_ * std::exp(static_cast<double>(k) * h_); }
  static std::uint64_t key(long long k, long long j) {
    return (static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(j);
  }

  double h_;
  std::unordered_map<std::uint64_t, int> head_;
  std::vector<int> next_;
};

}  // namespace

Word OrbitSet::word(std::size_t i) const {
  Word w;
  for (int t = points.at(i).tile; t > 0; t = tiles[t].parent) w.push_back(tiles[t].letter);
  std::reverse(w.begin(), w.end());
  return w;
}

std::size_t OrbitSet::count_within(double t) const {
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](double v, const OrbitPoint& p) { return v < p.distance; });
  return static_cast<std::size_t>(it - points.begin());
}

OrbitSet orbit_points(const Group& group, HPoint z0, double t_max, std::size_t max_tiles) {
  if (!(t_max >= 0.0)) throw ValidationError("orbit radius must be nonnegative");
  const FundamentalDomain& dom = group.domain;
  const HPoint centre = dom.interior_point();
  // Any tile meeting the segment [z0, γz0] has its orbit point within this
  // margin of the segment, so pruning at t_max + margin loses nothing.
  const double margin = dom.max_vertex_distance(z0) + 1e-9;
  const double bound = t_max + margin;

  auto result = std::make_shared<OrbitSet>();
  std::vector<HPoint> tile_centres;
  std::vector<HPoint> point_store;
  SpatialIndex tile_index, point_index;
  std::deque<std::pair<Mobius, int>> queue;

  auto add_point = [&](HPoint q, double dist, int tile) {
    if (dist > t_max) return;
    if (point_index.find(q, 1e-7, point_store) >= 0) return;
    point_index.insert(q, static_cast<int>(point_store.size()));
    point_store.push_back(q);
    result->points.push_back({q, dist, tile});
  };

  tile_centres.push_back(centre);
  tile_index.insert(centre, 0);
  result->tiles.push_back({-1, 0});
  add_point(z0, 0.0, 0);
  queue.emplace_back(Mobius::identity(), 0);

  while (!queue.empty()) {
    auto [g, tile] = queue.front();
    queue.pop_front();
    for (const Side& s : dom.sides()) {
      const Mobius h = g * s.pairing;
      const HPoint q = h.apply(z0);
      const double dist = hyp_dist(z0, q);
      if (dist > bound) continue;
      const HPoint c = h.apply(centre);
      if (tile_index.find(c, 1e-6, tile_centres) >= 0) continue;
      if (tile_centres.size() >= max_tiles) {
        result->partial = true;
        std::sort(result->points.begin(), result->points.end(),
                  [](const OrbitPoint& a, const OrbitPoint& b) { return a.distance < b.distance; });
        throw OrbitBudgetExceeded("orbit enumeration exceeded its tile budget", result);
      }
      const int id = static_cast<int>(tile_centres.size());
      tile_index.insert(c, id);
      tile_centres.push_back(c);
      result->tiles.push_back({tile, s.letter});
      add_point(q, dist, id);
      queue.emplace_back(h, id);
    }
  }
  std::sort(result->points.begin(), result->points.end(),
            [](const OrbitPoint& a, const OrbitPoint& b) { return a.distance < b.distance; });
  return std::move(*result);
}

// ------------------------------------------------------------------ bending

BendingSplit default_split(const GroupSpec& spec) {
  if (spec.kind != GroupSpec::Kind::surface) {
    throw ValidationError("no default bending split for " + spec.to_string());
  }
  BendingSplit split;
  for (int g = 2; g < 2 * spec.genus; ++g) split.moved_generators.push_back(g);
  split.curve = commutator({1}, {2});
  return split;
}

linrep::Representation bend_representation(const linrep::Representation& rep, const BendingSplit& split,
                                           std::complex<double> s) {
  using linrep::MatrixN;
  if (rep.dim != 2) throw ValidationError("bending needs a rank-2 representation");
  for (int g : split.moved_generators) {
    if (g < 0 || g >= rep.num_generators()) throw ValidationError("bending split names a missing generator");
  }
  if (s == std::complex<double>(0.0)) return rep;
  const MatrixN c = linrep::eval_word(rep, split.curve);
  Eigen::ComplexEigenSolver<MatrixN> es(c);
  if (es.info() != Eigen::Success) throw DegenerateError("eigen-decomposition of the bending curve failed");
  Eigen::Index big = std::abs(es.eigenvalues()(0)) >= std::abs(es.eigenvalues()(1)) ? 0 : 1;
  const Complex mu1 = es.eigenvalues()(big), mu2 = es.eigenvalues()(1 - big);
  if (std::abs(mu1 - mu2) < 1e-8 * std::max(1.0, std::abs(mu1))) {
    throw DegenerateError("bending curve is parabolic or central");
  }
  MatrixN p(2, 2);
  p.col(0) = es.eigenvectors().col(big).normalized();
  p.col(1) = es.eigenvectors().col(1 - big).normalized();
  const double cond = std::abs(p.determinant());
  if (cond < 1e-10) throw DegenerateError("bending centralizer is ill-conditioned");
  const MatrixN pinv = p.inverse();
  MatrixN e = p * Eigen::Vector2cd(std::exp(s / 2.0), std::exp(-s / 2.0)).asDiagonal() * pinv;
  MatrixN einv = p * Eigen::Vector2cd(std::exp(-s / 2.0), std::exp(s / 2.0)).asDiagonal() * pinv;

  linrep::Representation out = rep;
  for (int g : split.moved_generators) out.generators[g] = e * rep.generators[g] * einv;
  double max_imag = 0.0;
  for (const auto& g : out.generators) max_imag = std::max(max_imag, g.imag().cwiseAbs().maxCoeff());
  if (max_imag < 1e-13) {
    for (auto& g : out.generators) g = g.real().cast<Complex>();
  } else {
    out.field = linrep::Field::complex;
  }
  out.label = fmt::format("{} bend({:g},{:g})", rep.label, s.real(), s.imag());
  return out;
}

linrep::Representation builtin_representation(const Group& group, std::string_view name) {
  const std::string spec = group.spec.to_string();
  if (name == "fuchsian") return linrep::from_mobius(group.generators, group.relations, "fuchsian " + spec);
  if (name == "trivial") return linrep::trivial(group.num_generators(), 2, group.relations, "trivial " + spec);
  if (name == "unitary-cube") {
    const auto& s = group.spec;
    if (s.kind != GroupSpec::Kind::triangle || s.p != 3 || s.q != 3 || s.r != 4) {
      throw ValidationError("builtin:unitary-cube is only defined for triangle:3,3,4");
    }
    // Tetrahedral rotations inside the cube group: a, b of order 3 and
    // c = (ab)^{-1} the half-turn about the z face axis.
    linrep::MatrixN a(3, 3), b(3, 3);
    a << 0, 1, 0, 0, 0, 1, 1, 0, 0;
    b << 0, 0, 1, -1, 0, 0, 0, -1, 0;
    const linrep::MatrixN c = (a * b).inverse();
    linrep::Representation rep;
    rep.dim = 3;
    rep.label = "unitary-cube " + spec;
    rep.generators = {a, b, c};
    rep.relations = group.relations;
    return rep;
  }
  throw ValidationError("unknown builtin representation '" + std::string(name) + "'");
}

}  // namespace lyaplab::fuchsian
