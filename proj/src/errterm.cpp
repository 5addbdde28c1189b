#include "lyaplab/errterm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "lyaplab/errors.hpp"

namespace lyaplab::errterm {

void CountFunction::validate() const {
  if (t.empty() || t.size() != counts.size() || t.size() != ambiguous.size()) {
    throw ValidationError("count function arrays are inconsistent");
  }
  if (!(t.front() > 0.0)) throw ValidationError("count grid must start above 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ValidationError("count grid must be strictly increasing");
    if (counts[i] < counts[i - 1]) throw std::logic_error("count function decreased along the grid");
  }
}

std::vector<double> uniform_grid(double t_max, int nodes) {
  if (!(t_max > 0.0) || nodes < 1) throw ValidationError("grid needs t_max > 0 and at least one node");
  std::vector<double> g(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) g[static_cast<std::size_t>(i)] = t_max * (i + 1) / nodes;
  return g;
}

namespace {

CountFunction from_distances(std::vector<double> dist, const std::vector<double>& errors,
                             const std::vector<double>& grid, CountFunction::Source source) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < dist.size(); ++i) pts.emplace_back(dist[i], errors.empty() ? 0.0 : errors[i]);
  std::sort(pts.begin(), pts.end());
  CountFunction cf;
  cf.source = source;
  cf.t = grid;
  std::size_t next = 0;
  for (double t : grid) {
    while (next < pts.size() && pts[next].first <= t) ++next;
    cf.counts.push_back(static_cast<long>(next));
    long amb = 0;
    if (!errors.empty()) {
      for (const auto& [d, e] : pts) {
        if (std::abs(d - t) <= e) ++amb;
      }
    }
    cf.ambiguous.push_back(amb);
  }
  cf.validate();
  return cf;
}

}  // namespace

CountFunction count_in_balls(const std::vector<HPoint>& points, HPoint center, const std::vector<double>& grid) {
  std::vector<double> dist;
  dist.reserve(points.size());
  for (const HPoint& p : points) dist.push_back(hyp::hyp_dist(center, p));
  return from_distances(std::move(dist), {}, grid, CountFunction::Source::point_set);
}

CountFunction count_in_balls(const devmaps::DevelopingMap& dev, const devmaps::Covector& u, HPoint center,
                             const std::vector<double>& grid, const devmaps::CountOptions& opts) {
  if (grid.empty()) throw ValidationError("count grid is empty");
  const hyp::BallSpec ball(center, grid.back());
  std::vector<double> dist, errors;
  for (const auto& p : devmaps::bad_points(dev, u, &ball, opts)) {
    dist.push_back(hyp::hyp_dist(center, HPoint(p.z)));
    errors.push_back(std::max(opts.boundary_tol, p.error));
  }
  return from_distances(std::move(dist), errors, grid, CountFunction::Source::devmap);
}

ErrEstimate err_estimate(const CountFunction& cf, double T_max) {
  cf.validate();
  std::size_t last = 0;
  while (last + 1 < cf.t.size() && cf.t[last + 1] <= T_max * (1.0 + 1e-12)) ++last;
  if (cf.t[last] < T_max * (1.0 - 1e-9)) throw ValidationError("count grid does not reach T_max");
  if (last + 1 < 50) throw ValidationError(fmt::format("count grid too coarse: {} nodes up to T_max", last + 1));

  auto integrand = [&](std::size_t i) {
    return std::numbers::pi * static_cast<double>(cf.counts[i]) / hyp::ball_volume(cf.t[i]);
  };
  ErrEstimate est;
  est.running.assign(last + 1, 0.0);
  std::vector<double> integral(last + 1, 0.0);
  for (std::size_t i = 1; i <= last; ++i) {
    integral[i] = integral[i - 1] + 0.5 * (integrand(i) + integrand(i - 1)) * (cf.t[i] - cf.t[i - 1]);
    est.running[i] = integral[i] / cf.t[i];
  }
  auto node_at = [&](double target) {
    std::size_t i = last;
    while (i > 0 && cf.t[i] > target * (1.0 + 1e-12)) --i;
    return i;
  };
  // Mean of the integrand over [kWindowStart·t_end, t_end].
  auto window = [&](std::size_t end) {
    const std::size_t start = node_at(kWindowStart * cf.t[end]);
    if (start == end) return integrand(end);
    return (integral[end] - integral[start]) / (cf.t[end] - cf.t[start]);
  };
  est.value = window(last);
  est.averaged = est.running[last];
  est.unaveraged = integrand(last);
  for (double frac : {0.6, 0.8, 1.0}) {
    const std::size_t i = node_at(frac * cf.t[last]);
    est.tail_T.push_back(cf.t[i]);
    est.tail_values.push_back(window(i));
  }
  const auto [lo, hi] = std::minmax_element(est.tail_values.begin(), est.tail_values.end());
  est.spread = *hi - *lo;
  est.converged = est.value < 1e-3 || est.spread < 0.1 * est.value;
  return est;
}

SumRuleReport sum_rule_check(const oseledets::SpectrumEstimate& spectrum, int k, Rational degree_ratio,
                             const ErrEstimate& err) {
  if (spectrum.normalization != oseledets::to_string(oseledets::Normalization::minus4)) {
    throw ConfigError("sum rule needs a minus4-normalized spectrum, got " + spectrum.normalization);
  }
  if (degree_ratio.den == 0) throw ValidationError("degree ratio has zero denominator");
  SumRuleReport r;
  std::tie(r.lhs, r.lhs_stderr) = spectrum.partial_sum(k);
  r.rhs = degree_ratio.value() + err.value;
  const double diff = std::abs(r.lhs - r.rhs);
  r.discrepancy = r.lhs_stderr > 0.0 ? diff / r.lhs_stderr : (diff == 0.0 ? 0.0 : INFINITY);
  r.passed = r.discrepancy < 3.0;
  return r;
}

HPoint orbit_center(const fuchsian::Group& group) {
  // A point off the orbit: centring on an orbit point adds a 1/t² spike.
  return hyp::geodesic_flow(hyp::UnitTangent(group.domain.interior_point(), 1.0), 0.4).base;
}

OrbitCalibration orbit_calibration(const fuchsian::Group& group, double T_max, int nodes, std::optional<HPoint> center) {
  const HPoint z0 = group.domain.interior_point();
  const HPoint c = center.value_or(orbit_center(group));
  const fuchsian::OrbitSet orbit = fuchsian::orbit_points(group, z0, T_max + hyp::hyp_dist(z0, c));
  std::vector<HPoint> pts;
  pts.reserve(orbit.size());
  for (const auto& p : orbit.points) pts.push_back(p.point);
  OrbitCalibration out;
  out.counts = count_in_balls(pts, c, uniform_grid(T_max, nodes));
  out.err = err_estimate(out.counts, T_max);
  out.target = std::numbers::pi / group.spec.covolume();
  out.orbit_size = orbit.size();
  return out;
}

void write_err_csv(std::ostream& out, const CountFunction& cf, const ErrEstimate& est) {
  out << "t,count,count_over_vol,running_err\n";
  for (std::size_t i = 0; i < est.running.size(); ++i) {
    out << fmt::format("{:.10g},{},{:.10g},{:.10g}\n", cf.t[i], cf.counts[i],
                       static_cast<double>(cf.counts[i]) / hyp::ball_volume(cf.t[i]), est.running[i]);
  }
  out << fmt::format("# err={:.10g}", est.value);
  for (std::size_t i = 0; i < est.tail_T.size(); ++i) {
    out << fmt::format(",tail@{:g}={:.10g}", est.tail_T[i], est.tail_values[i]);
  }
  out << fmt::format(",spread={:.6g},converged={},averaged={:.10g},unaveraged={:.10g}\n", est.spread,
                     est.converged ? 1 : 0, est.averaged, est.unaveraged);
}

}  // namespace lyaplab::errterm
