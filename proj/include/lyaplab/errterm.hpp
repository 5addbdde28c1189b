#pragma once

// Error term err(u) = π · lim (1/T) ∫₀ᵀ #(bad locus ∩ D_t) / vol(D_t) dt,
// estimated from count functions on a radius grid, plus the compact-case
// sum rule Σ_{i≤k} λ_i = degree ratio + err.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lyaplab/devmaps.hpp"
#include "lyaplab/fuchsian.hpp"
#include "lyaplab/oseledets.hpp"

namespace lyaplab::errterm {

using hyp::HPoint;

struct CountFunction {
  enum class Source { devmap, point_set };
  std::vector<double> t;      // strictly increasing, t[0] > 0
  std::vector<long> counts;   // nondecreasing
  std::vector<long> ambiguous;  // ± band from boundary-ambiguous points
  Source source = Source::point_set;

  void validate() const;
};

// nodes radii t_max/nodes, 2·t_max/nodes, …, t_max.
std::vector<double> uniform_grid(double t_max, int nodes);

CountFunction count_in_balls(const std::vector<HPoint>& points, HPoint center, const std::vector<double>& grid);

// Finds the bad points once in the largest ball, then counts by distance.
CountFunction count_in_balls(const devmaps::DevelopingMap& dev, const devmaps::Covector& u, HPoint center,
                             const std::vector<double>& grid, const devmaps::CountOptions& opts = {});

// Windows for the reported estimate start at this fraction of their end.
inline constexpr double kWindowStart = 0.6;

struct ErrEstimate {
  // π × mean of count/vol over the tail window [0.6·T_max, T_max]. Same
  // limit as the running average (π/T)∫, but a finite bad set contributes
  // O(e^{-0.6·T}) instead of O(1/T).
  double value = 0.0;
  std::vector<double> tail_T;       // 0.6, 0.8, 1.0 × T_max
  std::vector<double> tail_values;  // windowed estimate ending at each tail_T
  double spread = 0.0;              // max − min of tail_values
  bool converged = false;
  // Diagnostics: the running average (π/T)∫_{t₀}^{T} at T_max, and
  // π · count(T)/vol(T) at T_max.
  double averaged = 0.0;
  double unaveraged = 0.0;
  std::vector<double> running;  // (π/t)∫_{t₀}^{t} count/vol at each grid node
};

// Trapezoidal quadrature of π·count/vol from t₀ = cf.t[0]. Needs at least
// 50 grid nodes up to T_max.
ErrEstimate err_estimate(const CountFunction& cf, double T_max);

// Exact degree ratio 2·deg(E)/deg(K), supplied by the caller.
struct Rational {
  long num = 0;
  long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct SumRuleReport {
  double lhs = 0.0;  // Σ_{i≤k} λ_i
  double lhs_stderr = 0.0;
  double rhs = 0.0;  // ratio + err
  double discrepancy = 0.0;  // |lhs − rhs| in stderr units
  bool passed = false;  // discrepancy < 3
};

// The spectrum must use the minus4 normalization (the convention err is
// reported in); anything else raises ConfigError.
SumRuleReport sum_rule_check(const oseledets::SpectrumEstimate& spectrum, int k, Rational degree_ratio,
                             const ErrEstimate& err);

// Orbit-count calibration: orbit of the domain's interior point, ball
// centred at `center` (defaults to orbit_center(group)).
struct OrbitCalibration {
  CountFunction counts;
  ErrEstimate err;
  double target = 0.0;  // π / covolume
  std::size_t orbit_size = 0;
};

HPoint orbit_center(const fuchsian::Group& group);
OrbitCalibration orbit_calibration(const fuchsian::Group& group, double T_max, int nodes,
                                   std::optional<HPoint> center = std::nullopt);

// t,count,count_over_vol,running_err per node, then a summary block.
void write_err_csv(std::ostream& out, const CountFunction& cf, const ErrEstimate& est);

}  // namespace lyaplab::errterm
