// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lyaplab/cli.hpp"
#include "lyaplab/devmaps.hpp"
#include "lyaplab/errterm.hpp"
#include "lyaplab/fuchsian.hpp"
#include "lyaplab/linrep.hpp"
#include "lyaplab/oseledets.hpp"

using namespace lyaplab;
using oseledets::SpectrumEstimate;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

oseledets::RunConfig config(double T, int samples, std::uint64_t seed) {
  oseledets::RunConfig c;
  c.T = T;
  c.samples = samples;
  c.seed = seed;
  return c;
}

std::string spectrum_text(const SpectrumEstimate& e) {
  std::string s = "(";
  for (int i = 0; i < e.dim(); ++i) s += fmt::format("{}{:.4f}", i ? ", " : "", e.values(i));
  return s + ")";
}

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void report(int index, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  if (!o.passed) ++failures;
  std::cout << fmt::format("{} {} {}: {} [{:.1f} s]", o.passed ? "PASS" : "FAIL", index, name, o.detail,
                           seconds_since(start))
            << std::endl;
}

// |λ_i + λ_{n+1−i}| and |Σλ| against 3 combined standard errors. Rounding-level
// deviations (exactly symmetric reps) are not counted in `worst`.
bool symmetric(const SpectrumEstimate& e, double& worst) {
  const int n = e.dim();
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    const double se = oseledets::combined_stderr(e.stderr_(i), e.stderr_(n - 1 - i));
    const double dev = std::abs(e.values(i) + e.values(n - 1 - i));
    if (dev > 1e-12) worst = std::max(worst, dev / se);
    ok = ok && dev <= 3.0 * se + 1e-12;
  }
  const double sum_se = e.stderr_.norm();
  const double sum = std::abs(e.values.sum());
  if (sum > 1e-12) worst = std::max(worst, sum / sum_se);
  return ok && sum <= 3.0 * sum_se + 1e-12;
}

}  // namespace

int main() {
  const auto tri = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  const auto& dom = tri.domain;
  const auto fu = fuchsian::builtin_representation(tri, "fuchsian");
  const auto sym2 = linrep::sym_power(fu, 2);
  const auto sym3 = linrep::sym_power(fu, 3);

  SpectrumEstimate fuchsian_est, sym2_est, sym3_est;

  report(1, "fuchsian-benchmark", [&]() -> Outcome {
    const auto start = Clock::now();
    fuchsian_est = oseledets::estimate_spectrum(dom, fu, config(2000, 64, 1));
    const double secs = seconds_since(start);
    const double l1 = fuchsian_est.values(0), se = fuchsian_est.stderr_(0);
    const bool ok = std::abs(l1 - 1.0) <= 0.02 && std::abs(l1 - 1.0) <= std::max(0.02, 3.0 * se) &&
                    fuchsian_est.normalization == "minus4" && secs <= 120.0;
    return {ok, fmt::format("lambda1 = {:.5f} +- {:.1e} (T=2000, 64 samples, minus4) in {:.1f} s", l1, se, secs)};
  });

  report(2, "symmetric-powers", [&]() -> Outcome {
    sym2_est = oseledets::estimate_spectrum(dom, sym2, config(2000, 64, 2));
    sym3_est = oseledets::estimate_spectrum(dom, sym3, config(2000, 64, 3));
    bool ok = true;
    for (int j = 0; j < 3; ++j) ok = ok && std::abs(sym2_est.values(j) - (2 - 2 * j)) <= 0.04;
    for (int j = 0; j < 4; ++j) ok = ok && std::abs(sym3_est.values(j) - (3 - 2 * j)) <= 0.06;
    return {ok, fmt::format("Sym^2 {} (target (2, 0, -2)), Sym^3 {} (target (3, 1, -1, -3))",
                            spectrum_text(sym2_est), spectrum_text(sym3_est))};
  });

  report(3, "wedge-crosscheck", [&]() -> Outcome {
    const auto w = oseledets::wedge_crosscheck(dom, sym2, 2, config(2000, 64, 4));
    return {w.discrepancy < 3.0,
            fmt::format("lambda1(ext^2 Sym^2) = {:.4f}, lambda1+lambda2(Sym^2) = {:.4f} +- {:.1e}, "
                        "discrepancy {:.2f} combined stderr",
                        w.wedge_top, w.partial_sum, w.partial_stderr, w.discrepancy)};
  });

  report(4, "trivial-spectrum", [&]() -> Outcome {
    const auto cube =
        oseledets::estimate_spectrum(dom, fuchsian::builtin_representation(tri, "unitary-cube"), config(500, 64, 5));
    const auto triv =
        oseledets::estimate_spectrum(dom, fuchsian::builtin_representation(tri, "trivial"), config(500, 64, 6));
    const double mc = cube.values.cwiseAbs().maxCoeff(), mt = triv.values.cwiseAbs().maxCoeff();
    const bool ok = mc < 0.01 && mt < 0.01 && fuchsian_est.dim() == 2 && fuchsian_est.values(0) > 0.9;
    return {ok, fmt::format("unitary-cube max|lambda| = {:.1e}, trivial {:.1e}, fuchsian lambda1 = {:.4f}", mc, mt,
                            fuchsian_est.dim() == 2 ? fuchsian_est.values(0) : NAN)};
  });

  report(5, "symmetry-zero-sum", [&]() -> Outcome {
    std::vector<SpectrumEstimate> all{fuchsian_est, sym2_est, sym3_est};
    all.push_back(oseledets::estimate_spectrum(dom, linrep::ext_power(sym2, 2), config(1000, 64, 7)));
    all.push_back(
        oseledets::estimate_spectrum(dom, fuchsian::builtin_representation(tri, "unitary-cube"), config(500, 32, 8)));
    const auto g2 = fuchsian::build_group(fuchsian::GroupSpec::surface(2));
    const auto g2fu = fuchsian::builtin_representation(g2, "fuchsian");
    all.push_back(oseledets::estimate_spectrum(g2.domain, g2fu, config(1000, 32, 9)));
    all.push_back(oseledets::estimate_spectrum(
        g2.domain, fuchsian::bend_representation(g2fu, fuchsian::default_split(g2.spec), {0.5, 1.0}),
        config(1000, 32, 10)));
    bool ok = true;
    double worst = 0.0;
    for (const auto& e : all) ok = symmetric(e, worst) && ok;
    return {ok, fmt::format("{} representations, worst |pair| or |sum| = {:.2f} combined stderr", all.size(), worst)};
  });

  report(6, "err-calibration", [&]() -> Outcome {
    const auto start = Clock::now();
    const auto cal = errterm::orbit_calibration(tri, 12.0, 1200);
    const double secs = seconds_since(start);
    const auto v3 = devmaps::veronese_dev(3);
    devmaps::Covector u3(3), u2(2);
    u3 << 1.0, 0.0, 1.0;
    u2 << 1.0, std::complex<double>(0.2, -0.9);
    const auto grid = errterm::uniform_grid(20.0, 400);
    const double finite_a = errterm::err_estimate(errterm::count_in_balls(v3, u3, hyp::HPoint(0, 2), grid), 20.0).value;
    const double finite_b =
        errterm::err_estimate(errterm::count_in_balls(devmaps::identity_dev(fu), u2, hyp::HPoint(0.3, 1.7), grid), 20.0)
            .value;
    const bool ok = std::abs(cal.err.value - cal.target) <= 0.1 * cal.target && secs <= 300.0 && finite_a < 1e-3 &&
                    finite_b < 1e-3;
    return {ok, fmt::format("orbit err = {:.4f} vs pi/covol = {:.4f} (T_max=12, {} orbit points) in {:.1f} s; "
                            "finite loci {:.1e}, {:.1e}",
                            cal.err.value, cal.target, cal.orbit_size, secs, finite_a, finite_b)};
  });

  report(7, "sum-rule", [&]() -> Outcome {
    const auto grid = errterm::uniform_grid(20.0, 400);
    const hyp::HPoint centre(0.3, 1.7);
    devmaps::Covector u2(2), u3(3);
    u2 << 1.0, std::complex<double>(0.2, -0.9);
    u3 << 1.0, 0.5, std::complex<double>(0.1, 2.0);
    const auto e1 = errterm::err_estimate(errterm::count_in_balls(devmaps::identity_dev(fu), u2, centre, grid), 20.0);
    const auto e2 =
        errterm::err_estimate(errterm::count_in_balls(devmaps::veronese_dev(3, &fu), u3, centre, grid), 20.0);
    const auto r1 = errterm::sum_rule_check(fuchsian_est, 1, {1, 1}, e1);
    const auto r2 = errterm::sum_rule_check(sym2_est, 1, {2, 1}, e2);
    return {r1.passed && r2.passed,
            fmt::format("fuchsian {:.4f} vs 1 + {:.1e} ({:.2f} stderr); Sym^2 {:.4f} vs 2 + {:.1e} ({:.2f} stderr)",
                        r1.lhs, e1.value, r1.discrepancy, r2.lhs, e2.value, r2.discrepancy)};
  });

  report(8, "bending-lower-bound", [&]() -> Outcome {
    const auto g2 = fuchsian::build_group(fuchsian::GroupSpec::surface(2));
    const auto base = fuchsian::builtin_representation(g2, "fuchsian");
    const auto split = fuchsian::default_split(g2.spec);
    bool imag_ok = true;
    double worst = INFINITY, worst_s = 0.0, worst_se = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const double s = 0.2 * k;
      const auto est = oseledets::estimate_spectrum(
          g2.domain, fuchsian::bend_representation(base, split, {0.0, s}), config(1000, 32, 100 + k));
      const double margin = est.values(0) - (1.0 - 3.0 * est.stderr_(0));
      if (margin < 0.0) imag_ok = false;
      if (est.values(0) < worst) worst = est.values(0), worst_s = s, worst_se = est.stderr_(0);
    }
    std::vector<double> real_l1;
    for (double s : {4.0, 8.0, 16.0}) {
      real_l1.push_back(oseledets::estimate_spectrum(g2.domain, fuchsian::bend_representation(base, split, {s, 0.0}),
                                                     config(1000, 32, 200 + static_cast<int>(s)))
                            .values(0));
    }
    const bool real_ok = real_l1[0] < real_l1[1] && real_l1[1] < real_l1[2];
    return {imag_ok && real_ok,
            fmt::format("imaginary sweep min lambda1 = {:.4f} +- {:.1e} at s = {:.1f}i (bound 1 - 3 stderr {}); "
                        "real s = 4, 8, 16: {:.3f}, {:.3f}, {:.3f} ({})",
                        worst, worst_se, worst_s, imag_ok ? "holds" : "violated", real_l1[0], real_l1[1], real_l1[2],
                        real_ok ? "increasing" : "not increasing")};
  });

  report(9, "selftest", [&]() -> Outcome {
    const auto start = Clock::now();
    const auto results = cli::run_selftest();
    const double secs = seconds_since(start);
    bool ok = secs <= 300.0;
    std::string failed;
    for (const auto& r : results) {
      if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.name;
      ok = ok && r.passed;
    }
    return {ok, fmt::format("{} suites, {} in {:.1f} s", results.size(),
                            failed.empty() ? std::string("all passed") : "failing: " + failed, secs)};
  });

  std::cout << fmt::format("acceptance: {} of 9 criteria failed", failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
