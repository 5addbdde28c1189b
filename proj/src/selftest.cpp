#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "lyaplab/cli.hpp"
#include "lyaplab/devmaps.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/fuchsian.hpp"
#include "lyaplab/linrep.hpp"
#include "lyaplab/oseledets.hpp"

namespace lyaplab::cli {

namespace {

using hyp::HPoint;
using hyp::Mobius;
using hyp::UnitTangent;
using Rng = std::mt19937_64;

HPoint random_point(Rng& rng) {
  std::uniform_real_distribution<double> x(-3.0, 3.0), ly(-2.0, 2.0);
  return {x(rng), std::exp(ly(rng))};
}

Mobius random_mobius(Rng& rng) {
  std::uniform_real_distribution<double> x(-2.0, 2.0), ang(0.0, hyp::kTwoPi), lk(-1.5, 1.5);
  return Mobius::translation(x(rng)) * Mobius::dilation(std::exp(lk(rng))) *
         Mobius::rotation(HPoint::i(), ang(rng)) * Mobius::translation(x(rng));
}

Word random_word(Rng& rng, int gens, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), g(1, gens), sign(0, 1);
  Word w(static_cast<std::size_t>(len(rng)));
  for (int& l : w) l = sign(rng) ? g(rng) : -g(rng);
  return w;
}

double rel_diff(const linrep::MatrixN& a, const linrep::MatrixN& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

SuiteResult isometry() {
  Rng rng(11);
  double dist_err = 0.0, law_err = 0.0, flow_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Mobius m1 = random_mobius(rng), m2 = random_mobius(rng);
    const HPoint z = random_point(rng), w = random_point(rng);
    dist_err = std::max(dist_err, std::abs(hyp::hyp_dist(m1.apply(z), m1.apply(w)) - hyp::hyp_dist(z, w)));
    law_err = std::max(law_err, hyp::hyp_dist((m1 * m2).apply(z), m1.apply(m2.apply(z))));
    std::uniform_real_distribution<double> t(-5.0, 5.0), ang(0.0, hyp::kTwoPi);
    const double s = t(rng);
    const UnitTangent ut(z, ang(rng));
    flow_err = std::max(flow_err, std::abs(hyp::hyp_dist(z, hyp::geodesic_flow(ut, s).base) - std::abs(s)));
  }
  const bool ok = dist_err < 1e-10 && law_err < 1e-10 && flow_err < 1e-9;
  return {"isometry", ok, fmt::format("distance {:.1e}, group law {:.1e}, flow {:.1e}", dist_err, law_err, flow_err)};
}

SuiteResult homomorphism() {
  Rng rng(12);
  const auto tri = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  const auto surf = fuchsian::build_group(fuchsian::GroupSpec::surface(2));
  const auto fu = fuchsian::builtin_representation(tri, "fuchsian");
  std::vector<linrep::Representation> reps{fu, linrep::sym_power(fu, 2),
                                          fuchsian::builtin_representation(surf, "fuchsian")};
  double word_err = 0.0;
  for (const auto& rep : reps) {
    for (int i = 0; i < 200; ++i) {
      const Word a = random_word(rng, rep.num_generators(), 10), b = random_word(rng, rep.num_generators(), 10);
      word_err = std::max(word_err, rel_diff(linrep::eval_word(rep, concat(a, b)),
                                             linrep::eval_word(rep, a) * linrep::eval_word(rep, b)));
    }
  }
  double functor_err = 0.0;
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    linrep::MatrixN a(3, 3), b(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = g(rng), b(r, c) = g(rng);
    for (int k : {2, 3}) {
      functor_err = std::max(functor_err, rel_diff(linrep::sym_power_matrix(a * b, k),
                                                   linrep::sym_power_matrix(a, k) * linrep::sym_power_matrix(b, k)));
    }
    functor_err = std::max(functor_err, rel_diff(linrep::ext_power_matrix(a * b, 2),
                                                 linrep::ext_power_matrix(a, 2) * linrep::ext_power_matrix(b, 2)));
  }
  const bool ok = word_err < 1e-9 && functor_err < 1e-9;
  return {"homomorphism", ok, fmt::format("words {:.1e}, sym/ext functoriality {:.1e}", word_err, functor_err)};
}

SuiteResult relations(double corruption) {
  std::vector<linrep::Representation> reps;
  const auto tri = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  for (const char* name : {"fuchsian", "trivial", "unitary-cube"}) {
    reps.push_back(fuchsian::builtin_representation(tri, name));
  }
  reps.push_back(linrep::sym_power(reps.front(), 2));
  for (const char* spec : {"triangle:2,3,7", "surface:2", "surface:3"}) {
    reps.push_back(fuchsian::builtin_representation(fuchsian::build_group(fuchsian::GroupSpec::parse(spec)), "fuchsian"));
  }
  double worst = 0.0;
  std::string worst_label;
  for (auto rep : reps) {
    if (corruption != 0.0) {
      for (auto& m : rep.generators) m(0, m.cols() - 1) += corruption;
    }
    const auto r = linrep::check_relations(rep, 1e-9);
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      worst_label = rep.label;
    }
  }
  return {"relations", worst < 1e-9, fmt::format("max residual {:.1e} ({})", worst, worst_label)};
}

SuiteResult qr_interval() {
  const auto tri = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  const auto rep = linrep::sym_power(fuchsian::builtin_representation(tri, "fuchsian"), 2);
  oseledets::RunConfig cfg;
  cfg.T = 300;
  cfg.samples = 32;
  std::vector<oseledets::SpectrumEstimate> ests;
  for (int q : {1, 4, 16}) {
    cfg.qr_interval = q;
    ests.push_back(oseledets::estimate_spectrum(tri.domain, rep, cfg));
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < ests.size(); ++a) {
    for (std::size_t b = a + 1; b < ests.size(); ++b) {
      for (int i = 0; i < rep.dim; ++i) {
        const double se = oseledets::combined_stderr(ests[a].stderr_(i), ests[b].stderr_(i));
        worst = std::max(worst, std::abs(ests[a].values(i) - ests[b].values(i)) / se);
      }
    }
  }
  return {"qr-interval", worst < 3.0, fmt::format("max discrepancy {:.2g} combined stderr (intervals 1, 4, 16)", worst)};
}

SuiteResult seed_determinism() {
  const std::vector<std::string> base{"spectrum", "--group", "triangle:3,3,4", "--transform", "sym:2",
                                      "--time",   "200",     "--samples",      "8",           "--seed",
                                      "424242"};
  auto run_once = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return std::pair(code, out.str());
  };
  const auto a = run_once(base);
  const auto b = run_once(base);
  auto threaded = base;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const auto c = run_once(threaded);
  auto other = base;
  other.back() = "424243";
  const auto d = run_once(other);
  const bool ok = a.first == 0 && a.second == b.second && a.second == c.second && a.second != d.second;
  return {"seed-determinism", ok,
          ok ? "byte-identical CSV across reruns and thread counts" : "CSV output differs between identical runs"};
}

SuiteResult ode_wronskian() {
  using C = std::complex<double>;
  const std::vector<C> path{C(0, 1), C(3, 1), C(3, 3), C(0, 3), C(0, 1)};  // length 10
  double drift = 0.0, loop_err = 0.0;
  for (const devmaps::PhiOracle& phi :
       {devmaps::PhiOracle([](C) { return C(0.0); }), devmaps::PhiOracle([](C) { return C(2.0); }),
        devmaps::PhiOracle([](C z) { return 1.0 / (z * z); })}) {
    const auto tr = devmaps::ode_develop(phi, devmaps::standard_frame(HPoint::i()), path);
    drift = std::max(drift, tr.max_wronskian_drift);
    loop_err = std::max(loop_err, (tr.frames.back() - tr.frames.front()).norm());
  }
  const bool ok = drift < 1e-8 && loop_err < 1e-7;
  return {"ode-wronskian", ok, fmt::format("Wronskian drift {:.1e}, closed-loop monodromy - I {:.1e}", drift, loop_err)};
}

SuiteResult counting_monotonicity() {
  const auto tri = fuchsian::build_group(fuchsian::GroupSpec::triangle(3, 3, 4));
  const auto orbit = fuchsian::orbit_points(tri, tri.domain.interior_point(), 6.0);
  bool ok = true;
  std::size_t prev = 0;
  for (int k = 0; k <= 120; ++k) {
    const std::size_t n = orbit.count_within(0.05 * k);
    ok = ok && n >= prev;
    prev = n;
  }
  using C = std::complex<double>;
  const C I(0, 1);
  devmaps::Frame2 y0;
  y0 << std::cos(I), std::sin(I), -std::sin(I), std::cos(I);
  const auto ode = devmaps::ode_dev([](C) { return C(2.0); }, HPoint::i(), y0);
  devmaps::Covector u_ode(2);
  u_ode << 1.0, -1.0 / std::tan(C(0.3, 1.2));
  const auto ver = devmaps::veronese_dev(4);
  devmaps::Covector u_ver(4);
  u_ver << 1.0, C(0, -2), C(-0.5, 0), C(0.25, 1.0);
  long prev_ode = 0, prev_ver = 0;
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
    const HPoint c(0.5, 1.0);
    const long n_ode = devmaps::bad_locus_count(ode, u_ode, hyp::BallSpec(c, t)).count;
    const long n_ver = devmaps::bad_locus_count(ver, u_ver, hyp::BallSpec(c, t)).count;
    ok = ok && n_ode >= prev_ode && n_ver >= prev_ver;
    prev_ode = n_ode;
    prev_ver = n_ver;
  }
  return {"counting-monotonicity", ok,
          fmt::format("orbit counts to t=6 ({} points), ode bad locus {} zeros, veronese {} roots", prev, prev_ode,
                      prev_ver)};
}

}  // namespace

std::vector<SuiteResult> run_selftest(double corruption) {
  std::vector<SuiteResult> out;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("isometry", isometry);
  guarded("homomorphism", homomorphism);
  guarded("relations", [&] { return relations(corruption); });
  guarded("qr-interval", qr_interval);
  guarded("seed-determinism", seed_determinism);
  guarded("ode-wronskian", ode_wronskian);
  guarded("counting-monotonicity", counting_monotonicity);
  return out;
}

}  // namespace lyaplab::cli
