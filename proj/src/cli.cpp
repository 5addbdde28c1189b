#include "lyaplab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "lyaplab/devmaps.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/errterm.hpp"
#include "lyaplab/fuchsian.hpp"
#include "lyaplab/linrep.hpp"
#include "lyaplab/oseledets.hpp"

namespace lyaplab::cli {

namespace {

struct Options {
  std::string group = "triangle:3,3,4";
  std::string rep = "builtin:fuchsian";
  std::vector<std::string> transforms;
  double time = 2000.0;
  int samples = 64;
  std::uint64_t seed = 1;
  int qr_interval = 8;
  std::string normalization = "minus4";
  int threads = 1;
  std::string out;
  std::string svg;
  // sweep
  std::string param = "bend-im";
  std::string values = "0:2:11";
  // err / orbit-count
  std::string dev = "orbit";
  std::string covector;
  std::string center;
  double tmax = 12.0;
  int nodes = 1200;
  // rep
  bool classify = false;
  // selftest
  double corrupt = 0.0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("bad number '{}' for {}", s, what));
  }
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v) || std::abs(v) > 1e6) throw ValidationError(fmt::format("{} must be an integer", what));
  return static_cast<int>(v);
}

// "a:b:n" (n evenly spaced values) or a comma-separated list.
std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ValidationError("range must look like start:stop:count");
    const double a = parse_double(parts[0], "range start"), b = parse_double(parts[1], "range stop");
    const int n = parse_int(parts[2], "range count");
    if (n < 1) throw ValidationError("range count must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    for (const auto& v : split(s, ',')) out.push_back(parse_double(v, "sweep value"));
  }
  if (out.empty()) throw ValidationError("sweep grid is empty");
  return out;
}

hyp::HPoint parse_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ValidationError("point must look like x,y");
  return hyp::HPoint(parse_double(parts[0], "point x"), parse_double(parts[1], "point y"));
}

linrep::Representation apply_transform(const linrep::Representation& rep, const fuchsian::Group& group,
                                       const std::string& t) {
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw ValidationError("transform must look like sym:k, ext:k or bend:re,im");
  const std::string kind = t.substr(0, colon), arg = t.substr(colon + 1);
  if (kind == "sym") return linrep::sym_power(rep, parse_int(arg, "sym degree"));
  if (kind == "ext") return linrep::ext_power(rep, parse_int(arg, "ext degree"));
  if (kind == "bend") {
    const auto parts = split(arg, ',');
    if (parts.size() != 2) throw ValidationError("bend needs re,im");
    const std::complex<double> s(parse_double(parts[0], "bend re"), parse_double(parts[1], "bend im"));
    return fuchsian::bend_representation(rep, fuchsian::default_split(group.spec), s);
  }
  throw ValidationError("unknown transform '" + kind + "'");
}

linrep::Representation load_rep(const Options& o, const fuchsian::Group& group) {
  linrep::Representation rep;
  if (o.rep.rfind("builtin:", 0) == 0) {
    rep = fuchsian::builtin_representation(group, o.rep.substr(8));
  } else {
    rep = linrep::read_representation_file(o.rep);
    if (rep.num_generators() != group.num_generators()) {
      throw ValidationError(fmt::format("representation has {} generators, {} needs {}", rep.num_generators(),
                                        group.spec.to_string(), group.num_generators()));
    }
  }
  for (const auto& t : o.transforms) rep = apply_transform(rep, group, t);
  return rep;
}

void require_relations(const linrep::Representation& rep, double tol = 1e-6) {
  rep.validate();
  const auto report = linrep::check_relations(rep, tol);
  if (!report.passed) {
    throw ValidationError(fmt::format("relation {} of '{}' has residual {:.3g} > {:g}", report.worst_relation + 1,
                                      rep.label, report.max_residual, tol));
  }
}

oseledets::RunConfig run_config(const Options& o) {
  oseledets::RunConfig c;
  c.T = o.time;
  c.samples = o.samples;
  c.seed = o.seed;
  c.qr_interval = o.qr_interval;
  c.normalization = oseledets::parse_normalization(o.normalization);
  c.threads = o.threads;
  c.validate();
  return c;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

// ------------------------------------------------------------- commands

int cmd_spectrum(const Options& o, std::ostream& out) {
  const auto group = fuchsian::build_group(fuchsian::GroupSpec::parse(o.group));
  const auto rep = load_rep(o, group);
  require_relations(rep);
  const auto est = oseledets::estimate_spectrum(group.domain, rep, run_config(o));
  std::ostringstream csv;
  oseledets::write_spectrum_csv(csv, est);
  emit(o.out, csv.str(), out);
  if (!o.svg.empty()) {
    std::vector<double> x, y, e;
    for (int i = 0; i < est.dim(); ++i) {
      x.push_back(i + 1);
      y.push_back(est.values(i));
      e.push_back(est.stderr_(i));
    }
    emit(o.svg, line_plot_svg("Lyapunov spectrum: " + est.label, "i", "lambda_i", x, y, e), out);
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto group = fuchsian::build_group(fuchsian::GroupSpec::parse(o.group));
  const auto base = load_rep(o, group);
  require_relations(base);
  if (base.dim != 2) throw ValidationError("sweeps bend a rank-2 representation");
  if (o.param != "bend-re" && o.param != "bend-im") throw ValidationError("sweep parameter must be bend-re or bend-im");
  const auto split = fuchsian::default_split(group.spec);
  const auto config = run_config(o);
  const auto grid = parse_values(o.values);

  std::ostringstream csv;
  csv << "param,lambda1,stderr,status\n";
  std::vector<double> xs, ys, es;
  for (double v : grid) {
    const std::complex<double> s = o.param == "bend-re" ? std::complex<double>(v, 0.0) : std::complex<double>(0.0, v);
    try {
      const auto rep = fuchsian::bend_representation(base, split, s);
      require_relations(rep);
      const auto est = oseledets::estimate_spectrum(group.domain, rep, config);
      csv << fmt::format("{:.10g},{:.12g},{:.6g},ok\n", v, est.values(0), est.stderr_(0));
      xs.push_back(v);
      ys.push_back(est.values(0));
      es.push_back(est.stderr_(0));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      err << fmt::format("sweep point {:g} failed: {}\n", v, e.what());
      csv << fmt::format("{:.10g},nan,nan,failed\n", v);
    }
  }
  emit(o.out, csv.str(), out);
  if (!o.svg.empty()) {
    emit(o.svg, line_plot_svg("lambda_1 along " + o.param, o.param, "lambda_1", xs, ys, es), out);
  }
  return kExitOk;
}

devmaps::Covector parse_covector(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.empty()) throw ValidationError("covector is empty");
  devmaps::Covector u(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) u(static_cast<Eigen::Index>(i)) = linrep::parse_scalar(parts[i]);
  return u;
}

int cmd_err(const Options& o, std::ostream& out) {
  const auto group = fuchsian::build_group(fuchsian::GroupSpec::parse(o.group));
  errterm::CountFunction cf;
  errterm::ErrEstimate est;
  if (o.dev == "orbit") {
    std::optional<hyp::HPoint> c;
    if (!o.center.empty()) c = parse_point(o.center);
    const auto cal = errterm::orbit_calibration(group, o.tmax, o.nodes, c);
    cf = cal.counts;
    est = cal.err;
  } else {
    devmaps::DevelopingMap dev;
    const auto rep2 = fuchsian::builtin_representation(group, "fuchsian");
    if (o.dev == "identity") {
      dev = devmaps::identity_dev(rep2);
    } else if (o.dev.rfind("veronese:", 0) == 0) {
      dev = devmaps::veronese_dev(parse_int(o.dev.substr(9), "veronese n"), &rep2);
    } else {
      throw ValidationError("dev must be orbit, identity or veronese:n");
    }
    if (o.covector.empty()) throw ValidationError("--covector is required for developing-map error terms");
    const auto u = parse_covector(o.covector);
    const hyp::HPoint c = o.center.empty() ? group.domain.interior_point() : parse_point(o.center);
    cf = errterm::count_in_balls(dev, u, c, errterm::uniform_grid(o.tmax, o.nodes));
    est = errterm::err_estimate(cf, o.tmax);
  }
  std::ostringstream csv;
  errterm::write_err_csv(csv, cf, est);
  emit(o.out, csv.str(), out);
  if (!o.svg.empty()) {
    std::vector<double> x(cf.t.begin(), cf.t.begin() + static_cast<long>(est.running.size()));
    emit(o.svg, line_plot_svg("running error term", "T", "err(T)", x, est.running), out);
  }
  return kExitOk;
}

int cmd_orbit_count(const Options& o, std::ostream& out) {
  const auto group = fuchsian::build_group(fuchsian::GroupSpec::parse(o.group));
  const hyp::HPoint z0 = group.domain.interior_point();
  const auto orbit = fuchsian::orbit_points(group, z0, o.tmax);
  const auto grid = errterm::uniform_grid(o.tmax, std::max(1, o.nodes));
  const double covol = group.spec.covolume();
  std::ostringstream csv;
  csv << "t,count,count_over_vol,normalized\n";
  std::vector<double> xs, ys;
  for (double t : grid) {
    const auto n = orbit.count_within(t);
    const double r = static_cast<double>(n) / hyp::ball_volume(t);
    csv << fmt::format("{:.10g},{},{:.10g},{:.10g}\n", t, n, r, r * covol);
    xs.push_back(t);
    ys.push_back(r * covol);
  }
  emit(o.out, csv.str(), out);
  if (!o.svg.empty()) emit(o.svg, line_plot_svg("orbit count x covolume / volume", "t", "ratio", xs, ys), out);
  return kExitOk;
}

int cmd_rep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto group = fuchsian::build_group(fuchsian::GroupSpec::parse(o.group));
  const auto rep = load_rep(o, group);
  rep.validate();
  const auto report = linrep::check_relations(rep, 1e-6);
  err << fmt::format("relations: max residual {:.3g}{}\n", report.max_residual, report.passed ? "" : " (FAILED)");
  if (o.classify) err << "classification: " << linrep::to_string(linrep::classify(rep)) << "\n";
  std::ostringstream text;
  linrep::write_representation(text, rep);
  emit(o.out, text.str(), out);
  return report.passed ? kExitOk : kExitValidation;
}

int cmd_selftest(const Options& o, std::ostream& out) {
  const auto results = run_selftest(o.corrupt);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    out << fmt::format("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) {
    out << "selftest: all suites passed\n";
    return kExitOk;
  }
  std::string list;
  for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
  out << "selftest: failing suites: " << list << "\n";
  return kExitSelftest;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Lyapunov spectra of flat bundles over compact hyperbolic orbifolds.\n"
               "Exponents are reported for the curvature -4 metric by default (--normalization minus4),\n"
               "i.e. twice the growth rate per unit curvature -1 length; minus1 reports the raw rate.",
               "lyaplab"};
  app.set_config("--config", "", "key=value file with the same option names; command-line flags win");
  app.require_subcommand(1, 1);
  app.add_option("--group", o.group, "triangle:p,q,r or surface:g")->capture_default_str();
  app.add_option("--rep", o.rep, "builtin:fuchsian|builtin:trivial|builtin:unitary-cube or a representation file")
      ->capture_default_str();
  app.add_option("--transform", o.transforms, "sym:k, ext:k or bend:re,im; repeatable, applied left to right");
  app.add_option("--time", o.time, "flow time per sample (curvature -1 length)")->capture_default_str();
  app.add_option("--samples", o.samples, "number of random geodesics")->capture_default_str();
  app.add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  app.add_option("--qr-interval", o.qr_interval, "crossings between QR steps")->capture_default_str();
  app.add_option("--normalization", o.normalization, "minus4 or minus1")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (results do not depend on it)")->capture_default_str();
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--svg", o.svg, "also write an SVG plot here");
  app.add_option("--param", o.param, "sweep parameter: bend-re or bend-im")->capture_default_str();
  app.add_option("--values", o.values, "sweep grid: start:stop:count or comma list")->capture_default_str();
  app.add_option("--dev", o.dev, "error term source: orbit, identity or veronese:n")->capture_default_str();
  app.add_option("--covector", o.covector, "comma-separated coordinates of u (complex as re+imi)");
  app.add_option("--center", o.center, "ball centre x,y");
  app.add_option("--tmax", o.tmax, "largest ball radius")->capture_default_str();
  app.add_option("--nodes", o.nodes, "radius grid nodes")->capture_default_str();
  app.add_flag("--classify", o.classify, "rep: also print the heuristic classification");
  app.add_option("--inject-corruption", o.corrupt)->group("");

  auto* spectrum = app.add_subcommand("spectrum", "estimate the Lyapunov spectrum (CSV)");
  auto* sweep = app.add_subcommand("sweep", "top exponent along a bending sweep (CSV)");
  auto* err_cmd = app.add_subcommand("err", "error-term estimate from a count function (CSV)");
  auto* orbit = app.add_subcommand("orbit-count", "orbit point counts in balls (CSV)");
  auto* rep = app.add_subcommand("rep", "apply transforms and write the representation file");
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  for (auto* s : {spectrum, sweep, err_cmd, orbit, rep, selftest}) s->fallthrough();

  std::vector<std::string> argv_store{"lyaplab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (err_cmd->parsed()) return cmd_err(o, out);
    if (orbit->parsed()) return cmd_orbit_count(o, out);
    if (rep->parsed()) return cmd_rep(o, out, err);
    if (selftest->parsed()) return cmd_selftest(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

// -------------------------------------------------------------------- SVG

std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& yerr) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!x.empty()) {
    std::tie(x0, x1) = std::pair(*std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()));
    y0 = y1 = y.front();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = i < yerr.size() ? yerr[i] : 0.0;
      y0 = std::min(y0, y[i] - e);
      y1 = std::max(y1, y[i] + e);
    }
  }
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", W / 2, esc(title));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", L, H - B, W - R);
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", L, H - B, T);
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5, yv = y0 + (y1 - y0) * k / 5;
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1}\" x2=\"{0:.1f}\" y2=\"{2}\" stroke=\"black\"/>"
                     "<text x=\"{0:.1f}\" y=\"{3}\" text-anchor=\"middle\">{4:.3g}</text>\n",
                     px(xv), H - B, H - B + 5, H - B + 18, xv);
    s += fmt::format("<line x1=\"{0}\" y1=\"{2:.1f}\" x2=\"{1}\" y2=\"{2:.1f}\" stroke=\"black\"/>"
                     "<text x=\"{3}\" y=\"{4:.1f}\" text-anchor=\"end\">{5:.3g}</text>\n",
                     L - 5, L, py(yv), L - 8, py(yv) + 4, yv);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (L + W - R) / 2, H - 12, esc(xlabel));
  s += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                   (T + H - B) / 2, esc(ylabel));
  if (!x.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(x[i]), py(y[i]));
    s += "\"/>\n";
    if (x.size() <= 200) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i < yerr.size() && yerr[i] > 0.0) {
          s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#1f77b4\"/>\n",
                           px(x[i]), py(y[i] - yerr[i]), py(y[i] + yerr[i]));
        }
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#1f77b4\"/>\n", px(x[i]), py(y[i]));
      }
    }
  }
  return s + "</svg>\n";
}

}  // namespace lyaplab::cli
