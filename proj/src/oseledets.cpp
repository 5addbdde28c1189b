#include "lyaplab/oseledets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "lyaplab/errors.hpp"

namespace lyaplab::oseledets {

using fuchsian::HPoint;
using fuchsian::UnitTangent;

std::string to_string(Normalization n) { return n == Normalization::minus4 ? "minus4" : "minus1"; }

Normalization parse_normalization(std::string_view text) {
  if (text == "minus4") return Normalization::minus4;
  if (text == "minus1") return Normalization::minus1;
  throw ValidationError("normalization must be minus4 or minus1, got '" + std::string(text) + "'");
}

double normalization_factor(Normalization n) { return n == Normalization::minus4 ? 2.0 : 1.0; }

// ------------------------------------------------------------ accumulator

CocycleAccumulator::CocycleAccumulator(MatrixN initial_frame, int qr_interval)
    : frame_(std::move(initial_frame)), qr_interval_(qr_interval) {
  if (frame_.rows() != frame_.cols() || frame_.rows() == 0) throw ValidationError("frame must be square");
  if (qr_interval < 1) throw ValidationError("qr_interval must be >= 1");
  scratch_.resize(frame_.rows(), frame_.cols());
  log_diag_ = Eigen::VectorXd::Zero(frame_.cols());
}

CocycleAccumulator::CocycleAccumulator(int n, int qr_interval)
    : CocycleAccumulator(MatrixN::Identity(n, n), qr_interval) {}

void CocycleAccumulator::advance(const MatrixN& m, double log_condition) {
  if (m.rows() != frame_.rows() || m.cols() != frame_.rows()) {
    throw ValidationError("cocycle matrix has the wrong dimension");
  }
  scratch_.noalias() = m * frame_;
  frame_.swap(scratch_);
  ++steps_;
  pending_log_condition_ += log_condition;
  if (++since_qr_ >= qr_interval_ || pending_log_condition_ > 18.0 || frame_.cwiseAbs().maxCoeff() > 1e120) {
    reorthonormalize();
  }
}

void CocycleAccumulator::reorthonormalize() {
  since_qr_ = 0;
  pending_log_condition_ = 0.0;
  if (!frame_.allFinite()) throw NumericError(fmt::format("non-finite cocycle frame at step {}", steps_));
  Eigen::HouseholderQR<MatrixN> qr(frame_);
  const MatrixN& packed = qr.matrixQR();
  const Eigen::Index n = frame_.cols();
  MatrixN q = qr.householderQ() * MatrixN::Identity(frame_.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::complex<double> d = packed(j, j);
    const double mag = std::abs(d);
    if (!(mag > 0.0) || !std::isfinite(mag)) {
      throw NumericError(fmt::format("cocycle frame lost rank at step {}", steps_));
    }
    // Absorbing the phase into Q makes R's diagonal positive.
    q.col(j) *= d / mag;
    log_diag_(j) += std::log(mag);
  }
  frame_ = std::move(q);
}

const Eigen::VectorXd& CocycleAccumulator::log_diag() {
  if (since_qr_ > 0) reorthonormalize();
  return log_diag_;
}

// ------------------------------------------------------------------ config

void RunConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("flow time T must be positive");
  if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) throw ValidationError("burn-in must be nonnegative");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (qr_interval < 1) throw ValidationError("qr_interval must be >= 1");
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

std::pair<double, double> SpectrumEstimate::partial_sum(int k) const {
  if (k < 1 || k > dim()) throw ValidationError("partial sum index out of range");
  const auto m = static_cast<double>(per_sample.size());
  if (per_sample.empty()) return {values.head(k).sum(), 0.0};
  double mean = 0.0;
  for (const auto& v : per_sample) mean += v.head(k).sum();
  mean /= m;
  double var = 0.0;
  for (const auto& v : per_sample) var += std::pow(v.head(k).sum() - mean, 2);
  const double se = m > 1 ? std::sqrt(var / (m - 1) / m) : 0.0;
  return {mean, se};
}

double combined_stderr(double a, double b) { return std::hypot(a, b); }

double log_condition(const MatrixN& m) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<MatrixN>(m).singularValues();
  if (!(sv(sv.size() - 1) > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(sv(0) / sv(sv.size() - 1));
}

// ---------------------------------------------------------------- sampling

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct SideCocycle {
  std::vector<MatrixN> mats;
  std::vector<double> log_cond;
};

SideCocycle side_matrices(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep) {
  SideCocycle out;
  for (const auto& s : dom.sides()) {
    if (generator_index(s.letter) >= rep.num_generators()) {
      throw ConfigError("representation has fewer generators than the group's side pairings use");
    }
    out.mats.push_back(linrep::eval_word(rep, Word{s.letter}));
    out.log_cond.push_back(log_condition(out.mats.back()));
  }
  return out;
}

Eigen::VectorXd trace_cocycle(const fuchsian::FundamentalDomain& dom, const SideCocycle& sides,
                              const UnitTangent& start, const MatrixN& initial_frame, const RunConfig& config) {
  auto feed = [&](CocycleAccumulator& acc) {
    return [&](const fuchsian::Crossing& c) { acc.advance(sides.mats[c.side], sides.log_cond[c.side]); };
  };
  UnitTangent from = start;
  MatrixN frame = initial_frame;
  if (config.burn_in > 0.0) {
    CocycleAccumulator warm(initial_frame, config.qr_interval);
    from = fuchsian::trace_geodesic(dom, start, config.burn_in, config.coding, feed(warm)).final_state;
    warm.reorthonormalize();
    frame = warm.frame();
  }
  CocycleAccumulator acc(frame, config.qr_interval);
  fuchsian::trace_geodesic(dom, from, config.T, config.coding, feed(acc));
  acc.add_length(config.T);
  return acc.log_diag() * (normalization_factor(config.normalization) / config.T);
}

struct Moments {
  Eigen::VectorXd mean;
  Eigen::VectorXd stderr_;
};

Moments moments(const std::vector<Eigen::VectorXd>& xs) {
  const auto m = static_cast<double>(xs.size());
  Moments out{Eigen::VectorXd::Zero(xs.front().size()), Eigen::VectorXd::Zero(xs.front().size())};
  for (const auto& x : xs) out.mean += x;
  out.mean /= m;
  for (const auto& x : xs) out.stderr_ += (x - out.mean).cwiseAbs2();
  out.stderr_ = m > 1 ? (out.stderr_ / ((m - 1) * m)).cwiseSqrt() : Eigen::VectorXd(out.stderr_ * 0.0);
  return out;
}

void finalize(SpectrumEstimate& est, std::vector<Eigen::VectorXd> xs) {
  const Moments mo = moments(xs);
  std::vector<Eigen::Index> order(mo.mean.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mo.mean(a) > mo.mean(b); });
  const auto n = static_cast<Eigen::Index>(order.size());
  est.values.resize(n);
  est.stderr_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    est.values(i) = mo.mean(order[i]);
    est.stderr_(i) = mo.stderr_(order[i]);
  }
  for (auto& x : xs) {
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = x(order[i]);
    x = std::move(p);
  }
  est.per_sample = std::move(xs);
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ED270B7A8F3C21ULL)));
}

HPoint random_domain_point(const fuchsian::FundamentalDomain& dom, std::mt19937_64& rng) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : dom.sides()) {
    for (const HPoint& v : {s.from, s.to}) {
      xmin = std::min(xmin, v.x());
      xmax = std::max(xmax, v.x());
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
    }
    const auto [lo, hi] = std::minmax(s.from.x(), s.to.x());
    if (!s.line.vertical && s.line.offset > lo && s.line.offset < hi) ymax = std::max(ymax, s.line.radius);
  }
  // Area element dx dy / y² is uniform in (x, 1/y).
  std::uniform_real_distribution<double> ux(xmin, xmax), uinv(1.0 / ymax, 1.0 / ymin);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const HPoint z(ux(rng), 1.0 / uinv(rng));
    if (dom.contains(z, 0.0)) return z;
  }
  throw NumericError("rejection sampling of the domain failed");
}

MatrixN random_frame(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixN m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<MatrixN> qr(m);
  MatrixN q = qr.householderQ() * MatrixN::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = qr.matrixQR()(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Eigen::VectorXd run_sample(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep,
                           const UnitTangent& start, const MatrixN& initial_frame, const RunConfig& config) {
  config.validate();
  return trace_cocycle(dom, side_matrices(dom, rep), start, initial_frame, config);
}

SpectrumEstimate estimate_spectrum(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep,
                                   const RunConfig& config) {
  config.validate();
  const SideCocycle sides = side_matrices(dom, rep);
  const int n = rep.dim;
  std::vector<std::optional<Eigen::VectorXd>> results(static_cast<std::size_t>(config.samples));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int idx = next++; idx < config.samples; idx = next++) {
      auto rng = sample_rng(config.seed, static_cast<std::uint64_t>(idx));
      const HPoint base = config.uniform_base ? random_domain_point(dom, rng) : dom.interior_point();
      std::uniform_real_distribution<double> angle(0.0, hyp::kTwoPi);
      const UnitTangent start(base, angle(rng));
      const MatrixN frame = random_frame(n, rng);
      try {
        results[static_cast<std::size_t>(idx)] = trace_cocycle(dom, sides, start, frame, config);
      } catch (const NumericError&) {
        // Degenerate directions are measure zero; the sample is dropped.
      }
    }
  };
  const int threads = std::min(config.threads, config.samples);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<Eigen::VectorXd> ok;
  for (auto& r : results)
    if (r) ok.push_back(std::move(*r));
  if (ok.size() < 2) {
    throw InsufficientDataError(fmt::format("only {} of {} samples succeeded", ok.size(), config.samples));
  }
  SpectrumEstimate est;
  est.label = rep.label;
  est.samples = static_cast<int>(ok.size());
  est.failed_samples = config.samples - est.samples;
  est.T = config.T;
  est.seed = config.seed;
  est.normalization = to_string(config.normalization);
  finalize(est, std::move(ok));
  return est;
}

WedgeCrosscheck wedge_crosscheck(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep, int k,
                                 const RunConfig& config) {
  if (k < 1 || k > rep.dim) throw ValidationError("wedge degree out of range");
  const SpectrumEstimate direct = estimate_spectrum(dom, rep, config);
  const SpectrumEstimate wedge = estimate_spectrum(dom, linrep::ext_power(rep, k), config);
  WedgeCrosscheck out;
  out.wedge_top = wedge.values(0);
  out.wedge_stderr = wedge.stderr_(0);
  std::tie(out.partial_sum, out.partial_stderr) = direct.partial_sum(k);
  const double se = combined_stderr(out.wedge_stderr, out.partial_stderr);
  const double diff = std::abs(out.wedge_top - out.partial_sum);
  out.discrepancy = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return out;
}

SpectrumEstimate random_walk_spectrum(const linrep::Representation& rep, long steps, int samples,
                                      std::uint64_t seed, int qr_interval) {
  if (steps < 1 || samples < 2) throw ValidationError("random walk needs steps >= 1 and samples >= 2");
  std::vector<MatrixN> letters;
  std::vector<double> log_cond;
  for (int g = 1; g <= rep.num_generators(); ++g) {
    for (int l : {g, -g}) {
      letters.push_back(linrep::eval_word(rep, Word{l}));
      log_cond.push_back(log_condition(letters.back()));
    }
  }
  std::vector<Eigen::VectorXd> xs;
  for (int s = 0; s < samples; ++s) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(s));
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    CocycleAccumulator acc(random_frame(rep.dim, rng), qr_interval);
    for (long i = 0; i < steps; ++i) {
      const std::size_t j = pick(rng);
      acc.advance(letters[j], log_cond[j]);
    }
    xs.push_back(acc.log_diag() / static_cast<double>(steps));
  }
  SpectrumEstimate est;
  est.label = rep.label;
  est.samples = samples;
  est.T = static_cast<double>(steps);
  est.seed = seed;
  est.normalization = "per-step";
  est.qualitative = true;
  finalize(est, std::move(xs));
  return est;
}

// --------------------------------------------------------------------- CSV

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_spectrum_csv(std::ostream& out, const SpectrumEstimate& est, bool header) {
  if (header) out << "label,i,lambda,stderr,samples,T,seed,normalization\n";
  for (int i = 0; i < est.dim(); ++i) {
    out << fmt::format("{},{},{:.12g},{:.6g},{},{:g},{},{}\n", csv_quote(est.label), i + 1, est.values(i),
                       est.stderr_(i), est.samples, est.T, est.seed, est.normalization);
  }
}

}  // namespace lyaplab::oseledets
