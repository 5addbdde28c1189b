#pragma once

// Lyapunov spectra of the holonomy cocycle over the geodesic flow.
//
// A sample follows one long geodesic through the fundamental domain. Each
// side crossing multiplies the running frame by the image of the side's
// pairing, and periodic QR steps peel off the growth into log_diag.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "lyaplab/fuchsian.hpp"
#include "lyaplab/linrep.hpp"

namespace lyaplab::oseledets {

using linrep::MatrixN;

// minus4 reports exponents for the curvature −4 metric (twice the per-unit
// rates measured internally), so the uniformizing rank-2 representation has
// λ₁ = 1. minus1 reports the raw curvature −1 rates.
enum class Normalization { minus4, minus1 };

std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view text);
double normalization_factor(Normalization n);

class CocycleAccumulator {
 public:
  CocycleAccumulator(MatrixN initial_frame, int qr_interval = 8);
  explicit CocycleAccumulator(int n, int qr_interval = 8);

  // frame ← m·frame, with a QR step every qr_interval advances, when the
  // frame grows past 1e120, or when the summed log condition numbers of the
  // matrices applied since the last QR exceed ~log(1e8) (strongly
  // contracting directions would otherwise underflow relative to the top).
  void advance(const MatrixN& m, double log_condition = 0.0);
  void reorthonormalize();
  void add_length(double dt) { elapsed_length_ += dt; }

  // Flushes pending growth into log_diag first.
  const Eigen::VectorXd& log_diag();
  const MatrixN& frame() const { return frame_; }
  long steps() const { return steps_; }
  double elapsed_length() const { return elapsed_length_; }
  int dim() const { return static_cast<int>(frame_.cols()); }

 private:
  MatrixN frame_;
  MatrixN scratch_;
  Eigen::VectorXd log_diag_;
  long steps_ = 0;
  int since_qr_ = 0;
  double pending_log_condition_ = 0.0;
  int qr_interval_;
  double elapsed_length_ = 0.0;
};

struct RunConfig {
  double T = 2000.0;  // curvature −1 flow time per sample
  // Flow length run before accumulation starts, so the frame has aligned
  // with the stationary filtration and the initial frame leaves no bias.
  double burn_in = 20.0;
  int samples = 64;
  std::uint64_t seed = 1;
  int qr_interval = 8;
  Normalization normalization = Normalization::minus4;
  // Base points hyperbolic-uniform in the domain; otherwise every sample
  // starts at the interior point and only the direction is random.
  bool uniform_base = true;
  int threads = 1;
  fuchsian::CodingOptions coding;

  void validate() const;
};

struct SpectrumEstimate {
  std::string label;
  Eigen::VectorXd values;  // nonincreasing
  Eigen::VectorXd stderr_;
  int samples = 0;
  int failed_samples = 0;
  double T = 0.0;
  std::uint64_t seed = 0;
  std::string normalization;
  // Per-sample exponent vectors, permuted like `values`.
  std::vector<Eigen::VectorXd> per_sample;
  // Set for estimates that are not geodesic-flow exponents.
  bool qualitative = false;

  int dim() const { return static_cast<int>(values.size()); }
  // Mean and standard error of Σ_{i<k} λ_i computed sample by sample.
  std::pair<double, double> partial_sum(int k) const;
};

// Independent RNG stream for sample `index`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

// Hyperbolic-uniform point of the domain by rejection from its bounding box.
fuchsian::HPoint random_domain_point(const fuchsian::FundamentalDomain& dom, std::mt19937_64& rng);

// Haar-random unitary n×n frame.
MatrixN random_frame(int n, std::mt19937_64& rng);

// Exponents along one geodesic of length T, in accumulation order.
Eigen::VectorXd run_sample(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep,
                           const fuchsian::UnitTangent& start, const MatrixN& initial_frame,
                           const RunConfig& config);

SpectrumEstimate estimate_spectrum(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep,
                                   const RunConfig& config);

struct WedgeCrosscheck {
  double wedge_top = 0.0;
  double wedge_stderr = 0.0;
  double partial_sum = 0.0;
  double partial_stderr = 0.0;
  double discrepancy = 0.0;  // |difference| in combined standard errors
};

// Compares λ₁(∧ᵏρ) with λ₁ + … + λ_k of ρ.
WedgeCrosscheck wedge_crosscheck(const fuchsian::FundamentalDomain& dom, const linrep::Representation& rep, int k,
                                 const RunConfig& config);

// Exponents per step of i.i.d. uniform products over the generators and
// their inverses. Only meaningful as a zero/nonzero signal: the stationary
// measure differs from the geodesic one.
SpectrumEstimate random_walk_spectrum(const linrep::Representation& rep, long steps, int samples,
                                      std::uint64_t seed, int qr_interval = 8);

double combined_stderr(double a, double b);

// log(σ_max/σ_min) of a square matrix.
double log_condition(const MatrixN& m);

// One row per exponent: label,i,lambda,stderr,samples,T,seed,normalization
void write_spectrum_csv(std::ostream& out, const SpectrumEstimate& est, bool header = true);
std::string csv_quote(const std::string& field);

}  // namespace lyaplab::oseledets
