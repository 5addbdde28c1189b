#pragma once

// Linear representations ρ: Γ → GL_n given by generator images, plus the
// functors (symmetric and exterior powers) and diagnostics used on them.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lyaplab/hypgeo.hpp"
#include "lyaplab/word.hpp"

namespace lyaplab::linrep {

using Complex = std::complex<double>;
using MatrixN = Eigen::MatrixXcd;

enum class Field { real, complex };

struct Representation {
  int dim = 0;
  Field field = Field::real;
  // Relations may close up to sign (lifts of PSL₂ representations).
  bool projective = false;
  std::string label;
  std::vector<MatrixN> generators;
  std::vector<Word> relations;

  int num_generators() const { return static_cast<int>(generators.size()); }
  // Shapes, finiteness, |det| ∈ [1e-6, 1e6], real entries for real field,
  // relation letters in range. Throws ValidationError.
  void validate() const;
};

// Product of generator images along the word, left to right. Empty word
// gives the identity. Throws NumericError when an inverse is singular.
MatrixN eval_word(const Representation& rep, const Word& w);

struct RelationReport {
  double max_residual = 0.0;
  int worst_relation = -1;
  bool passed = true;
};

// Residual of each relation is ‖ρ(w) − I‖_F, or min over ± when the
// representation is projective.
RelationReport check_relations(const Representation& rep, double tol);

bool has_unit_determinant(const Representation& rep, double tol = 1e-9);

// Monomials of degree k in n variables, exponent vectors in descending
// lexicographic order (x₁^k first). Sym^k(A) is the matrix with
// Sym^k(A)·φ(v) = φ(Av) for the monomial map φ, so the Veronese vector
// (z^{k}, …, z, 1) is exactly equivariant.
std::vector<std::vector<int>> monomial_basis(int n, int k);
MatrixN sym_power_matrix(const MatrixN& a, int k);
// k-subsets in ascending lexicographic order; entries are k×k minors.
std::vector<std::vector<int>> wedge_basis(int n, int k);
MatrixN ext_power_matrix(const MatrixN& a, int k);

// Resulting dimensions above max_dim raise ResourceError.
Representation sym_power(const Representation& rep, int k, int max_dim = 4096);
Representation ext_power(const Representation& rep, int k, int max_dim = 4096);

Representation conjugate(const Representation& rep, const MatrixN& x);

enum class Classification { unitary, reducible_suspected, elementary_suspected, non_elementary_suspected };

std::string to_string(Classification c);

struct ClassifyOptions {
  int word_budget = 400;
  int max_word_length = 8;
  double tol = 1e-8;
  std::uint64_t seed = 0x5eed;
};

// Only "unitary" is a definite answer; everything else is a heuristic
// verdict from sampled words.
Classification classify(const Representation& rep, const ClassifyOptions& opts = {});

// Builders.
Representation from_mobius(const std::vector<hyp::Mobius>& gens, const std::vector<Word>& relations,
                           std::string label);
Representation trivial(int num_generators, int dim, const std::vector<Word>& relations,
                       std::string label = "trivial");

// Text format:
//   n=<int> field=<real|complex> projective=<0|1> label=<text>
//   one block of n rows per generator (complex entries as re+imi)
//   relations:
//   one word per line, space-separated signed 1-based letters
Representation read_representation(std::istream& in);
Representation read_representation_file(const std::string& path);
void write_representation(std::ostream& out, const Representation& rep);
void write_representation_file(const std::string& path, const Representation& rep);

Complex parse_scalar(std::string_view token);

}  // namespace lyaplab::linrep
