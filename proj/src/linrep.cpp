#include "lyaplab/linrep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "lyaplab/errors.hpp"

namespace lyaplab::linrep {

void Representation::validate() const {
  if (dim < 1) throw ValidationError("representation dimension must be positive");
  if (generators.empty()) throw ValidationError("representation has no generators");
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const MatrixN& m = generators[g];
    const std::string tag = "generator " + std::to_string(g + 1);
    if (m.rows() != dim || m.cols() != dim) throw ValidationError(tag + " has the wrong shape");
    if (!m.allFinite()) throw ValidationError(tag + " has non-finite entries");
    if (field == Field::real && m.imag().cwiseAbs().maxCoeff() > 1e-12) {
      throw ValidationError(tag + " has imaginary entries in a real representation");
    }
    const double det = std::abs(m.determinant());
    if (!(det >= 1e-6 && det <= 1e6)) throw ValidationError(tag + " is not safely invertible");
  }
  for (const Word& w : relations) validate_word(w, num_generators());
}

MatrixN eval_word(const Representation& rep, const Word& w) {
  MatrixN out = MatrixN::Identity(rep.dim, rep.dim);
  for (int letter : w) {
    const int g = generator_index(letter);
    if (g < 0 || g >= rep.num_generators()) {
      throw ValidationError("word letter " + std::to_string(letter) + " out of range");
    }
    if (is_inverse_letter(letter)) {
      Eigen::PartialPivLU<MatrixN> lu(rep.generators[g]);
      if (!(std::abs(lu.determinant()) > 1e-300)) {
        throw NumericError("generator " + std::to_string(g + 1) + " is singular");
      }
      out = out * lu.inverse();
    } else {
      out = out * rep.generators[g];
    }
  }
  return out;
}

RelationReport check_relations(const Representation& rep, double tol) {
  RelationReport report;
  const MatrixN id = MatrixN::Identity(rep.dim, rep.dim);
  for (std::size_t r = 0; r < rep.relations.size(); ++r) {
    const MatrixN m = eval_word(rep, rep.relations[r]);
    double res = (m - id).norm();
    if (rep.projective) res = std::min(res, (m + id).norm());
    if (!std::isfinite(res)) res = std::numeric_limits<double>::infinity();
    if (report.worst_relation < 0 || res > report.max_residual) {
      report.max_residual = res;
      report.worst_relation = static_cast<int>(r);
    }
  }
  report.passed = report.max_residual <= tol;
  return report;
}

bool has_unit_determinant(const Representation& rep, double tol) {
  return std::all_of(rep.generators.begin(), rep.generators.end(),
                     [&](const MatrixN& m) { return std::abs(m.determinant() - 1.0) < tol; });
}

std::vector<std::vector<int>> monomial_basis(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  // Descending lex: the first coordinate takes its largest value first.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, left - e);
    }
  };
  if (n >= 1) rec(rec, 0, k);
  return out;
}

namespace {

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

MatrixN sym_power_matrix(const MatrixN& a, int k) {
  if (k < 1) throw ValidationError("symmetric power needs k >= 1");
  const int n = static_cast<int>(a.rows());
  // Index tables for every degree 0..k.
  std::vector<std::map<std::vector<int>, int>> index(k + 1);
  std::vector<std::vector<std::vector<int>>> bases(k + 1);
  for (int d = 0; d <= k; ++d) {
    bases[d] = monomial_basis(n, d);
    for (std::size_t i = 0; i < bases[d].size(); ++i) index[d][bases[d][i]] = static_cast<int>(i);
  }
  const auto& basis = bases[k];
  MatrixN out = MatrixN::Zero(static_cast<Eigen::Index>(basis.size()),
                              static_cast<Eigen::Index>(basis.size()));
  for (std::size_t row = 0; row < basis.size(); ++row) {
    // Expand prod_i (sum_j a_ij x_j)^{alpha_i}.
    std::vector<Complex> poly{Complex(1.0)};
    int degree = 0;
    for (int i = 0; i < n; ++i) {
      for (int rep = 0; rep < basis[row][i]; ++rep) {
        std::vector<Complex> next(bases[degree + 1].size(), Complex(0.0));
        for (std::size_t m = 0; m < poly.size(); ++m) {
          if (poly[m] == Complex(0.0)) continue;
          std::vector<int> e = bases[degree][m];
          for (int j = 0; j < n; ++j) {
            ++e[j];
            next[index[degree + 1].at(e)] += poly[m] * a(i, j);
            --e[j];
          }
        }
        poly = std::move(next);
        ++degree;
      }
    }
    for (std::size_t col = 0; col < poly.size(); ++col) out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = poly[col];
  }
  return out;
}

std::vector<std::vector<int>> wedge_basis(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

MatrixN ext_power_matrix(const MatrixN& a, int k) {
  const int n = static_cast<int>(a.rows());
  if (k < 1 || k > n) throw ValidationError("exterior power needs 1 <= k <= n");
  const auto basis = wedge_basis(n, k);
  const auto size = static_cast<Eigen::Index>(basis.size());
  MatrixN out(size, size);
  MatrixN minor(k, k);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) minor(i, j) = a(basis[r][i], basis[c][j]);
      out(r, c) = k == 1 ? minor(0, 0) : minor.determinant();
    }
  }
  return out;
}

Representation sym_power(const Representation& rep, int k, int max_dim) {
  if (k < 1) throw ValidationError("symmetric power needs k >= 1");
  const std::size_t dim = binomial(rep.dim + k - 1, k);
  if (dim > static_cast<std::size_t>(max_dim)) throw ResourceError("symmetric power dimension too large");
  Representation out = rep;
  out.dim = static_cast<int>(dim);
  out.label = rep.label + " sym" + std::to_string(k);
  for (auto& g : out.generators) g = sym_power_matrix(g, k);
  return out;
}

Representation ext_power(const Representation& rep, int k, int max_dim) {
  if (k < 1 || k > rep.dim) throw ValidationError("exterior power needs 1 <= k <= n");
  const std::size_t dim = binomial(rep.dim, k);
  if (dim > static_cast<std::size_t>(max_dim)) throw ResourceError("exterior power dimension too large");
  Representation out = rep;
  out.dim = static_cast<int>(dim);
  out.label = rep.label + " ext" + std::to_string(k);
  for (auto& g : out.generators) g = ext_power_matrix(g, k);
  return out;
}

Representation conjugate(const Representation& rep, const MatrixN& x) {
  Eigen::PartialPivLU<MatrixN> lu(x);
  const MatrixN xinv = lu.inverse();
  Representation out = rep;
  for (auto& g : out.generators) g = x * g * xinv;
  if (x.imag().cwiseAbs().maxCoeff() > 0.0) out.field = Field::complex;
  return out;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::unitary: return "unitary";
    case Classification::reducible_suspected: return "reducible-suspected";
    case Classification::elementary_suspected: return "elementary-suspected";
    case Classification::non_elementary_suspected: return "non-elementary-suspected";
  }
  return "unknown";
}

namespace {

Word random_word(std::mt19937_64& rng, int num_gens, int max_len) {
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::uniform_int_distribution<int> gen_dist(1, num_gens);
  std::bernoulli_distribution inv;
  Word w;
  const int len = len_dist(rng);
  for (int i = 0; i < len; ++i) {
    const int g = gen_dist(rng);
    w.push_back(inv(rng) ? -g : g);
  }
  return free_reduce(w);
}

// Does v span a line invariant under every generator?
bool common_eigenvector(const std::vector<MatrixN>& gens, const Eigen::VectorXcd& v, double tol) {
  for (const auto& g : gens) {
    const Eigen::VectorXcd gv = g * v;
    const Complex mu = v.dot(gv);  // v normalized
    if ((gv - mu * v).norm() > tol * std::max(1.0, gv.norm())) return false;
  }
  return true;
}

bool looks_reducible(const Representation& rep, const std::vector<MatrixN>& samples, double tol) {
  // Invariant lines of ρ and of its dual (invariant hyperplanes).
  for (int dual = 0; dual < 2; ++dual) {
    std::vector<MatrixN> gens;
    for (const auto& g : rep.generators) gens.push_back(dual ? MatrixN(g.transpose()) : g);
    for (const auto& s : samples) {
      Eigen::ComplexEigenSolver<MatrixN> es(dual ? MatrixN(s.transpose()) : s);
      if (es.info() != Eigen::Success) continue;
      for (Eigen::Index c = 0; c < es.eigenvectors().cols(); ++c) {
        Eigen::VectorXcd v = es.eigenvectors().col(c);
        v.normalize();
        if (common_eigenvector(gens, v, 1e3 * tol)) return true;
      }
    }
  }
  return false;
}

}  // namespace

Classification classify(const Representation& rep, const ClassifyOptions& opts) {
  const int n = rep.dim;
  const MatrixN id = MatrixN::Identity(n, n);
  const bool unitary = std::all_of(rep.generators.begin(), rep.generators.end(), [&](const MatrixN& g) {
    return (g.adjoint() * g - id).norm() < opts.tol;
  });
  if (unitary) return Classification::unitary;

  std::mt19937_64 rng(opts.seed);
  std::vector<MatrixN> samples;
  samples.reserve(static_cast<std::size_t>(opts.word_budget));
  for (int i = 0; i < opts.word_budget; ++i) {
    samples.push_back(eval_word(rep, random_word(rng, rep.num_generators(), opts.max_word_length)));
  }
  // A small set of generic-looking elements is enough to test invariant lines.
  std::vector<MatrixN> probes(samples.begin(), samples.begin() + std::min<std::size_t>(samples.size(), 12));
  if (looks_reducible(rep, probes, opts.tol)) return Classification::reducible_suspected;

  // Non-elementary certificate: two loxodromic elements (pinching) with
  // disjoint fixed point pairs (twisting). For n > 2 use the top/bottom
  // eigenlines in place of fixed points.
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> lox;
  for (const auto& s : samples) {
    Eigen::ComplexEigenSolver<MatrixN> es(s);
    if (es.info() != Eigen::Success) continue;
    const auto& ev = es.eigenvalues();
    Eigen::Index imax = 0, imin = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
      if (std::abs(ev(i)) > std::abs(ev(imax))) imax = i;
      if (std::abs(ev(i)) < std::abs(ev(imin))) imin = i;
    }
    if (std::abs(ev(imax)) < (1.0 + 1e-3) * std::abs(ev(imin))) continue;
    Eigen::VectorXcd a = es.eigenvectors().col(imax).normalized();
    Eigen::VectorXcd b = es.eigenvectors().col(imin).normalized();
    lox.emplace_back(a, b);
  }
  auto same_line = [](const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    return 1.0 - std::abs(u.dot(v)) < 1e-6;
  };
  for (std::size_t i = 0; i < lox.size(); ++i) {
    for (std::size_t j = i + 1; j < lox.size(); ++j) {
      const auto& [a1, b1] = lox[i];
      const auto& [a2, b2] = lox[j];
      if (!same_line(a1, a2) && !same_line(a1, b2) && !same_line(b1, a2) && !same_line(b1, b2)) {
        return Classification::non_elementary_suspected;
      }
    }
  }
  return Classification::elementary_suspected;
}

Representation from_mobius(const std::vector<hyp::Mobius>& gens, const std::vector<Word>& relations,
                           std::string label) {
  Representation rep;
  rep.dim = 2;
  rep.field = Field::real;
  rep.projective = true;
  rep.label = std::move(label);
  for (const auto& m : gens) {
    MatrixN g(2, 2);
    g << m.a(), m.b(), m.c(), m.d();
    rep.generators.push_back(g);
  }
  rep.relations = relations;
  return rep;
}

Representation trivial(int num_generators, int dim, const std::vector<Word>& relations, std::string label) {
  Representation rep;
  rep.dim = dim;
  rep.label = std::move(label);
  rep.generators.assign(static_cast<std::size_t>(num_generators), MatrixN::Identity(dim, dim));
  rep.relations = relations;
  return rep;
}

}  // namespace lyaplab::linrep
