#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lyaplab/errors.hpp"
#include "lyaplab/linrep.hpp"

namespace lyaplab::linrep {

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size()) {
    throw ValidationError("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

}  // namespace

Complex parse_scalar(std::string_view tok) {
  if (tok.empty()) throw ValidationError("empty matrix entry");
  if (tok.back() != 'i') return {parse_double(tok), 0.0};
  const std::string_view body = tok.substr(0, tok.size() - 1);
  // Split before the last sign that is not a leading sign or an exponent sign.
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      const std::string_view im = body.substr(i);
      return {parse_double(body.substr(0, i)),
              im == "+" ? 1.0 : im == "-" ? -1.0 : parse_double(im)};
    }
  }
  if (body.empty() || body == "+") return {0.0, 1.0};
  if (body == "-") return {0.0, -1.0};
  return {0.0, parse_double(body)};
}

Representation read_representation(std::istream& in) {
  Representation rep;
  std::string line;
  bool have_header = false;
  bool in_relations = false;
  std::vector<std::vector<Complex>> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!have_header) {
      const auto label_pos = t.find("label=");
      const std::string_view head = label_pos == std::string_view::npos ? t : t.substr(0, label_pos);
      if (label_pos != std::string_view::npos) rep.label = std::string(trim(t.substr(label_pos + 6)));
      bool have_n = false;
      for (auto kv : split_ws(head)) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw ValidationError("bad header field '" + std::string(kv) + "'");
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "n") {
          rep.dim = static_cast<int>(parse_double(val));
          have_n = true;
        } else if (key == "field") {
          if (val == "real") rep.field = Field::real;
          else if (val == "complex") rep.field = Field::complex;
          else throw ValidationError("field must be real or complex");
        } else if (key == "projective") {
          if (val != "0" && val != "1") throw ValidationError("projective must be 0 or 1");
          rep.projective = val == "1";
        } else {
          throw ValidationError("unknown header key '" + std::string(key) + "'");
        }
      }
      if (!have_n || rep.dim < 1) throw ValidationError("header needs n=<positive int>");
      have_header = true;
      continue;
    }
    if (t == "relations:") {
      in_relations = true;
      continue;
    }
    if (in_relations) {
      rep.relations.push_back(parse_word(t));
      continue;
    }
    const auto toks = split_ws(t);
    if (static_cast<int>(toks.size()) != rep.dim) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(rep.dim) +
                            " entries");
    }
    std::vector<Complex> row;
    for (auto tok : toks) row.push_back(parse_scalar(tok));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("missing representation header");
  if (rows.size() % static_cast<std::size_t>(rep.dim) != 0) {
    throw ValidationError("matrix rows do not form whole generator blocks");
  }
  for (std::size_t g = 0; g < rows.size() / rep.dim; ++g) {
    MatrixN m(rep.dim, rep.dim);
    for (int r = 0; r < rep.dim; ++r)
      for (int c = 0; c < rep.dim; ++c) m(r, c) = rows[g * rep.dim + r][c];
    rep.generators.push_back(m);
  }
  rep.validate();
  return rep;
}

Representation read_representation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open representation file '" + path + "'");
  return read_representation(in);
}

void write_representation(std::ostream& out, const Representation& rep) {
  out << fmt::format("n={} field={} projective={} label={}\n", rep.dim,
                     rep.field == Field::real ? "real" : "complex", rep.projective ? 1 : 0, rep.label);
  for (const auto& g : rep.generators) {
    for (int r = 0; r < rep.dim; ++r) {
      for (int c = 0; c < rep.dim; ++c) {
        if (c) out << ' ';
        const Complex v = g(r, c);
        if (rep.field == Field::real) {
          out << fmt::format("{:.17g}", v.real());
        } else {
          out << fmt::format("{:.17g}{:+.17g}i", v.real(), v.imag());
        }
      }
      out << '\n';
    }
    out << '\n';
  }
  out << "relations:\n";
  for (const auto& w : rep.relations) out << format_word(w) << '\n';
}

void write_representation_file(const std::string& path, const Representation& rep) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write representation file '" + path + "'");
  write_representation(out, rep);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace lyaplab::linrep
