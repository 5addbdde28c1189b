#include "lyaplab/word.hpp"

#include <charconv>
#include <cstdlib>

#include "lyaplab/errors.hpp"

namespace lyaplab {

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = -l;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word power(const Word& w, int k) {
  const Word base = k < 0 ? inverse(w) : w;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

Word commutator(const Word& a, const Word& b) {
  return concat(concat(a, b), concat(inverse(a), inverse(b)));
}

void validate_word(const Word& w, int num_generators) {
  for (int l : w) {
    if (l == 0 || std::abs(l) > num_generators) {
      throw ValidationError("word letter " + std::to_string(l) + " outside 1.." +
                            std::to_string(num_generators));
    }
  }
}

std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(w[i]);
  }
  return out;
}

Word parse_word(std::string_view text) {
  Word out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == ',')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != ',') ++end;
    int value = 0;
    auto tok = text.substr(pos, end - pos);
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || value == 0) {
      throw ValidationError("bad word letter '" + std::string(tok) + "'");
    }
    out.push_back(value);
    pos = end;
  }
  return out;
}

}  // namespace lyaplab
