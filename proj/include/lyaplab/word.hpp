#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lyaplab {

// A group word as signed, 1-based generator letters: k stands for the k-th
// generator and -k for its inverse. The empty word is the identity.
using Word = std::vector<int>;

inline int generator_index(int letter) { return (letter > 0 ? letter : -letter) - 1; }
inline bool is_inverse_letter(int letter) { return letter < 0; }

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
// Cancels adjacent letter/inverse pairs until none remain.
Word free_reduce(const Word& w);
Word power(const Word& w, int k);
Word commutator(const Word& a, const Word& b);

// Throws ValidationError for zero letters or letters beyond num_generators.
void validate_word(const Word& w, int num_generators);

// Space-separated letters, e.g. "1 2 -1 -2". Empty string is the identity.
std::string format_word(const Word& w);
Word parse_word(std::string_view text);

}  // namespace lyaplab
