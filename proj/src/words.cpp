#include "pshlab/words.hpp"

#include "pshlab/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace pshlab {

bool is_crossing_letter(char c) {
  const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return l == 'a' || l == 'b' || l == 'c' || l == 'd';
}

char inverse_letter(char c) {
  return std::islower(static_cast<unsigned char>(c))
             ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
             : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

Word free_reduce(std::string_view w) {
  Word out;
  out.reserve(w.size());
  for (char c : w) {
    if (!is_crossing_letter(c))
      throw Error(ErrorCode::InvalidArgument, std::string("invalid crossing letter '") + c + "'");
    if (!out.empty() && out.back() == inverse_letter(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

Word inverse_word(std::string_view w) {
  Word out(w.rbegin(), w.rend());
  for (char& c : out) c = inverse_letter(c);
  return out;
}

Word concat(std::string_view lhs, std::string_view rhs) {
  Word joined(lhs);
  joined.append(rhs);
  return free_reduce(joined);
}

SurfaceGroup::SurfaceGroup(int genus) : genus_(genus) {
  if (genus < 1 || genus > 2)
    throw Error(ErrorCode::InvalidArgument, "surface group supported for genus 1 and 2");
  relator_ = genus == 1 ? "abAB" : "abABcdCD";
}

std::string SurfaceGroup::generators() const { return genus_ == 1 ? "ab" : "abcd"; }

namespace {

Word cyclic_reduce(Word w) {
  w = free_reduce(w);
  while (w.size() >= 2 && w.front() == inverse_letter(w.back())) w = w.substr(1, w.size() - 2);
  return w;
}

// Dehn's algorithm for the one-relator surface group (small cancellation
// C'(1/7) for genus >= 2): any non-empty cyclically reduced trivial word
// contains more than half of a cyclic conjugate of r or r^-1.
Word dehn_reduce(std::string_view input, const Word& relator) {
  std::vector<Word> rotations;
  for (const Word& base : {relator, inverse_word(relator)}) {
    for (std::size_t k = 0; k < base.size(); ++k)
      rotations.push_back(base.substr(k) + base.substr(0, k));
  }
  const std::size_t n = relator.size();
  const std::size_t half = n / 2 + 1;

  Word w = cyclic_reduce(Word(input));
  bool changed = true;
  while (changed && !w.empty()) {
    changed = false;
    // Work on the doubled word so subwords wrapping the end are found.
    for (const Word& rot : rotations) {
      for (std::size_t len = n; len >= half && !changed; --len) {
        const Word piece = rot.substr(0, len);
        const Word replacement = inverse_word(rot.substr(len));
        const Word doubled = w + w;
        for (std::size_t start = 0; start < w.size() && !changed; ++start) {
          if (len > w.size()) break;
          if (doubled.compare(start, len, piece) != 0) continue;
          // Rotate so the match begins at 0, then substitute.
          const Word rotated = doubled.substr(start, w.size());
          w = cyclic_reduce(replacement + rotated.substr(len));
          changed = true;
        }
      }
      if (changed) break;
    }
  }
  return w;
}

}  // namespace

Word SurfaceGroup::reduce(std::string_view w) const {
  for (char c : w) {
    if (generators().find(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))) ==
        std::string::npos)
      throw Error(ErrorCode::InvalidArgument, std::string("letter '") + c + "' not in surface group");
  }
  if (genus_ == 1) return free_reduce(w);
  return dehn_reduce(w, relator_);
}

bool SurfaceGroup::is_trivial(std::string_view w) const {
  if (genus_ == 1) {
    // Z^2: exponent sums vanish.
    std::array<int, 2> sums{0, 0};
    for (char c : reduce(w)) {
      const int idx = std::tolower(static_cast<unsigned char>(c)) - 'a';
      sums[idx] += std::islower(static_cast<unsigned char>(c)) ? 1 : -1;
    }
    return sums[0] == 0 && sums[1] == 0;
  }
  return reduce(w).empty();
}

}  // namespace pshlab
