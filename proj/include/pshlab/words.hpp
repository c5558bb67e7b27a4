#pragma once

// Words over the crossing alphabet {a,A,b,B,c,C,d,D}; an upper-case letter is
// the inverse of its lower-case partner.

#include <string>
#include <string_view>

namespace pshlab {

using Word = std::string;

bool is_crossing_letter(char c);
char inverse_letter(char c);

Word free_reduce(std::string_view w);
Word inverse_word(std::string_view w);
Word concat(std::string_view lhs, std::string_view rhs);

/// Fundamental group of the closed oriented genus-g surface with the standard
/// one-relator presentation (genus 1: abAB; genus 2: abABcdCD).
class SurfaceGroup {
public:
  explicit SurfaceGroup(int genus);

  int genus() const { return genus_; }
  const Word& relator() const { return relator_; }
  /// Letters (lower case) generating this group.
  std::string generators() const;

  /// Solves the word problem: true iff w represents the identity.
  bool is_trivial(std::string_view w) const;

  /// Dehn-reduced cyclic normal form (genus >= 2) or free reduction (genus 1).
  Word reduce(std::string_view w) const;

private:
  int genus_;
  Word relator_;
};

}  // namespace pshlab
