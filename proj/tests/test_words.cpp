#include "pshlab/error.hpp"
#include "pshlab/words.hpp"

#include <doctest.h>

using namespace pshlab;

TEST_CASE("free reduction and inverses") {
  CHECK(free_reduce("aAbB") == "");
  CHECK(free_reduce("abBcCA") == "");
  CHECK(free_reduce("abBc") == "ac");
  CHECK(inverse_word("abC") == "cBA");
  CHECK(free_reduce(concat("abC", inverse_word("abC"))) == "");
  CHECK_THROWS_AS(free_reduce("ax"), Error);
}

TEST_CASE("genus one word problem is abelian") {
  SurfaceGroup g(1);
  CHECK(g.is_trivial("abAB"));
  CHECK(g.is_trivial("aabAAB"));
  CHECK(g.is_trivial("baBA"));
  CHECK_FALSE(g.is_trivial("ab"));
  CHECK_FALSE(g.is_trivial("aab"));
}

TEST_CASE("genus two word problem") {
  SurfaceGroup g(2);
  CHECK(g.is_trivial("abABcdCD"));
  CHECK(g.is_trivial(inverse_word("abABcdCD")));
  // Cyclic rotations and conjugates of the relator are trivial.
  CHECK(g.is_trivial("bABcdCDa"));
  CHECK(g.is_trivial("c" + std::string("abABcdCD") + "C"));
  // Products of relator conjugates.
  CHECK(g.is_trivial(std::string("abABcdCD") + "b" + "abABcdCD" + "B"));
  // Half of the relator is a nontrivial element.
  CHECK_FALSE(g.is_trivial("abAB"));
  CHECK_FALSE(g.is_trivial("ab"));
  CHECK_FALSE(g.is_trivial("abBAc"));
  // abAB = dcDC in the group.
  CHECK(g.is_trivial(concat("abAB", inverse_word("dcDC"))));
}
