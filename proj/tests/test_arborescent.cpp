#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "replivol/arborescent.hpp"
#include "replivol/bounds.hpp"
#include "replivol/io.hpp"

#include <random>

using namespace replivol;
using namespace replivol::arborescent;

namespace {

Verdict verdict(const std::string& text) { return classify(parse_expression(text)).verdict; }

// a_n + 1/(a_{n-1} + 1/(... + 1/a_1)) with exact rationals
Rational continued(const std::vector<long long>& q) {
  Rational v = q.front();
  for (std::size_t i = 1; i < q.size(); ++i) v = Rational(q[i]) + 1 / v;
  return v;
}

}  // namespace

TEST_CASE("conway notation to fractions") {
  CHECK(parse_conway("2 1").fraction() == Fraction::make(3, 2));
  CHECK(parse_conway("3").fraction() == Fraction::make(3, 1));
  CHECK(parse_conway("1/2").fraction() == Fraction::make(1, 2));
  CHECK(parse_conway("-2/4").fraction() == Fraction::make(-1, 2));
  CHECK(parse_conway("inf").fraction().is_infinite());
  CHECK(parse_conway("2 2 3").fraction() == Fraction::make(17, 5));
  CHECK_THROWS_AS(parse_conway("2 x"), ArbError);
  CHECK_THROWS_AS(parse_conway(""), ArbError);
  CHECK_THROWS_AS(Fraction::make(0, 0), ArbError);
}

TEST_CASE("property: continued fractions round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<long long> q(1 + rng() % 6);
    std::vector<BigInt> qb;
    for (auto& x : q) {
      x = 1 + static_cast<long long>(rng() % 7);
      qb.push_back(x);
    }
    const auto c = ConwayRational::from_quotients(qb);
    const Rational v = continued(q);
    CHECK(c.fraction() == Fraction::make(numerator(v), denominator(v)));
    const auto back = ConwayRational::from_fraction(c.fraction());
    CHECK(back == c);
    CHECK(parse_conway(back.notation()) == c);
  }
}

TEST_CASE("fraction arithmetic") {
  CHECK(Fraction::make(3, 2).rotated() == Fraction::make(-2, 3));
  CHECK(Fraction::make(1, 2).negated() == Fraction::make(-1, 2));
  CHECK(add_integer(Fraction::make(1, 2), 1) == Fraction::make(3, 2));
  CHECK(add_integer(Fraction::infinity(), 5).is_infinite());
  CHECK(Fraction::make(0, 1).rotated().is_infinite());
}

TEST_CASE("classification of rational tangles") {
  for (const char* t : {"rat(0)", "rat(1)", "rat(-1)", "rat(5)", "rat(inf)", "rat(1 2)"}) {
    CHECK(verdict(t) == Verdict::EntirelyNonHyperbolic);
  }
  CHECK(verdict("rat(1/2)") == Verdict::Principally6);
  CHECK(verdict("rat(-1/2)") == Verdict::Principally6);
  // 3/2 is 1/2 followed by a braid twist
  CHECK(verdict("rat(2 1)") == Verdict::Principally6);
  for (const char* t : {"rat(1/3)", "rat(1/4)", "rat(1/5)", "rat(2 2 3)", "rat(2/5)"}) {
    CHECK(verdict(t) == Verdict::Principally4);
  }
}

TEST_CASE("classification of sums and loops") {
  CHECK(verdict("sum(rat(2 1), rat(2 1))") == Verdict::Principally2);
  CHECK(verdict("sum(rat(3/2), rat(3/2))") == Verdict::Principally2);
  CHECK(verdict("sum(q(1), rat(2 1))") == Verdict::EntirelyNonHyperbolic);
  CHECK(verdict("sum(rat(2 1), q(1))") == Verdict::EntirelyNonHyperbolic);
  CHECK(verdict("sum(q(1), sum(rat(2 1), rat(1/3)))") == Verdict::EntirelyNonHyperbolic);
  CHECK(verdict("q(1)") == Verdict::EntirelyNonHyperbolic);
  CHECK(verdict("sum(rat(2 1), rot(q(2)), rat(1/3))") == Verdict::EntirelyNonHyperbolic);
  // a sum with one non-integer summand is rational
  CHECK(verdict("sum(rat(1/3), rat(2))") == Verdict::Principally4);
  CHECK(verdict("sum(rat(1/2), rat(1))") == Verdict::Principally6);
  CHECK(verdict("sum(rat(2), rat(3))") == Verdict::EntirelyNonHyperbolic);
}

TEST_CASE("property: reflection and quarter turns") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> leaves = {"rat(2 1)", "rat(1/3)", "rat(1/2)", "rat(3)", "q(1)", "q(2)", "rat(2 2)"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string e = leaves[rng() % leaves.size()];
    const int parts = 1 + static_cast<int>(rng() % 3);
    for (int k = 1; k < parts; ++k) e = "sum(" + e + ", " + leaves[rng() % leaves.size()] + ")";
    const auto x = parse_expression(e);
    INFO(e);
    CHECK(classify(reflect(x)).verdict == classify(x).verdict);
    CHECK(classify(reflect(reflect(x))).verdict == classify(x).verdict);
    CHECK(classify(rotate(rotate(rotate(rotate(x))))).verdict == classify(x).verdict);
    CHECK(to_string(canonicalize(reflect(reflect(x)))) == to_string(canonicalize(x)));
  }
}

TEST_CASE("rotating a rational leaf rotates its fraction") {
  const auto e = canonicalize(parse_expression("rot(rat(2 1))"));
  REQUIRE(e->kind == NodeKind::RationalLeaf);
  CHECK(e->rational.fraction() == Fraction::make(-2, 3));
  CHECK(verdict("rot(rat(3))") == Verdict::Principally4);  // -1/3
  CHECK(verdict("rot(rat(2))") == Verdict::Principally6);  // -1/2
}

TEST_CASE("principal signatures") {
  CHECK(principal_signature(classify(parse_expression("rat(1/2)"))) == std::vector<int>{6});
  CHECK(principal_signature(classify(parse_expression("rat(1/3)"))) == std::vector<int>{4});
  CHECK(principal_signature(classify(parse_expression("sum(rat(2 1), rat(2 1))"))) == std::vector<int>{2});
  CHECK_FALSE(principal_signature(classify(parse_expression("rat(2)"))));
}

TEST_CASE("classification agrees with the zero and positive entries of the saucer table") {
  const auto db = bounds::shipped_database();
  int checked = 0;
  for (const auto& [k, e] : db.entries()) {
    if (k.family != bounds::Family::ReciprocalSaucer) continue;
    const auto sig = principal_signature(classify(leaf(parse_conway(k.conway))));
    REQUIRE(sig);
    INFO(bounds::key_string(k));
    if (e.volume) {
      CHECK((*sig)[0] <= k.signature[0]);
    } else {
      CHECK((*sig)[0] > k.signature[0]);
    }
    ++checked;
  }
  CHECK(checked == 16);
}

TEST_CASE("expression parsing and JSON trees") {
  CHECK_THROWS_AS(parse_expression("sum(rat(1))"), ArbError);
  CHECK_THROWS_AS(parse_expression("q(0)"), ArbError);
  CHECK_THROWS_AS(parse_expression("foo(1)"), ArbError);
  CHECK_THROWS_AS(parse_expression("sum(rat(1), rat(2)"), ArbError);
  const auto e = parse_expression("sum(rat(2 1), refl(q(2)), rot(rat(1/3)))");
  const auto back = io::expression_from_json(io::parse_json(io::to_json(e).dump()));
  CHECK(to_string(back) == to_string(e));
  CHECK(classify(back).verdict == classify(e).verdict);
  const auto tree = io::expression_from_json(io::parse_json(
      R"({"kind":"sum","children":[{"kind":"rational","fraction":"3/2"},{"kind":"rational","conway":"2 1"}]})"));
  CHECK(classify(tree).verdict == Verdict::Principally2);
}
