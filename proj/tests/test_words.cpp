#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "replivol/io.hpp"
#include "replivol/words.hpp"
#include "support.hpp"

#include <set>

using namespace replivol;
using namespace replivol::words;

namespace {

Coefficients coeffs(std::initializer_list<std::pair<int, const char*>> xs) {
  Coefficients c;
  for (const auto& [k, v] : xs) c[k] = parse_rational(v);
  return c;
}

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const WordError& e) {
    return e.code();
  }
  FAIL("no WordError thrown");
  return Errc::BadOrder;
}

// Brute-force listing of valid words: every index sequence that validates.
std::set<CyclicWord> brute_force_words(int order) {
  std::set<CyclicWord> out;
  std::vector<int> seq(static_cast<std::size_t>(order), 1);
  for (;;) {
    try {
      out.insert(CyclicWord::make(order, seq));
    } catch (const WordError&) {
    }
    std::size_t i = 0;
    while (i < seq.size() && seq[i] == order) seq[i++] = 1;
    if (i == seq.size()) break;
    ++seq[i];
  }
  return out;
}

// Solves every splitting relation over all words of an order at once by
// exact Gauss-Jordan elimination; basis words are pinned to their letter.
std::map<CyclicWord, Coefficients> eliminate(int order) {
  const auto list = enumerate_words(order);
  std::map<CyclicWord, std::size_t> idx;
  for (std::size_t i = 0; i < list.size(); ++i) idx[list[i]] = i;
  const std::size_t n = list.size();
  const std::size_t letters = static_cast<std::size_t>(order);
  std::vector<std::vector<Rational>> rows;
  for (const auto& w : list) {
    std::vector<Rational> row(n + letters, 0);
    if (w.is_basis()) {
      row[idx[w]] = 1;
      row[n + static_cast<std::size_t>(w[0] - 1)] = 1;
      rows.push_back(row);
      continue;
    }
    const auto& s = w.indices();
    for (int cut = 0; cut < order; ++cut) {
      std::vector<int> rot(s.begin() + cut, s.end());
      rot.insert(rot.end(), s.begin(), s.begin() + cut);
      const std::size_t m = rot.size() / 2;
      std::vector<int> a(rot.begin(), rot.begin() + static_cast<std::ptrdiff_t>(m));
      std::vector<int> b(rot.begin() + static_cast<std::ptrdiff_t>(m), rot.end());
      std::vector<int> aa = a, bb = b;
      aa.insert(aa.end(), a.rbegin(), a.rend());
      bb.insert(bb.end(), b.rbegin(), b.rend());
      auto w1 = CyclicWord::make(order, aa);
      auto w2 = CyclicWord::make(order, bb);
      std::vector<Rational> r(n + letters, 0);
      r[idx[w]] += 2;
      r[idx.at(w1)] -= 1;
      r[idx.at(w2)] -= 1;
      rows.push_back(r);
    }
  }
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][col] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    const Rational inv = 1 / rows[rank][col];
    for (auto& x : rows[rank]) x *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const Rational f = rows[r][col];
      for (std::size_t c = 0; c < n + letters; ++c) rows[r][c] -= f * rows[rank][c];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  REQUIRE(rank == n);
  std::map<CyclicWord, Coefficients> out;
  for (std::size_t r = 0; r < rank; ++r) {
    Coefficients c;
    for (std::size_t l = 0; l < letters; ++l) {
      if (rows[r][n + l] != 0) c[static_cast<int>(l + 1)] = rows[r][n + l];
    }
    out[list[pivot_col[r]]] = c;
  }
  return out;
}

}  // namespace

TEST_CASE("v4 reduces to 4/5 T1 + 1/5 T2") {
  const auto w = validate_word(10, {1, 1, 1, 1, 1, 1, 1, 1, 2, 2});
  const auto r = reduce(w);
  CHECK(r.coefficients == coeffs({{1, "4/5"}, {2, "1/5"}}));
  CHECK_NOTHROW(verify_certificate(r.certificate));
  CHECK(r.certificate.solved_cycles.size() == 1);
}

TEST_CASE("basis words reduce to themselves") {
  for (int order : {2, 4, 10}) {
    for (int i = 1; i <= order; ++i) {
      const auto w = validate_word(order, std::vector<int>(static_cast<std::size_t>(order), i));
      CHECK(w.is_basis());
      CHECK(reduce(w).coefficients == Coefficients{{i, Rational(1)}});
    }
  }
}

TEST_CASE("validation errors") {
  CHECK(error_of([] { validate_word(3, {1, 1, 1}); }) == Errc::BadOrder);
  CHECK(error_of([] { validate_word(4, {1, 1, 1}); }) == Errc::LengthMismatch);
  CHECK(error_of([] { validate_word(4, {1, 5, 1, 1}); }) == Errc::IndexOutOfRange);
  CHECK(error_of([] { validate_word(4, {1, 3, 1, 1}); }) == Errc::DeltaOutOfRange);
  CHECK(error_of([] { validate_word(4, {1, 2, 1, 1}); }) == Errc::FlagInconsistent);
  CHECK(error_of([] { split_relation(validate_word(4, {1, 1, 2, 2}), 0, 1); }) == Errc::BadCut);
  CHECK(error_of([] { split_relation(validate_word(4, {1, 1, 2, 2}), 7); }) == Errc::BadCut);
}

TEST_CASE("derived flags of T1 T2 T2 T1") {
  const auto f = derive_flags(4, {1, 2, 2, 1});
  CHECK(f == std::vector<bool>{false, false, true, true});
}

TEST_CASE("order 2 identifies T1T2 with its reflected form") {
  const auto a = CyclicWord::make(2, {1, 2}, false);
  const auto b = CyclicWord::make(2, {2, 1}, true);
  CHECK(a == b);
  CHECK(enumerate_words(2).size() == 3);
}

TEST_CASE("canonical form is the least rotation") {
  const auto w = validate_word(4, {2, 2, 1, 1});
  CHECK(w.indices() == std::vector<int>{1, 1, 2, 2});
  CHECK(least_rotation({3, 1, 2, 1}) == 1);
  CHECK_NOTHROW(validate_word(4, {1, 2, 3, 4}));
}

TEST_CASE("split relation reads halves on the canonical rotation") {
  const auto w = validate_word(4, {1, 1, 2, 2});
  const auto [w1, w2] = split_relation(w, 0);
  CHECK(w1.indices() == std::vector<int>{1, 1, 1, 1});
  CHECK(w2.indices() == std::vector<int>{2, 2, 2, 2});
  const auto [u1, u2] = split_relation(w, 1);
  CHECK(u1 == w);  // T1T2 T2T1 has canonical form T1T1T2T2
  CHECK(u2 == u1);
  CHECK(split_relation(w, 1, 3) == split_relation(w, 1));
}

TEST_CASE("word counts: brute force against the choice model") {
  for (int order : {2, 4, 6, 8}) {
    const auto brute = brute_force_words(order);
    const auto model = enumerate_words(order);
    CHECK(std::set<CyclicWord>(model.begin(), model.end()) == brute);
  }
  // frozen from the brute-force listing
  CHECK(enumerate_words(4).size() == 10);
  CHECK(enumerate_words(6).size() == 26);
  CHECK(enumerate_words(8).size() == 82);
}

TEST_CASE("elimination oracle over all relations agrees with reduction") {
  for (int order : {4, 6}) {
    const auto solved = eliminate(order);
    for (const auto& [w, c] : solved) {
      CHECK(reduce(w).coefficients == c);
      CHECK(closed_form(w) == c);
    }
  }
  // frozen oracle values
  const auto s4 = eliminate(4);
  CHECK(s4.at(validate_word(4, {1, 1, 2, 2})) == coeffs({{1, "1/2"}, {2, "1/2"}}));
  CHECK(s4.at(validate_word(4, {1, 2, 2, 1})) == coeffs({{1, "1/2"}, {2, "1/2"}}));
  const auto s6 = eliminate(6);
  CHECK(s6.at(validate_word(6, {1, 1, 1, 1, 2, 2})) == coeffs({{1, "2/3"}, {2, "1/3"}}));
}

TEST_CASE("property: random words reduce to the closed form with a valid certificate") {
  std::mt19937_64 rng(20261014);
  for (int trial = 0; trial < 300; ++trial) {
    const int order = 2 * static_cast<int>(1 + rng() % 10);
    const auto w = testsupport::random_word(rng, order);
    const auto r = reduce(w);
    INFO(w.to_string());
    CHECK(r.coefficients == closed_form(w));
    CHECK_NOTHROW(verify_certificate(r.certificate));
    Rational total = 0;
    for (const auto& [k, v] : r.coefficients) total += v;
    CHECK(total == 1);
  }
}

TEST_CASE("property: rotation and reversal invariance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int order = 2 * static_cast<int>(1 + rng() % 8);
    const auto w = testsupport::random_word(rng, order);
    auto seq = w.indices();
    std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(rng() % seq.size()), seq.end());
    CHECK(CyclicWord::make(order, seq) == w);
    CHECK(reduce(reverse(w)).coefficients == reduce(w).coefficients);
    std::int64_t n = 0;
    for (const auto& [k, c] : letter_counts(w)) n += c;
    CHECK(n == order);
  }
}

TEST_CASE("property: every split is valid and the relation holds on closed forms") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int order = 2 * static_cast<int>(1 + rng() % 9);
    const auto w = testsupport::random_word(rng, order);
    const int cut = static_cast<int>(rng() % static_cast<unsigned>(order));
    const auto [w1, w2] = split_relation(w, cut);
    Coefficients lhs = closed_form(w), rhs;
    for (auto& [k, v] : lhs) v *= 2;
    for (const auto* x : {&w1, &w2}) {
      for (const auto& [k, v] : closed_form(*x)) rhs[k] += v;
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("forged certificates are rejected") {
  auto r = reduce(validate_word(10, {1, 1, 1, 1, 1, 1, 1, 1, 2, 2}));
  auto bad = r.certificate;
  bad.result = coeffs({{1, "3/4"}, {2, "1/4"}});
  CHECK(error_of([&] { verify_certificate(bad); }) == Errc::BadCertificate);
  bad = r.certificate;
  bad.steps.front().value = coeffs({{1, "1/2"}, {2, "1/2"}});
  CHECK(error_of([&] { verify_certificate(bad); }) == Errc::BadCertificate);
  bad = r.certificate;
  std::swap(bad.steps.front().w1, bad.steps.front().w2);
  bad.steps.front().w1 = validate_word(10, std::vector<int>(10, 3));
  CHECK(error_of([&] { verify_certificate(bad); }) == Errc::BadCertificate);
}

TEST_CASE("certificate JSON round trip replays") {
  const auto r = reduce(validate_word(10, {1, 1, 1, 1, 1, 1, 1, 1, 2, 2}));
  const auto j = io::to_json(r.certificate);
  const auto back = io::certificate_from_json(io::parse_json(j.dump()));
  CHECK_NOTHROW(verify_certificate(back));
  CHECK(back.result == r.coefficients);
  CHECK(io::to_json(back).dump() == j.dump());
}

TEST_CASE("word vectors are linear and map to letters") {
  const auto a = validate_word(4, {1, 1, 2, 2});
  const auto b = validate_word(4, {2, 2, 2, 2});
  WordVector v(a, 2);
  v += WordVector(b, -1);
  v.add(a, -2);
  CHECK(v.coefficient(a) == 0);
  CHECK(v.terms().size() == 1);
  CHECK(v.to_letters() == Coefficients{{2, Rational(-1)}});
  CHECK((WordVector(a) * Rational(3)).to_letters() == coeffs({{1, "3/2"}, {2, "3/2"}}));
}

TEST_CASE("volume bound from a reduction") {
  const auto c = coeffs({{1, "4/5"}, {2, "1/5"}});
  CHECK(bound_from_reduction(c, {{1, Rational(5)}, {2, Rational(10)}}) == 6);
  CHECK(error_of([&] { bound_from_reduction(c, {{1, Rational(5)}}); }) == Errc::MissingBasisVolume);
}

TEST_CASE("palindrome bound grows by three per letter") {
  CHECK(palindrome_bound(2) == 2);
  CHECK(palindrome_bound(4) == 12);
  CHECK(palindrome_bound(10) == 10 * 81);
}
