#pragma once

#include "replivol/error.hpp"
#include "replivol/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace replivol::words {

enum class Errc {
  BadOrder,
  LengthMismatch,
  IndexOutOfRange,
  DeltaOutOfRange,
  FlagInconsistent,
  BadCut,
  NonTermination,
  MissingBasisVolume,
  BadCertificate,
};

const char* to_string(Errc code);

class WordError : public Error {
 public:
  WordError(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A valid cyclic word over T_1..T_{2m}, stored as its canonical (lexicographically
/// least) rotation. Reflection flags are derived from the index sequence.
class CyclicWord {
 public:
  /// The order-2 basis word T_1 T_1.
  CyclicWord() : order_(2), indices_{1, 1} {}

  /// Validates and canonicalizes. For order 2 the flag of the first letter can be
  /// supplied; it is kept as metadata and ignored by comparisons.
  static CyclicWord make(int order, std::vector<int> indices, bool first_reflected = false);

  int order() const noexcept { return order_; }
  int half() const noexcept { return order_ / 2; }
  const std::vector<int>& indices() const noexcept { return indices_; }
  int operator[](std::size_t i) const { return indices_[i]; }

  /// Reflection flags of the canonical rotation (true = reflected letter T^R).
  std::vector<bool> flags() const;

  /// True when every letter is the same (the basis word T_j^{2m}).
  bool is_basis() const;

  /// Order-2 representative flag; always false for order >= 4.
  bool first_reflected() const noexcept { return first_reflected_; }

  std::string to_string() const;

  friend bool operator==(const CyclicWord& a, const CyclicWord& b) {
    return a.order_ == b.order_ && a.indices_ == b.indices_;
  }
  friend std::strong_ordering operator<=>(const CyclicWord& a, const CyclicWord& b) {
    if (auto c = a.order_ <=> b.order_; c != 0) return c;
    return a.indices_ <=> b.indices_;
  }

 private:
  CyclicWord(int order, std::vector<int> indices, bool first_reflected)
      : order_(order), indices_(std::move(indices)), first_reflected_(first_reflected) {}

  int order_ = 0;
  std::vector<int> indices_;
  bool first_reflected_ = false;
};

/// Index of the lexicographically least rotation of `seq`.
std::size_t least_rotation(const std::vector<int>& seq);

/// Throws on invalid input; otherwise identical to CyclicWord::make.
CyclicWord validate_word(int order, const std::vector<int>& indices);

/// Flags derived for an arbitrary rotation of a valid index sequence.
/// Throws DeltaOutOfRange / FlagInconsistent exactly as validation does.
std::vector<bool> derive_flags(int order, const std::vector<int>& indices);

CyclicWord reverse(const CyclicWord& w);

/// Halves are w[cut..cut+m) and the remaining m letters, read on the canonical
/// rotation. Returns (a1 a1^R, a2 a2^R).
std::pair<CyclicWord, CyclicWord> split_relation(const CyclicWord& w, int cut);

/// Two explicit cut points on the canonical rotation; BadCut unless the arcs
/// between them have equal length.
std::pair<CyclicWord, CyclicWord> split_relation(const CyclicWord& w, int cut1, int cut2);

/// Letter index -> number of occurrences (only letters that occur).
std::map<int, std::int64_t> letter_counts(const CyclicWord& w);

using Coefficients = std::map<int, Rational>;

/// q_i(w) / 2m for every letter that occurs.
Coefficients closed_form(const CyclicWord& w);

struct SplitStep {
  CyclicWord word;
  int cut = 0;            // offset into the rotation the halves are read from
  std::vector<int> rotation;  // the index sequence the halves are cut from
  std::vector<int> a1;
  std::vector<int> a2;
  CyclicWord w1;
  CyclicWord w2;
  Coefficients value;     // claimed value of `word` in the letter basis
};

struct SolvedCycle {
  CyclicWord word;
  Rational self_coefficient;  // c in x = e + c x
  Coefficients value;
  std::size_t chain_length = 0;    // descent iterations until the repeat was seen
  std::size_t distinct_words = 0;  // distinct words met in that chain
};

struct ReductionCertificate {
  CyclicWord input;
  std::vector<SplitStep> steps;
  std::vector<SolvedCycle> solved_cycles;
  Coefficients result;
  std::size_t iterations = 0;
};

struct Reduction {
  Coefficients coefficients;
  ReductionCertificate certificate;
};

/// Reduces a word to the single-letter basis by repeated application of the
/// splitting relation, solving self-referential chains exactly.
Reduction reduce(const CyclicWord& w);

/// Upper bound on the number of palindromic words of a given order used for
/// the NonTermination guard.
std::uint64_t palindrome_bound(int order);

/// Checks every step structurally (halves, products, canonical forms), checks
/// that the claimed values satisfy every relation, and that `result` is the
/// value of the input word. Throws BadCertificate with a reason on failure.
void verify_certificate(const ReductionCertificate& cert);

/// Sum of coeff_i * vol(T_i^{2m}).
Rational bound_from_reduction(const Coefficients& coeffs, const std::map<int, Rational>& basis_volumes);

/// Rational linear combination of canonical words; zero terms are never stored.
class WordVector {
 public:
  WordVector() = default;
  explicit WordVector(const CyclicWord& w, Rational c = 1);

  void add(const CyclicWord& w, const Rational& c);
  WordVector& operator+=(const WordVector& other);
  WordVector& operator*=(const Rational& c);
  friend WordVector operator+(WordVector a, const WordVector& b) { return a += b; }
  friend WordVector operator*(WordVector a, const Rational& c) { return a *= c; }

  Rational coefficient(const CyclicWord& w) const;
  const std::map<CyclicWord, Rational>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  friend bool operator==(const WordVector&, const WordVector&) = default;

  /// Image in the letter basis (each word replaced by its reduction).
  Coefficients to_letters() const;

 private:
  std::map<CyclicWord, Rational> terms_;
};

/// All valid words of an order (canonical, sorted). Intended for order <= 10.
std::vector<CyclicWord> enumerate_words(int order);

}  // namespace replivol::words
