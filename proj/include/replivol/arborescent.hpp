#pragma once

#include "replivol/error.hpp"
#include "replivol/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace replivol::arborescent {

enum class Errc { ParseError, BadExpression };
const char* to_string(Errc code);

class ArbError : public Error {
 public:
  ArbError(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Reduced p/q with q >= 0; the infinity tangle is 1/0.
struct Fraction {
  BigInt num = 0;
  BigInt den = 1;

  static Fraction make(BigInt p, BigInt q);
  static Fraction infinity() { return Fraction{1, 0}; }
  bool is_infinite() const { return den == 0; }
  bool is_integer() const { return den == 1; }
  Fraction negated() const { return is_infinite() ? *this : Fraction{-num, den}; }
  /// -q/p: the fraction of a tangle turned a quarter turn.
  Fraction rotated() const { return make(-den, num); }
  std::string to_string() const;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Sum with an integer tangle: n + p/q, with inf + n = inf.
Fraction add_integer(const Fraction& f, const BigInt& n);

class ConwayRational {
 public:
  ConwayRational() : fraction_(Fraction{0, 1}), quotients_{0} {}
  static ConwayRational from_quotients(std::vector<BigInt> quotients);
  static ConwayRational from_fraction(const Fraction& f);

  const std::vector<BigInt>& partial_quotients() const noexcept { return quotients_; }
  const Fraction& fraction() const noexcept { return fraction_; }
  bool is_integer() const { return fraction_.is_integer(); }
  /// Conway notation ("2 1", "3", "inf").
  std::string notation() const;

  friend bool operator==(const ConwayRational& a, const ConwayRational& b) {
    return a.fraction_ == b.fraction_;
  }

 private:
  Fraction fraction_;
  std::vector<BigInt> quotients_;  // empty for the infinity tangle
};

/// Whitespace-separated integers read left to right as Conway notation, or
/// "inf". A single token "p/q" is accepted as a fraction.
ConwayRational parse_conway(std::string_view text);

struct Node;
using ArbExpr = std::shared_ptr<const Node>;

enum class NodeKind { RationalLeaf, QLoop, Sum, Rotate90, Reflect };

struct Node {
  NodeKind kind;
  ConwayRational rational;       // RationalLeaf
  int loops = 0;                 // QLoop
  std::vector<ArbExpr> children; // Sum: two or more; Rotate90/Reflect: one
};

ArbExpr leaf(const ConwayRational& r);
ArbExpr leaf(const Fraction& f);
ArbExpr qloop(int m);
ArbExpr sum(ArbExpr a, ArbExpr b);
ArbExpr sum(std::vector<ArbExpr> parts);
ArbExpr rotate(ArbExpr a);
ArbExpr reflect(ArbExpr a);

/// Flattens sums, pushes reflections to the leaves (negating fractions) and
/// evaluates rotations of rational leaves. Rotations of other nodes remain.
ArbExpr canonicalize(const ArbExpr& e);

/// Expression syntax: rat(2 1), rat(1/2), rat(inf), q(3), sum(a, b, ...),
/// rot(a), refl(a).
ArbExpr parse_expression(std::string_view text);
std::string to_string(const ArbExpr& e);

struct RationalWitness {
  bool rational = false;
  std::optional<Fraction> fraction;
};

RationalWitness is_rational(const ArbExpr& e);
bool contains_qloop(const ArbExpr& e, int min_m);

enum class Verdict { EntirelyNonHyperbolic, Principally2, Principally4, Principally6 };
const char* to_string(Verdict v);

struct Reason {
  std::string rule;      // short identifier of the matched rule
  std::string citation;  // the statement the rule implements
  std::string detail;
};

struct Classification {
  Verdict verdict = Verdict::EntirelyNonHyperbolic;
  std::vector<Reason> reasons;
  /// Set when the verdict depends on the syntactic reading of "contains Q_m".
  bool containment_caveat = false;
};

Classification classify(const ArbExpr& e);

/// (2), (4) or (6) for the principal hyperbolicity; nullopt when entirely
/// non-hyperbolic.
std::optional<std::vector<int>> principal_signature(const Classification& c);

}  // namespace replivol::arborescent
