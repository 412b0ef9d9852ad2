#include "replivol/arborescent.hpp"

#include <cctype>
#include <sstream>

namespace replivol::arborescent {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::BadExpression: return "BadExpression";
  }
  return "ArbError";
}

ArbError::ArbError(Errc code, const std::string& message)
    : Error(arborescent::to_string(code), message, ErrorClass::Input), code_(code) {}

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

BigInt parse_int_token(std::string_view tok, std::string_view whole) {
  std::size_t i = 0;
  bool neg = false;
  if (i < tok.size() && (tok[i] == '-' || tok[i] == '+')) {
    neg = tok[i] == '-';
    ++i;
  }
  if (i == tok.size()) throw ArbError(Errc::ParseError, "bad integer in '" + std::string(whole) + "'");
  BigInt v = 0;
  for (; i < tok.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) {
      throw ArbError(Errc::ParseError, "bad token '" + std::string(tok) + "' in '" + std::string(whole) + "'");
    }
    v = v * 10 + (tok[i] - '0');
  }
  return neg ? BigInt(-v) : v;
}

}  // namespace

Fraction Fraction::make(BigInt p, BigInt q) {
  if (p == 0 && q == 0) throw ArbError(Errc::BadExpression, "0/0 is not a tangle fraction");
  if (q == 0) return infinity();
  if (q < 0) {
    p = -p;
    q = -q;
  }
  BigInt g = boost::multiprecision::gcd(p < 0 ? BigInt(-p) : p, q);
  return Fraction{p / g, q / g};
}

std::string Fraction::to_string() const {
  if (is_infinite()) return "1/0";
  return num.str() + "/" + den.str();
}

Fraction add_integer(const Fraction& f, const BigInt& n) {
  if (f.is_infinite()) return f;
  return Fraction::make(f.num + n * f.den, f.den);
}

ConwayRational ConwayRational::from_quotients(std::vector<BigInt> quotients) {
  if (quotients.empty()) throw ArbError(Errc::ParseError, "empty Conway notation");
  // (p, q) -> (a p + q, p), starting from (a_1, 1)
  BigInt p = quotients.front();
  BigInt q = 1;
  for (std::size_t i = 1; i < quotients.size(); ++i) {
    BigInt np = quotients[i] * p + q;
    q = p;
    p = np;
  }
  ConwayRational r;
  r.fraction_ = Fraction::make(p, q);
  r.quotients_ = std::move(quotients);
  return r;
}

ConwayRational ConwayRational::from_fraction(const Fraction& f) {
  ConwayRational r;
  r.fraction_ = f;
  r.quotients_.clear();
  if (f.is_infinite()) return r;
  // p/q = c0 + 1/(c1 + 1/(...)); Conway notation lists c_k ... c_0.
  std::vector<BigInt> cf;
  BigInt p = f.num, q = f.den;
  while (q != 0) {
    BigInt c = floor_div(p, q);
    cf.push_back(c);
    BigInt rem = p - c * q;
    p = q;
    q = rem;
  }
  r.quotients_.assign(cf.rbegin(), cf.rend());
  return r;
}

std::string ConwayRational::notation() const {
  if (fraction_.is_infinite() && quotients_.empty()) return "inf";
  std::string out;
  for (std::size_t i = 0; i < quotients_.size(); ++i) {
    if (i) out.push_back(' ');
    out += quotients_[i].str();
  }
  return out;
}

ConwayRational parse_conway(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  if (tokens.empty()) throw ArbError(Errc::ParseError, "empty Conway notation");
  if (tokens.size() == 1 && (tokens[0] == "inf" || tokens[0] == "1/0")) {
    return ConwayRational::from_fraction(Fraction::infinity());
  }
  if (tokens.size() == 1 && tokens[0].find('/') != std::string_view::npos) {
    const auto slash = tokens[0].find('/');
    BigInt p = parse_int_token(tokens[0].substr(0, slash), text);
    BigInt q = parse_int_token(tokens[0].substr(slash + 1), text);
    if (q < 0) throw ArbError(Errc::ParseError, "negative denominator in '" + std::string(text) + "'");
    if (p == 0 && q == 0) throw ArbError(Errc::ParseError, "0/0 is not a tangle fraction");
    return ConwayRational::from_fraction(Fraction::make(p, q));
  }
  std::vector<BigInt> q;
  for (auto tok : tokens) {
    if (tok == "inf") throw ArbError(Errc::ParseError, "'inf' must stand alone");
    q.push_back(parse_int_token(tok, text));
  }
  return ConwayRational::from_quotients(std::move(q));
}

ArbExpr leaf(const ConwayRational& r) {
  return std::make_shared<const Node>(Node{NodeKind::RationalLeaf, r, 0, {}});
}
ArbExpr leaf(const Fraction& f) { return leaf(ConwayRational::from_fraction(f)); }

ArbExpr qloop(int m) {
  if (m < 1) throw ArbError(Errc::BadExpression, "Q_m needs m >= 1, got " + std::to_string(m));
  return std::make_shared<const Node>(Node{NodeKind::QLoop, {}, m, {}});
}

ArbExpr sum(ArbExpr a, ArbExpr b) { return sum(std::vector<ArbExpr>{std::move(a), std::move(b)}); }

ArbExpr sum(std::vector<ArbExpr> parts) {
  if (parts.size() < 2) throw ArbError(Errc::BadExpression, "a sum needs at least two summands");
  for (const auto& p : parts) {
    if (!p) throw ArbError(Errc::BadExpression, "null summand");
  }
  return std::make_shared<const Node>(Node{NodeKind::Sum, {}, 0, std::move(parts)});
}

ArbExpr rotate(ArbExpr a) {
  if (!a) throw ArbError(Errc::BadExpression, "null operand");
  return std::make_shared<const Node>(Node{NodeKind::Rotate90, {}, 0, {std::move(a)}});
}

ArbExpr reflect(ArbExpr a) {
  if (!a) throw ArbError(Errc::BadExpression, "null operand");
  return std::make_shared<const Node>(Node{NodeKind::Reflect, {}, 0, {std::move(a)}});
}

namespace {

ArbExpr mirror(const ArbExpr& c) {
  switch (c->kind) {
    case NodeKind::RationalLeaf: return leaf(c->rational.fraction().negated());
    case NodeKind::QLoop: return c;
    case NodeKind::Sum: {
      std::vector<ArbExpr> parts;
      for (const auto& ch : c->children) parts.push_back(mirror(ch));
      return sum(std::move(parts));
    }
    case NodeKind::Rotate90: return rotate(mirror(c->children[0]));
    case NodeKind::Reflect: return c->children[0];
  }
  return c;
}

}  // namespace

ArbExpr canonicalize(const ArbExpr& e) {
  if (!e) throw ArbError(Errc::BadExpression, "null expression");
  switch (e->kind) {
    case NodeKind::RationalLeaf:
    case NodeKind::QLoop:
      return e;
    case NodeKind::Sum: {
      std::vector<ArbExpr> parts;
      for (const auto& ch : e->children) {
        ArbExpr c = canonicalize(ch);
        if (c->kind == NodeKind::Sum) {
          parts.insert(parts.end(), c->children.begin(), c->children.end());
        } else {
          parts.push_back(std::move(c));
        }
      }
      return sum(std::move(parts));
    }
    case NodeKind::Rotate90: {
      ArbExpr c = canonicalize(e->children[0]);
      if (c->kind == NodeKind::RationalLeaf) return leaf(c->rational.fraction().rotated());
      return rotate(std::move(c));
    }
    case NodeKind::Reflect:
      return mirror(canonicalize(e->children[0]));
  }
  return e;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ArbError(Errc::ParseError, why + " at offset " + std::to_string(pos) + " in '" + std::string(text) + "'");
  }
  void expect(char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) fail("expected an operator name");
    return std::string(text.substr(start, pos - start));
  }
  std::string_view until_close() {
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ')') {
      if (text[pos] == '(' || text[pos] == ',') fail("unexpected character inside rat(...)");
      ++pos;
    }
    if (pos >= text.size()) fail("unterminated rat(...)");
    return text.substr(start, pos - start);
  }
};

ArbExpr parse_node(Cursor& c) {
  const std::string name = c.ident();
  c.expect('(');
  ArbExpr out;
  if (name == "rat") {
    out = leaf(parse_conway(c.until_close()));
  } else if (name == "q") {
    std::string_view body = c.until_close();
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    BigInt m = parse_int_token(body, c.text);
    if (m < 1 || m > 1000000) c.fail("Q_m needs 1 <= m <= 1000000");
    out = qloop(static_cast<int>(m));
  } else if (name == "sum") {
    std::vector<ArbExpr> parts;
    parts.push_back(parse_node(c));
    c.skip();
    while (c.pos < c.text.size() && c.text[c.pos] == ',') {
      ++c.pos;
      parts.push_back(parse_node(c));
      c.skip();
    }
    if (parts.size() < 2) c.fail("sum needs at least two summands");
    out = sum(std::move(parts));
  } else if (name == "rot") {
    out = rotate(parse_node(c));
  } else if (name == "refl") {
    out = reflect(parse_node(c));
  } else {
    c.fail("unknown operator '" + name + "'");
  }
  c.expect(')');
  return out;
}

}  // namespace

ArbExpr parse_expression(std::string_view text) {
  Cursor c{text, 0};
  ArbExpr e = parse_node(c);
  c.skip();
  if (c.pos != text.size()) c.fail("trailing input");
  return e;
}

std::string to_string(const ArbExpr& e) {
  switch (e->kind) {
    case NodeKind::RationalLeaf: return "rat(" + e->rational.notation() + ")";
    case NodeKind::QLoop: return "q(" + std::to_string(e->loops) + ")";
    case NodeKind::Sum: {
      std::string s = "sum(";
      for (std::size_t i = 0; i < e->children.size(); ++i) {
        if (i) s += ", ";
        s += to_string(e->children[i]);
      }
      return s + ")";
    }
    case NodeKind::Rotate90: return "rot(" + to_string(e->children[0]) + ")";
    case NodeKind::Reflect: return "refl(" + to_string(e->children[0]) + ")";
  }
  return "?";
}

RationalWitness is_rational(const ArbExpr& e) {
  switch (e->kind) {
    case NodeKind::RationalLeaf: return {true, e->rational.fraction()};
    case NodeKind::QLoop: return {false, std::nullopt};
    case NodeKind::Rotate90: {
      RationalWitness w = is_rational(e->children[0]);
      if (w.rational) w.fraction = w.fraction->rotated();
      return w;
    }
    case NodeKind::Reflect: {
      RationalWitness w = is_rational(e->children[0]);
      if (w.rational) w.fraction = w.fraction->negated();
      return w;
    }
    case NodeKind::Sum: {
      std::optional<Fraction> non_integer;
      BigInt integer_part = 0;
      for (const auto& ch : e->children) {
        RationalWitness w = is_rational(ch);
        if (!w.rational) return {false, std::nullopt};
        if (w.fraction->is_integer()) {
          integer_part += w.fraction->num;
        } else {
          if (non_integer) return {false, std::nullopt};
          non_integer = w.fraction;
        }
      }
      Fraction f = non_integer ? add_integer(*non_integer, integer_part) : Fraction::make(integer_part, 1);
      return {true, f};
    }
  }
  return {false, std::nullopt};
}

bool contains_qloop(const ArbExpr& e, int min_m) {
  if (e->kind == NodeKind::QLoop) return e->loops >= min_m;
  for (const auto& ch : e->children) {
    if (contains_qloop(ch, min_m)) return true;
  }
  return false;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EntirelyNonHyperbolic: return "EntirelyNonHyperbolic";
    case Verdict::Principally2: return "Principally2";
    case Verdict::Principally4: return "Principally4";
    case Verdict::Principally6: return "Principally6";
  }
  return "?";
}

namespace {

const char* kCiteNonHyperbolic =
    "entirely non-hyperbolic iff integer tangle, Q_m + T' or T' + Q_m (m >= 1), or contains Q_m (m >= 2)";
const char* kCitePrincipal2 = "principally 2-hyperbolic iff none of the non-hyperbolic cases hold and non-rational";
const char* kCitePrincipal4 = "principally 4-hyperbolic iff a non-integer rational tangle other than Q_clasp";
const char* kCitePrincipal6 = "principally 6-hyperbolic iff Q_clasp = 1/2 up to integer twists (fraction with denominator 2)";
const char* kCiteRationalSum = "a sum of two rational tangles is rational iff one of them is an integer tangle";
const char* kCaveat =
    "Q_m containment is read syntactically on the canonical tree; hidden Conway spheres are not detected";

}  // namespace

Classification classify(const ArbExpr& input) {
  ArbExpr e = canonicalize(input);
  Classification out;
  RationalWitness rw = is_rational(e);
  if (rw.rational) {
    const Fraction& f = *rw.fraction;
    const std::string fr = f.to_string();
    if (e->kind == NodeKind::Sum) {
      out.reasons.push_back({"rational-sum", kCiteRationalSum, "sum evaluates to the rational tangle " + fr});
    }
    if (f.is_integer()) {
      out.verdict = Verdict::EntirelyNonHyperbolic;
      out.reasons.push_back({"integer-tangle", kCiteNonHyperbolic, "fraction " + fr + " is an integer tangle"});
    } else if (f.is_infinite()) {
      out.verdict = Verdict::EntirelyNonHyperbolic;
      out.reasons.push_back({"infinity-tangle", kCiteNonHyperbolic,
                             "fraction 1/0: each strand returns to its own face, so every replicant is a trivial link"});
    } else if (f.den == 2) {
      out.verdict = Verdict::Principally6;
      std::string detail = "fraction " + fr + " is Q_clasp";
      if (f.num != 1 && f.num != -1) detail += " followed by integer twists, which are braids and change no replicant";
      out.reasons.push_back({"clasp", kCitePrincipal6, detail});
    } else {
      out.verdict = Verdict::Principally4;
      out.reasons.push_back({"non-integer-rational", kCitePrincipal4, "fraction " + fr});
    }
    return out;
  }

  ArbExpr top = e;
  while (top->kind == NodeKind::Rotate90) top = top->children[0];
  if (top->kind == NodeKind::QLoop) {
    out.verdict = Verdict::EntirelyNonHyperbolic;
    out.reasons.push_back({"bare-qloop", kCiteNonHyperbolic, "the tangle is Q_" + std::to_string(top->loops)});
    return out;
  }
  if (top->kind == NodeKind::Sum) {
    const ArbExpr& first = top->children.front();
    const ArbExpr& last = top->children.back();
    if (first->kind == NodeKind::QLoop || last->kind == NodeKind::QLoop) {
      const int m = first->kind == NodeKind::QLoop ? first->loops : last->loops;
      out.verdict = Verdict::EntirelyNonHyperbolic;
      out.reasons.push_back({"qloop-summand", kCiteNonHyperbolic,
                             "Q_" + std::to_string(m) + " is an outer summand of the top-level sum"});
      return out;
    }
  }
  out.containment_caveat = true;
  if (contains_qloop(e, 2)) {
    out.verdict = Verdict::EntirelyNonHyperbolic;
    out.reasons.push_back({"contains-qloop", kCiteNonHyperbolic, "a Q_m with m >= 2 occurs as a subterm"});
    out.reasons.push_back({"caveat", "", kCaveat});
    return out;
  }
  out.verdict = Verdict::Principally2;
  out.reasons.push_back({"non-rational", kCitePrincipal2, "not rational and no Q_m with m >= 2 occurs"});
  out.reasons.push_back({"caveat", "", kCaveat});
  return out;
}

std::optional<std::vector<int>> principal_signature(const Classification& c) {
  switch (c.verdict) {
    case Verdict::Principally2: return std::vector<int>{2};
    case Verdict::Principally4: return std::vector<int>{4};
    case Verdict::Principally6: return std::vector<int>{6};
    case Verdict::EntirelyNonHyperbolic: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace replivol::arborescent
