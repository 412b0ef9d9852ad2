#include "replivol/bounds.hpp"

#include "replivol/io.hpp"
#include "replivol_embedded_db.hpp"

#include <algorithm>
#include <set>

namespace replivol::bounds {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::NotFound: return "NotFound";
    case Errc::UncertifiedTangle: return "UncertifiedTangle";
    case Errc::MissingVolume: return "MissingVolume";
    case Errc::ArrangementInvalid: return "ArrangementInvalid";
    case Errc::EndpointMismatch: return "EndpointMismatch";
    case Errc::BadTwistNumber: return "BadTwistNumber";
    case Errc::BadDatabase: return "BadDatabase";
    case Errc::BadLinkSpec: return "BadLinkSpec";
    case Errc::NoTheorem: return "NoTheorem";
  }
  return "BoundsError";
}

namespace {

ErrorClass class_of(Errc code) {
  switch (code) {
    case Errc::NotFound:
    case Errc::UncertifiedTangle:
    case Errc::MissingVolume:
    case Errc::NoTheorem:
      return ErrorClass::Domain;
    default:
      return ErrorClass::Input;
  }
}

}  // namespace

BoundsError::BoundsError(Errc code, const std::string& message)
    : Error(bounds::to_string(code), message, class_of(code)), code_(code) {}

const char* to_string(Family f) {
  switch (f) {
    case Family::RationalSquare: return "rational-square";
    case Family::IntegerCylindrical: return "integer-cylindrical";
    case Family::ReciprocalSaucer: return "reciprocal-saucer";
    case Family::Custom: return "custom";
  }
  return "?";
}

std::optional<Family> parse_family(const std::string& s) {
  if (s == "rational-square") return Family::RationalSquare;
  if (s == "integer-cylindrical") return Family::IntegerCylindrical;
  if (s == "reciprocal-saucer") return Family::ReciprocalSaucer;
  if (s == "custom") return Family::Custom;
  return std::nullopt;
}

std::string signature_string(const Signature& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

std::string key_string(const DbKey& k) {
  std::string s = std::string(to_string(k.family)) + " \"" + k.conway + "\" " + replivol::to_string(k.ambient) + " " +
                  signature_string(k.signature);
  if (k.orientation != "standard") s += " [" + k.orientation + "]";
  return s;
}

void VolumeDB::add(DbEntry e) {
  if (e.volume && *e.volume <= 0) {
    throw BoundsError(Errc::BadDatabase, "volume for " + key_string(e.key) + " must be positive (use 0 only as the non-hyperbolic marker)");
  }
  if (e.key.signature.empty()) throw BoundsError(Errc::BadDatabase, "entry without a signature");
  for (int x : e.key.signature) {
    if (x < 2 || x % 2) throw BoundsError(Errc::BadDatabase, "signature entries must be even and >= 2");
  }
  entries_[e.key] = std::move(e);
}

void VolumeDB::add_limit(LimitEntry l) {
  if (l.volume <= 0) throw BoundsError(Errc::BadDatabase, "limit for " + l.conway + " must be positive");
  limits_[l.conway] = std::move(l);
}

void VolumeDB::remove(const DbKey& k) { entries_.erase(k); }

QueryResult VolumeDB::query(const DbKey& k) const {
  auto found = [](const DbEntry& e, bool sym) {
    return QueryResult{e.volume ? QueryStatus::Volume : QueryStatus::NonHyperbolic, &e, sym};
  };
  if (auto it = entries_.find(k); it != entries_.end()) return found(it->second, false);
  if (k.ambient == Ambient::TxI && k.signature.size() == 2) {
    DbKey r = k;
    std::swap(r.signature[0], r.signature[1]);
    if (auto it = entries_.find(r); it != entries_.end()) return found(it->second, true);
  }
  return {};
}

const std::string& shipped_database_json() {
  static const std::string text = kEmbeddedDatabase;
  return text;
}

VolumeDB shipped_database() { return io::database_from_json(nlohmann::json::parse(shipped_database_json())); }

QueryResult db_query(const VolumeDB& db, const DbKey& key) {
  QueryResult r = db.query(key);
  if (r.status == QueryStatus::NotFound) throw BoundsError(Errc::NotFound, "no database entry for " + key_string(key));
  return r;
}

std::string TangleRef::label() const {
  std::string s;
  if (!factors.empty()) {
    s = "compose(";
    for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? ", " : "") + factors[i].label();
    s += ")";
  } else {
    s = std::string(to_string(family)) + ":" + conway;
  }
  if (orientation != "standard") s += "[" + orientation + "]";
  if (reflected) s += "^R";
  return s;
}

const char* to_string(Basis b) {
  switch (b) {
    case Basis::DatabaseEntry: return "DatabaseEntry";
    case Basis::Monotonicity: return "Monotonicity";
    case Basis::Composition: return "Composition";
    case Basis::Classification: return "Classification";
  }
  return "?";
}

const char* to_string(Arrangement a) {
  switch (a) {
    case Arrangement::Bracelet: return "bracelet";
    case Arrangement::Lattice: return "lattice";
    case Arrangement::CylinderStack: return "cylinder-stack";
    case Arrangement::Custom: return "custom";
  }
  return "?";
}

const char* to_string(ComposeRule r) {
  switch (r) {
    case ComposeRule::ThickenedCylinder: return "thickened-cylinder";
    case ComposeRule::SolidCylinder: return "solid-cylinder";
    case ComposeRule::Cubical: return "cubical";
    case ComposeRule::Saucer: return "saucer";
  }
  return "?";
}

namespace {

const char* kCiteSaucerMonotone = "a 2n-hyperbolic saucer tangle is 2m-hyperbolic for all m >= n";
const char* kCiteTetraMonotone = "a (2m,2n)-hyperbolic tetrahedral tangle is (2r,2s)-hyperbolic for all r >= m, s >= n";
const char* kCiteGeneralComposition =
    "n tangles each 2mn-hyperbolic compose to a 2m-hyperbolic tangle with vol^2m >= (1/n) sum vol^2mn";
const char* kCiteCylinderComposition = "vol^2(A o B) >= vol^2(A) + vol^2(B) for 2-hyperbolic thickened-cylinder tangles";
const char* kCiteSolidComposition = "2-hyperbolic solid-cylinder tangles are closed under composition with additive 2-volume";
const char* kCiteCubicalComposition = "(2,2)-hyperbolic cubical tangles compose with additive (2,2)-volume";
const char* kCiteClassification = "arborescent classification into entirely non-hyperbolic / principally 2-, 4-, 6-hyperbolic";
const char* kCiteDatabase = "recorded replicant volume";
const char* kEqualityNote =
    "Equality is attained if and only if each decomposing surface is totally geodesic in the link complement.";

DbKey key_of(const TangleRef& t, const Signature& sig) {
  return DbKey{t.family, t.conway, t.ambient, sig, t.orientation};
}

bool leq(const Signature& a, const Signature& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

bool monotone_family(const TangleRef& t, const Signature& sig) {
  if (t.ambient != Ambient::S3) return false;
  if (t.family == Family::ReciprocalSaucer) return sig.size() == 1;
  if (t.family == Family::RationalSquare) return sig.size() == 2;
  return false;
}

std::optional<arborescent::ArbExpr> arborescent_form(const TangleRef& t) {
  if (t.expression) return t.expression;
  if (t.family == Family::ReciprocalSaucer) {
    try {
      return arborescent::leaf(arborescent::parse_conway(t.conway));
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

ComposeRule rule_for(const TangleRef& t, const Signature& sig) {
  if (sig.size() == 2) return ComposeRule::Cubical;
  if (sig == Signature{2} && t.ambient == Ambient::TxI) return ComposeRule::ThickenedCylinder;
  if (sig == Signature{2} && t.ambient == Ambient::SolidTorus && t.family != Family::ReciprocalSaucer) {
    return ComposeRule::SolidCylinder;
  }
  return ComposeRule::Saucer;
}

}  // namespace

HyperbolicityCertificate certify_hyperbolic(const VolumeDB& db, const TangleRef& t, const Signature& sig) {
  HyperbolicityCertificate c;
  c.tangle = t;
  c.signature = sig;
  for (int x : sig) {
    if (x < 2 || x % 2) {
      c.counterevidence.push_back("signature " + signature_string(sig) + " is not a tuple of even indices >= 2");
      return c;
    }
  }

  if (!t.factors.empty()) {
    try {
      ComposeResult r = compose_bound(db, t.factors, rule_for(t, sig), sig);
      return r.certificate;
    } catch (const BoundsError& e) {
      c.counterevidence.push_back(std::string("composition not certified: ") + e.what());
      return c;
    }
  }

  const DbKey key = key_of(t, sig);
  const QueryResult direct = db.query(key);
  if (direct.status == QueryStatus::NonHyperbolic) {
    c.counterevidence.push_back("database marks " + key_string(direct.entry->key) + " as non-hyperbolic (" +
                                direct.entry->source + ")");
    return c;
  }
  if (direct.status == QueryStatus::Volume && !monotone_family(t, sig)) {
    c.certified = true;
    c.basis = Basis::DatabaseEntry;
    c.evidence = direct.entry;
    std::string detail = key_string(direct.entry->key) + " = " + direct.entry->printed + " (" + direct.entry->source + ")";
    if (direct.via_symmetry) detail += ", read with the TxI symmetry vol^(2m,2n) = vol^(2n,2m)";
    c.chain.push_back({"database", kCiteDatabase, detail});
    return c;
  }

  if (monotone_family(t, sig)) {
    // ground in the smallest recorded hyperbolic signature below the target
    const DbEntry* best = nullptr;
    for (const auto& [k, e] : db.entries()) {
      if (k.family != t.family || k.conway != t.conway || k.ambient != t.ambient || k.orientation != t.orientation) continue;
      if (!e.volume || !leq(k.signature, sig)) continue;
      if (!best || k.signature < best->key.signature) best = &e;
    }
    if (best) {
      c.certified = true;
      c.evidence = best;
      c.chain.push_back({"database", kCiteDatabase, key_string(best->key) + " = " + best->printed + " (" + best->source + ")"});
      if (best->key.signature == sig) {
        c.basis = Basis::DatabaseEntry;
      } else {
        c.basis = Basis::Monotonicity;
        c.chain.push_back({sig.size() == 1 ? "saucer-monotonicity" : "tetrahedral-monotonicity",
                           sig.size() == 1 ? kCiteSaucerMonotone : kCiteTetraMonotone,
                           signature_string(best->key.signature) + " -> " + signature_string(sig)});
      }
      return c;
    }
    for (const auto& [k, e] : db.entries()) {
      if (k.family != t.family || k.conway != t.conway || k.ambient != t.ambient || k.orientation != t.orientation) continue;
      if (!e.volume && leq(sig, k.signature)) {
        c.counterevidence.push_back("database marks " + key_string(k) + " as non-hyperbolic; by monotonicity so is " +
                                    signature_string(sig));
      }
    }
  }

  if (t.ambient == Ambient::S3 && sig.size() == 1) {
    if (auto expr = arborescent_form(t)) {
      const arborescent::Classification cl = arborescent::classify(*expr);
      const auto principal = arborescent::principal_signature(cl);
      const std::string verdict = arborescent::to_string(cl.verdict);
      if (principal && (*principal)[0] <= sig[0]) {
        c.certified = true;
        c.basis = Basis::Classification;
        c.chain.push_back({"arborescent-classification", kCiteClassification, verdict + " for " + arborescent::to_string(*expr)});
        if ((*principal)[0] < sig[0]) {
          c.chain.push_back({"saucer-monotonicity", kCiteSaucerMonotone,
                             signature_string(*principal) + " -> " + signature_string(sig)});
        }
        if (cl.containment_caveat) c.chain.push_back({"caveat", "", "Q_m containment read syntactically"});
        return c;
      }
      c.counterevidence.push_back("classification: " + verdict +
                                  (principal ? ", not " + std::to_string(sig[0]) + "-hyperbolic" : std::string()));
    }
  }
  return c;
}

std::optional<pieces::PieceTemplate> family_template(const TangleRef& t) {
  using pieces::Endpoint;
  using pieces::PieceTemplate;
  using pieces::Strand;
  std::optional<PieceTemplate> out;
  if (t.piece) {
    out = *t.piece;
  } else if (!t.factors.empty()) {
    return std::nullopt;
  } else {
    std::optional<arborescent::Fraction> f;
    try {
      if (t.expression) {
        auto w = arborescent::is_rational(arborescent::canonicalize(*t.expression));
        if (w.rational) f = w.fraction;
      } else if (t.family != Family::Custom) {
        f = arborescent::parse_conway(t.conway).fraction();
      }
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!f) return std::nullopt;
    // parity class of p/q: 0 (p even), infinity (q even), 1 (both odd)
    const bool p_odd = (f->num % 2) != 0;
    const bool q_odd = (f->den % 2) != 0;
    const int cls = !p_odd ? 0 : (!q_odd ? 2 : 1);
    const std::string id = std::string(to_string(t.family)) + ":" + t.conway +
                           (t.orientation != "standard" ? "[" + t.orientation + "]" : "");
    if (t.family == Family::ReciprocalSaucer) {
      // left face {NW=1, SW=2}, right face {NE=1, SE=2}
      PieceTemplate p;
      p.id = id;
      p.faces = {2, 2};
      const Endpoint nw{0, 1}, sw{0, 2}, ne{1, 1}, se{1, 2};
      if (cls == 0) p.strands = {Strand{nw, ne}, Strand{sw, se}};
      if (cls == 2) p.strands = {Strand{nw, sw}, Strand{ne, se}};
      if (cls == 1) p.strands = {Strand{nw, se}, Strand{sw, ne}};
      out = p;
    } else {
      // square faces W=0, E=1, S=2, N=3; corners NW->N, NE->E, SE->S, SW->W
      PieceTemplate sq;
      sq.id = id;
      sq.faces = {1, 1, 1, 1};
      const Endpoint w{0, 1}, e{1, 1}, s{2, 1}, n{3, 1};
      if (cls == 0) sq.strands = {Strand{n, e}, Strand{w, s}};
      if (cls == 2) sq.strands = {Strand{n, w}, Strand{e, s}};
      if (cls == 1) sq.strands = {Strand{n, s}, Strand{e, w}};
      if (t.family == Family::IntegerCylindrical) {
        pieces::GluingComplex c;
        c.add_copy(c.add_template(sq));
        c.glue({0, 3}, {0, 2});
        out = pieces::collapse(c, {{{0, 0}}, {{0, 1}}}, id);
      } else {
        out = sq;
      }
    }
  }
  if (out && t.reflected) out = pieces::reflect(*out, 0);
  return out;
}

namespace {

Signature raised(const Signature& s, int n) {
  Signature out = s;
  for (int& x : out) x *= n;
  return out;
}

struct FactorValue {
  HyperbolicityCertificate cert;
  std::optional<Rational> volume;
};

std::optional<Rational> volume_at(const VolumeDB& db, const TangleRef& t, const Signature& sig) {
  const QueryResult r = db.query(key_of(t, sig));
  if (r.status == QueryStatus::Volume) return r.entry->volume;
  return std::nullopt;
}

}  // namespace

ComposeResult compose_bound(const VolumeDB& db, const std::vector<TangleRef>& factors, ComposeRule rule,
                            const Signature& target_in) {
  if (factors.empty()) throw BoundsError(Errc::ArrangementInvalid, "composition of no tangles");
  Signature target = target_in;
  if (target.empty()) {
    target = rule == ComposeRule::Cubical ? Signature{2, 2} : Signature{2};
  }
  const std::size_t n = factors.size();

  // endpoint compatibility where templates are known
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto a = family_template(factors[i]);
    auto b = family_template(factors[i + 1]);
    if (a && b && a->faces.size() >= 2 && b->faces.size() >= 2 && a->faces[1] != b->faces[0]) {
      throw BoundsError(Errc::EndpointMismatch, factors[i].label() + " has " + std::to_string(a->faces[1]) +
                                                    " endpoints on its right face but " + factors[i + 1].label() + " has " +
                                                    std::to_string(b->faces[0]) + " on its left face");
    }
  }

  const Signature per_factor = rule == ComposeRule::Saucer ? raised(target, static_cast<int>(n)) : target;
  ComposeResult out;
  std::vector<FactorValue> vals;
  std::vector<std::string> failures;
  for (const TangleRef& f : factors) {
    FactorValue v;
    if (!f.factors.empty()) {
      ComposeResult inner = compose_bound(db, f.factors, rule, per_factor);
      v.cert = inner.certificate;
      v.volume = inner.bound;
    } else {
      v.cert = certify_hyperbolic(db, f, per_factor);
      if (v.cert.certified) v.volume = volume_at(db, f, per_factor);
    }
    if (!v.cert.certified) failures.push_back(f.label() + " at " + signature_string(per_factor));
    vals.push_back(std::move(v));
  }
  if (!failures.empty()) {
    std::string msg = "composition needs every factor certified: ";
    for (std::size_t i = 0; i < failures.size(); ++i) msg += (i ? "; " : "") + failures[i];
    throw BoundsError(Errc::UncertifiedTangle, msg);
  }

  if (n == 1) {
    out.certificate = vals[0].cert;
    out.bound = vals[0].volume;
    out.derivation.push_back("single factor: returned unchanged");
    return out;
  }

  TangleRef composite;
  composite.family = factors[0].family;
  composite.ambient = factors[0].ambient;
  composite.factors = factors;
  out.certificate.certified = true;
  out.certificate.tangle = composite;
  out.certificate.signature = target;
  out.certificate.basis = Basis::Composition;
  const char* cite = rule == ComposeRule::Saucer              ? kCiteGeneralComposition
                     : rule == ComposeRule::ThickenedCylinder ? kCiteCylinderComposition
                     : rule == ComposeRule::SolidCylinder     ? kCiteSolidComposition
                                                              : kCiteCubicalComposition;
  for (std::size_t i = 0; i < n; ++i) {
    std::string d = factors[i].label() + " certified at " + signature_string(per_factor) + " via " +
                    (vals[i].cert.basis ? to_string(*vals[i].cert.basis) : "?");
    out.certificate.chain.push_back({std::string("factor"), "", d});
  }
  out.certificate.chain.push_back({std::string(to_string(rule)) + "-composition", cite,
                                   std::to_string(n) + " factors composed at " + signature_string(target)});

  bool all = true;
  Rational sum = 0;
  for (const auto& v : vals) {
    if (!v.volume) {
      all = false;
      break;
    }
    sum += *v.volume;
  }
  if (all) {
    out.bound = rule == ComposeRule::Saucer ? Rational(sum / static_cast<long long>(n)) : sum;
    out.derivation.push_back(rule == ComposeRule::Saucer ? "bound = (1/" + std::to_string(n) + ") * sum of vol" +
                                                               signature_string(per_factor)
                                                         : "bound = sum of factor volumes at " + signature_string(target));
  } else {
    out.derivation.push_back("certified, but some factor has no recorded volume at " + signature_string(per_factor));
  }
  return out;
}

const Rational kVOct = parse_decimal("3.6638");
const Rational kVTet = parse_decimal("1.0149");
const Rational kBorromean = parse_decimal("7.32772474");

std::vector<NamedBound> classical_bounds(int t, LinkCategory category) {
  if (t < 2) throw BoundsError(Errc::BadTwistNumber, "twist number must be at least 2, got " + std::to_string(t));
  std::vector<NamedBound> out;
  out.push_back({"lackenby-lower", "v_oct (t - 2) / 2", true, kVOct * (t - 2) / 2});
  out.push_back({"lackenby-upper", "10 v_tet (t - 1)", false, kVTet * 10 * (t - 1)});
  if (category == LinkCategory::Montesinos) {
    out.push_back({"montesinos-lower", "v_oct t / 2", true, kVOct * t / 2});
  }
  return out;
}

std::vector<Violation> limit_check(const VolumeDB& db) {
  std::vector<Violation> out;
  for (const auto& [k, e] : db.entries()) {
    if (k.family != Family::ReciprocalSaucer || !e.volume) continue;
    auto it = db.limits().find(k.conway);
    if (it == db.limits().end()) continue;
    if (!(*e.volume < it->second.volume)) {
      out.push_back({"entry above limit", key_string(k) + " = " + e.printed + " is not below the limit " +
                                              it->second.printed + " for " + k.conway});
    }
  }
  for (const auto& [name, l] : db.limits()) {
    if (!(l.volume < kBorromean)) {
      out.push_back({"limit above Borromean volume", "limit " + l.printed + " for " + name +
                                                        " is not below 7.32772474"});
    }
  }
  return out;
}

std::vector<Violation> data_monotonicity_check(const VolumeDB& db) {
  std::map<std::pair<std::string, Ambient>, std::vector<const DbEntry*>> columns;
  for (const auto& [k, e] : db.entries()) {
    if (k.family == Family::ReciprocalSaucer && k.signature.size() == 1 && k.orientation == "standard") {
      columns[{k.conway, k.ambient}].push_back(&e);
    }
  }
  std::vector<Violation> out;
  for (auto& [col, list] : columns) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->key.signature < b->key.signature; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      const Rational prev = list[i - 1]->volume.value_or(0);
      const Rational cur = list[i]->volume.value_or(0);
      if (!(prev < cur)) {
        out.push_back({"data check, not theorem",
                       col.first + " does not increase from " + signature_string(list[i - 1]->key.signature) + " to " +
                           signature_string(list[i]->key.signature)});
      }
    }
  }
  return out;
}

namespace {

struct Dispatch {
  std::string tag;
  std::string statement;
  Signature signature;
  Ambient term_ambient;
};

BoundsError arrangement_error(const pieces::PieceError& e) {
  return BoundsError(Errc::ArrangementInvalid, std::string(e.name()) + ": " + e.what());
}

}  // namespace

BoundReport lower_bound(const LinkSpec& link, const VolumeDB& base_db) {
  VolumeDB db = base_db;
  for (DbEntry e : link.user_entries) {
    e.provenance = Provenance::User;
    if (e.source.empty()) e.source = "user";
    db.add(std::move(e));
  }

  BoundReport rep;
  rep.link_name = link.name;
  rep.arrangement = link.arrangement;
  rep.ambient = link.ambient;
  rep.reference_volumes = link.reference_volumes;

  struct Pending {
    std::string slot;
    TangleRef tangle;
    Signature sig;
  };
  std::vector<Pending> pending;
  std::optional<pieces::GluingComplex> complex;

  try {
    switch (link.arrangement) {
      case Arrangement::Bracelet: {
        const int len = static_cast<int>(link.slots.size());
        std::vector<pieces::PieceTemplate> ts;
        bool known = true;
        for (std::size_t i = 0; i < link.slots.size(); ++i) {
          if (!link.slots[i].cubes.empty()) {
            throw BoundsError(Errc::ArrangementInvalid, "bracelet slot " + std::to_string(i + 1) + " cannot hold cubes");
          }
          auto p = family_template(link.slots[i].tangle);
          if (p) ts.push_back(*p); else known = false;
        }
        if (len == 0 || len % 2) {
          throw BoundsError(Errc::ArrangementInvalid, "OddLength: a bracelet needs an even, positive number of tangles");
        }
        if (known) complex = pieces::build_bracelet(ts);
        if (link.ambient == Ambient::S3) {
          rep.theorem = "bracelet-theorem";
          rep.statement = "vol(L) >= sum_i vol^" + std::to_string(len) + "(T_i)";
        } else if (link.ambient == Ambient::SolidTorus) {
          rep.theorem = "solid-torus-cyclic-wedge-theorem";
          rep.statement = "vol(L) >= sum_i vol_solid^" + std::to_string(len) + "(T_i)";
        } else {
          throw BoundsError(Errc::NoTheorem, std::string("no bracelet bound for ambient ") + replivol::to_string(link.ambient));
        }
        for (std::size_t i = 0; i < link.slots.size(); ++i) {
          pending.push_back({"slot " + std::to_string(i + 1), link.slots[i].tangle, Signature{len}});
        }
        break;
      }
      case Arrangement::Lattice: {
        const std::size_t rows = link.grid.size();
        const std::size_t cols = rows ? link.grid[0].size() : 0;
        std::vector<std::vector<pieces::PieceTemplate>> g;
        bool known = true;
        for (const auto& row : link.grid) {
          g.emplace_back();
          for (const auto& t : row) {
            auto p = family_template(t);
            if (p) g.back().push_back(*p); else known = false;
          }
        }
        if (known) {
          complex = pieces::build_torus_lattice(g);
        } else {
          for (const auto& row : link.grid) {
            if (row.size() != cols) throw BoundsError(Errc::ArrangementInvalid, "OddDimension: ragged lattice");
          }
          if (rows < 2 || cols < 2 || rows % 2 || cols % 2) {
            throw BoundsError(Errc::ArrangementInvalid, "OddDimension: lattice dimensions must be even and >= 2");
          }
        }
        Signature sig;
        if (link.ambient == Ambient::S3) {
          sig = {static_cast<int>(rows), static_cast<int>(cols)};
          rep.theorem = "torus-lattice-theorem";
          rep.statement = "vol(L) >= sum_ij vol^" + signature_string(sig) + "(T_ij)";
        } else if (link.ambient == Ambient::TxI) {
          sig = {2, 2};
          rep.theorem = "cubical-theorem";
          rep.statement = "vol(L) >= sum_ij vol^(2,2)(T_ij)";
        } else if (link.ambient == Ambient::S2xS1) {
          sig = {2, static_cast<int>(cols)};
          rep.theorem = "s2xs1-lattice-theorem";
          rep.statement = "vol(L) >= sum_ij vol^" + signature_string(sig) + "(T_ij)";
        } else {
          throw BoundsError(Errc::NoTheorem, "no lattice bound for ambient SolidTorus; use a cylinder stack of wedges");
        }
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            pending.push_back({"cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")", link.grid[i][j], sig});
          }
        }
        break;
      }
      case Arrangement::CylinderStack: {
        if (link.ambient != Ambient::TxI && link.ambient != Ambient::SolidTorus) {
          throw BoundsError(Errc::NoTheorem, std::string("no cylinder-stack bound for ambient ") +
                                                 replivol::to_string(link.ambient));
        }
        const bool solid = link.ambient == Ambient::SolidTorus;
        rep.theorem = solid ? "solid-torus-theorem" : "thickened-torus-theorem";
        rep.statement = solid ? "vol(L) >= sum_i vol_solid^2(T_i), vol_solid^2(T_i) >= sum_j vol_solid^(2,2n)(T_ij)"
                              : "vol(L) >= sum_i vol^2(T_i), vol^2(T_i) >= sum_j vol^(2,2)(T_ij)";
        std::vector<pieces::PieceTemplate> ts;
        bool known = true;
        for (std::size_t i = 0; i < link.slots.size(); ++i) {
          const Slot& s = link.slots[i];
          if (s.cubes.empty()) {
            auto p = family_template(s.tangle);
            if (p) ts.push_back(*p); else known = false;
            pending.push_back({"slot " + std::to_string(i + 1), s.tangle, Signature{2}});
          } else {
            std::vector<pieces::PieceTemplate> cubes;
            for (const auto& c : s.cubes) {
              auto p = family_template(c);
              if (p) cubes.push_back(*p); else known = false;
            }
            if (known) ts.push_back(pieces::cube_column(cubes, "column " + std::to_string(i + 1)));
            const Signature sig = solid ? Signature{2, static_cast<int>(s.cubes.size())} : Signature{2, 2};
            for (std::size_t j = 0; j < s.cubes.size(); ++j) {
              pending.push_back({"slot " + std::to_string(i + 1) + " cube " + std::to_string(j + 1), s.cubes[j], sig});
            }
          }
        }
        if (link.slots.empty()) throw BoundsError(Errc::ArrangementInvalid, "cylinder stack without slots");
        if (known) complex = pieces::build_cylinder_stack(ts);
        break;
      }
      case Arrangement::Custom:
        throw BoundsError(Errc::NoTheorem, "custom arrangements are validated but no bound theorem applies to them");
    }
  } catch (const pieces::PieceError& e) {
    throw arrangement_error(e);
  }

  std::vector<std::string> failing;
  std::vector<std::string> missing;
  Rational total = 0;
  for (const Pending& p : pending) {
    TangleRef t = p.tangle;
    Term term;
    term.slot = p.slot;
    term.tangle = t.label();
    term.signature = p.sig;
    term.ambient = t.ambient;
    HyperbolicityCertificate cert = certify_hyperbolic(db, t, p.sig);
    if (!cert.certified) {
      std::string why = p.slot + " (" + t.label() + " at " + signature_string(p.sig) + ")";
      if (!cert.counterevidence.empty()) why += ": " + cert.counterevidence.front();
      failing.push_back(why);
      continue;
    }
    term.basis = cert.basis.value_or(Basis::DatabaseEntry);
    for (const auto& r : cert.chain) term.note.push_back(r.rule + ": " + r.detail);
    std::optional<Rational> vol;
    if (!t.factors.empty()) {
      ComposeResult cr = compose_bound(db, t.factors, rule_for(t, p.sig), p.sig);
      vol = cr.bound;
      term.provenance = Provenance::Published;
      for (const auto& f : t.factors) {
        const QueryResult q = db.query(key_of(f, p.sig));
        if (q.entry && q.entry->provenance == Provenance::User) term.provenance = Provenance::User;
      }
      term.source = "composition";
    } else {
      const QueryResult q = db.query(key_of(t, p.sig));
      if (q.status == QueryStatus::Volume) {
        vol = q.entry->volume;
        term.printed = q.entry->printed;
        term.provenance = q.entry->provenance;
        term.source = q.entry->source;
        if (term.basis != Basis::DatabaseEntry) {
          term.note.push_back("volume: " + key_string(q.entry->key) + " = " + q.entry->printed + " (" + q.entry->source + ")");
        }
      }
    }
    if (!vol) {
      missing.push_back(p.slot + " (" + t.label() + " certified at " + signature_string(p.sig) + " but no volume recorded)");
      continue;
    }
    term.volume = *vol;
    total += *vol;
    rep.terms.push_back(std::move(term));
  }
  if (!failing.empty()) {
    std::string msg = "cannot certify ";
    for (std::size_t i = 0; i < failing.size(); ++i) msg += (i ? "; " : "") + failing[i];
    throw BoundsError(Errc::UncertifiedTangle, msg);
  }
  if (!missing.empty()) {
    std::string msg = "no volume for ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? "; " : "") + missing[i];
    throw BoundsError(Errc::MissingVolume, msg);
  }
  rep.total = total;
  rep.notes.push_back(kEqualityNote);
  if (complex) {
    rep.components = pieces::count_components(*complex);
  } else {
    rep.notes.push_back("structure not checked: some slot has no known template");
  }
  if (link.twist_number) {
    rep.comparisons = classical_bounds(*link.twist_number, LinkCategory::Montesinos);
  }
  return rep;
}

}  // namespace replivol::bounds
