#pragma once

#include "replivol/ambient.hpp"
#include "replivol/arborescent.hpp"
#include "replivol/error.hpp"
#include "replivol/pieces.hpp"
#include "replivol/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace replivol::bounds {

enum class Errc {
  NotFound,
  UncertifiedTangle,
  MissingVolume,
  ArrangementInvalid,
  EndpointMismatch,
  BadTwistNumber,
  BadDatabase,
  BadLinkSpec,
  NoTheorem,
};
const char* to_string(Errc code);

class BoundsError : public Error {
 public:
  BoundsError(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class Family { RationalSquare, IntegerCylindrical, ReciprocalSaucer, Custom };
const char* to_string(Family f);
std::optional<Family> parse_family(const std::string& s);

using Signature = std::vector<int>;
std::string signature_string(const Signature& s);

struct DbKey {
  Family family = Family::ReciprocalSaucer;
  std::string conway;
  Ambient ambient = Ambient::S3;
  Signature signature;
  std::string orientation = "standard";
  friend auto operator<=>(const DbKey&, const DbKey&) = default;
};

std::string key_string(const DbKey& k);

enum class Provenance { Published, User };

struct DbEntry {
  DbKey key;
  std::optional<Rational> volume;  // nullopt marks certified non-hyperbolicity
  std::string printed;             // the decimal as stored
  Provenance provenance = Provenance::Published;
  std::string source;              // e.g. "table3"
};

struct LimitEntry {
  std::string conway;  // reciprocal-saucer notation, e.g. "1/3"
  Rational volume;
  std::string printed;
};

enum class QueryStatus { Volume, NonHyperbolic, NotFound };

struct QueryResult {
  QueryStatus status = QueryStatus::NotFound;
  const DbEntry* entry = nullptr;
  bool via_symmetry = false;  // TxI entries are symmetric in the signature
};

class VolumeDB {
 public:
  /// Adds or replaces an entry; volumes must be positive.
  void add(DbEntry e);
  void add_limit(LimitEntry l);
  void remove(const DbKey& k);

  QueryResult query(const DbKey& k) const;
  const std::map<DbKey, DbEntry>& entries() const noexcept { return entries_; }
  const std::map<std::string, LimitEntry>& limits() const noexcept { return limits_; }
  bool empty() const noexcept { return entries_.empty() && limits_.empty(); }

  int version = 1;

 private:
  std::map<DbKey, DbEntry> entries_;
  std::map<std::string, LimitEntry> limits_;
};

/// JSON text of the shipped database, in the replivol-volume-db format.
const std::string& shipped_database_json();
VolumeDB shipped_database();

/// Throws NotFound when the key is absent. Non-hyperbolic markers are
/// returned as a result with status NonHyperbolic.
QueryResult db_query(const VolumeDB& db, const DbKey& key);

/// Reference to a tangle in a slot. A composite carries factors instead of a
/// conway string.
struct TangleRef {
  Family family = Family::ReciprocalSaucer;
  std::string conway;
  Ambient ambient = Ambient::S3;
  std::string orientation = "standard";
  bool reflected = false;  // mirror image: same database key
  std::optional<arborescent::ArbExpr> expression;
  std::vector<TangleRef> factors;  // non-empty for a composite
  std::optional<pieces::PieceTemplate> piece;  // explicit template, if known

  std::string label() const;
};

enum class Basis { DatabaseEntry, Monotonicity, Composition, Classification };
const char* to_string(Basis b);

struct RuleApplication {
  std::string rule;
  std::string citation;
  std::string detail;
};

struct HyperbolicityCertificate {
  bool certified = false;
  TangleRef tangle;
  Signature signature;
  std::optional<Basis> basis;
  std::vector<RuleApplication> chain;
  std::vector<std::string> counterevidence;  // only for Unknown: recorded evidence against
  const DbEntry* evidence = nullptr;          // database entry the chain grounds out in, if any
};

HyperbolicityCertificate certify_hyperbolic(const VolumeDB& db, const TangleRef& tangle, const Signature& sig);

enum class Arrangement { Bracelet, Lattice, CylinderStack, Custom };
const char* to_string(Arrangement a);

struct Slot {
  TangleRef tangle;
  std::vector<TangleRef> cubes;  // cylinder-stack slot split into cubical tangles
};

struct LinkSpec {
  std::string name;
  Arrangement arrangement = Arrangement::Bracelet;
  Ambient ambient = Ambient::S3;
  std::vector<Slot> slots;                  // bracelet, cylinder-stack
  std::vector<std::vector<TangleRef>> grid; // lattice
  std::optional<int> twist_number;          // for classical comparisons
  std::vector<std::pair<std::string, std::string>> reference_volumes;  // label, printed value
  std::vector<DbEntry> user_entries;
  std::optional<pieces::GluingComplex> custom_complex;
};

struct Term {
  std::string slot;
  std::string tangle;
  Signature signature;
  Ambient ambient = Ambient::S3;
  Rational volume;
  std::string printed;
  Provenance provenance = Provenance::Published;
  std::string source;
  Basis basis = Basis::DatabaseEntry;
  std::vector<std::string> note;
};

struct NamedBound {
  std::string name;
  std::string formula;
  bool lower = true;
  Rational value;
};

struct BoundReport {
  std::string link_name;
  Arrangement arrangement = Arrangement::Bracelet;
  Ambient ambient = Ambient::S3;
  std::string theorem;      // citation tag
  std::string statement;    // the inequality applied
  std::vector<Term> terms;
  Rational total;
  std::vector<NamedBound> comparisons;
  std::vector<std::pair<std::string, std::string>> reference_volumes;
  std::vector<std::string> notes;
  std::optional<pieces::ComponentCount> components;
};

BoundReport lower_bound(const LinkSpec& link, const VolumeDB& db);

enum class ComposeRule { ThickenedCylinder, SolidCylinder, Cubical, Saucer };
const char* to_string(ComposeRule r);

struct ComposeResult {
  HyperbolicityCertificate certificate;
  std::optional<Rational> bound;
  std::vector<std::string> derivation;
};

/// Composite of `factors` in order. Additive rules certify each factor at (2)
/// (or (2,2) for cubes); the saucer rule with target (2m) certifies each of
/// the n factors at (2mn) and averages their volumes.
ComposeResult compose_bound(const VolumeDB& db, const std::vector<TangleRef>& factors, ComposeRule rule,
                            const Signature& target = {});

enum class LinkCategory { Alternating, Montesinos };

extern const Rational kVOct;  // 3.6638
extern const Rational kVTet;  // 1.0149
extern const Rational kBorromean;  // 7.32772474

std::vector<NamedBound> classical_bounds(int twist_number, LinkCategory category);

struct Violation {
  std::string what;
  std::string detail;
};

/// Entries strictly below their limits and limits below the Borromean volume.
std::vector<Violation> limit_check(const VolumeDB& db);

/// Strict increase in m of each reciprocal-saucer column in S3; a check on
/// the data rather than a theorem.
std::vector<Violation> data_monotonicity_check(const VolumeDB& db);

/// Template synthesized for a family member; nullopt when the family has no
/// standard template (custom tangles).
std::optional<pieces::PieceTemplate> family_template(const TangleRef& t);

}  // namespace replivol::bounds
