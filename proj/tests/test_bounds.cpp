#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "replivol/bounds.hpp"
#include "replivol/io.hpp"

#include <random>

using namespace replivol;
using namespace replivol::bounds;

namespace {

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const BoundsError& e) {
    return e.code();
  }
  FAIL("no BoundsError thrown");
  return Errc::NotFound;
}

const VolumeDB& db() {
  static const VolumeDB d = shipped_database();
  return d;
}

TangleRef tangle(Family f, const std::string& conway, Ambient a = Ambient::S3) {
  TangleRef t;
  t.family = f;
  t.conway = conway;
  t.ambient = a;
  return t;
}

TangleRef saucer(const std::string& c) { return tangle(Family::ReciprocalSaucer, c); }

Rational dec(const char* s) { return parse_decimal(s); }

LinkSpec spec_file(const std::string& name) {
  return io::link_spec_from_json(io::read_json_file(std::string(RV_DATA_DIR) + "/specs/" + name));
}

LinkSpec bracelet(const std::vector<std::string>& slots) {
  LinkSpec s;
  s.name = "bracelet";
  s.arrangement = Arrangement::Bracelet;
  s.ambient = Ambient::S3;
  for (const auto& c : slots) s.slots.push_back({saucer(c), {}});
  return s;
}

DbEntry user_entry(Family f, const std::string& conway, Ambient a, Signature sig, const char* v) {
  DbEntry e;
  e.key = {f, conway, a, std::move(sig), "standard"};
  e.printed = v;
  e.volume = dec(v);
  e.provenance = Provenance::User;
  e.source = "user";
  return e;
}

}  // namespace

TEST_CASE("database queries") {
  auto r = db_query(db(), {Family::RationalSquare, "2", Ambient::S3, {2, 2}});
  CHECK(r.status == QueryStatus::Volume);
  CHECK(*r.entry->volume == dec("3.13223067"));
  r = db_query(db(), {Family::ReciprocalSaucer, "1/2", Ambient::S3, {6}});
  CHECK(*r.entry->volume == dec("2.44257492"));
  r = db_query(db(), {Family::ReciprocalSaucer, "1/2", Ambient::S3, {4}});
  CHECK(r.status == QueryStatus::NonHyperbolic);
  CHECK(r.entry->printed == "0");
  CHECK(error_of([] { db_query(db(), {Family::ReciprocalSaucer, "1/7", Ambient::S3, {4}}); }) == Errc::NotFound);
  r = db_query(db(), {Family::IntegerCylindrical, "3", Ambient::TxI, {2}});
  CHECK(*r.entry->volume == dec("7.32772475"));
  r = db_query(db(), {Family::RationalSquare, "2 1", Ambient::SolidTorus, {2, 6}});
  CHECK(*r.entry->volume == dec("7.38599241"));
  CHECK(db().limits().at("1/3").volume == dec("5.33489567"));
  CHECK(db().entries().size() == 35 + 4 + 16);
}

TEST_CASE("thickened-torus entries are symmetric in the signature") {
  VolumeDB d;
  d.add(user_entry(Family::Custom, "X", Ambient::TxI, {2, 4}, "3.5"));
  const auto r = d.query({Family::Custom, "X", Ambient::TxI, {4, 2}});
  CHECK(r.status == QueryStatus::Volume);
  CHECK(r.via_symmetry);
  d.add(user_entry(Family::Custom, "Y", Ambient::S3, {2, 4}, "3.5"));
  CHECK(d.query({Family::Custom, "Y", Ambient::S3, {4, 2}}).status == QueryStatus::NotFound);
}

TEST_CASE("certification examples") {
  auto c = certify_hyperbolic(db(), saucer("1/3"), {8});
  CHECK(c.certified);
  CHECK(c.basis == Basis::Monotonicity);
  REQUIRE(c.evidence);
  CHECK(c.evidence->key.signature == Signature{4});
  CHECK(*c.evidence->volume == dec("3.13223067"));

  c = certify_hyperbolic(db(), saucer("1/2"), {4});
  CHECK_FALSE(c.certified);
  REQUIRE_FALSE(c.counterevidence.empty());
  CHECK(c.counterevidence[0].find("non-hyperbolic") != std::string::npos);

  c = certify_hyperbolic(db(), saucer("1/2"), {6});
  CHECK(c.certified);
  CHECK(c.basis == Basis::DatabaseEntry);

  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      c = certify_hyperbolic(db(), tangle(Family::RationalSquare, "2"), {2 * m, 2 * n});
      CHECK(c.certified);
      CHECK(c.evidence->key.signature == Signature{2, 2});
      CHECK(c.basis == (m == 1 && n == 1 ? Basis::DatabaseEntry : Basis::Monotonicity));
    }
  }
}

TEST_CASE("classification certifies saucers without entries") {
  auto c = certify_hyperbolic(db(), saucer("1/7"), {4});
  CHECK(c.certified);
  CHECK(c.basis == Basis::Classification);
  c = certify_hyperbolic(db(), saucer("1/7"), {2});
  CHECK_FALSE(c.certified);
  c = certify_hyperbolic(db(), saucer("3"), {8});
  CHECK_FALSE(c.certified);
  TangleRef e = saucer("two clasps");
  e.expression = arborescent::parse_expression("sum(rat(2 1), rat(2 1))");
  c = certify_hyperbolic(db(), e, {2});
  CHECK(c.certified);
}

TEST_CASE("rotated orientations do not share certificates") {
  TangleRef t = tangle(Family::RationalSquare, "2");
  t.orientation = "rotated";
  CHECK_FALSE(certify_hyperbolic(db(), t, {2, 2}).certified);
}

TEST_CASE("property: removing entries never creates a certificate") {
  std::mt19937_64 rng(17);
  std::vector<std::pair<TangleRef, Signature>> queries;
  for (const char* c : {"1/2", "1/3", "1/4", "1/5"}) {
    for (int s : {2, 4, 6, 8, 10, 12}) queries.push_back({saucer(c), {s}});
  }
  for (const char* c : {"2", "3", "2 1"}) {
    for (int a : {2, 4}) {
      for (int b : {2, 4, 6, 8}) queries.push_back({tangle(Family::RationalSquare, c), {a, b}});
    }
  }
  for (int trial = 0; trial < 40; ++trial) {
    VolumeDB sub;
    for (const auto& [k, e] : db().entries()) {
      if (rng() % 2) sub.add(e);
    }
    for (const auto& [t, s] : queries) {
      if (certify_hyperbolic(sub, t, s).certified) CHECK(certify_hyperbolic(db(), t, s).certified);
    }
  }
}

TEST_CASE("bracelet bound of the worked example") {
  const auto r = lower_bound(spec_file("bracelet6.json"), db());
  const Rational table_sum = dec("4.30620760") * 0 + dec("5.38411452") * 5 + dec("5.86524434");
  CHECK(r.total == table_sum);
  CHECK(to_fixed(r.total, 8) == "32.78581694");
  CHECK(to_fixed(r.total, 4) == "32.7858");
  CHECK(r.theorem == "bracelet-theorem");
  CHECK(r.terms.size() == 6);
  bool has_note = false;
  for (const auto& n : r.notes) has_note |= n.find("Equality is attained if and only if") != std::string::npos;
  CHECK(has_note);
  REQUIRE(r.comparisons.size() == 3);
  CHECK(std::abs(to_double(r.comparisons[0].value) - 7.3276) < 5e-4);
  CHECK(std::abs(to_double(r.comparisons[2].value) - 10.9914) < 5e-4);
}

TEST_CASE("lattice bound of the bigon tangle") {
  const auto r = lower_bound(spec_file("lattice2x2-bigon.json"), db());
  CHECK(r.total == dec("3.13223067") * 4);
  CHECK(std::abs(to_double(r.total) - 12.5289226) < 1e-5);
  CHECK(r.terms.size() == 4);
}

TEST_CASE("thickened torus with user entries") {
  const auto r = lower_bound(spec_file("thickened-torus.json"), db());
  CHECK(r.total == dec("34.7259"));
  CHECK(r.theorem == "thickened-torus-theorem");
  REQUIRE(r.terms.size() == 3);
  for (const auto& t : r.terms) CHECK(t.provenance == Provenance::User);
  CHECK(r.terms[1].signature == Signature{2, 2});
}

TEST_CASE("bound refusals") {
  CHECK(error_of([] { lower_bound(spec_file("bracelet4-clasp.json"), db()); }) == Errc::UncertifiedTangle);
  try {
    lower_bound(spec_file("bracelet4-clasp.json"), db());
  } catch (const BoundsError& e) {
    CHECK(std::string(e.what()).find("slot 1") != std::string::npos);
    CHECK(e.error_class() == ErrorClass::Domain);
  }
  CHECK(error_of([] { lower_bound(bracelet({"1/3", "1/3", "1/3"}), db()); }) == Errc::ArrangementInvalid);
  // 1/7 is certified by classification but has no recorded volume
  CHECK(error_of([] { lower_bound(bracelet({"1/7", "1/3", "1/3", "1/3"}), db()); }) == Errc::MissingVolume);
  LinkSpec custom = bracelet({"1/3", "1/3"});
  custom.arrangement = Arrangement::Custom;
  CHECK(error_of([&] { lower_bound(custom, db()); }) == Errc::NoTheorem);
  LinkSpec s2 = bracelet({"1/3", "1/3"});
  s2.ambient = Ambient::S2xS1;
  CHECK(error_of([&] { lower_bound(s2, db()); }) == Errc::NoTheorem);
}

TEST_CASE("bracelet bound is invariant under rotation and reflection of slots") {
  const std::vector<std::string> base = {"1/3", "1/4", "1/5", "1/4", "1/3", "1/2"};
  const Rational expected = lower_bound(bracelet(base), db()).total;
  for (std::size_t k = 0; k < base.size(); ++k) {
    std::vector<std::string> rot(base.begin() + static_cast<std::ptrdiff_t>(k), base.end());
    rot.insert(rot.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(k));
    CHECK(lower_bound(bracelet(rot), db()).total == expected);
    LinkSpec refl = bracelet(base);
    refl.slots[k].tangle.reflected = true;
    CHECK(lower_bound(refl, db()).total == expected);
  }
}

TEST_CASE("other ambient dispatch") {
  LinkSpec cubes;
  cubes.arrangement = Arrangement::Lattice;
  cubes.ambient = Ambient::TxI;
  cubes.grid.assign(2, std::vector<TangleRef>(2, tangle(Family::RationalSquare, "3", Ambient::TxI)));
  auto r = lower_bound(cubes, db());
  CHECK(r.theorem == "cubical-theorem");
  CHECK(r.total == dec("6.26446133") * 4);

  LinkSpec s2;
  s2.arrangement = Arrangement::Lattice;
  s2.ambient = Ambient::S2xS1;
  s2.grid.assign(2, std::vector<TangleRef>(4, tangle(Family::Custom, "B", Ambient::S2xS1)));
  s2.user_entries.push_back(user_entry(Family::Custom, "B", Ambient::S2xS1, {2, 4}, "1.25"));
  r = lower_bound(s2, db());
  CHECK(r.theorem == "s2xs1-lattice-theorem");
  CHECK(r.total == 10);

  LinkSpec solid;
  solid.arrangement = Arrangement::CylinderStack;
  solid.ambient = Ambient::SolidTorus;
  solid.slots.push_back({{}, {tangle(Family::RationalSquare, "2", Ambient::SolidTorus),
                              tangle(Family::RationalSquare, "2 1", Ambient::SolidTorus)}});
  r = lower_bound(solid, db());
  CHECK(r.theorem == "solid-torus-theorem");
  CHECK(r.total == dec("3.66386238") + dec("6.57223395"));

  LinkSpec wedge = bracelet({"W", "W", "W", "W"});
  wedge.ambient = Ambient::SolidTorus;
  for (auto& s : wedge.slots) s.tangle = tangle(Family::Custom, "W", Ambient::SolidTorus);
  wedge.user_entries.push_back(user_entry(Family::Custom, "W", Ambient::SolidTorus, {4}, "2"));
  r = lower_bound(wedge, db());
  CHECK(r.theorem == "solid-torus-cyclic-wedge-theorem");
  CHECK(r.total == 8);
}

TEST_CASE("composition of thickened-cylinder tangles") {
  const auto a = tangle(Family::IntegerCylindrical, "2", Ambient::TxI);
  const auto r = compose_bound(db(), {a, a}, ComposeRule::ThickenedCylinder);
  CHECK(r.certificate.certified);
  CHECK(r.certificate.basis == Basis::Composition);
  CHECK(*r.bound == dec("10.66697914"));
  const auto one = compose_bound(db(), {a}, ComposeRule::ThickenedCylinder);
  CHECK(*one.bound == dec("5.33348957"));
  CHECK(one.certificate.basis == Basis::DatabaseEntry);
}

TEST_CASE("property: thickened-cylinder composition is associative at the bound level") {
  const std::vector<std::string> names = {"2", "3", "4", "5"};
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TangleRef> f;
    for (int i = 0; i < 3; ++i) f.push_back(tangle(Family::IntegerCylindrical, names[rng() % 4], Ambient::TxI));
    TangleRef ab = f[0], bc = f[1];
    ab.factors = {f[0], f[1]};
    bc.factors = {f[1], f[2]};
    const auto left = compose_bound(db(), {ab, f[2]}, ComposeRule::ThickenedCylinder);
    const auto right = compose_bound(db(), {f[0], bc}, ComposeRule::ThickenedCylinder);
    const auto flat = compose_bound(db(), f, ComposeRule::ThickenedCylinder);
    CHECK(*left.bound == *right.bound);
    CHECK(*left.bound == *flat.bound);
  }
}

TEST_CASE("saucer composition lifts factors to 2mn") {
  const auto r = compose_bound(db(), {saucer("1/3"), saucer("1/4")}, ComposeRule::Saucer, {4});
  CHECK(r.certificate.certified);
  CHECK(*r.bound == (dec("4.85098130") + dec("5.72360375")) / 2);
  // 1/2 is not 4-hyperbolic but is 8-hyperbolic, so it composes at (4) with n = 2
  const auto clasp = compose_bound(db(), {saucer("1/2"), saucer("1/2")}, ComposeRule::Saucer, {4});
  CHECK(clasp.certificate.certified);
  CHECK(*clasp.bound == dec("3.01152301"));
  CHECK(error_of([] { compose_bound(db(), {saucer("1/2"), saucer("1/3")}, ComposeRule::Saucer, {2}); }) ==
        Errc::UncertifiedTangle);
  CHECK(error_of([] {
          compose_bound(db(), {saucer("1/3"), tangle(Family::IntegerCylindrical, "2", Ambient::TxI)},
                        ComposeRule::ThickenedCylinder);
        }) == Errc::EndpointMismatch);
}

TEST_CASE("classical bounds") {
  auto b = classical_bounds(6, LinkCategory::Alternating);
  REQUIRE(b.size() == 2);
  CHECK(b[0].value == kVOct * 2);
  CHECK(std::abs(to_double(b[0].value) - 7.3276) < 5e-4);
  CHECK(b[1].value == kVTet * 50);
  b = classical_bounds(6, LinkCategory::Montesinos);
  REQUIRE(b.size() == 3);
  CHECK(std::abs(to_double(b[2].value) - 10.9914) < 5e-4);
  CHECK(classical_bounds(2, LinkCategory::Alternating)[0].value == 0);
  CHECK(error_of([] { classical_bounds(1, LinkCategory::Alternating); }) == Errc::BadTwistNumber);
}

TEST_CASE("limit and monotonicity checks") {
  CHECK(limit_check(db()).empty());
  CHECK(data_monotonicity_check(db()).empty());
  CHECK(limit_check(VolumeDB{}).empty());
  VolumeDB forged = db();
  DbEntry e = *db().query({Family::ReciprocalSaucer, "1/3", Ambient::S3, {10}}).entry;
  e.volume = dec("5.4");
  e.printed = "5.4";
  forged.add(e);
  const auto v = limit_check(forged);
  REQUIRE(v.size() == 1);
  CHECK(v[0].detail.find("5.33489567") != std::string::npos);
  e.volume = dec("3.0");
  e.printed = "3.0";
  forged.add(e);
  const auto m = data_monotonicity_check(forged);
  REQUIRE_FALSE(m.empty());
  CHECK(m[0].what == "data check, not theorem");
  VolumeDB high;
  high.add_limit({"1/9", dec("7.5"), "7.5"});
  CHECK(limit_check(high).size() == 1);
}

TEST_CASE("database format") {
  const auto j = io::to_json(db());
  const auto back = io::database_from_json(io::parse_json(j.dump()));
  CHECK(back.entries().size() == db().entries().size());
  for (const auto& [k, e] : db().entries()) {
    const auto q = back.query(k);
    CHECK(q.status == db().query(k).status);
    CHECK(q.entry->printed == e.printed);
  }
  CHECK(error_of([] { io::database_from_json(io::parse_json(R"({"format":"other"})")); }) == Errc::BadDatabase);
  CHECK(error_of([] {
          io::database_from_json(io::parse_json(
              R"({"format":"replivol-volume-db","entries":[{"family":"custom","conway":"x","ambient":"S3","signature":[2],"volume":"-1"}]})"));
        }) == Errc::BadDatabase);
  CHECK(error_of([] {
          io::database_from_json(io::parse_json(
              R"({"format":"replivol-volume-db","entries":[{"family":"custom","conway":"x","ambient":"S3","signature":[3],"volume":"1"}]})"));
        }) == Errc::BadDatabase);
}

TEST_CASE("report renderings") {
  const auto r = lower_bound(spec_file("bracelet6.json"), db());
  const auto j = io::to_json(r, 8);
  CHECK(j["total"] == "32.78581694");
  CHECK(j["terms"].size() == 6);
  CHECK(j["reference_volumes"]["SnapPy volume"] == "32.9819");
  const auto md = io::render_markdown(r, 4);
  CHECK(md.find("**Total: 32.7858**") != std::string::npos);
  CHECK(md.find("Equality is attained if and only if") != std::string::npos);
  CHECK(io::render_plain(r, 8).find("total: 32.78581694") != std::string::npos);
  CHECK(io::to_json(r, 8).dump() == j.dump());
}

TEST_CASE("family templates") {
  const auto clasp = family_template(saucer("1/2"));
  REQUIRE(clasp);
  CHECK(clasp->faces == std::vector<int>{2, 2});
  const auto cyl = family_template(tangle(Family::IntegerCylindrical, "3", Ambient::TxI));
  REQUIRE(cyl);
  CHECK(cyl->faces == std::vector<int>{1, 1});
  CHECK(cyl->closed_components == 1);
  CHECK(family_template(tangle(Family::IntegerCylindrical, "2", Ambient::TxI))->closed_components == 0);
  CHECK_FALSE(family_template(tangle(Family::Custom, "T1", Ambient::TxI)));
}
