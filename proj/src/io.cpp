#include "replivol/io.hpp"

#include <fstream>
#include <sstream>

namespace replivol::io {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("ParseError", msg, ErrorClass::Input); }

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing \"" + key + "\"");
  return *it;
}

template <class T>
T as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(where + ": " + e.what());
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  return as<T>(member(j, key, where), where + "." + key);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as<T>(j.at(key), where + "." + key);
}

Rational rational_from(const Json& j, const std::string& where) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  fail(where + ": expected a rational as a string");
}

Ambient ambient_from(const std::string& s, const std::string& where) {
  auto a = parse_ambient(s);
  if (!a) fail(where + ": unknown ambient \"" + s + "\" (TxI, SolidTorus, S3, S2xS1)");
  return *a;
}

bounds::Family family_from(const std::string& s, const std::string& where) {
  auto f = bounds::parse_family(s);
  if (!f) fail(where + ": unknown family \"" + s + "\"");
  return *f;
}

Json signature_json(const bounds::Signature& s) { return Json(s); }

}  // namespace

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(what + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string());
}

// ---- words ----

words::CyclicWord word_from_json(const Json& j) {
  const int order = get<int>(j, "order", "word");
  auto indices = get<std::vector<int>>(j, "indices", "word");
  const bool first = get_or<bool>(j, "first_reflected", false, "word");
  return words::CyclicWord::make(order, std::move(indices), first);
}

Json to_json(const words::CyclicWord& w) {
  Json j;
  j["order"] = w.order();
  j["indices"] = w.indices();
  if (w.first_reflected()) j["first_reflected"] = true;
  return j;
}

Json to_json(const words::Coefficients& c) {
  Json j = Json::object();
  for (const auto& [i, v] : c) j[std::to_string(i)] = to_string(v);
  return j;
}

words::Coefficients coefficients_from_json(const Json& j) {
  if (!j.is_object()) fail("coefficients: expected an object");
  words::Coefficients out;
  for (const auto& [k, v] : j.items()) {
    int idx = 0;
    try {
      idx = std::stoi(k);
    } catch (const std::exception&) {
      fail("coefficients: bad letter index \"" + k + "\"");
    }
    out[idx] = rational_from(v, "coefficients." + k);
  }
  return out;
}

Json to_json(const words::ReductionCertificate& cert) {
  Json j;
  j["input"] = to_json(cert.input);
  Json steps = Json::array();
  for (const auto& s : cert.steps) {
    Json x;
    x["word"] = to_json(s.word);
    x["cut"] = s.cut;
    x["rotation"] = s.rotation;
    x["a1"] = s.a1;
    x["a2"] = s.a2;
    x["w1"] = to_json(s.w1);
    x["w2"] = to_json(s.w2);
    x["value"] = to_json(s.value);
    steps.push_back(std::move(x));
  }
  j["steps"] = std::move(steps);
  Json cycles = Json::array();
  for (const auto& c : cert.solved_cycles) {
    Json x;
    x["word"] = to_json(c.word);
    x["self_coefficient"] = to_string(c.self_coefficient);
    x["value"] = to_json(c.value);
    x["chain_length"] = c.chain_length;
    x["distinct_words"] = c.distinct_words;
    cycles.push_back(std::move(x));
  }
  j["solved_cycles"] = std::move(cycles);
  j["result"] = to_json(cert.result);
  j["iterations"] = cert.iterations;
  return j;
}

words::ReductionCertificate certificate_from_json(const Json& j) {
  words::ReductionCertificate c;
  c.input = word_from_json(member(j, "input", "certificate"));
  for (const auto& x : member(j, "steps", "certificate")) {
    words::SplitStep s;
    s.word = word_from_json(member(x, "word", "step"));
    s.cut = get<int>(x, "cut", "step");
    s.rotation = get<std::vector<int>>(x, "rotation", "step");
    s.a1 = get<std::vector<int>>(x, "a1", "step");
    s.a2 = get<std::vector<int>>(x, "a2", "step");
    s.w1 = word_from_json(member(x, "w1", "step"));
    s.w2 = word_from_json(member(x, "w2", "step"));
    s.value = coefficients_from_json(member(x, "value", "step"));
    c.steps.push_back(std::move(s));
  }
  if (j.contains("solved_cycles")) {
    for (const auto& x : j.at("solved_cycles")) {
      words::SolvedCycle s;
      s.word = word_from_json(member(x, "word", "cycle"));
      s.self_coefficient = rational_from(member(x, "self_coefficient", "cycle"), "cycle.self_coefficient");
      s.value = coefficients_from_json(member(x, "value", "cycle"));
      s.chain_length = get_or<std::size_t>(x, "chain_length", 0, "cycle");
      s.distinct_words = get_or<std::size_t>(x, "distinct_words", 0, "cycle");
      c.solved_cycles.push_back(std::move(s));
    }
  }
  c.result = coefficients_from_json(member(j, "result", "certificate"));
  c.iterations = get_or<std::size_t>(j, "iterations", 0, "certificate");
  return c;
}

// ---- pieces ----

namespace {

pieces::Endpoint endpoint_from(const Json& j, const std::string& where) {
  auto v = as<std::vector<int>>(j, where);
  if (v.size() != 2) fail(where + ": an endpoint is [face, label]");
  return {v[0], v[1]};
}

Json endpoint_json(const pieces::Endpoint& e) { return Json::array({e.face, e.label}); }

pieces::SlotRef slot_from(const Json& j, const std::string& where) {
  auto v = as<std::vector<long long>>(j, where);
  if (v.size() != 2 || v[0] < 0) fail(where + ": a slot is [copy, face]");
  return {static_cast<std::size_t>(v[0]), static_cast<int>(v[1])};
}

}  // namespace

pieces::PieceTemplate template_from_json(const Json& j) {
  pieces::PieceTemplate t;
  t.id = get<std::string>(j, "id", "template");
  const std::string where = "template " + t.id;
  t.faces = get<std::vector<int>>(j, "faces", where);
  for (const auto& s : member(j, "strands", where)) {
    if (!s.is_array() || s.size() != 2) fail(where + ": a strand is [[face, label], [face, label]]");
    t.strands.push_back({endpoint_from(s[0], where), endpoint_from(s[1], where)});
  }
  t.closed_components = get_or<int>(j, "closed_components", 0, where);
  if (j.contains("free_boundary")) {
    for (const auto& b : j.at("free_boundary")) {
      t.free_boundary.push_back({get<std::string>(b, "name", where), get_or<int>(b, "genus", 0, where)});
    }
  }
  t.pair_e_data = get_or<std::vector<int>>(j, "pair_e_data", {}, where);
  t.mirror_of = get_or<std::string>(j, "mirror_of", "", where);
  t.mirror_faces = get_or<std::vector<int>>(j, "mirror_faces", {}, where);
  pieces::validate_template(t);
  return t;
}

Json to_json(const pieces::PieceTemplate& t) {
  Json j;
  j["id"] = t.id;
  j["faces"] = t.faces;
  Json strands = Json::array();
  for (const auto& s : t.strands) strands.push_back(Json::array({endpoint_json(s.a), endpoint_json(s.b)}));
  j["strands"] = std::move(strands);
  if (t.closed_components) j["closed_components"] = t.closed_components;
  if (!t.free_boundary.empty()) {
    Json fb = Json::array();
    for (const auto& b : t.free_boundary) fb.push_back({{"name", b.name}, {"genus", b.genus}});
    j["free_boundary"] = std::move(fb);
  }
  if (!t.pair_e_data.empty()) j["pair_e_data"] = t.pair_e_data;
  if (!t.mirror_of.empty()) {
    j["mirror_of"] = t.mirror_of;
    j["mirror_faces"] = t.mirror_faces;
  }
  return j;
}

pieces::GluingComplex complex_from_json(const Json& j) {
  pieces::GluingComplex c;
  std::map<std::string, std::size_t> by_id;
  for (const auto& t : member(j, "templates", "complex")) {
    auto p = template_from_json(t);
    by_id[p.id] = c.add_template(p);
  }
  for (const auto& x : member(j, "copies", "complex")) {
    std::size_t idx = 0;
    const Json& t = member(x, "template", "copy");
    if (t.is_string()) {
      auto it = by_id.find(t.get<std::string>());
      if (it == by_id.end()) fail("copy: unknown template \"" + t.get<std::string>() + "\"");
      idx = it->second;
    } else {
      idx = as<std::size_t>(t, "copy.template");
      if (idx >= c.templates().size()) fail("copy: template index out of range");
    }
    c.add_copy(idx, get_or<std::vector<int>>(x, "coords", {}, "copy"));
  }
  if (j.contains("gluings")) {
    for (const auto& g : j.at("gluings")) {
      c.glue(slot_from(member(g, "a", "gluing"), "gluing.a"), slot_from(member(g, "b", "gluing"), "gluing.b"),
             get_or<std::vector<int>>(g, "bijection", {}, "gluing"));
    }
  }
  return c;
}

Json to_json(const pieces::GluingComplex& c) {
  Json j;
  Json ts = Json::array();
  for (const auto& t : c.templates()) ts.push_back(to_json(t));
  j["templates"] = std::move(ts);
  Json copies = Json::array();
  for (const auto& k : c.copies()) {
    Json x;
    x["template"] = c.templates()[k.template_index].id;
    x["coords"] = k.coords;
    copies.push_back(std::move(x));
  }
  j["copies"] = std::move(copies);
  Json gl = Json::array();
  for (const auto& g : c.gluings()) {
    Json x;
    x["a"] = Json::array({g.a.copy, g.a.face});
    x["b"] = Json::array({g.b.copy, g.b.face});
    if (!g.bijection.empty()) x["bijection"] = g.bijection;
    gl.push_back(std::move(x));
  }
  j["gluings"] = std::move(gl);
  return j;
}

pieces::ReplicantSchedule schedule_from_json(const Json& j) {
  pieces::ReplicantSchedule s;
  if (j.is_array()) {
    s.indices = as<std::vector<int>>(j, "schedule");
  } else {
    s.indices = get<std::vector<int>>(j, "indices", "schedule");
    s.order = get_or<std::vector<int>>(j, "order", {}, "schedule");
  }
  return s;
}

// ---- arborescent ----

arborescent::ArbExpr expression_from_json(const Json& j) {
  using namespace arborescent;
  if (j.is_string()) return parse_expression(j.get<std::string>());
  const std::string kind = get<std::string>(j, "kind", "expression");
  if (kind == "rational") {
    if (j.contains("conway")) return leaf(parse_conway(get<std::string>(j, "conway", "expression")));
    return leaf(parse_conway(get<std::string>(j, "fraction", "expression")));
  }
  if (kind == "qloop") return qloop(get<int>(j, "m", "expression"));
  if (kind == "sum") {
    std::vector<ArbExpr> parts;
    for (const auto& c : member(j, "children", "expression")) parts.push_back(expression_from_json(c));
    return sum(std::move(parts));
  }
  if (kind == "rotate") return rotate(expression_from_json(member(j, "child", "expression")));
  if (kind == "reflect") return reflect(expression_from_json(member(j, "child", "expression")));
  fail("expression: unknown kind \"" + kind + "\" (rational, qloop, sum, rotate, reflect)");
}

Json to_json(const arborescent::ArbExpr& e) {
  using arborescent::NodeKind;
  Json j;
  switch (e->kind) {
    case NodeKind::RationalLeaf:
      j["kind"] = "rational";
      j["conway"] = e->rational.notation();
      j["fraction"] = e->rational.fraction().to_string();
      break;
    case NodeKind::QLoop:
      j["kind"] = "qloop";
      j["m"] = e->loops;
      break;
    case NodeKind::Sum: {
      j["kind"] = "sum";
      Json ch = Json::array();
      for (const auto& c : e->children) ch.push_back(to_json(c));
      j["children"] = std::move(ch);
      break;
    }
    case NodeKind::Rotate90:
      j["kind"] = "rotate";
      j["child"] = to_json(e->children.at(0));
      break;
    case NodeKind::Reflect:
      j["kind"] = "reflect";
      j["child"] = to_json(e->children.at(0));
      break;
  }
  return j;
}

Json to_json(const arborescent::Classification& c) {
  Json j;
  j["verdict"] = arborescent::to_string(c.verdict);
  auto sig = arborescent::principal_signature(c);
  j["principal_signature"] = sig ? Json(*sig) : Json(nullptr);
  Json rs = Json::array();
  for (const auto& r : c.reasons) rs.push_back({{"rule", r.rule}, {"citation", r.citation}, {"detail", r.detail}});
  j["reasons"] = std::move(rs);
  j["containment_caveat"] = c.containment_caveat;
  return j;
}

// ---- graphs ----

graphs::ReflectionGraph reflection_graph_from_json(const Json& j) {
  graphs::ReflectionGraph g;
  g.graph.vertex_count = get<int>(j, "vertices", "graph");
  for (const auto& e : member(j, "edges", "graph")) {
    auto v = as<std::vector<int>>(e, "graph.edges");
    if (v.size() != 2) fail("graph: an edge is [u, v]");
    g.graph.edges.emplace_back(v[0], v[1]);
  }
  g.part = get_or<std::vector<int>>(j, "part", {}, "graph");
  if (j.contains("reflections")) {
    for (const auto& r : j.at("reflections")) {
      graphs::Reflection x;
      if (r.is_array()) {
        x.perm = as<std::vector<int>>(r, "graph.reflections");
      } else {
        x.perm = get<std::vector<int>>(r, "perm", "reflection");
        x.swaps = get_or<std::vector<int>>(r, "swaps", {}, "reflection");
        x.edge_perm = get_or<std::vector<int>>(r, "edge_perm", {}, "reflection");
      }
      g.reflections.push_back(std::move(x));
    }
  }
  g.ambient = ambient_from(get_or<std::string>(j, "ambient", "S3", "graph"), "graph");
  g.ambient_symmetry = get_or<bool>(j, "ambient_symmetry", false, "graph");
  return g;
}

Json to_json(const graphs::ReflectionGraph& g) {
  Json j;
  j["vertices"] = g.graph.vertex_count;
  Json edges = Json::array();
  for (const auto& [u, v] : g.graph.edges) edges.push_back(Json::array({u, v}));
  j["edges"] = std::move(edges);
  if (!g.part.empty()) j["part"] = g.part;
  Json refl = Json::array();
  for (const auto& r : g.reflections) {
    Json x;
    x["perm"] = r.perm;
    if (!r.swaps.empty()) x["swaps"] = r.swaps;
    if (!r.edge_perm.empty()) x["edge_perm"] = r.edge_perm;
    refl.push_back(std::move(x));
  }
  j["reflections"] = std::move(refl);
  j["ambient"] = to_string(g.ambient);
  j["ambient_symmetry"] = g.ambient_symmetry;
  return j;
}

std::optional<graphs::RotationSystem> rotation_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rotation")) return std::nullopt;
  graphs::RotationSystem r;
  r.order = as<std::vector<std::vector<int>>>(j.at("rotation"), "graph.rotation");
  return r;
}

Json to_json(const graphs::ValidationReport& r) {
  Json j;
  j["valid"] = true;
  j["valence"] = r.valence;
  j["part"] = r.part;
  j["group_order"] = r.group.elements.size();
  j["generators"] = r.group.generators.size();
  j["edge_classes"] = r.edge_classes;
  j["edge_class_of"] = r.edge_class_of;
  return j;
}

Json to_json(const graphs::FaceReport& f) {
  Json j;
  j["vertices"] = f.vertices;
  j["edges"] = f.edges;
  j["faces"] = f.face_count;
  j["euler_characteristic"] = f.euler_characteristic;
  Json fv = Json::object();
  for (const auto& [len, count] : f.face_vector) fv[std::to_string(len)] = count;
  j["face_vector"] = std::move(fv);
  j["face_boundaries"] = f.faces;
  j["has_odd_face"] = f.has_odd_face;
  j["bipartite"] = f.bipartite;
  return j;
}

// ---- bounds ----

bounds::DbKey key_from_json(const Json& j) {
  bounds::DbKey k;
  k.family = family_from(get<std::string>(j, "family", "key"), "key");
  k.conway = get<std::string>(j, "conway", "key");
  k.ambient = ambient_from(get<std::string>(j, "ambient", "key"), "key");
  k.signature = get<std::vector<int>>(j, "signature", "key");
  k.orientation = get_or<std::string>(j, "orientation", "standard", "key");
  return k;
}

bounds::DbEntry entry_from_json(const Json& j) {
  bounds::DbEntry e;
  e.key = key_from_json(j);
  e.printed = get<std::string>(j, "volume", "entry");
  const Rational v = parse_decimal(e.printed);
  if (v != 0) e.volume = v;
  const std::string prov = get_or<std::string>(j, "provenance", "user", "entry");
  if (prov != "user" && prov != "published") fail("entry: provenance must be \"published\" or \"user\"");
  e.provenance = prov == "published" ? bounds::Provenance::Published : bounds::Provenance::User;
  e.source = get_or<std::string>(j, "source", prov, "entry");
  return e;
}

bounds::VolumeDB database_from_json(const Json& j) {
  using bounds::BoundsError;
  using bounds::Errc;
  if (!j.is_object() || j.value("format", "") != "replivol-volume-db") {
    throw BoundsError(Errc::BadDatabase, "not a volume database (expected \"format\": \"replivol-volume-db\")");
  }
  bounds::VolumeDB db;
  db.version = get_or<int>(j, "version", 1, "database");
  try {
    if (j.contains("tables")) {
      for (const auto& t : j.at("tables")) {
        const std::string id = get<std::string>(t, "id", "table");
        const auto family = family_from(get<std::string>(t, "family", id), id);
        const auto columns = get<std::vector<std::string>>(t, "columns", id);
        for (const auto& row : member(t, "rows", id)) {
          const auto values = get<std::vector<std::string>>(row, "values", id);
          if (values.size() != columns.size()) {
            throw BoundsError(Errc::BadDatabase, id + ": row has " + std::to_string(values.size()) + " values for " +
                                                     std::to_string(columns.size()) + " columns");
          }
          for (std::size_t c = 0; c < columns.size(); ++c) {
            bounds::DbEntry e;
            e.key.family = family;
            e.key.conway = columns[c];
            e.key.ambient = ambient_from(get<std::string>(row, "ambient", id), id);
            e.key.signature = get<std::vector<int>>(row, "signature", id);
            e.key.orientation = get_or<std::string>(row, "orientation", "standard", id);
            e.printed = values[c];
            const Rational v = parse_decimal(values[c]);
            if (v != 0) e.volume = v;
            e.provenance = bounds::Provenance::Published;
            e.source = id;
            db.add(std::move(e));
          }
        }
      }
    }
    if (j.contains("entries")) {
      for (const auto& e : j.at("entries")) db.add(entry_from_json(e));
    }
    if (j.contains("limits")) {
      const Json& l = j.at("limits");
      for (const auto& [conway, v] : member(l, "values", "limits").items()) {
        const std::string printed = as<std::string>(v, "limits." + conway);
        db.add_limit({conway, parse_decimal(printed), printed});
      }
    }
  } catch (const BoundsError&) {
    throw;
  } catch (const Error& e) {
    throw BoundsError(Errc::BadDatabase, e.what());
  }
  return db;
}

Json to_json(const bounds::VolumeDB& db) {
  Json j;
  j["format"] = "replivol-volume-db";
  j["version"] = db.version;
  Json entries = Json::array();
  for (const auto& [k, e] : db.entries()) {
    Json x;
    x["family"] = bounds::to_string(k.family);
    x["conway"] = k.conway;
    x["ambient"] = to_string(k.ambient);
    x["signature"] = k.signature;
    if (k.orientation != "standard") x["orientation"] = k.orientation;
    x["volume"] = e.printed;
    x["provenance"] = e.provenance == bounds::Provenance::Published ? "published" : "user";
    x["source"] = e.source;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  Json lim = Json::object();
  for (const auto& [c, l] : db.limits()) lim[c] = l.printed;
  j["limits"] = {{"values", std::move(lim)}};
  return j;
}

bounds::TangleRef tangle_from_json(const Json& j, bounds::Family family, Ambient ambient,
                                   const std::map<std::string, pieces::PieceTemplate>& templates) {
  bounds::TangleRef t;
  t.family = family;
  t.ambient = ambient;
  if (j.is_string()) {
    t.conway = j.get<std::string>();
    return t;
  }
  if (!j.is_object()) fail("tangle: expected a conway string or an object");
  if (j.contains("family")) t.family = family_from(j.at("family").get<std::string>(), "tangle");
  if (j.contains("ambient")) t.ambient = ambient_from(j.at("ambient").get<std::string>(), "tangle");
  t.orientation = get_or<std::string>(j, "orientation", "standard", "tangle");
  t.reflected = get_or<bool>(j, "reflected", false, "tangle");
  if (j.contains("factors")) {
    for (const auto& f : j.at("factors")) t.factors.push_back(tangle_from_json(f, t.family, t.ambient, templates));
    if (t.factors.empty()) fail("tangle: empty factor list");
    return t;
  }
  if (j.contains("expression")) t.expression = expression_from_json(j.at("expression"));
  if (j.contains("template")) {
    const Json& tj = j.at("template");
    if (tj.is_string()) {
      auto it = templates.find(tj.get<std::string>());
      if (it == templates.end()) fail("tangle: unknown template \"" + tj.get<std::string>() + "\"");
      t.piece = it->second;
    } else {
      t.piece = template_from_json(tj);
    }
  }
  t.conway = get_or<std::string>(j, "conway", "", "tangle");
  if (t.conway.empty()) {
    if (t.expression) t.conway = arborescent::to_string(*t.expression);
    else if (t.piece) t.conway = t.piece->id;
    else fail("tangle: needs \"conway\", \"expression\", \"template\" or \"factors\"");
  }
  return t;
}

bounds::LinkSpec link_spec_from_json(const Json& j) {
  using bounds::Arrangement;
  bounds::LinkSpec s;
  s.name = get_or<std::string>(j, "name", "link", "link spec");
  const std::string arr = get<std::string>(j, "arrangement", "link spec");
  if (arr == "bracelet") s.arrangement = Arrangement::Bracelet;
  else if (arr == "lattice") s.arrangement = Arrangement::Lattice;
  else if (arr == "cylinder-stack") s.arrangement = Arrangement::CylinderStack;
  else if (arr == "custom") s.arrangement = Arrangement::Custom;
  else fail("link spec: unknown arrangement \"" + arr + "\" (bracelet, lattice, cylinder-stack, custom)");
  s.ambient = ambient_from(get<std::string>(j, "ambient", "link spec"), "link spec");

  bounds::Family family = bounds::Family::ReciprocalSaucer;
  if (s.arrangement == Arrangement::Lattice) family = bounds::Family::RationalSquare;
  if (s.arrangement == Arrangement::CylinderStack) family = bounds::Family::IntegerCylindrical;
  if (j.contains("family")) family = family_from(j.at("family").get<std::string>(), "link spec");

  std::map<std::string, pieces::PieceTemplate> templates;
  if (j.contains("templates")) {
    for (const auto& t : j.at("templates")) {
      auto p = template_from_json(t);
      templates[p.id] = p;
    }
  }
  if (j.contains("slots")) {
    for (const auto& x : j.at("slots")) {
      bounds::Slot slot;
      if (x.is_object() && x.contains("cubes")) {
        for (const auto& c : x.at("cubes")) slot.cubes.push_back(tangle_from_json(c, bounds::Family::Custom, s.ambient, templates));
        if (slot.cubes.empty()) fail("link spec: empty cube list");
      } else {
        slot.tangle = tangle_from_json(x, family, s.ambient, templates);
      }
      s.slots.push_back(std::move(slot));
    }
  }
  if (j.contains("grid")) {
    for (const auto& row : j.at("grid")) {
      if (!row.is_array()) fail("link spec: grid rows must be arrays");
      s.grid.emplace_back();
      for (const auto& c : row) s.grid.back().push_back(tangle_from_json(c, family, s.ambient, templates));
    }
  }
  if (s.arrangement == Arrangement::Lattice && s.grid.empty()) fail("link spec: a lattice needs \"grid\"");
  if ((s.arrangement == Arrangement::Bracelet || s.arrangement == Arrangement::CylinderStack) && s.slots.empty()) {
    fail("link spec: \"slots\" is required for this arrangement");
  }
  if (j.contains("twist_number")) s.twist_number = get<int>(j, "twist_number", "link spec");
  if (j.contains("reference_volumes")) {
    for (const auto& [label, v] : j.at("reference_volumes").items()) {
      s.reference_volumes.emplace_back(label, as<std::string>(v, "reference_volumes." + label));
    }
  }
  if (j.contains("user_entries")) {
    for (const auto& e : j.at("user_entries")) s.user_entries.push_back(entry_from_json(e));
  }
  if (j.contains("complex")) s.custom_complex = complex_from_json(j.at("complex"));
  if (s.arrangement == Arrangement::Custom && !s.custom_complex) fail("link spec: a custom arrangement needs \"complex\"");
  return s;
}

Json to_json(const bounds::HyperbolicityCertificate& c) {
  Json j;
  j["tangle"] = c.tangle.label();
  j["signature"] = signature_json(c.signature);
  j["status"] = c.certified ? "certified" : "unknown";
  j["basis"] = c.basis ? Json(bounds::to_string(*c.basis)) : Json(nullptr);
  Json chain = Json::array();
  for (const auto& r : c.chain) chain.push_back({{"rule", r.rule}, {"citation", r.citation}, {"detail", r.detail}});
  j["chain"] = std::move(chain);
  if (!c.counterevidence.empty()) j["counterevidence"] = c.counterevidence;
  return j;
}

namespace {

const char* provenance_str(bounds::Provenance p) { return p == bounds::Provenance::Published ? "published" : "user"; }

}  // namespace

Json to_json(const bounds::BoundReport& r, int precision) {
  Json j;
  j["link"] = r.link_name;
  j["arrangement"] = bounds::to_string(r.arrangement);
  j["ambient"] = to_string(r.ambient);
  j["theorem"] = r.theorem;
  j["statement"] = r.statement;
  Json terms = Json::array();
  for (const auto& t : r.terms) {
    Json x;
    x["slot"] = t.slot;
    x["tangle"] = t.tangle;
    x["signature"] = signature_json(t.signature);
    x["ambient"] = to_string(t.ambient);
    x["volume"] = to_fixed(t.volume, precision);
    x["provenance"] = provenance_str(t.provenance);
    x["source"] = t.source;
    x["basis"] = bounds::to_string(t.basis);
    x["citations"] = t.note;
    terms.push_back(std::move(x));
  }
  j["terms"] = std::move(terms);
  j["total"] = to_fixed(r.total, precision);
  Json cmp = Json::array();
  for (const auto& b : r.comparisons) {
    cmp.push_back({{"name", b.name}, {"formula", b.formula}, {"kind", b.lower ? "lower" : "upper"},
                   {"value", to_fixed(b.value, precision)}});
  }
  j["comparisons"] = std::move(cmp);
  Json refs = Json::object();
  for (const auto& [label, v] : r.reference_volumes) refs[label] = v;
  j["reference_volumes"] = std::move(refs);
  if (r.components) j["components"] = {{"closed", r.components->closed}, {"open", r.components->open}};
  j["notes"] = r.notes;
  return j;
}

std::string render_markdown(const bounds::BoundReport& r, int precision) {
  std::ostringstream o;
  o << "# Volume lower bound: " << r.link_name << "\n\n";
  o << "- arrangement: " << bounds::to_string(r.arrangement) << " in " << to_string(r.ambient) << "\n";
  o << "- theorem: `" << r.theorem << "`: " << r.statement << "\n";
  if (r.components) o << "- components: " << r.components->closed << " closed, " << r.components->open << " open\n";
  o << "\n| slot | tangle | signature | volume | provenance | basis |\n";
  o << "|---|---|---|---|---|---|\n";
  for (const auto& t : r.terms) {
    o << "| " << t.slot << " | " << t.tangle << " | " << bounds::signature_string(t.signature) << " | "
      << to_fixed(t.volume, precision) << " | " << provenance_str(t.provenance) << " (" << t.source << ") | "
      << bounds::to_string(t.basis) << " |\n";
  }
  o << "\n**Total: " << to_fixed(r.total, precision) << "**\n";
  if (!r.comparisons.empty()) {
    o << "\n## Classical bounds\n\n";
    for (const auto& b : r.comparisons) {
      o << "- " << b.name << " (" << (b.lower ? "lower" : "upper") << ", " << b.formula << "): "
        << to_fixed(b.value, precision) << "\n";
    }
  }
  if (!r.reference_volumes.empty()) {
    o << "\n## Reference volumes (not computed here)\n\n";
    for (const auto& [label, v] : r.reference_volumes) o << "- " << label << ": " << v << "\n";
  }
  o << "\n## Citations\n\n";
  for (const auto& t : r.terms) {
    for (const auto& n : t.note) o << "- " << t.slot << ": " << n << "\n";
  }
  o << "\n## Notes\n\n";
  for (const auto& n : r.notes) o << "- " << n << "\n";
  return o.str();
}

std::string render_plain(const bounds::BoundReport& r, int precision) {
  std::ostringstream o;
  o << "link: " << r.link_name << " (" << bounds::to_string(r.arrangement) << " in " << to_string(r.ambient) << ")\n";
  o << "theorem: " << r.theorem << ": " << r.statement << "\n";
  for (const auto& t : r.terms) {
    o << "  " << t.slot << ": " << t.tangle << " " << bounds::signature_string(t.signature) << " = "
      << to_fixed(t.volume, precision) << " [" << provenance_str(t.provenance) << " " << t.source << ", "
      << bounds::to_string(t.basis) << "]\n";
  }
  o << "total: " << to_fixed(r.total, precision) << "\n";
  for (const auto& b : r.comparisons) {
    o << "comparison " << b.name << " (" << b.formula << "): " << to_fixed(b.value, precision) << "\n";
  }
  for (const auto& [label, v] : r.reference_volumes) o << "reference " << label << ": " << v << "\n";
  if (r.components) o << "components: " << r.components->closed << " closed, " << r.components->open << " open\n";
  for (const auto& n : r.notes) o << "note: " << n << "\n";
  return o.str();
}

}  // namespace replivol::io
