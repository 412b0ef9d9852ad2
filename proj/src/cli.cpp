#include "replivol/cli.hpp"

#include "replivol/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace replivol::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Config {
  std::string db_path;
  int precision = 8;
  std::string format;  // empty: the command's default
};

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw Error("ParseError", what + ": empty entry in \"" + text + "\"", ErrorClass::Input);
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw Error("ParseError", what + ": \"" + tok + "\" is not an integer", ErrorClass::Input);
    }
  }
  return out;
}

bounds::VolumeDB load_db(const Config& cfg) {
  std::string path = cfg.db_path;
  if (path.empty()) {
    if (const char* env = std::getenv("RV_DB"); env && *env) path = env;
  }
  if (path.empty()) return bounds::shipped_database();
  return io::database_from_json(io::read_json_file(path));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string letters(const words::Coefficients& c) {
  std::string s;
  for (const auto& [i, v] : c) s += (s.empty() ? "" : ", ") + std::string("T") + std::to_string(i) + ": " + to_string(v);
  return s;
}

std::string word_text(const words::CyclicWord& w) { return w.to_string(); }

// ---- reduce ----

struct ReduceArgs {
  std::string file;
  int order = 0;
  std::string indices;
  bool certificate = false;
  std::string replay;
};

int cmd_reduce(const ReduceArgs& a, const Config& cfg, std::ostream& out) {
  const std::string fmt = cfg.format.empty() ? "plain" : cfg.format;
  if (!a.replay.empty()) {
    auto doc = io::read_json_file(a.replay);
    // accept the whole output of `reduce --certificate --format json`
    if (doc.is_object() && doc.contains("certificate")) doc = doc.at("certificate");
    auto cert = io::certificate_from_json(doc);
    words::verify_certificate(cert);
    if (fmt == "json") {
      out << dump(Json{{"verified", true}, {"input", io::to_json(cert.input)}, {"result", io::to_json(cert.result)}});
    } else {
      out << "certificate verified: " << word_text(cert.input) << " = " << letters(cert.result) << "\n";
    }
    return 0;
  }
  words::CyclicWord w;
  if (!a.file.empty()) {
    w = io::word_from_json(io::read_json_file(a.file));
  } else {
    if (a.order == 0 || a.indices.empty()) {
      throw Error("ParseError", "reduce needs a word file or --order with --indices", ErrorClass::Input);
    }
    w = words::validate_word(a.order, parse_int_list(a.indices, "--indices"));
  }
  const words::Reduction r = words::reduce(w);
  words::verify_certificate(r.certificate);
  if (fmt == "json") {
    Json j;
    j["word"] = io::to_json(w);
    j["coefficients"] = io::to_json(r.coefficients);
    if (a.certificate) j["certificate"] = io::to_json(r.certificate);
    out << dump(j);
    return 0;
  }
  out << letters(r.coefficients) << "\n";
  if (a.certificate) {
    const bool md = fmt == "markdown";
    std::size_t k = 0;
    for (const auto& s : r.certificate.steps) {
      out << (md ? "- " : "  ") << "step " << ++k << ": 2 " << word_text(s.word) << " = " << word_text(s.w1) << " + "
          << word_text(s.w2) << "  (cut " << s.cut << ")\n";
    }
    for (const auto& c : r.certificate.solved_cycles) {
      out << (md ? "- " : "  ") << "cycle at " << word_text(c.word) << ": x = e + " << to_string(c.self_coefficient)
          << " x, solved to " << letters(c.value) << "\n";
    }
    out << (md ? "- " : "  ") << "verified: " << r.certificate.steps.size() << " steps, "
        << r.certificate.solved_cycles.size() << " cycles\n";
  }
  return 0;
}

// ---- replicate ----

int cmd_replicate(const std::string& file, const std::string& schedule, const std::string& order, const Config& cfg,
                  std::ostream& out) {
  const auto t = io::template_from_json(io::read_json_file(file));
  pieces::ReplicantSchedule s;
  s.indices = parse_int_list(schedule, "--schedule");
  if (!order.empty()) s.order = parse_int_list(order, "--order");
  const auto c = pieces::replicate(t, s);
  const std::string fmt = cfg.format.empty() ? "json" : cfg.format;
  if (fmt == "json") {
    out << dump(io::to_json(c));
  } else {
    const auto cc = pieces::count_components(c);
    out << "copies: " << c.copies().size() << ", gluings: " << c.gluings().size() << ", free slots: "
        << c.free_slot_count() << ", components: " << cc.closed << " closed, " << cc.open << " open\n";
  }
  return 0;
}

// ---- bound / report ----

std::string render(const bounds::BoundReport& r, const std::string& fmt, int precision) {
  if (fmt == "json") return dump(io::to_json(r, precision));
  if (fmt == "markdown") return io::render_markdown(r, precision);
  return io::render_plain(r, precision);
}

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome bound_one(const fs::path& path, const bounds::VolumeDB& db, std::optional<int> twist, const std::string& fmt,
                  int precision) {
  Outcome o;
  try {
    auto spec = io::link_spec_from_json(io::read_json_file(path));
    if (twist) spec.twist_number = twist;
    o.out = render(bounds::lower_bound(spec, db), fmt, precision);
  } catch (const Error& e) {
    o.code = static_cast<int>(e.error_class());
    o.err = "error: " + e.name() + ": " + e.what() + "\n";
  }
  return o;
}

std::optional<int> parse_compare(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text.rfind("t=", 0) != 0) throw Error("ParseError", "--compare expects t=<twist number>", ErrorClass::Input);
  const auto v = parse_int_list(text.substr(2), "--compare");
  if (v.size() != 1) throw Error("ParseError", "--compare expects a single twist number", ErrorClass::Input);
  if (v[0] < 2) {
    throw bounds::BoundsError(bounds::Errc::BadTwistNumber, "twist number must be at least 2, got " + std::to_string(v[0]));
  }
  return v[0];
}

int cmd_bound(const std::string& target, const std::string& compare, int jobs, const std::string& default_fmt,
              const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto twist = parse_compare(compare);
  const auto db = load_db(cfg);
  const std::string fmt = cfg.format.empty() ? default_fmt : cfg.format;
  if (!fs::is_directory(target)) {
    Outcome o = bound_one(target, db, twist, fmt, cfg.precision);
    out << o.out;
    err << o.err;
    return o.code;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(target)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Outcome> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) results[i] = bound_one(files[i], db, twist, fmt, cfg.precision);
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int code = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    out << "== " << files[i].filename().string() << " ==\n" << results[i].out;
    if (!results[i].err.empty()) out << results[i].err;
    code = std::max(code, results[i].code);
  }
  return code;
}

// ---- classify ----

int cmd_classify(const std::string& text, const std::string& file, const Config& cfg, std::ostream& out) {
  arborescent::ArbExpr e;
  if (!file.empty()) {
    e = io::expression_from_json(io::read_json_file(file));
  } else if (!text.empty() && text.front() == '{') {
    e = io::expression_from_json(io::parse_json(text, "expression"));
  } else if (!text.empty()) {
    e = arborescent::parse_expression(text);
  } else {
    throw Error("ParseError", "classify needs an expression or --file", ErrorClass::Input);
  }
  const auto c = arborescent::classify(e);
  const std::string fmt = cfg.format.empty() ? "plain" : cfg.format;
  if (fmt == "json") {
    Json j = io::to_json(c);
    j["expression"] = arborescent::to_string(e);
    out << dump(j);
    return 0;
  }
  out << arborescent::to_string(c.verdict) << "\n";
  for (const auto& r : c.reasons) {
    out << (fmt == "markdown" ? "- " : "  ") << r.rule << ": " << r.detail;
    if (!r.citation.empty()) out << " [" << r.citation << "]";
    out << "\n";
  }
  return 0;
}

// ---- graph ----

int cmd_graph_validate(const std::string& file, const Config& cfg, std::ostream& out) {
  const auto j = io::read_json_file(file);
  const auto g = io::reflection_graph_from_json(j);
  const auto r = graphs::validate_reflection_graph(g);
  if (cfg.format == "json") {
    out << dump(io::to_json(r));
  } else {
    out << "valid, |G|=" << r.group.elements.size() << ", edge classes: " << r.edge_classes.size() << "\n";
  }
  return 0;
}

int cmd_graph_replicant(const std::string& file, const std::string& tfile, int seed, const std::string& face_order,
                        const Config& cfg, std::ostream& out) {
  const auto g = io::reflection_graph_from_json(io::read_json_file(file));
  const auto t = io::template_from_json(io::read_json_file(tfile));
  std::optional<std::vector<int>> fo;
  if (!face_order.empty()) fo = parse_int_list(face_order, "--face-order");
  const auto r = graphs::g_replicant(g, t, seed, fo);
  if (cfg.format == "plain" || cfg.format == "markdown") {
    const auto cc = pieces::count_components(r.complex);
    out << "copies: " << r.complex.copies().size() << ", gluings: " << r.complex.gluings().size()
        << ", |G|=" << r.group_order << ", components: " << cc.closed << " closed, " << cc.open << " open\n";
  } else {
    out << dump(io::to_json(r.complex));
  }
  return 0;
}

int cmd_graph_product(const std::string& file, const Config& cfg, std::ostream& out) {
  const auto g = io::reflection_graph_from_json(io::read_json_file(file));
  const auto p = graphs::product_p1(g);
  if (cfg.format == "plain" || cfg.format == "markdown") {
    const auto r = graphs::validate_reflection_graph(p);
    out << "vertices: " << p.graph.vertex_count << ", edges: " << p.graph.edges.size() << ", valence: " << r.valence
        << ", |G|=" << r.group.elements.size() << ", edge classes: " << r.edge_classes.size() << "\n";
  } else {
    out << dump(io::to_json(p));
  }
  return 0;
}

int cmd_graph_faces(const std::string& file, int bigon_n, const Config& cfg, std::ostream& out) {
  const auto j = io::read_json_file(file);
  const auto g = io::reflection_graph_from_json(j);
  const auto rot = io::rotation_from_json(j);
  if (!rot) throw graphs::GraphError(graphs::Errc::IncompleteRotation, "graph file has no \"rotation\"");
  const std::string fmt = cfg.format.empty() ? "plain" : cfg.format;
  Json rep;
  std::ostringstream plain;
  const auto faces = graphs::trace_faces(g.graph, *rot);
  rep["faces"] = io::to_json(faces);
  plain << "faces: " << faces.face_count << ", euler characteristic: " << faces.euler_characteristic << ", face vector:";
  for (const auto& [len, n] : faces.face_vector) plain << " " << len << "x" << n;
  plain << "\n";
  if (bigon_n > 0) {
    const auto b = graphs::bigon_bound_check(g.graph, *rot, bigon_n);
    rep["bigon_check"] = {{"pass", b.pass}, {"f2", b.f2}, {"required", b.required}, {"identity", to_string(b.identity_lhs)}};
    plain << "bigon check: " << (b.pass ? "pass" : "fail") << ", f2 = " << b.f2 << " (required " << b.required << ")\n";
  } else {
    const auto t = graphs::torus_boundary_check(g.graph, *rot);
    rep["torus_check"] = {{"verdict", graphs::to_string(t.verdict)}, {"detail", t.detail}};
    plain << "torus check: " << graphs::to_string(t.verdict);
    if (!t.detail.empty()) plain << " (" << t.detail << ")";
    plain << "\n";
  }
  out << (fmt == "json" ? dump(rep) : plain.str());
  return 0;
}

// ---- db ----

struct DbQueryArgs {
  std::string family = "reciprocal-saucer";
  std::string conway;
  std::string ambient = "S3";
  std::string signature;
  std::string orientation = "standard";
};

bounds::DbKey key_of(const DbQueryArgs& a) {
  bounds::DbKey k;
  auto f = bounds::parse_family(a.family);
  if (!f) throw Error("ParseError", "unknown family \"" + a.family + "\"", ErrorClass::Input);
  auto amb = parse_ambient(a.ambient);
  if (!amb) throw Error("ParseError", "unknown ambient \"" + a.ambient + "\"", ErrorClass::Input);
  k.family = *f;
  k.conway = a.conway;
  k.ambient = *amb;
  k.signature = parse_int_list(a.signature, "--signature");
  k.orientation = a.orientation;
  return k;
}

int cmd_db_query(const DbQueryArgs& a, bool certify, const Config& cfg, std::ostream& out) {
  const auto db = load_db(cfg);
  const auto key = key_of(a);
  const std::string fmt = cfg.format.empty() ? "plain" : cfg.format;
  if (certify) {
    bounds::TangleRef t;
    t.family = key.family;
    t.conway = key.conway;
    t.ambient = key.ambient;
    t.orientation = key.orientation;
    const auto c = bounds::certify_hyperbolic(db, t, key.signature);
    if (fmt == "json") {
      out << dump(io::to_json(c));
    } else {
      out << (c.certified ? "certified" : "unknown") << ": " << t.label() << " at " << bounds::signature_string(key.signature);
      if (c.basis) out << " via " << bounds::to_string(*c.basis);
      out << "\n";
      for (const auto& r : c.chain) out << "  " << r.rule << ": " << r.detail << "\n";
      for (const auto& s : c.counterevidence) out << "  counterevidence: " << s << "\n";
    }
    return 0;
  }
  const auto r = bounds::db_query(db, key);
  const bool marker = r.status == bounds::QueryStatus::NonHyperbolic;
  if (fmt == "json") {
    Json j;
    j["key"] = bounds::key_string(r.entry->key);
    j["status"] = marker ? "non-hyperbolic" : "volume";
    j["volume"] = r.entry->printed;
    j["source"] = r.entry->source;
    j["via_symmetry"] = r.via_symmetry;
    out << dump(j);
  } else if (marker) {
    out << "non-hyperbolic marker (" << r.entry->source << ": recorded as 0)\n";
  } else {
    out << r.entry->printed << " (" << r.entry->source << (r.via_symmetry ? ", by symmetry" : "") << ")\n";
  }
  return 0;
}

int cmd_db_check(const Config& cfg, std::ostream& out) {
  const auto db = load_db(cfg);
  const auto v = bounds::limit_check(db);
  const auto m = bounds::data_monotonicity_check(db);
  if (cfg.format == "json") {
    Json j;
    Json lv = Json::array();
    for (const auto& x : v) lv.push_back({{"what", x.what}, {"detail", x.detail}});
    Json mv = Json::array();
    for (const auto& x : m) mv.push_back({{"what", x.what}, {"detail", x.detail}});
    j["limit_violations"] = std::move(lv);
    j["data_check_not_theorem"] = std::move(mv);
    out << dump(j);
  } else {
    if (v.empty()) out << "no violations\n";
    for (const auto& x : v) out << "violation: " << x.what << ": " << x.detail << "\n";
    if (m.empty()) {
      out << "data check (not a theorem): reciprocal-saucer columns strictly increase in m\n";
    }
    for (const auto& x : m) out << "data check (not a theorem): " << x.detail << "\n";
  }
  return v.empty() ? 0 : 3;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"replivol: cyclic-word reduction, replicants, tangle classification and volume lower bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--db", cfg.db_path, "volume database JSON (default: embedded tables; env RV_DB)");
  app.add_option("--precision", cfg.precision, "decimal places")->check(CLI::Range(1, 12));
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "markdown", "plain"}));

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "reduce a cyclic word to the single-letter basis");
  reduce->add_option("file", ra.file, "word JSON");
  reduce->add_option("--order", ra.order, "word order 2m");
  reduce->add_option("--indices", ra.indices, "comma-separated letter indices");
  reduce->add_flag("--certificate", ra.certificate, "print the relation chain");
  reduce->add_option("--replay", ra.replay, "verify a certificate JSON");

  std::string rep_file, rep_schedule, rep_order;
  auto* replicate = app.add_subcommand("replicate", "build the multi-index replicant of a piece");
  replicate->add_option("template", rep_file, "template JSON")->required();
  replicate->add_option("--schedule", rep_schedule, "indices 2m_1,...,2m_l")->required();
  replicate->add_option("--order", rep_order, "order in which the face pairs are replicated (1-based)");

  std::string bound_target, compare;
  int jobs = 1;
  auto* bound = app.add_subcommand("bound", "volume lower bound for a link spec (or a directory of specs)");
  bound->add_option("spec", bound_target, "link-spec JSON or directory")->required();
  bound->add_option("--compare", compare, "classical comparison, t=<twist number>");
  bound->add_option("--jobs", jobs, "parallel workers for a directory")->check(CLI::Range(1, 256));

  std::string report_target, report_compare;
  auto* report = app.add_subcommand("report", "render a bound report (markdown by default)");
  report->add_option("spec", report_target, "link-spec JSON")->required();
  report->add_option("--compare", report_compare, "classical comparison, t=<twist number>");

  std::string expr_text, expr_file;
  auto* classify = app.add_subcommand("classify", "classify an arborescent tangle");
  classify->add_option("expression", expr_text, "e.g. \"sum(rat(2 1), rat(2 1))\"");
  classify->add_option("--file", expr_file, "expression JSON");

  auto* graph = app.add_subcommand("graph", "reflection graphs");
  graph->require_subcommand(1);
  std::string g_file, g_template, g_face_order;
  int g_seed = 0, g_bigon = 0;
  auto* g_validate = graph->add_subcommand("validate", "check the reflection-graph axioms");
  g_validate->add_option("graph", g_file)->required();
  auto* g_rep = graph->add_subcommand("replicant", "place a piece at every vertex and glue along edges");
  g_rep->add_option("graph", g_file)->required();
  g_rep->add_option("template", g_template)->required();
  g_rep->add_option("--seed", g_seed, "seed vertex");
  g_rep->add_option("--face-order", g_face_order, "face slot per edge class");
  auto* g_prod = graph->add_subcommand("product", "G x P_1");
  g_prod->add_option("graph", g_file)->required();
  auto* g_faces = graph->add_subcommand("faces", "trace faces of the rotation system; torus check or bigon bound");
  g_faces->add_option("graph", g_file)->required();
  g_faces->add_option("--bigon", g_bigon, "run the bigon bound check for n")->check(CLI::PositiveNumber);

  auto* db = app.add_subcommand("db", "volume database");
  db->require_subcommand(1);
  DbQueryArgs qa;
  bool certify = false;
  auto* db_query = db->add_subcommand("query", "look up a volume");
  db_query->add_option("--family", qa.family)->check(
      CLI::IsMember({"rational-square", "integer-cylindrical", "reciprocal-saucer", "custom"}));
  db_query->add_option("--conway", qa.conway)->required();
  db_query->add_option("--ambient", qa.ambient)->check(CLI::IsMember({"TxI", "SolidTorus", "S3", "S2xS1"}));
  db_query->add_option("--signature", qa.signature)->required();
  db_query->add_option("--orientation", qa.orientation);
  db_query->add_flag("--certify", certify, "certify hyperbolicity instead of reading the entry");
  auto* db_check = db->add_subcommand("check", "limit check and data monotonicity check");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return 2;
  }

  try {
    if (reduce->parsed()) return cmd_reduce(ra, cfg, out);
    if (replicate->parsed()) return cmd_replicate(rep_file, rep_schedule, rep_order, cfg, out);
    if (bound->parsed()) return cmd_bound(bound_target, compare, jobs, "plain", cfg, out, err);
    if (report->parsed()) return cmd_bound(report_target, report_compare, 1, "markdown", cfg, out, err);
    if (classify->parsed()) return cmd_classify(expr_text, expr_file, cfg, out);
    if (g_validate->parsed()) return cmd_graph_validate(g_file, cfg, out);
    if (g_rep->parsed()) return cmd_graph_replicant(g_file, g_template, g_seed, g_face_order, cfg, out);
    if (g_prod->parsed()) return cmd_graph_product(g_file, cfg, out);
    if (g_faces->parsed()) return cmd_graph_faces(g_file, g_bigon, cfg, out);
    if (db_query->parsed()) return cmd_db_query(qa, certify, cfg, out);
    if (db_check->parsed()) return cmd_db_check(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 4;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace replivol::cli
