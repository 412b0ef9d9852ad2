#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "replivol/bounds.hpp"
#include "replivol/graphs.hpp"
#include "replivol/io.hpp"
#include "replivol/pieces.hpp"
#include "graph_fixtures.hpp"


using namespace replivol;
using namespace replivol::graphs;
using namespace testsupport;

namespace {

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const GraphError& e) {
    return e.code();
  }
  FAIL("no GraphError thrown");
  return Errc::BadGraph;
}

pieces::PieceTemplate square(const std::string& conway) {
  bounds::TangleRef t;
  t.family = bounds::Family::RationalSquare;
  t.conway = conway;
  return *bounds::family_template(t);
}

}  // namespace

TEST_CASE("C6 validates with two edge orbits") {
  const auto r = validate_reflection_graph(cycle_graph(6));
  CHECK(r.valence == 2);
  CHECK(r.group.elements.size() == 6);
  REQUIRE(r.edge_classes.size() == 2);
  CHECK(r.edge_classes[0] == std::vector<int>{0, 2, 4});
  CHECK(r.edge_classes[1] == std::vector<int>{1, 3, 5});
}

TEST_CASE("C6 from the shipped graph file") {
  const auto g = io::reflection_graph_from_json(io::read_json_file(RV_DATA_DIR "/graphs/c6.json"));
  const auto r = validate_reflection_graph(g);
  CHECK(r.group.elements.size() == 6);
  CHECK(r.edge_classes.size() == 2);
}

TEST_CASE("products with P1") {
  const auto prism = product_p1(cycle_graph(6));
  CHECK(prism.graph.vertex_count == 12);
  CHECK(prism.graph.edges.size() == 18);
  const auto r = validate_reflection_graph(prism);
  CHECK(r.valence == 3);
  CHECK(r.group.elements.size() == 12);
  CHECK(r.edge_classes.size() == 3);
  const auto hyper = product_p1(prism);
  CHECK(hyper.graph.vertex_count == 24);
  const auto r2 = validate_reflection_graph(hyper);
  CHECK(r2.valence == 4);
  CHECK(r2.edge_classes.size() == 4);
  CHECK(isomorphic(hyper.graph, torus_lattice_graph(6, 4).graph));
  CHECK_FALSE(isomorphic(prism.graph, torus_lattice_graph(6, 4).graph));
  auto no_sym = cycle_graph(6);
  no_sym.ambient_symmetry = false;
  CHECK(error_of([&] { product_p1(no_sym); }) == Errc::NotValidated);
}

TEST_CASE("graph isomorphism") {
  CHECK(isomorphic(cycle_graph(8).graph, cycle_graph(8).graph));
  Graph two_squares;
  two_squares.vertex_count = 8;
  for (int i = 0; i < 4; ++i) {
    two_squares.edges.emplace_back(i, (i + 1) % 4);
    two_squares.edges.emplace_back(4 + i, 4 + (i + 1) % 4);
  }
  CHECK_FALSE(isomorphic(cycle_graph(8).graph, two_squares));
  Graph relabelled = cycle_graph(6).graph;
  for (auto& [a, b] : relabelled.edges) {
    a = (a * 5) % 6;
    b = (b * 5) % 6;
  }
  CHECK(isomorphic(relabelled, cycle_graph(6).graph));
}

TEST_CASE("validation failures") {
  Graph two_squares;
  two_squares.vertex_count = 8;
  for (int i = 0; i < 4; ++i) {
    two_squares.edges.emplace_back(i, (i + 1) % 4);
    two_squares.edges.emplace_back(4 + i, 4 + (i + 1) % 4);
  }
  CHECK(error_of([&] { validate_reflection_graph({two_squares, {}, {}, Ambient::S3, false}); }) == Errc::NotConnected);
  auto path = cycle_graph(6);
  path.graph.edges.pop_back();
  CHECK(error_of([&] { validate_reflection_graph(path); }) == Errc::NotRegular);
  CHECK(error_of([&] { validate_reflection_graph(cycle_graph(5)); }) == Errc::NotBipartite);
  auto bad = cycle_graph(6);
  bad.reflections[0].perm = {1, 2, 3, 4, 5, 0};
  CHECK(error_of([&] { validate_reflection_graph(bad); }) == Errc::BadReflection);
  auto missing = cycle_graph(6);
  missing.reflections.resize(1);
  CHECK(error_of([&] { validate_reflection_graph(missing); }) == Errc::BadReflection);
  Graph loop;
  loop.vertex_count = 1;
  loop.edges = {{0, 0}};
  CHECK(error_of([&] { validate_reflection_graph({loop, {}, {}, Ambient::S3, false}); }) == Errc::BadGraph);
}

TEST_CASE("G-replicant of the 4x4 lattice equals the (4,4)-replicant") {
  const auto g = torus_lattice_graph(4, 4);
  const auto t = square("2");
  const auto gr = g_replicant(g, t, 0, std::vector<int>{1, 3, 2, 0});
  CHECK(gr.complex.copies().size() == 16);
  CHECK(gr.complex.fully_glued());
  const auto iso = pieces::isomorphic(gr.complex, pieces::replicate(t, {{4, 4}, {}}));
  CHECK_MESSAGE(iso.isomorphic, iso.reason);
  CHECK(error_of([&] { g_replicant(g, t, 0, std::vector<int>{0, 0, 1, 2}); }) == Errc::ValenceMismatch);
  bounds::TangleRef saucer;
  saucer.conway = "1/3";
  CHECK(error_of([&] { g_replicant(g, *bounds::family_template(saucer), 0); }) == Errc::ValenceMismatch);
  CHECK(error_of([&] { g_replicant(cycle_graph(5), t, 0); }) == Errc::NotValidated);
}

TEST_CASE("G-replicant of C6 is a 6-cycle of saucers") {
  bounds::TangleRef saucer;
  saucer.conway = "1/3";
  const auto t = *bounds::family_template(saucer);
  const auto gr = g_replicant(cycle_graph(6), t, 0);
  CHECK(gr.group_order == 6);
  CHECK(pieces::isomorphic(gr.complex, pieces::replicate(t, {{6}, {}})).isomorphic);
}

TEST_CASE("bigon bound on dipoles") {
  for (int n = 1; n <= 3; ++n) {
    const auto [g, r] = dipole(2 * (n + 1), true);
    const auto b = bigon_bound_check(g, r, n);
    CHECK(b.pass);
    CHECK(b.f2 == 2 * (n + 1));
    CHECK(b.required == 2 * (n + 1));
    CHECK(b.identity_lhs == 2);
    CHECK(b.faces.euler_characteristic == 2);
  }
  const auto [g4, r4] = dipole(4, true);
  const auto f = trace_faces(g4, r4);
  CHECK(f.face_count == 4);
  CHECK(f.face_vector == std::map<int, int>{{2, 4}});
  CHECK(error_of([&] { bigon_bound_check(g4, r4, 2); }) == Errc::WrongValence);
  const auto [gt, rt] = dipole(4, false);
  CHECK(error_of([&] { bigon_bound_check(gt, rt, 1); }) == Errc::NotSphere);
}

TEST_CASE("torus boundary checks") {
  const auto [g, r] = grid_torus(2, 2);
  const auto ok = torus_boundary_check(g, r);
  CHECK(ok.verdict == TorusVerdict::CompatibleSquares);
  CHECK(ok.faces.face_vector == std::map<int, int>{{4, 4}});
  CHECK(ok.faces.euler_characteristic == 0);
  const auto [g4, r4] = grid_torus(4, 6);
  CHECK(torus_boundary_check(g4, r4).verdict == TorusVerdict::CompatibleSquares);

  Graph two;
  two.vertex_count = 2;
  two.edges = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
  RotationSystem bigon{{{0, 1, 2, 3}, {0, 1, 3, 2}}};
  const auto bf = torus_boundary_check(two, bigon);
  CHECK(bf.faces.face_vector == std::map<int, int>{{2, 1}, {6, 1}});
  CHECK(bf.faces.euler_characteristic == 0);
  CHECK(bf.verdict == TorusVerdict::BigonFace);

  const auto [gt, rt] = triangulated_torus();
  const auto odd = torus_boundary_check(gt, rt);
  CHECK(odd.faces.euler_characteristic == 0);
  CHECK(odd.verdict == TorusVerdict::OddCycle);

  const auto [gs, rs] = dipole(4, true);
  CHECK(torus_boundary_check(gs, rs).verdict == TorusVerdict::NotTorus);
}

TEST_CASE("rotation errors and positions") {
  const auto [g, r] = grid_torus(2, 2);
  RotationSystem short_rot{{r.order[0]}};
  CHECK(error_of([&] { trace_faces(g, short_rot); }) == Errc::IncompleteRotation);
  RotationSystem wrong = r;
  wrong.order[0][0] = 7;
  CHECK(error_of([&] { trace_faces(g, wrong); }) == Errc::IncompleteRotation);
  // a square drawn in the plane: two faces of length 4
  const auto c4 = cycle_graph(4).graph;
  const auto rot = rotation_from_positions(c4, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto f = trace_faces(c4, rot);
  CHECK(f.face_vector == std::map<int, int>{{4, 2}});
  CHECK(f.euler_characteristic == 2);
}

TEST_CASE("graph JSON round trip") {
  const auto g = product_p1(cycle_graph(6));
  const auto back = io::reflection_graph_from_json(io::parse_json(io::to_json(g).dump()));
  CHECK(io::to_json(back).dump() == io::to_json(g).dump());
  CHECK(validate_reflection_graph(back).group.elements.size() == 12);
}
