#pragma once

#include "replivol/ambient.hpp"
#include "replivol/error.hpp"
#include "replivol/pieces.hpp"
#include "replivol/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace replivol::graphs {

enum class Errc {
  BadGraph,
  NotConnected,
  NotRegular,
  NotBipartite,
  BadReflection,
  VertexStabilizerNontrivial,
  GroupTooLarge,
  WrongEdgeClassCount,
  ValenceMismatch,
  NotValidated,
  IncompleteRotation,
  WrongValence,
  NotSphere,
};
const char* to_string(Errc code);

class GraphError : public Error {
 public:
  GraphError(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Undirected multigraph; loops are not allowed.
struct Graph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;

  int degree(int v) const;
  /// Incident edge ids per vertex, in edge order.
  std::vector<std::vector<int>> incidence() const;
};

struct Reflection {
  std::vector<int> perm;        // vertex permutation
  std::vector<int> swaps;       // edges whose endpoints this reflection exchanges
  std::vector<int> edge_perm;   // optional explicit action on edges (needed for parallel edges)
};

struct ReflectionGraph {
  Graph graph;
  std::vector<int> part;  // 0 = U, 1 = V; empty means derive a 2-colouring
  std::vector<Reflection> reflections;
  Ambient ambient = Ambient::S3;
  bool ambient_symmetry = false;  // the graph is invariant under an ambient reflection (needed by product_p1)
};

struct ReflectionGroup {
  std::vector<std::vector<int>> generators;
  std::vector<std::vector<int>> elements;  // vertex permutations, identity first
};

struct ValidationReport {
  int valence = 0;
  std::vector<int> part;
  ReflectionGroup group;
  std::vector<std::vector<int>> edge_classes;  // sorted edge ids per class
  std::vector<int> edge_class_of;
  std::vector<std::vector<int>> edge_actions;  // edge permutation per generator
};

inline constexpr std::size_t kGroupCap = 1000000;

/// Verifies the reflection-graph axioms. Throws GraphError naming the first
/// violated condition.
ValidationReport validate_reflection_graph(const ReflectionGraph& g, std::size_t group_cap = kGroupCap);

struct GReplicant {
  pieces::GluingComplex complex;
  std::size_t group_order = 0;
};

/// Places a copy of `t` at every vertex and glues along every edge. The face
/// of a vertex used for an edge is the edge's class; `face_order` optionally
/// maps class index -> face slot. Edge gluings use the identity on labels.
GReplicant g_replicant(const ReflectionGraph& g, const pieces::PieceTemplate& t, int seed_vertex,
                       const std::optional<std::vector<int>>& face_order = std::nullopt);

/// G x P_1: two layers, a vertical edge per vertex, reflections extended to
/// both layers and the layer swap added.
ReflectionGraph product_p1(const ReflectionGraph& g);

bool isomorphic(const Graph& a, const Graph& b);

/// Cyclic order of incident edge ids at each vertex. A loop-free multigraph
/// is assumed, so an edge id determines the edge-end at a vertex.
struct RotationSystem {
  std::vector<std::vector<int>> order;
};

struct FaceReport {
  std::vector<std::vector<int>> faces;   // darts as (edge, from-vertex) flattened to edge ids
  std::map<int, int> face_vector;        // boundary length -> count
  int vertices = 0;
  int edges = 0;
  int face_count = 0;
  int euler_characteristic = 0;
  bool has_odd_face = false;
  bool bipartite = false;
};

/// Traces faces: from the dart leaving u along e and arriving at v, the next
/// dart leaves v along the edge after e in v's cyclic order.
FaceReport trace_faces(const Graph& g, const RotationSystem& rot);

struct BigonCheck {
  bool pass = false;
  int f2 = 0;
  int required = 0;
  Rational identity_lhs;  // sum over lengths L of f_L (1 - n L / (2(n+1)))
  FaceReport faces;
};

BigonCheck bigon_bound_check(const Graph& g, const RotationSystem& rot, int n);

enum class TorusVerdict { CompatibleSquares, NotTorus, NotConnected, OddCycle, BigonFace, WrongValence, NonSquareFace };
const char* to_string(TorusVerdict v);

struct TorusCheck {
  TorusVerdict verdict = TorusVerdict::CompatibleSquares;
  std::string detail;
  FaceReport faces;
};

TorusCheck torus_boundary_check(const Graph& g, const RotationSystem& rot);

/// Rotation system read off vertex positions in the plane: incident edges
/// sorted by angle (counter-clockwise). Multi-edges are not supported.
RotationSystem rotation_from_positions(const Graph& g, const std::vector<std::pair<double, double>>& xy);

// Fixture graphs.
ReflectionGraph cycle_graph(int n);
/// a x b torus grid (a, b even >= 4), vertex (i,j) = i*b + j, with the row and
/// column reflections i -> c - i, j -> c - j for odd c.
ReflectionGraph torus_lattice_graph(int a, int b);

}  // namespace replivol::graphs
