#include "replivol/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_set>

namespace replivol::graphs {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::BadGraph: return "BadGraph";
    case Errc::NotConnected: return "NotConnected";
    case Errc::NotRegular: return "NotRegular";
    case Errc::NotBipartite: return "NotBipartite";
    case Errc::BadReflection: return "BadReflection";
    case Errc::VertexStabilizerNontrivial: return "VertexStabilizerNontrivial";
    case Errc::GroupTooLarge: return "GroupTooLarge";
    case Errc::WrongEdgeClassCount: return "WrongEdgeClassCount";
    case Errc::ValenceMismatch: return "ValenceMismatch";
    case Errc::NotValidated: return "NotValidated";
    case Errc::IncompleteRotation: return "IncompleteRotation";
    case Errc::WrongValence: return "WrongValence";
    case Errc::NotSphere: return "NotSphere";
  }
  return "GraphError";
}

GraphError::GraphError(Errc code, const std::string& message)
    : Error(graphs::to_string(code), message,
            code == Errc::GroupTooLarge ? ErrorClass::Domain : ErrorClass::Input),
      code_(code) {}

int Graph::degree(int v) const {
  int d = 0;
  for (const auto& [a, b] : edges) d += (a == v) + (b == v);
  return d;
}

std::vector<std::vector<int>> Graph::incidence() const {
  std::vector<std::vector<int>> inc(static_cast<std::size_t>(vertex_count));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    inc[static_cast<std::size_t>(edges[e].first)].push_back(static_cast<int>(e));
    inc[static_cast<std::size_t>(edges[e].second)].push_back(static_cast<int>(e));
  }
  return inc;
}

namespace {

void check_graph(const Graph& g) {
  if (g.vertex_count <= 0) throw GraphError(Errc::BadGraph, "graph has no vertices");
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [a, b] = g.edges[e];
    if (a < 0 || b < 0 || a >= g.vertex_count || b >= g.vertex_count) {
      throw GraphError(Errc::BadGraph, "edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (a == b) throw GraphError(Errc::BadGraph, "edge " + std::to_string(e) + " is a loop");
  }
}

bool connected(const Graph& g) {
  if (g.vertex_count == 0) return true;
  const auto inc = g.incidence();
  std::vector<bool> seen(static_cast<std::size_t>(g.vertex_count), false);
  std::deque<int> q{0};
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int e : inc[static_cast<std::size_t>(v)]) {
      const int w = g.edges[static_cast<std::size_t>(e)].first == v ? g.edges[static_cast<std::size_t>(e)].second
                                                                    : g.edges[static_cast<std::size_t>(e)].first;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == g.vertex_count;
}

std::optional<std::vector<int>> two_colouring(const Graph& g) {
  const auto inc = g.incidence();
  std::vector<int> col(static_cast<std::size_t>(g.vertex_count), -1);
  for (int s = 0; s < g.vertex_count; ++s) {
    if (col[static_cast<std::size_t>(s)] >= 0) continue;
    col[static_cast<std::size_t>(s)] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (int e : inc[static_cast<std::size_t>(v)]) {
        const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
        const int w = a == v ? b : a;
        if (col[static_cast<std::size_t>(w)] < 0) {
          col[static_cast<std::size_t>(w)] = 1 - col[static_cast<std::size_t>(v)];
          q.push_back(w);
        } else if (col[static_cast<std::size_t>(w)] == col[static_cast<std::size_t>(v)]) {
          return std::nullopt;
        }
      }
    }
  }
  return col;
}

std::pair<int, int> key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

// Edge action of a vertex permutation. Parallel edges are matched in edge order
// unless an explicit edge permutation is supplied.
std::vector<int> edge_action(const Graph& g, const Reflection& r, std::size_t which) {
  const std::size_t m = g.edges.size();
  if (!r.edge_perm.empty()) {
    if (r.edge_perm.size() != m) {
      throw GraphError(Errc::BadReflection, "reflection " + std::to_string(which) + " edge permutation has the wrong length");
    }
    std::vector<bool> hit(m, false);
    for (std::size_t e = 0; e < m; ++e) {
      const int f = r.edge_perm[e];
      if (f < 0 || static_cast<std::size_t>(f) >= m || hit[static_cast<std::size_t>(f)]) {
        throw GraphError(Errc::BadReflection, "reflection " + std::to_string(which) + " edge permutation is not a bijection");
      }
      hit[static_cast<std::size_t>(f)] = true;
      const auto [a, b] = g.edges[e];
      const auto [c, d] = g.edges[static_cast<std::size_t>(f)];
      if (key(r.perm[static_cast<std::size_t>(a)], r.perm[static_cast<std::size_t>(b)]) != key(c, d)) {
        throw GraphError(Errc::BadReflection, "reflection " + std::to_string(which) + " sends edge " + std::to_string(e) +
                                                  " to an edge with other endpoints");
      }
    }
    return r.edge_perm;
  }
  std::map<std::pair<int, int>, std::vector<int>> by_ends;
  for (std::size_t e = 0; e < m; ++e) by_ends[key(g.edges[e].first, g.edges[e].second)].push_back(static_cast<int>(e));
  std::vector<int> out(m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto [a, b] = g.edges[e];
    const auto src = key(a, b);
    const auto dst = key(r.perm[static_cast<std::size_t>(a)], r.perm[static_cast<std::size_t>(b)]);
    auto it = by_ends.find(dst);
    const auto& from = by_ends.at(src);
    if (it == by_ends.end() || it->second.size() != from.size()) {
      throw GraphError(Errc::BadReflection, "reflection " + std::to_string(which) + " does not map edge " +
                                                std::to_string(e) + " to an edge");
    }
    const std::size_t k = static_cast<std::size_t>(std::find(from.begin(), from.end(), static_cast<int>(e)) - from.begin());
    out[e] = it->second[k];
  }
  return out;
}

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

ValidationReport validate_reflection_graph(const ReflectionGraph& rg, std::size_t group_cap) {
  const Graph& g = rg.graph;
  check_graph(g);
  const std::size_t n = static_cast<std::size_t>(g.vertex_count);
  ValidationReport rep;

  if (!connected(g)) throw GraphError(Errc::NotConnected, "graph is not connected");

  const int r = g.degree(0);
  for (int v = 1; v < g.vertex_count; ++v) {
    if (g.degree(v) != r) {
      throw GraphError(Errc::NotRegular, "vertex 0 has degree " + std::to_string(r) + " but vertex " + std::to_string(v) +
                                             " has degree " + std::to_string(g.degree(v)));
    }
  }
  rep.valence = r;

  auto colouring = two_colouring(g);
  if (!colouring) throw GraphError(Errc::NotBipartite, "graph contains an odd cycle");
  if (!rg.part.empty()) {
    if (rg.part.size() != n) throw GraphError(Errc::NotBipartite, "bipartition label count differs from vertex count");
    for (const auto& [a, b] : g.edges) {
      if (rg.part[static_cast<std::size_t>(a)] == rg.part[static_cast<std::size_t>(b)]) {
        throw GraphError(Errc::NotBipartite, "edge " + std::to_string(a) + "-" + std::to_string(b) +
                                                 " joins two vertices of the same part");
      }
    }
    rep.part = rg.part;
  } else {
    rep.part = *colouring;
  }

  if (rg.reflections.empty()) throw GraphError(Errc::BadReflection, "no reflections supplied");
  std::vector<bool> edge_swapped(g.edges.size(), false);
  for (std::size_t k = 0; k < rg.reflections.size(); ++k) {
    const Reflection& refl = rg.reflections[k];
    const std::string name = "reflection " + std::to_string(k);
    if (refl.perm.size() != n) throw GraphError(Errc::BadReflection, name + " has the wrong length");
    std::vector<bool> hit(n, false);
    for (int x : refl.perm) {
      if (x < 0 || static_cast<std::size_t>(x) >= n || hit[static_cast<std::size_t>(x)]) {
        throw GraphError(Errc::BadReflection, name + " is not a permutation");
      }
      hit[static_cast<std::size_t>(x)] = true;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (refl.perm[static_cast<std::size_t>(refl.perm[v])] != static_cast<int>(v)) {
        throw GraphError(Errc::BadReflection, name + " is not an involution");
      }
      if (rep.part[static_cast<std::size_t>(refl.perm[v])] == rep.part[v]) {
        throw GraphError(Errc::BadReflection, name + " keeps vertex " + std::to_string(v) + " in its part");
      }
    }
    std::vector<int> act = edge_action(g, refl, k);
    for (std::size_t e = 0; e < act.size(); ++e) {
      if (act[static_cast<std::size_t>(act[e])] != static_cast<int>(e)) {
        throw GraphError(Errc::BadReflection, name + " does not act as an involution on edges");
      }
    }
    auto swaps_edge = [&](int e) {
      const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
      return refl.perm[static_cast<std::size_t>(a)] == b && act[static_cast<std::size_t>(e)] == e;
    };
    if (refl.swaps.empty()) {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (swaps_edge(static_cast<int>(e))) edge_swapped[e] = true;
      }
    } else {
      for (int e : refl.swaps) {
        if (e < 0 || static_cast<std::size_t>(e) >= g.edges.size() || !swaps_edge(e)) {
          throw GraphError(Errc::BadReflection, name + " is tagged with edge " + std::to_string(e) +
                                                    " but does not exchange its endpoints");
        }
        edge_swapped[static_cast<std::size_t>(e)] = true;
      }
    }
    rep.group.generators.push_back(refl.perm);
    rep.edge_actions.push_back(std::move(act));
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!edge_swapped[e]) {
      throw GraphError(Errc::BadReflection, "no reflection exchanges the endpoints of edge " + std::to_string(e));
    }
  }

  // Group closure. The action is transitive (every edge is reversed by a
  // generator in a connected graph), so two elements that agree on vertex 0
  // exhibit a non-trivial stabilizer.
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  std::unordered_set<std::vector<int>, VecHash> seen{identity};
  std::vector<std::vector<int>>& elems = rep.group.elements;
  elems.push_back(identity);
  std::map<int, std::size_t> image_of_zero{{0, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& gen : rep.group.generators) {
      std::vector<int> prod(n);
      for (std::size_t v = 0; v < n; ++v) prod[v] = gen[static_cast<std::size_t>(elems[head][v])];
      if (seen.count(prod)) continue;
      if (elems.size() >= group_cap) {
        throw GraphError(Errc::GroupTooLarge, "reflection group exceeds " + std::to_string(group_cap) + " elements");
      }
      auto [it, fresh] = image_of_zero.emplace(prod[0], elems.size());
      if (!fresh) {
        throw GraphError(Errc::VertexStabilizerNontrivial,
                         "two group elements agree on vertex 0; a non-identity element fixes a vertex");
      }
      seen.insert(prod);
      elems.push_back(std::move(prod));
    }
  }
  for (std::size_t k = 1; k < elems.size(); ++k) {
    for (std::size_t v = 0; v < n; ++v) {
      if (elems[k][v] == static_cast<int>(v)) {
        throw GraphError(Errc::VertexStabilizerNontrivial, "a non-identity element fixes vertex " + std::to_string(v));
      }
    }
  }

  // Edge orbits under the generators.
  std::vector<int> parent(g.edges.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]); };
  for (const auto& act : rep.edge_actions) {
    for (std::size_t e = 0; e < act.size(); ++e) {
      const int a = find(static_cast<int>(e));
      const int b = find(act[e]);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  std::map<int, int> class_index;
  rep.edge_class_of.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int root = find(static_cast<int>(e));
    auto [it, fresh] = class_index.emplace(root, static_cast<int>(rep.edge_classes.size()));
    if (fresh) rep.edge_classes.emplace_back();
    rep.edge_classes[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(e));
    rep.edge_class_of[e] = it->second;
  }
  if (static_cast<int>(rep.edge_classes.size()) != r) {
    throw GraphError(Errc::WrongEdgeClassCount, "found " + std::to_string(rep.edge_classes.size()) +
                                                    " edge classes for valence " + std::to_string(r));
  }
  return rep;
}

GReplicant g_replicant(const ReflectionGraph& rg, const pieces::PieceTemplate& t, int seed_vertex,
                       const std::optional<std::vector<int>>& face_order) {
  ValidationReport rep;
  try {
    rep = validate_reflection_graph(rg);
  } catch (const GraphError& e) {
    throw GraphError(Errc::NotValidated, std::string("reflection graph does not validate: ") + e.name() + ": " + e.what());
  }
  const Graph& g = rg.graph;
  if (static_cast<int>(t.faces.size()) != rep.valence) {
    throw GraphError(Errc::ValenceMismatch, "template '" + t.id + "' has " + std::to_string(t.faces.size()) +
                                                " faces but the graph is " + std::to_string(rep.valence) + "-valent");
  }
  if (seed_vertex < 0 || seed_vertex >= g.vertex_count) {
    throw GraphError(Errc::BadGraph, "seed vertex " + std::to_string(seed_vertex) + " out of range");
  }
  std::vector<int> face_of_class(static_cast<std::size_t>(rep.valence));
  std::iota(face_of_class.begin(), face_of_class.end(), 0);
  if (face_order) {
    std::vector<int> sorted = *face_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != face_of_class) {
      throw GraphError(Errc::ValenceMismatch, "face order must be a permutation of the edge classes");
    }
    face_of_class = *face_order;
  }
  const auto inc = g.incidence();
  for (int v = 0; v < g.vertex_count; ++v) {
    std::set<int> classes;
    for (int e : inc[static_cast<std::size_t>(v)]) classes.insert(rep.edge_class_of[static_cast<std::size_t>(e)]);
    if (static_cast<int>(classes.size()) != rep.valence) {
      throw GraphError(Errc::ValenceMismatch, "vertex " + std::to_string(v) + " meets some edge class twice");
    }
  }

  // copies in breadth-first order from the seed
  std::vector<int> copy_of(static_cast<std::size_t>(g.vertex_count), -1);
  std::vector<int> visit{seed_vertex};
  copy_of[static_cast<std::size_t>(seed_vertex)] = 0;
  for (std::size_t h = 0; h < visit.size(); ++h) {
    for (int e : inc[static_cast<std::size_t>(visit[h])]) {
      const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
      const int w = a == visit[h] ? b : a;
      if (copy_of[static_cast<std::size_t>(w)] < 0) {
        copy_of[static_cast<std::size_t>(w)] = static_cast<int>(visit.size());
        visit.push_back(w);
      }
    }
  }
  GReplicant out;
  const std::size_t ti = out.complex.add_template(t);
  for (int v : visit) out.complex.add_copy(ti, {v});
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [a, b] = g.edges[e];
    const int face = face_of_class[static_cast<std::size_t>(rep.edge_class_of[e])];
    out.complex.glue({static_cast<std::size_t>(copy_of[static_cast<std::size_t>(a)]), face},
                     {static_cast<std::size_t>(copy_of[static_cast<std::size_t>(b)]), face});
  }
  out.group_order = rep.group.elements.size();
  return out;
}

ReflectionGraph product_p1(const ReflectionGraph& rg) {
  ValidationReport rep;
  try {
    rep = validate_reflection_graph(rg);
  } catch (const GraphError& e) {
    throw GraphError(Errc::NotValidated, std::string("reflection graph does not validate: ") + e.name() + ": " + e.what());
  }
  if (!rg.ambient_symmetry) {
    throw GraphError(Errc::NotValidated, "product with P_1 needs a declared ambient reflection symmetry");
  }
  const int n = rg.graph.vertex_count;
  const int m = static_cast<int>(rg.graph.edges.size());
  ReflectionGraph out;
  out.ambient = rg.ambient;
  out.ambient_symmetry = rg.ambient_symmetry;
  out.graph.vertex_count = 2 * n;
  for (int l = 0; l < 2; ++l) {
    for (const auto& [a, b] : rg.graph.edges) out.graph.edges.emplace_back(a + l * n, b + l * n);
  }
  for (int v = 0; v < n; ++v) out.graph.edges.emplace_back(v, v + n);
  out.part.resize(static_cast<std::size_t>(2 * n));
  for (int v = 0; v < n; ++v) {
    out.part[static_cast<std::size_t>(v)] = rep.part[static_cast<std::size_t>(v)];
    out.part[static_cast<std::size_t>(v + n)] = 1 - rep.part[static_cast<std::size_t>(v)];
  }
  for (std::size_t k = 0; k < rg.reflections.size(); ++k) {
    const Reflection& r = rg.reflections[k];
    Reflection x;
    x.perm.resize(static_cast<std::size_t>(2 * n));
    for (int v = 0; v < n; ++v) {
      x.perm[static_cast<std::size_t>(v)] = r.perm[static_cast<std::size_t>(v)];
      x.perm[static_cast<std::size_t>(v + n)] = r.perm[static_cast<std::size_t>(v)] + n;
    }
    for (int e : r.swaps) {
      x.swaps.push_back(e);
      x.swaps.push_back(e + m);
    }
    if (!r.edge_perm.empty()) {
      const std::vector<int>& act = rep.edge_actions[k];
      x.edge_perm.resize(static_cast<std::size_t>(2 * m + n));
      for (int e = 0; e < m; ++e) {
        x.edge_perm[static_cast<std::size_t>(e)] = act[static_cast<std::size_t>(e)];
        x.edge_perm[static_cast<std::size_t>(e + m)] = act[static_cast<std::size_t>(e)] + m;
      }
      for (int v = 0; v < n; ++v) x.edge_perm[static_cast<std::size_t>(2 * m + v)] = 2 * m + r.perm[static_cast<std::size_t>(v)];
    }
    out.reflections.push_back(std::move(x));
  }
  Reflection layers;
  layers.perm.resize(static_cast<std::size_t>(2 * n));
  for (int v = 0; v < n; ++v) {
    layers.perm[static_cast<std::size_t>(v)] = v + n;
    layers.perm[static_cast<std::size_t>(v + n)] = v;
    layers.swaps.push_back(2 * m + v);
  }
  if (!out.reflections.empty() && !out.reflections.front().edge_perm.empty()) {
    layers.edge_perm.resize(static_cast<std::size_t>(2 * m + n));
    for (int e = 0; e < m; ++e) {
      layers.edge_perm[static_cast<std::size_t>(e)] = e + m;
      layers.edge_perm[static_cast<std::size_t>(e + m)] = e;
    }
    for (int v = 0; v < n; ++v) layers.edge_perm[static_cast<std::size_t>(2 * m + v)] = 2 * m + v;
  }
  out.reflections.push_back(std::move(layers));
  return out;
}

namespace {

using Multiplicity = std::map<std::pair<int, int>, int>;

Multiplicity multiplicities(const Graph& g) {
  Multiplicity m;
  for (const auto& [a, b] : g.edges) ++m[key(a, b)];
  return m;
}

std::vector<int> refine(const Graph& g) {
  const auto inc = g.incidence();
  std::vector<int> col(static_cast<std::size_t>(g.vertex_count));
  for (int v = 0; v < g.vertex_count; ++v) col[static_cast<std::size_t>(v)] = g.degree(v);
  for (int round = 0; round < g.vertex_count; ++round) {
    std::map<std::pair<int, std::vector<int>>, int> sig_id;
    std::vector<std::pair<int, std::vector<int>>> sigs(static_cast<std::size_t>(g.vertex_count));
    for (int v = 0; v < g.vertex_count; ++v) {
      std::vector<int> nb;
      for (int e : inc[static_cast<std::size_t>(v)]) {
        const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
        nb.push_back(col[static_cast<std::size_t>(a == v ? b : a)]);
      }
      std::sort(nb.begin(), nb.end());
      sigs[static_cast<std::size_t>(v)] = {col[static_cast<std::size_t>(v)], std::move(nb)};
      sig_id.emplace(sigs[static_cast<std::size_t>(v)], 0);
    }
    int next = 0;
    for (auto& [s, id] : sig_id) id = next++;
    std::vector<int> nc(static_cast<std::size_t>(g.vertex_count));
    for (int v = 0; v < g.vertex_count; ++v) nc[static_cast<std::size_t>(v)] = sig_id.at(sigs[static_cast<std::size_t>(v)]);
    const bool stable = std::set<int>(nc.begin(), nc.end()).size() == std::set<int>(col.begin(), col.end()).size();
    col = std::move(nc);
    if (stable) break;
  }
  return col;
}

}  // namespace

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.vertex_count != b.vertex_count || a.edges.size() != b.edges.size()) return false;
  const int n = a.vertex_count;
  // Refine both graphs on their disjoint union so colours are comparable.
  Graph u;
  u.vertex_count = 2 * n;
  u.edges = a.edges;
  for (const auto& [x, y] : b.edges) u.edges.emplace_back(x + n, y + n);
  const std::vector<int> col = refine(u);
  std::multiset<int> ca(col.begin(), col.begin() + n), cb(col.begin() + n, col.end());
  if (ca != cb) return false;

  const Multiplicity ma = multiplicities(a), mb = multiplicities(b);
  auto mult = [](const Multiplicity& m, int x, int y) {
    auto it = m.find(key(x, y));
    return it == m.end() ? 0 : it->second;
  };
  // order a's vertices breadth-first so each has an earlier neighbour when possible
  const auto inc_a = a.incidence();
  std::vector<int> order;
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  for (int s = 0; s < n; ++s) {
    if (placed[static_cast<std::size_t>(s)]) continue;
    placed[static_cast<std::size_t>(s)] = true;
    order.push_back(s);
    for (std::size_t h = order.size() - 1; h < order.size(); ++h) {
      for (int e : inc_a[static_cast<std::size_t>(order[h])]) {
        const auto [x, y] = a.edges[static_cast<std::size_t>(e)];
        const int w = x == order[h] ? y : x;
        if (!placed[static_cast<std::size_t>(w)]) {
          placed[static_cast<std::size_t>(w)] = true;
          order.push_back(w);
        }
      }
    }
  }
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
    if (k == order.size()) return true;
    const int v = order[k];
    for (int w = 0; w < n; ++w) {
      if (used[static_cast<std::size_t>(w)] || col[static_cast<std::size_t>(v)] != col[static_cast<std::size_t>(w + n)]) continue;
      bool ok = mult(ma, v, v) == mult(mb, w, w);
      for (std::size_t j = 0; j < k && ok; ++j) {
        const int pv = order[j];
        ok = mult(ma, v, pv) == mult(mb, w, map[static_cast<std::size_t>(pv)]);
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = w;
      used[static_cast<std::size_t>(w)] = true;
      if (extend(k + 1)) return true;
      used[static_cast<std::size_t>(w)] = false;
      map[static_cast<std::size_t>(v)] = -1;
    }
    return false;
  };
  return extend(0);
}

FaceReport trace_faces(const Graph& g, const RotationSystem& rot) {
  check_graph(g);
  const std::size_t n = static_cast<std::size_t>(g.vertex_count);
  const auto inc = g.incidence();
  if (rot.order.size() != n) throw GraphError(Errc::IncompleteRotation, "rotation system must list every vertex");
  std::vector<std::map<int, std::size_t>> pos(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<int> a = rot.order[v], b = inc[v];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw GraphError(Errc::IncompleteRotation, "rotation at vertex " + std::to_string(v) +
                                                     " does not list exactly its incident edges");
    }
    for (std::size_t i = 0; i < rot.order[v].size(); ++i) pos[v][rot.order[v][i]] = i;
  }
  const std::size_t m = g.edges.size();
  // dart 2e: first -> second, dart 2e+1: second -> first
  std::vector<bool> used(2 * m, false);
  FaceReport rep;
  rep.vertices = g.vertex_count;
  rep.edges = static_cast<int>(m);
  for (std::size_t d0 = 0; d0 < 2 * m; ++d0) {
    if (used[d0]) continue;
    std::vector<int> face;
    std::size_t d = d0;
    while (!used[d]) {
      used[d] = true;
      const std::size_t e = d / 2;
      face.push_back(static_cast<int>(e));
      const int head = (d % 2 == 0) ? g.edges[e].second : g.edges[e].first;
      const auto& ring = rot.order[static_cast<std::size_t>(head)];
      const int next = ring[(pos[static_cast<std::size_t>(head)].at(static_cast<int>(e)) + 1) % ring.size()];
      const std::size_t ne = static_cast<std::size_t>(next);
      d = 2 * ne + (g.edges[ne].first == head ? 0 : 1);
    }
    ++rep.face_vector[static_cast<int>(face.size())];
    if (face.size() % 2 == 1) rep.has_odd_face = true;
    rep.faces.push_back(std::move(face));
  }
  rep.face_count = static_cast<int>(rep.faces.size());
  rep.euler_characteristic = rep.vertices - rep.edges + rep.face_count;
  rep.bipartite = two_colouring(g).has_value();
  return rep;
}

BigonCheck bigon_bound_check(const Graph& g, const RotationSystem& rot, int n) {
  check_graph(g);
  if (n < 1) throw GraphError(Errc::WrongValence, "n must be at least 1");
  const int valence = 2 * (n + 1);
  for (int v = 0; v < g.vertex_count; ++v) {
    if (g.degree(v) != valence) {
      throw GraphError(Errc::WrongValence, "vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v)) +
                                               ", expected " + std::to_string(valence));
    }
  }
  BigonCheck out;
  out.faces = trace_faces(g, rot);
  if (!connected(g) || out.faces.euler_characteristic != 2) {
    throw GraphError(Errc::NotSphere, "rotation system gives Euler characteristic " +
                                          std::to_string(out.faces.euler_characteristic) + ", not a sphere");
  }
  Rational lhs = 0;
  for (const auto& [len, count] : out.faces.face_vector) {
    lhs += Rational(count) * (1 - Rational(n * len, 2 * (n + 1)));
  }
  out.identity_lhs = lhs;
  if (lhs != 2) throw Error("InternalError", "face identity fails on a sphere embedding", ErrorClass::Internal);
  auto it = out.faces.face_vector.find(2);
  out.f2 = it == out.faces.face_vector.end() ? 0 : it->second;
  out.required = valence;
  out.pass = out.f2 >= valence;
  return out;
}

const char* to_string(TorusVerdict v) {
  switch (v) {
    case TorusVerdict::CompatibleSquares: return "CompatibleSquares";
    case TorusVerdict::NotTorus: return "NotTorus";
    case TorusVerdict::NotConnected: return "NotConnected";
    case TorusVerdict::OddCycle: return "OddCycle";
    case TorusVerdict::BigonFace: return "BigonFace";
    case TorusVerdict::WrongValence: return "WrongValence";
    case TorusVerdict::NonSquareFace: return "NonSquareFace";
  }
  return "?";
}

TorusCheck torus_boundary_check(const Graph& g, const RotationSystem& rot) {
  TorusCheck out;
  out.faces = trace_faces(g, rot);
  auto reject = [&](TorusVerdict v, std::string why) {
    out.verdict = v;
    out.detail = std::move(why);
    return out;
  };
  if (out.faces.euler_characteristic != 0) {
    return reject(TorusVerdict::NotTorus, "Euler characteristic " + std::to_string(out.faces.euler_characteristic) +
                                              "; a face that is not a disk (an annulus) shows up here");
  }
  if (!connected(g)) return reject(TorusVerdict::NotConnected, "graph is not connected");
  if (out.faces.face_vector.count(2)) {
    return reject(TorusVerdict::BigonFace, std::to_string(out.faces.face_vector.at(2)) + " bigon face(s)");
  }
  if (!out.faces.bipartite) return reject(TorusVerdict::OddCycle, "graph contains an odd cycle");
  for (int v = 0; v < g.vertex_count; ++v) {
    if (g.degree(v) != 4) {
      return reject(TorusVerdict::WrongValence, "vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v)));
    }
  }
  for (const auto& [len, count] : out.faces.face_vector) {
    if (len != 4) return reject(TorusVerdict::NonSquareFace, std::to_string(count) + " face(s) of length " + std::to_string(len));
  }
  out.verdict = TorusVerdict::CompatibleSquares;
  out.detail = "all faces are squares";
  return out;
}

RotationSystem rotation_from_positions(const Graph& g, const std::vector<std::pair<double, double>>& xy) {
  check_graph(g);
  if (xy.size() != static_cast<std::size_t>(g.vertex_count)) throw GraphError(Errc::BadGraph, "one position per vertex expected");
  RotationSystem rot;
  const auto inc = g.incidence();
  rot.order.resize(inc.size());
  for (std::size_t v = 0; v < inc.size(); ++v) {
    std::vector<std::pair<double, int>> by_angle;
    for (int e : inc[v]) {
      const auto [a, b] = g.edges[static_cast<std::size_t>(e)];
      const std::size_t w = static_cast<std::size_t>(a == static_cast<int>(v) ? b : a);
      by_angle.emplace_back(std::atan2(xy[w].second - xy[v].second, xy[w].first - xy[v].first), e);
    }
    std::sort(by_angle.begin(), by_angle.end());
    for (const auto& p : by_angle) rot.order[v].push_back(p.second);
  }
  return rot;
}

ReflectionGraph cycle_graph(int n) {
  if (n < 3) throw GraphError(Errc::BadGraph, "cycle graphs need at least 3 vertices");
  ReflectionGraph g;
  g.graph.vertex_count = n;
  for (int i = 0; i < n; ++i) g.graph.edges.emplace_back(i, (i + 1) % n);
  for (int c = 1; c < n; c += 2) {
    Reflection r;
    for (int i = 0; i < n; ++i) r.perm.push_back(((c - i) % n + n) % n);
    g.reflections.push_back(std::move(r));
  }
  g.ambient_symmetry = true;
  return g;
}

ReflectionGraph torus_lattice_graph(int a, int b) {
  if (a < 4 || b < 4 || a % 2 || b % 2) {
    throw GraphError(Errc::BadGraph, "torus lattice graphs here need even dimensions >= 4");
  }
  ReflectionGraph g;
  g.graph.vertex_count = a * b;
  auto id = [&](int i, int j) { return ((i % a + a) % a) * b + ((j % b + b) % b); };
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) {
      g.graph.edges.emplace_back(id(i, j), id(i + 1, j));
      g.graph.edges.emplace_back(id(i, j), id(i, j + 1));
    }
  }
  for (int c = 1; c < a; c += 2) {
    Reflection r;
    r.perm.resize(static_cast<std::size_t>(a * b));
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) r.perm[static_cast<std::size_t>(id(i, j))] = id(c - i, j);
    }
    g.reflections.push_back(std::move(r));
  }
  for (int c = 1; c < b; c += 2) {
    Reflection r;
    r.perm.resize(static_cast<std::size_t>(a * b));
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) r.perm[static_cast<std::size_t>(id(i, j))] = id(i, c - j);
    }
    g.reflections.push_back(std::move(r));
  }
  g.ambient = Ambient::S3;
  return g;
}

}  // namespace replivol::graphs
