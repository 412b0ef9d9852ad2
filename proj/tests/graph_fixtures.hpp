#pragma once

#include "replivol/graphs.hpp"

#include <algorithm>
#include <utility>

namespace testsupport {

using replivol::graphs::Graph;
using replivol::graphs::RotationSystem;

// k parallel edges between two vertices; planar when v's order reverses u's.
inline std::pair<Graph, RotationSystem> dipole(int k, bool planar) {
  Graph g;
  g.vertex_count = 2;
  RotationSystem r;
  r.order.resize(2);
  for (int e = 0; e < k; ++e) {
    g.edges.emplace_back(0, 1);
    r.order[0].push_back(e);
  }
  r.order[1] = r.order[0];
  if (planar) std::reverse(r.order[1].begin(), r.order[1].end());
  return {g, r};
}

// a x b grid on the torus; rotation E, N, W, S (counter-clockwise)
inline std::pair<Graph, RotationSystem> grid_torus(int a, int b) {
  Graph g;
  g.vertex_count = a * b;
  auto id = [&](int i, int j) { return ((i % a + a) % a) * b + ((j % b + b) % b); };
  auto h = [&](int i, int j) { return 2 * id(i, j); };
  auto v = [&](int i, int j) { return 2 * id(i, j) + 1; };
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) {
      g.edges.emplace_back(id(i, j), id(i + 1, j));
      g.edges.emplace_back(id(i, j), id(i, j + 1));
    }
  }
  RotationSystem r;
  r.order.resize(static_cast<std::size_t>(a * b));
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) r.order[static_cast<std::size_t>(id(i, j))] = {h(i, j), v(i, j), h(i - 1, j), v(i, j - 1)};
  }
  return {g, r};
}

// 3 x 3 torus triangulated by the NE diagonals: 6-valent, triangular faces
inline std::pair<Graph, RotationSystem> triangulated_torus() {
  const int a = 3;
  Graph g;
  g.vertex_count = a * a;
  auto id = [&](int i, int j) { return ((i % a + a) % a) * a + ((j % a + a) % a); };
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < a; ++j) {
      g.edges.emplace_back(id(i, j), id(i + 1, j));
      g.edges.emplace_back(id(i, j), id(i + 1, j + 1));
      g.edges.emplace_back(id(i, j), id(i, j + 1));
    }
  }
  auto e = [&](int i, int j, int k) { return 3 * id(i, j) + k; };
  RotationSystem r;
  r.order.resize(9);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < a; ++j) {
      r.order[static_cast<std::size_t>(id(i, j))] = {e(i, j, 0), e(i, j, 1), e(i, j, 2),
                                                     e(i - 1, j, 0), e(i - 1, j - 1, 1), e(i, j - 1, 2)};
    }
  }
  return {g, r};
}

}  // namespace testsupport
