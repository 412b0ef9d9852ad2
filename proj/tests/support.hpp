#pragma once

#include "replivol/bounds.hpp"
#include "replivol/pieces.hpp"
#include "replivol/words.hpp"

#include <random>
#include <vector>

namespace testsupport {

/// Random valid word of the given order drawn from the flip/move choice model.
inline replivol::words::CyclicWord random_word(std::mt19937_64& rng, int order) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> start(1, order);
  for (;;) {
    std::vector<int> seq(static_cast<std::size_t>(order));
    seq[0] = start(rng);
    bool flag = coin(rng);
    const bool start_flag = flag;
    for (int i = 1; i < order; ++i) {
      const int prev = seq[static_cast<std::size_t>(i - 1)];
      if (coin(rng)) {
        seq[static_cast<std::size_t>(i)] = prev;
        flag = !flag;
      } else {
        seq[static_cast<std::size_t>(i)] = ((prev - 1 + (flag ? -1 : 1)) % order + order) % order + 1;
      }
    }
    const int last = seq.back();
    const bool by_flip = last == seq[0] && flag != start_flag;
    const bool by_move = ((last - 1 + (flag ? -1 : 1)) % order + order) % order + 1 == seq[0] && flag == start_flag;
    if (by_flip || by_move) return replivol::words::CyclicWord::make(order, seq);
  }
}

/// Random template with `pairs` face pairs; each face carries `per_face`
/// endpoints and strands are a random perfect matching.
inline replivol::pieces::PieceTemplate random_template(std::mt19937_64& rng, int pairs, int per_face,
                                                       const std::string& id) {
  using namespace replivol::pieces;
  PieceTemplate t;
  t.id = id;
  t.faces.assign(static_cast<std::size_t>(2 * pairs), per_face);
  std::vector<Endpoint> ends;
  for (int f = 0; f < 2 * pairs; ++f) {
    for (int l = 1; l <= per_face; ++l) ends.push_back({f, l});
  }
  std::shuffle(ends.begin(), ends.end(), rng);
  for (std::size_t i = 0; i + 1 < ends.size(); i += 2) t.strands.push_back({ends[i], ends[i + 1]});
  t.closed_components = static_cast<int>(rng() % 2);
  return t;
}

inline replivol::pieces::PieceTemplate family_piece(replivol::bounds::Family f, const std::string& conway) {
  replivol::bounds::TangleRef t;
  t.family = f;
  t.conway = conway;
  return *replivol::bounds::family_template(t);
}

/// Two-pair fixtures: hand-made cubes plus seeded random matchings.
inline std::vector<replivol::pieces::PieceTemplate> two_pair_fixtures() {
  using replivol::bounds::Family;
  std::vector<replivol::pieces::PieceTemplate> out;
  for (const char* c : {"2", "3", "2 1", "1/3", "4"}) out.push_back(family_piece(Family::RationalSquare, c));
  std::mt19937_64 rng(99);
  for (int i = 0; i < 8; ++i) out.push_back(random_template(rng, 2, 1 + i % 3, "random-" + std::to_string(i)));
  return out;
}

}  // namespace testsupport
