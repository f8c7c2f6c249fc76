#pragma once

// Lexicographic geodesics sigma_g, truncated lexicographic types L_g, and
// the prefix property they satisfy.
//
// sigma is computed for all ball elements at once by dynamic programming in
// BFS order; the prefix property is a theorem of this construction and is
// re-verified independently by verify_prefix_property.

#include <optional>
#include <vector>

#include "hypergrowth/cayley.hpp"
#include "hypergrowth/errors.hpp"
#include "hypergrowth/words.hpp"

namespace hypergrowth {

// sigma_g for every g in a ball: the lex-least geodesic word from 1 to g,
// stored as the word plus the predecessor vertex on it.
class LexGeodesicMap {
 public:
  std::vector<Word> sigma;            // id -> lex-least geodesic word
  std::vector<ElementId> parent;      // id -> previous vertex on sigma, -1 for the identity

  const Word& word(ElementId g) const { return sigma[static_cast<std::size_t>(g)]; }

  // Vertex on sigma_g at distance `len` from the identity.
  ElementId vertex_at(const Ball& ball, ElementId g, int len) const {
    ElementId cur = g;
    int steps = ball.dist(g) - len;
    if (steps < 0 || len < 0) throw GuardError("vertex_at: length outside sigma_g");
    for (int i = 0; i < steps; ++i) cur = parent[static_cast<std::size_t>(cur)];
    return cur;
  }

  // Whether g lies on sigma_h (as a vertex).
  bool passes_through(const Ball& ball, ElementId h, ElementId g) const {
    if (ball.dist(g) > ball.dist(h)) return false;
    return vertex_at(ball, h, ball.dist(g)) == g;
  }
};

inline LexGeodesicMap lex_geodesics(const Ball& ball) {
  const Alphabet& a = ball.alphabet();
  LexGeodesicMap m;
  m.sigma.resize(static_cast<std::size_t>(ball.size()));
  m.parent.assign(static_cast<std::size_t>(ball.size()), -1);
  for (ElementId v = 1; v < ball.size(); ++v) {
    int dv = ball.dist(v);
    bool have = false;
    Word best;
    ElementId best_p = -1;
    for (int y = 0; y < ball.degree(); ++y) {
      ElementId u = ball.neighbor(v, static_cast<Letter>(y));
      if (u < 0 || ball.dist(u) != dv - 1) continue;
      // u * inverse(y) == v, so sigma_u extended by inverse(y) is a geodesic
      // word for v.
      Word cand = m.sigma[static_cast<std::size_t>(u)] + static_cast<char>(inverse_letter(static_cast<Letter>(y)));
      if (!have || lex_less(a, cand, best)) {
        have = true;
        best = std::move(cand);
        best_p = u;
      }
    }
    m.sigma[static_cast<std::size_t>(v)] = std::move(best);
    m.parent[static_cast<std::size_t>(v)] = best_p;
  }
  return m;
}

// Truncated lexicographic type of g: the u in B(R) such that sigma_{gu}
// passes through g. Always a subset of the cone signature of g.
struct LexTypeSample {
  ElementId base = 0;
  int lookahead = 0;
  std::vector<ElementId> members;  // ids of the u's, ascending
};

inline LexTypeSample lex_type_sample(const Ball& ball, const LexGeodesicMap& m, ElementId g, int R) {
  if (ball.dist(g) + R > ball.radius)
    throw GuardError("lex_type_sample: |g| + R exceeds the ball radius");
  LexTypeSample s;
  s.base = g;
  s.lookahead = R;
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(R) + 1]);
  for (ElementId u = 0; u < limit; ++u) {
    ElementId gu = ball.walk(g, ball.elements[static_cast<std::size_t>(u)]);
    if (gu < 0) continue;
    if (m.passes_through(ball, gu, g)) s.members.push_back(u);
  }
  return s;
}

struct PrefixPropertyReport {
  long long checked = 0;
  // (g, h): h lies on sigma_g but sigma_h differs from the prefix.
  std::vector<std::pair<ElementId, ElementId>> violations;

  bool ok() const { return violations.empty(); }
};

// Independent re-verification: for every g and every vertex h on sigma_g,
// sigma_h must be exactly the prefix of sigma_g up to h.
inline PrefixPropertyReport verify_prefix_property(const Ball& ball, const LexGeodesicMap& m) {
  PrefixPropertyReport rep;
  for (ElementId g = 0; g < ball.size(); ++g) {
    const Word& w = m.word(g);
    ElementId h = 0;  // identity; follow sigma_g letter by letter
    for (std::size_t i = 0; i < w.size(); ++i) {
      h = ball.neighbor(h, static_cast<Letter>(w[i]));
      ++rep.checked;
      const Word& wh = m.word(h);
      if (wh.size() != i + 1 || !std::equal(wh.begin(), wh.end(), w.begin())) {
        rep.violations.emplace_back(g, h);
        break;
      }
    }
  }
  return rep;
}

}  // namespace hypergrowth
