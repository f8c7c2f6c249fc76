#pragma once

// Independent reference implementations used only for verification. They
// work directly on words with free reduction and deliberately share no
// pruning, ordering, or data structures with the production paths they
// cross-check.

#include <optional>
#include <set>
#include <vector>

#include "hypergrowth/cayley.hpp"
#include "hypergrowth/lexgeo.hpp"
#include "hypergrowth/words.hpp"

namespace hypergrowth::oracles {

// Every reduced word within distance L of a base word, by plain enumeration
// of reduced suffixes.
inline std::set<Word> word_neighbourhood(const Alphabet& a, const Word& base, int L) {
  std::set<Word> out;
  enumerate_reduced(a, L, [&](const Word& u) { out.insert(reduce(base + u)); });
  return out;
}

// Unpruned (L,m)-power detector for free groups: all ordered pairs from the
// L-neighbourhood of the prefix set of g, all candidate roots. In a free
// group an m-th power of a cyclically reduced root concatenates without
// cancellation, so every root of z is a prefix of z.
inline bool contains_Lm_power_free(const Alphabet& a, const Word& g, int L, int m) {
  std::set<Word> nbhd;
  for (std::size_t i = 0; i <= g.size(); ++i) {
    std::set<Word> around = word_neighbourhood(a, g.substr(0, i), L);
    nbhd.insert(around.begin(), around.end());
  }
  for (const Word& l : nbhd)
    for (const Word& q : nbhd) {
      Word z = reduce(inverse_word(l) + q);
      if (z.empty()) continue;
      for (std::size_t p = 1; p <= z.size(); ++p) {
        Word w = z.substr(0, p);
        if (!is_cyclically_reduced(w)) continue;
        Word pw;
        for (int j = 0; j < m; ++j) pw = reduce(pw + w);
        if (pw == z) return true;
      }
    }
  return false;
}

// All geodesic words from the identity to g, walking predecessors through
// the ball adjacency (no lexicographic machinery involved).
inline std::vector<Word> all_geodesic_words(const Ball& ball, ElementId g) {
  if (g == 0) return {Word()};
  std::vector<Word> out;
  for (int y = 0; y < ball.degree(); ++y) {
    ElementId u = ball.neighbor(g, static_cast<Letter>(y));
    if (u < 0 || ball.dist(u) != ball.dist(g) - 1) continue;
    for (const Word& w : all_geodesic_words(ball, u))
      out.push_back(w + static_cast<char>(inverse_letter(static_cast<Letter>(y))));
  }
  return out;
}

// Lex-least geodesic word by brute force over all geodesic words.
inline Word lex_least_geodesic(const Ball& ball, ElementId g) {
  std::vector<Word> all = all_geodesic_words(ball, g);
  Word best = all.front();
  for (const Word& w : all)
    if (lex_less(ball.alphabet(), w, best)) best = w;
  return best;
}

// Minimal length in the conjugacy class of w in the free group, by trying
// every conjugator up to the given radius.
inline int min_conjugate_length_free(const Alphabet& a, const Word& w, int conj_radius) {
  int best = static_cast<int>(reduce(w).size());
  enumerate_reduced(a, conj_radius, [&](const Word& t) {
    Word c = reduce(inverse_word(t) + w + t);
    best = std::min(best, static_cast<int>(c.size()));
  });
  return best;
}

}  // namespace hypergrowth::oracles
