#pragma once

// Reduced words over a symmetrized alphabet.
//
// Letters are encoded as integers 0..2k-1 packed into a std::string; the
// letter 2i is the i-th generator and 2i+1 its inverse, so
// inverse_letter(x) == (x ^ 1). Word comparison is driven by a
// user-configurable total order on the 2k letters (default: encoding order).

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypergrowth/errors.hpp"

namespace hypergrowth {

using Letter = unsigned char;
using Word = std::string;  // sequence of letter codes, not printable text

inline Letter inverse_letter(Letter x) { return static_cast<Letter>(x ^ 1); }

// Symmetrized generating alphabet: k generators plus their inverses,
// together with a total order on all 2k letters.
class Alphabet {
 public:
  Alphabet() = default;

  // Free-group style alphabet with generators named a, b, c, ... and
  // inverses A, B, C, ...; order defaults to the encoding order
  // a < A < b < B < ...
  static Alphabet with_rank(int k) {
    if (k <= 0) throw ParseError("alphabet rank must be positive");
    std::vector<std::string> gens;
    gens.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) gens.push_back(std::string(1, static_cast<char>('a' + i)));
    return Alphabet(gens);
  }

  explicit Alphabet(const std::vector<std::string>& generator_names) {
    rank_ = static_cast<int>(generator_names.size());
    if (rank_ <= 0) throw ParseError("alphabet needs at least one generator");
    names_.resize(static_cast<std::size_t>(2 * rank_));
    for (int i = 0; i < rank_; ++i) {
      const std::string& g = generator_names[static_cast<std::size_t>(i)];
      if (g.size() != 1 || g[0] < 'a' || g[0] > 'z')
        throw ParseError("generator names must be single lowercase letters, got '" + g + "'");
      names_[static_cast<std::size_t>(2 * i)] = g;
      names_[static_cast<std::size_t>(2 * i + 1)] = std::string(1, static_cast<char>(g[0] - 'a' + 'A'));
    }
    for (int i = 0; i < rank_; ++i)
      for (int j = i + 1; j < rank_; ++j)
        if (names_[static_cast<std::size_t>(2 * i)] == names_[static_cast<std::size_t>(2 * j)])
          throw ParseError("duplicate generator '" + names_[static_cast<std::size_t>(2 * i)] + "'");
    order_rank_.resize(static_cast<std::size_t>(2 * rank_));
    for (int x = 0; x < 2 * rank_; ++x) order_rank_[static_cast<std::size_t>(x)] = x;
  }

  int rank() const { return rank_; }
  int size() const { return 2 * rank_; }

  // Installs a user order given as the list of all 2k letter names.
  void set_order(const std::vector<std::string>& ordered_names) {
    if (static_cast<int>(ordered_names.size()) != size())
      throw ParseError("order line must list all letters and inverses exactly once");
    std::vector<int> rank_of(static_cast<std::size_t>(size()), -1);
    for (int pos = 0; pos < size(); ++pos) {
      Letter x = letter(ordered_names[static_cast<std::size_t>(pos)]);
      if (rank_of[x] != -1) throw ParseError("letter '" + ordered_names[static_cast<std::size_t>(pos)] + "' repeated in order");
      rank_of[x] = pos;
    }
    order_rank_ = std::move(rank_of);
  }

  int order_rank(Letter x) const { return order_rank_[x]; }

  // Letters listed in the installed order (used by enumerators).
  std::vector<Letter> letters_in_order() const {
    std::vector<Letter> ls(static_cast<std::size_t>(size()));
    for (int x = 0; x < size(); ++x) ls[static_cast<std::size_t>(order_rank_[static_cast<std::size_t>(x)])] = static_cast<Letter>(x);
    return ls;
  }

  const std::string& name(Letter x) const { return names_[x]; }

  Letter letter(const std::string& name) const {
    for (int x = 0; x < size(); ++x)
      if (names_[static_cast<std::size_t>(x)] == name) return static_cast<Letter>(x);
    throw ParseError("unknown letter '" + name + "'");
  }

  // Parses a word written with generator names and capitals for inverses.
  Word parse_word(const std::string& text) const {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
      if (c == ' ' || c == '\t') continue;
      w.push_back(static_cast<char>(letter(std::string(1, c))));
    }
    return w;
  }

  std::string display(const Word& w) const {
    std::string out;
    for (char c : w) out += name(static_cast<Letter>(c));
    if (out.empty()) out = "1";
    return out;
  }

 private:
  int rank_ = 0;
  std::vector<std::string> names_;
  std::vector<int> order_rank_;
};

// Free reduction: cancels adjacent x x^-1 pairs. Idempotent and
// length-nonincreasing; the result is the unique reduced representative.
inline Word reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (char c : w) {
    if (!out.empty() && static_cast<Letter>(out.back()) == inverse_letter(static_cast<Letter>(c)))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

inline bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (static_cast<Letter>(w[i]) == inverse_letter(static_cast<Letter>(w[i - 1]))) return false;
  return true;
}

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back(static_cast<char>(inverse_letter(static_cast<Letter>(*it))));
  return out;
}

inline Word concat_reduce(const Word& u, const Word& v) { return reduce(u + v); }

// Strips conjugation layers: while the first and last letters cancel, drop
// both. The result's length is the free-group translation length.
inline Word cyclic_reduce(Word w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && static_cast<Letter>(w[lo]) == inverse_letter(static_cast<Letter>(w[hi - 1]))) {
    ++lo;
    --hi;
  }
  return w.substr(lo, hi - lo);
}

inline bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  if (w.size() >= 2 && static_cast<Letter>(w.front()) == inverse_letter(static_cast<Letter>(w.back()))) return false;
  return true;
}

// Letter-by-letter comparison under the alphabet order; a strict prefix
// compares smaller, which keeps the order total on words of unequal length.
inline std::strong_ordering lex_compare(const Alphabet& a, const Word& u, const Word& v) {
  std::size_t n = std::min(u.size(), v.size());
  for (std::size_t i = 0; i < n; ++i) {
    int ru = a.order_rank(static_cast<Letter>(u[i]));
    int rv = a.order_rank(static_cast<Letter>(v[i]));
    if (ru != rv) return ru <=> rv;
  }
  return u.size() <=> v.size();
}

inline bool lex_less(const Alphabet& a, const Word& u, const Word& v) {
  return lex_compare(a, u, v) == std::strong_ordering::less;
}

// Shortlex: length first, then lex. This is the order underlying rewriting
// and the canonical element ordering everywhere in the library.
inline std::strong_ordering shortlex_compare(const Alphabet& a, const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() <=> v.size();
  return lex_compare(a, u, v);
}

inline bool shortlex_less(const Alphabet& a, const Word& u, const Word& v) {
  return shortlex_compare(a, u, v) == std::strong_ordering::less;
}

// Emits every reduced word of length <= max_len exactly once, in
// length-then-lex order. The sphere of radius r >= 1 holds 2k(2k-1)^(r-1)
// words.
inline void enumerate_reduced(const Alphabet& a, int max_len, const std::function<void(const Word&)>& fn) {
  if (max_len < 0) throw GuardError("enumerate_reduced: max_len must be >= 0");
  Word empty;
  fn(empty);
  std::vector<Letter> order = a.letters_in_order();
  std::vector<Word> level;
  for (Letter x : order) level.push_back(Word(1, static_cast<char>(x)));
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    next.reserve(level.size() * static_cast<std::size_t>(a.size() - 1));
    for (const Word& w : level) {
      fn(w);
      if (len < max_len) {
        for (Letter x : order) {
          if (inverse_letter(x) == static_cast<Letter>(w.back())) continue;
          next.push_back(w + static_cast<char>(x));
        }
      }
    }
    level = std::move(next);
  }
}

}  // namespace hypergrowth
