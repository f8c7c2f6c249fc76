#pragma once

// Power-free machinery: m-aperiodic words in free groups with exact counts
// and the counting recurrence, plus (L,m)-power detection along
// lexicographic geodesics for general groups.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <vector>

#include "hypergrowth/cayley.hpp"
#include "hypergrowth/errors.hpp"
#include "hypergrowth/lexgeo.hpp"
#include "hypergrowth/words.hpp"

namespace hypergrowth {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Witness that a reduced word contains u^m: the literal subword starting at
// `start` with period `period` repeated m times.
struct WordPowerWitness {
  int start = 0;
  int period = 0;
  int m = 0;
};

// Scans all (start, period) pairs in increasing order and returns the first
// literal m-th power subword, if any.
inline std::optional<WordPowerWitness> find_word_power(const Word& w, int m) {
  if (m < 2) throw GuardError("find_word_power: m must be >= 2");
  const int n = static_cast<int>(w.size());
  for (int start = 0; start < n; ++start)
    for (int period = 1; start + m * period <= n; ++period) {
      bool hit = true;
      for (int i = start; i + period < start + m * period; ++i)
        if (w[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(i + period)]) {
          hit = false;
          break;
        }
      if (hit) return WordPowerWitness{start, period, m};
    }
  return std::nullopt;
}

// Exact |F_m n B(s)| for the free group of rank k, s = 0..s_max.
struct AperiodicCountTable {
  int k = 0;
  int m = 0;
  std::vector<long long> counts;  // cumulative, index s
};

namespace detail {

// A freshly appended letter can only complete a power ending at the last
// position: check every period p with m*p <= current length.
inline bool tail_completes_power(const Word& w, int m) {
  const int n = static_cast<int>(w.size());
  for (int p = 1; m * p <= n; ++p) {
    bool hit = true;
    for (int i = n - m * p; i + p < n; ++i)
      if (w[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(i + p)]) {
        hit = false;
        break;
      }
    if (hit) return true;
  }
  return false;
}

inline void count_aperiodic_dfs(const Alphabet& a, Word& w, int m, int s_max, std::vector<long long>& per_len) {
  ++per_len[w.size()];
  if (static_cast<int>(w.size()) == s_max) return;
  for (Letter x : a.letters_in_order()) {
    if (!w.empty() && inverse_letter(x) == static_cast<Letter>(w.back())) continue;
    w.push_back(static_cast<char>(x));
    if (!tail_completes_power(w, m)) count_aperiodic_dfs(a, w, m, s_max, per_len);
    w.pop_back();
  }
}

}  // namespace detail

inline AperiodicCountTable count_aperiodic_free(int k, int m, int s_max) {
  if (k < 2) throw GuardError("count_aperiodic_free: k must be >= 2");
  if (m < 2) throw GuardError("count_aperiodic_free: m must be >= 2");
  if (s_max < 0) throw GuardError("count_aperiodic_free: s_max must be >= 0");
  Alphabet a = Alphabet::with_rank(k);
  std::vector<long long> per_len(static_cast<std::size_t>(s_max) + 1, 0);
  Word w;
  detail::count_aperiodic_dfs(a, w, m, s_max, per_len);
  AperiodicCountTable t;
  t.k = k;
  t.m = m;
  t.counts.resize(per_len.size());
  long long acc = 0;
  for (std::size_t s = 0; s < per_len.size(); ++s) {
    acc += per_len[s];
    t.counts[s] = acc;
  }
  return t;
}

// Margins of the free-case counting inequality
//   |F_m n B(s+1)| >= lambda |F_m n B(s)|
//                     - (2k / (2k-1)) sum_{j>=1} lambda^j |F_m n B(s+1-mj)|
// in exact rational arithmetic, one entry per s.
struct RecurrenceReport {
  std::vector<Rational> margins;  // margin at s = lhs - rhs, s = 0..s_max-1
  bool ok = true;
};

inline RecurrenceReport verify_free_recurrence(const AperiodicCountTable& t) {
  const int k = t.k;
  const int m = t.m;
  const long long lambda = 2 * k - 1;
  RecurrenceReport rep;
  auto card = [&](long long s) -> long long {
    if (s < 0) return 0;
    return t.counts[static_cast<std::size_t>(s)];
  };
  for (int s = 0; s + 1 < static_cast<int>(t.counts.size()); ++s) {
    Rational rhs = Rational(lambda) * card(s);
    BigInt lam_j = 1;
    for (int j = 1; s + 1 - static_cast<long long>(m) * j >= 0; ++j) {
      lam_j *= lambda;
      rhs -= Rational(2 * k, lambda) * Rational(lam_j) * card(s + 1 - static_cast<long long>(m) * j);
    }
    Rational margin = Rational(card(s + 1)) - rhs;
    if (margin < 0) rep.ok = false;
    rep.margins.push_back(std::move(margin));
  }
  return rep;
}

// Witness that an element contains an (L,m)-power along sigma_g: elements
// l and l w^m both lie in the L-neighbourhood of sigma_g, with w a
// non-trivial cyclically reduced element.
struct LmPowerWitness {
  Word base;   // l
  Word root;   // w
  int m = 0;
};

// Translation length over the guarded ball: min over conjugators x with
// |x| <= (N - |g|) / 2 of |x^-1 g x|. Exact for free groups; elsewhere a
// truncated upper bound for the true infimum (may over-accept cyclically
// reduced candidates, flagged by callers).
inline int translation_length(const Ball& ball, const Word& g_nf) {
  if (ball.oracle.is_free()) return static_cast<int>(cyclic_reduce(g_nf).size());
  int dg = static_cast<int>(g_nf.size());
  if (dg > ball.radius) throw GuardError("translation_length: |g| exceeds the ball radius");
  int conj_radius = (ball.radius - dg) / 2;
  Word g_inv;
  int best = dg;
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(conj_radius) + 1]);
  for (ElementId x = 1; x < limit && best > 0; ++x) {
    const Word& wx = ball.elements[static_cast<std::size_t>(x)];
    Word moved = ball.oracle.normal_form(inverse_word(wx) + g_nf + wx);
    best = std::min(best, static_cast<int>(moved.size()));
  }
  return best;
}

inline bool is_cyclically_reduced_isometry(const Ball& ball, const Word& g_nf) {
  if (g_nf.empty()) return false;  // the set C excludes the identity
  if (ball.oracle.is_free()) return is_cyclically_reduced(g_nf);
  return translation_length(ball, g_nf) == static_cast<int>(g_nf.size());
}

// m-th root extraction. Free groups: exact via word periodicity (a literal
// m-th power of a cyclically reduced root never cancels). General groups:
// search over ball elements w with |w| <= |x|/m + slack, slack = 50*delta
// from the stable-length comparison.
inline std::optional<Word> mth_root_free(const Word& x, int m) {
  const int n = static_cast<int>(x.size());
  if (m < 1) throw GuardError("mth_root_free: m must be >= 1");
  if (m == 1) return is_cyclically_reduced(x) && n > 0 ? std::optional<Word>(x) : std::nullopt;
  if (n == 0 || n % m != 0) return std::nullopt;
  const int p = n / m;
  for (int i = 0; i + p < n; ++i)
    if (x[static_cast<std::size_t>(i)] != x[static_cast<std::size_t>(i + p)]) return std::nullopt;
  return x.substr(0, static_cast<std::size_t>(p));
}

inline std::optional<Word> mth_root(const Ball& ball, const Word& x_nf, int m, double delta = 0.0) {
  if (ball.oracle.is_free()) return mth_root_free(x_nf, m);
  if (m < 1) throw GuardError("mth_root: m must be >= 1");
  if (x_nf.empty()) return std::nullopt;
  int slack = static_cast<int>(std::ceil(std::max(0.0, 50.0 * delta)));
  int max_len = static_cast<int>(x_nf.size()) / m + slack;
  max_len = std::min(max_len, ball.radius);
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(max_len) + 1]);
  for (ElementId w = 1; w < limit; ++w) {
    const Word& ww = ball.elements[static_cast<std::size_t>(w)];
    if (!is_cyclically_reduced_isometry(ball, ww)) continue;
    Word acc = ww;
    bool feasible = true;
    for (int j = 1; j < m; ++j) {
      acc = ball.oracle.normal_form(acc + ww);
      if (static_cast<int>(acc.size()) > static_cast<int>(x_nf.size()) + (m - 1 - j) * static_cast<int>(ww.size())) {
        feasible = false;
        break;
      }
    }
    if (feasible && acc == x_nf) return ww;
  }
  return std::nullopt;
}

namespace detail {

// L-neighbourhood of the vertex set of sigma_g, each point tagged with the
// first sigma vertex within distance L (its anchor).
inline std::vector<std::pair<ElementId, int>> sigma_neighbourhood(const Ball& ball, const LexGeodesicMap& lexmap,
                                                                  ElementId g, int L) {
  std::vector<ElementId> vertices;
  {
    ElementId cur = g;
    while (cur >= 0) {
      vertices.push_back(cur);
      cur = lexmap.parent[static_cast<std::size_t>(cur)];
    }
    std::reverse(vertices.begin(), vertices.end());
  }
  std::vector<int> anchor(static_cast<std::size_t>(ball.size()), -1);
  std::vector<std::pair<ElementId, int>> out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    // breadth-first to depth L from each vertex
    std::vector<ElementId> frontier{vertices[i]};
    if (anchor[static_cast<std::size_t>(vertices[i])] < 0) {
      anchor[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
      out.emplace_back(vertices[i], static_cast<int>(i));
    }
    for (int depth = 1; depth <= L; ++depth) {
      std::vector<ElementId> next;
      for (ElementId v : frontier)
        for (int x = 0; x < ball.degree(); ++x) {
          ElementId n = ball.neighbor(v, static_cast<Letter>(x));
          if (n < 0 || anchor[static_cast<std::size_t>(n)] >= 0) continue;
          anchor[static_cast<std::size_t>(n)] = static_cast<int>(i);
          out.emplace_back(n, static_cast<int>(i));
          next.push_back(n);
        }
      frontier = std::move(next);
    }
  }
  return out;
}

}  // namespace detail

// Searches for an (L,m)-power along sigma_g: ordered pairs (l, q) from the
// L-neighbourhood of sigma_g, by increasing anchor distance along the
// geodesic, testing whether l^-1 q is an m-th power of a cyclically reduced
// element. Returns the first witness in that order, or nothing.
inline std::optional<LmPowerWitness> detect_Lm_power(const Ball& ball, const LexGeodesicMap& lexmap, ElementId g,
                                                     int L, int m, double tau_hint = 0.0, double delta = 0.0) {
  if (m < 1) throw GuardError("detect_Lm_power: m must be >= 1");
  if (L < 0) throw GuardError("detect_Lm_power: L must be >= 0");
  if (ball.dist(g) + L > ball.radius)
    throw GuardError("detect_Lm_power: |g| + L exceeds the ball radius");
  auto nbhd = detail::sigma_neighbourhood(ball, lexmap, g, L);
  std::sort(nbhd.begin(), nbhd.end(), [](const auto& p, const auto& q) {
    if (p.second != q.second) return p.second < q.second;
    return p.first < q.first;
  });
  // Bucket by anchor, then enumerate unordered pairs by increasing anchor
  // span. Roots of z and z^-1 are interchangeable (w <-> w^-1), so one
  // direction per pair suffices.
  const int len = ball.dist(g);
  std::vector<std::vector<ElementId>> bucket(static_cast<std::size_t>(len) + 1);
  for (const auto& [id, anchor] : nbhd) bucket[static_cast<std::size_t>(anchor)].push_back(id);

  auto try_pair = [&](ElementId l, ElementId q) -> std::optional<LmPowerWitness> {
    const Word& wl = ball.elements[static_cast<std::size_t>(l)];
    const Word& wq = ball.elements[static_cast<std::size_t>(q)];
    Word z = ball.oracle.normal_form(inverse_word(wl) + wq);
    if (z.empty()) return std::nullopt;
    if (tau_hint > 0 && static_cast<double>(z.size()) < static_cast<double>(m) * tau_hint) return std::nullopt;
    if (auto w = mth_root(ball, z, m, delta)) return LmPowerWitness{wl, *w, m};
    return std::nullopt;
  };

  for (int span = 0; span <= len; ++span)
    for (int lo = 0; lo + span <= len; ++lo) {
      const auto& src = bucket[static_cast<std::size_t>(lo)];
      const auto& dst = bucket[static_cast<std::size_t>(lo) + static_cast<std::size_t>(span)];
      for (std::size_t i = 0; i < src.size(); ++i) {
        std::size_t j0 = span == 0 ? i + 1 : 0;
        for (std::size_t j = j0; j < dst.size(); ++j)
          if (auto w = try_pair(src[i], dst[j])) return w;
      }
    }
  return std::nullopt;
}

// |{ g in ground set : |g| <= s, g (L,m)-aperiodic }| for s = 0..s_max.
// The ground set defaults to the whole ball; pass an indicator to restrict
// (e.g. to an F set).
inline std::vector<long long> count_F_Lm(const Ball& ball, const LexGeodesicMap& lexmap, int L, int m, int s_max,
                                         const std::vector<char>* ground = nullptr, double tau_hint = 0.0,
                                         double delta = 0.0) {
  if (s_max < 0 || s_max + L > ball.radius)
    throw GuardError("count_F_Lm: s_max + L exceeds the ball radius");
  std::vector<long long> per_len(static_cast<std::size_t>(s_max) + 1, 0);
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(s_max) + 1]);
  for (ElementId g = 0; g < limit; ++g) {
    if (ground && !(*ground)[static_cast<std::size_t>(g)]) continue;
    if (!detect_Lm_power(ball, lexmap, g, L, m, tau_hint, delta))
      ++per_len[static_cast<std::size_t>(ball.dist(g))];
  }
  std::vector<long long> cumulative(per_len.size());
  long long acc = 0;
  for (std::size_t s = 0; s < per_len.size(); ++s) {
    acc += per_len[s];
    cumulative[s] = acc;
  }
  return cumulative;
}

}  // namespace hypergrowth
