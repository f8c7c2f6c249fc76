#pragma once

// Exhaustive Cayley-ball geometry: BFS enumeration with exact distances,
// annuli, Gromov products, a four-point delta estimate, and the
// growth-rate / Coornaert-alpha estimators.
//
// All metric quantities are computed only where BFS truncation cannot
// distort them (the exactness guard); outside that region operations
// refuse rather than approximate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hypergrowth/errors.hpp"
#include "hypergrowth/presentation.hpp"
#include "hypergrowth/words.hpp"

namespace hypergrowth {

using ElementId = std::int32_t;

// Radius-N portion of a Cayley graph. Elements are normal forms indexed in
// (length, lex) order, so every sphere is a contiguous id range and ids are
// reproducible across runs.
class Ball {
 public:
  int radius = 0;
  GroupOracle oracle;
  std::vector<Word> elements;          // id -> normal form
  std::vector<ElementId> adj;          // id * 2k + letter -> id, -1 outside
  std::vector<int> sphere_start;       // sphere r = ids [sphere_start[r], sphere_start[r+1])

  const Alphabet& alphabet() const { return oracle.alphabet(); }
  int degree() const { return oracle.alphabet().size(); }
  ElementId size() const { return static_cast<ElementId>(elements.size()); }

  int dist(ElementId id) const { return static_cast<int>(elements[static_cast<std::size_t>(id)].size()); }

  ElementId id_of(const Word& nf) const {
    auto it = index_.find(nf);
    return it == index_.end() ? ElementId(-1) : it->second;
  }

  ElementId neighbor(ElementId id, Letter x) const {
    return adj[static_cast<std::size_t>(id) * static_cast<std::size_t>(degree()) + x];
  }

  // Walks the letters of u through the adjacency table; -1 if the walk
  // leaves the ball.
  ElementId walk(ElementId from, const Word& u) const {
    ElementId cur = from;
    for (char c : u) {
      cur = neighbor(cur, static_cast<Letter>(c));
      if (cur < 0) return -1;
    }
    return cur;
  }

  long long sphere_count(int r) const {
    return sphere_start[static_cast<std::size_t>(r) + 1] - sphere_start[static_cast<std::size_t>(r)];
  }

  long long ball_count(int r) const { return sphere_start[static_cast<std::size_t>(r) + 1]; }

  std::vector<long long> ball_counts() const {
    std::vector<long long> c;
    for (int r = 0; r <= radius; ++r) c.push_back(ball_count(r));
    return c;
  }

  // Exact distance between two ball elements, guarded so that the product
  // stays within the oracle's certified range.
  int distance(ElementId x, ElementId y) const {
    const Word& wx = elements[static_cast<std::size_t>(x)];
    const Word& wy = elements[static_cast<std::size_t>(y)];
    if (2 * dist(x) > radius || 2 * dist(y) > radius)
      throw GuardError("distance: arguments outside the exactness guard B(N/2)");
    return static_cast<int>(oracle.normal_form(inverse_word(wx) + wy).size());
  }

  void build_index() {
    index_.clear();
    index_.reserve(elements.size() * 2);
    for (std::size_t i = 0; i < elements.size(); ++i)
      index_.emplace(elements[i], static_cast<ElementId>(i));
  }

 private:
  std::unordered_map<Word, ElementId> index_;
};

// Exact enumeration of all elements with |g| <= radius, with per-radius
// counts. Throws LimitError naming the radius reached when the element
// budget is exceeded.
inline Ball build_ball(const GroupOracle& oracle, int radius, std::size_t max_elements = 16u << 20) {
  if (radius < 0) throw GuardError("build_ball: radius must be >= 0");
  if (radius + 1 > oracle.certified_length())
    throw GuardError("build_ball: oracle normal forms are only certified up to length " +
                     std::to_string(oracle.certified_length()));
  Ball ball;
  ball.radius = radius;
  ball.oracle = oracle;
  const Alphabet& a = oracle.alphabet();
  const int deg = a.size();

  ball.elements.push_back(Word());
  ball.sphere_start = {0, 1};
  std::unordered_map<Word, ElementId> seen;
  seen.emplace(Word(), 0);

  std::size_t layer_begin = 0, layer_end = 1;
  for (int r = 1; r <= radius; ++r) {
    std::vector<Word> fresh;
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      const Word w = ball.elements[i];
      for (int x = 0; x < deg; ++x) {
        Word n = oracle.normal_form(w + static_cast<char>(x));
        if (static_cast<int>(n.size()) != r) continue;  // stays inside or moves back
        if (seen.emplace(n, ElementId(-2)).second) fresh.push_back(std::move(n));
      }
    }
    std::sort(fresh.begin(), fresh.end(),
              [&a](const Word& u, const Word& v) { return lex_less(a, u, v); });
    if (ball.elements.size() + fresh.size() > max_elements)
      throw LimitError("build_ball: element budget exceeded at radius " + std::to_string(r - 1) +
                       " (next sphere needs " + std::to_string(fresh.size()) + " more elements)");
    for (Word& w : fresh) ball.elements.push_back(std::move(w));
    layer_begin = layer_end;
    layer_end = ball.elements.size();
    ball.sphere_start.push_back(static_cast<int>(layer_end));
  }

  ball.build_index();
  ball.adj.assign(ball.elements.size() * static_cast<std::size_t>(deg), -1);
  for (std::size_t i = 0; i < ball.elements.size(); ++i) {
    for (int x = 0; x < deg; ++x) {
      Word n = oracle.normal_form(ball.elements[i] + static_cast<char>(x));
      ball.adj[i * static_cast<std::size_t>(deg) + static_cast<std::size_t>(x)] = ball.id_of(n);
    }
  }
  return ball;
}

// Annulus A(r, e) = { g : r - e <= |g| <= r } as a contiguous id range.
// In tree mode (delta = 0) callers pass widths like 9*delta = 0; widths are
// clamped to >= 1 so annuli stay nonempty.
struct Annulus {
  double r = 0;
  double e = 1;
  int len_lo = 0;
  int len_hi = 0;
  ElementId first = 0;
  ElementId last = 0;  // one past the end

  long long count() const { return last - first; }
};

inline Annulus annulus(const Ball& ball, double r, double e) {
  if (r < 0) throw GuardError("annulus: r must be >= 0");
  if (r > ball.radius) throw GuardError("annulus: r exceeds the ball radius");
  Annulus an;
  an.r = r;
  an.e = std::max(e, 1.0);
  an.len_hi = static_cast<int>(std::floor(r));
  an.len_lo = std::max(0, static_cast<int>(std::ceil(r - an.e)));
  an.first = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(an.len_lo)]);
  an.last = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(an.len_hi) + 1]);
  return an;
}

// Gromov product <x|y>_z = (d(x,z) + d(y,z) - d(x,y)) / 2. Half-integer
// valued; exact in double. Arguments must satisfy the guard |.| <= N/2.
inline double gromov_product(const Ball& ball, ElementId x, ElementId y, ElementId z) {
  int dxz = ball.distance(x, z);
  int dyz = ball.distance(y, z);
  int dxy = ball.distance(x, y);
  return 0.5 * static_cast<double>(dxz + dyz - dxy);
}

// Least delta-hat such that the basepointed four-point condition
// <x|y> >= min(<x|z>, <z|y>) - delta holds over all triples in the guarded
// core B(N/2). A lower bound for the true hyperbolicity constant.
inline double estimate_delta(const Ball& ball, int threads = 1) {
  std::vector<ElementId> core;
  for (ElementId g = 0; g < ball.size(); ++g)
    if (2 * ball.dist(g) <= ball.radius) core.push_back(g);
  const std::size_t n = core.size();
  if (n <= 1) return 0.0;

  // Twice the Gromov products, so everything stays integral.
  std::vector<int> gp2(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      int d = ball.distance(core[i], core[j]);
      int v = ball.dist(core[i]) + ball.dist(core[j]) - d;
      gp2[i * n + j] = v;
      gp2[j * n + i] = v;
    }
  }

  auto scan = [&](std::size_t lo, std::size_t hi) {
    int best = 0;
    for (std::size_t x = lo; x < hi; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        int xy = gp2[x * n + y];
        for (std::size_t z = 0; z < n; ++z) {
          int m = std::min(gp2[x * n + z], gp2[z * n + y]);
          if (m - xy > best) best = m - xy;
        }
      }
    return best;
  };

  int best2 = 0;
  if (threads <= 1) {
    best2 = scan(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<int> partial(static_cast<std::size_t>(threads), 0);
    std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = std::min(n, static_cast<std::size_t>(t) * chunk);
      std::size_t hi = std::min(n, lo + chunk);
      pool.emplace_back([&, t, lo, hi]() { partial[static_cast<std::size_t>(t)] = scan(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (int v : partial) best2 = std::max(best2, v);
  }
  return 0.5 * best2;
}

// min over r >= 1 of |B(r)|^(1/r); an upper bound for the growth rate by
// submultiplicativity, decreasing toward it as the radius grows.
inline double growth_upper_estimate(const std::vector<long long>& ball_counts) {
  if (ball_counts.size() < 2) throw GuardError("growth_upper_estimate: need counts for r >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < ball_counts.size(); ++r)
    best = std::min(best, std::pow(static_cast<double>(ball_counts[r]), 1.0 / static_cast<double>(r)));
  return best;
}

// Empirical witness for card B(r) <= alpha * lambda^r: the largest observed
// ratio over the computed radii.
inline double coornaert_alpha(const std::vector<long long>& ball_counts, double lambda) {
  if (lambda <= 1.0) throw DomainError("coornaert_alpha: needs lambda > 1");
  double best = 0.0;
  double pw = 1.0;
  for (std::size_t r = 0; r < ball_counts.size(); ++r) {
    best = std::max(best, static_cast<double>(ball_counts[r]) / pw);
    pw *= lambda;
  }
  return best;
}

}  // namespace hypergrowth
