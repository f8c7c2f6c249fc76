#pragma once

// The separated-subset lemma, the truncated H iteration and its fixed
// point, the F iteration, and the verification of the three F properties.
//
// The paper's H_i live in the infinite group; inside a finite ball,
// elements within distance r of the boundary cannot be evaluated (their
// extensions may be missing). Membership tests therefore run only on the
// interior |g| <= N - r, and boundary elements are credited optimistically
// so that interior tests never see false negatives. All verdicts are
// reported "on the interior" only.

#include <cmath>
#include <optional>
#include <vector>

#include "hypergrowth/cayley.hpp"
#include "hypergrowth/errors.hpp"
#include "hypergrowth/lexgeo.hpp"

namespace hypergrowth {

// Greedy 20-delta-style separated subset: sweeps P in canonical
// (length, lex) order keeping elements farther than the threshold from all
// chosen ones. Realizes the separation lemma with the explicit ratio
// 1 / |B(threshold)|.
struct SeparatedSubset {
  std::vector<ElementId> chosen;
  double threshold = 0;
  double ratio = 0;  // |chosen| / |P|
};

inline SeparatedSubset greedy_separated(const Ball& ball, const std::vector<ElementId>& P, double threshold) {
  SeparatedSubset out;
  out.threshold = threshold;
  std::vector<ElementId> sorted(P);
  std::sort(sorted.begin(), sorted.end());
  for (ElementId g : sorted) {
    bool far = true;
    for (ElementId h : out.chosen)
      if (ball.distance(g, h) <= threshold) {
        far = false;
        break;
      }
    if (far) out.chosen.push_back(g);
  }
  out.ratio = P.empty() ? 1.0 : static_cast<double>(out.chosen.size()) / static_cast<double>(P.size());
  return out;
}

// Nested stages H_0 (everything) down to the fixed point H, as indicator
// vectors over the ball. Only interior elements carry verdicts; boundary
// elements are flagged assumed.
struct HIteration {
  double r = 0;
  double nu = 0;
  double delta = 0;
  double lambda = 0;
  double effective_width = 1;  // e = max(9 delta, 1)
  int interior_radius = 0;     // N_int = N - ceil(r)
  std::vector<std::vector<char>> stages;  // stage i -> indicator over ball ids (interior verdicts)
  std::vector<char> fixed_point;          // final interior verdicts
  std::vector<char> assumed;              // boundary ring, credited not tested
  bool identity_in_H = false;

  bool credited(ElementId g) const {
    return assumed[static_cast<std::size_t>(g)] || fixed_point[static_cast<std::size_t>(g)];
  }

  long long interior_count() const {
    long long n = 0;
    for (std::size_t i = 0; i < fixed_point.size(); ++i)
      if (fixed_point[i] && !assumed[i]) ++n;
    return n;
  }
};

namespace detail {

// |L_g n g^-1 S n A(r, e)| where S is given by a credit predicate.
template <typename CreditFn>
long long lex_annulus_count(const Ball& ball, const LexGeodesicMap& lexmap, ElementId g, const Annulus& an,
                            CreditFn credited) {
  long long count = 0;
  for (ElementId u = an.first; u < an.last; ++u) {
    ElementId gu = ball.walk(g, ball.elements[static_cast<std::size_t>(u)]);
    if (gu < 0 || !credited(gu)) continue;
    if (lexmap.passes_through(ball, gu, g)) ++count;
  }
  return count;
}

}  // namespace detail

// Iterates H_{i+1} = { g in H_i interior : |L_g n g^-1 H_i n A(r,e)| >= nu lambda^r }
// to exact stabilization.
inline HIteration build_H(const Ball& ball, const LexGeodesicMap& lexmap, double r, double nu, double delta,
                          double lambda) {
  if (delta > 0 && r < 10 * delta) throw GuardError("build_H: needs r >= 10 delta");
  if (r < 1) throw GuardError("build_H: needs r >= 1 (tree mode)");
  if (2 * r > ball.radius) throw GuardError("build_H: needs r <= N/2");
  HIteration H;
  H.r = r;
  H.nu = nu;
  H.delta = delta;
  H.lambda = lambda;
  H.effective_width = std::max(9.0 * delta, 1.0);
  H.interior_radius = ball.radius - static_cast<int>(std::ceil(r));

  const Annulus an = annulus(ball, r, H.effective_width);
  // Thresholds compare an integer count against nu * lambda^r; a hair of
  // slack keeps exact-integer boundaries (nu rational, lambda integral)
  // from flipping on the last floating-point bit.
  const double threshold = nu * std::pow(lambda, r) - 1e-9;

  H.assumed.assign(static_cast<std::size_t>(ball.size()), 0);
  std::vector<char> cur(static_cast<std::size_t>(ball.size()), 0);
  for (ElementId g = 0; g < ball.size(); ++g) {
    if (ball.dist(g) > H.interior_radius)
      H.assumed[static_cast<std::size_t>(g)] = 1;
    else
      cur[static_cast<std::size_t>(g)] = 1;
  }
  H.stages.push_back(cur);

  while (true) {
    std::vector<char> next(cur);
    bool changed = false;
    for (ElementId g = 0; g < ball.size(); ++g) {
      if (!cur[static_cast<std::size_t>(g)]) continue;
      long long count = detail::lex_annulus_count(ball, lexmap, g, an, [&](ElementId h) {
        return H.assumed[static_cast<std::size_t>(h)] || cur[static_cast<std::size_t>(h)] != 0;
      });
      if (static_cast<double>(count) < threshold) {
        next[static_cast<std::size_t>(g)] = 0;
        changed = true;
      }
    }
    if (!changed) break;
    H.stages.push_back(next);
    cur = std::move(next);
  }
  H.fixed_point = cur;
  H.identity_in_H = cur[0] != 0;
  return H;
}

// Stages F_0 = {1}, F_{i+1} = union over g in F_i of
// g (L_g n g^-1 H n A(r,e)), until no new elements appear. Boundary
// elements join as leaves but are not extended.
struct FSet {
  std::vector<std::vector<ElementId>> stages;
  std::vector<char> membership;  // over ball ids
  double r = 0;

  long long size() const {
    long long n = 0;
    for (char c : membership) n += c;
    return n;
  }
};

inline FSet build_F(const Ball& ball, const LexGeodesicMap& lexmap, const HIteration& H, double r) {
  FSet F;
  F.r = r;
  F.membership.assign(static_cast<std::size_t>(ball.size()), 0);
  F.membership[0] = 1;
  F.stages.push_back({0});
  const Annulus an = annulus(ball, r, H.effective_width);

  while (true) {
    std::vector<ElementId> next;
    for (ElementId g : F.stages.back()) {
      if (ball.dist(g) > H.interior_radius) continue;  // leaf: cannot extend safely
      for (ElementId u = an.first; u < an.last; ++u) {
        ElementId gu = ball.walk(g, ball.elements[static_cast<std::size_t>(u)]);
        if (gu < 0 || !H.credited(gu)) continue;
        if (!lexmap.passes_through(ball, gu, g)) continue;
        if (!F.membership[static_cast<std::size_t>(gu)]) {
          F.membership[static_cast<std::size_t>(gu)] = 1;
          next.push_back(gu);
        }
      }
    }
    if (next.empty()) break;
    F.stages.push_back(std::move(next));
  }
  return F;
}

struct FPropertyReport {
  bool identity_in_F = false;                       // property (1)
  std::vector<ElementId> growth_violations;         // property (2), interior only
  std::vector<std::pair<ElementId, ElementId>> gap_violations;  // property (3): (g, x)
  long long interior_members = 0;

  bool ok() const { return identity_in_F && growth_violations.empty() && gap_violations.empty(); }
};

// Checks, on the interior, the three properties the F construction promises:
// (1) 1 in F; (2) every g in F extends within F at rate nu lambda^r through
// its lexicographic type; (3) every vertex of sigma_g has an F element at
// distance <= r behind it.
inline FPropertyReport verify_F_properties(const FSet& F, const HIteration& H, const Ball& ball,
                                           const LexGeodesicMap& lexmap, double r, double nu, double lambda) {
  FPropertyReport rep;
  rep.identity_in_F = F.membership[0] != 0;
  const Annulus an = annulus(ball, r, H.effective_width);
  const double threshold = nu * std::pow(lambda, r) - 1e-9;

  for (ElementId g = 0; g < ball.size(); ++g) {
    if (!F.membership[static_cast<std::size_t>(g)]) continue;
    if (ball.dist(g) > H.interior_radius) continue;
    ++rep.interior_members;

    long long count = detail::lex_annulus_count(ball, lexmap, g, an, [&](ElementId h) {
      return F.membership[static_cast<std::size_t>(h)] != 0;
    });
    if (static_cast<double>(count) < threshold) rep.growth_violations.push_back(g);

    // property (3): walk sigma_g, tracking the last F vertex seen
    ElementId cur = g;
    std::vector<ElementId> path;  // from g back to 1
    while (cur >= 0) {
      path.push_back(cur);
      cur = lexmap.parent[static_cast<std::size_t>(cur)];
    }
    std::reverse(path.begin(), path.end());
    int last_f = -1;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (F.membership[static_cast<std::size_t>(path[i])]) last_f = static_cast<int>(i);
      if (last_f < 0 || static_cast<double>(i - static_cast<std::size_t>(last_f)) > r)
        rep.gap_violations.emplace_back(g, path[i]);
    }
  }
  return rep;
}

struct HDensityReport {
  long long checked = 0;
  std::vector<ElementId> violations;  // interior essential g with B(g, 4 delta) n H empty

  bool ok() const { return violations.empty(); }
};

// For each interior essential element g, B(g, 4 delta) must meet H. In tree
// mode (delta = 0) this says every essential interior element is in H
// itself.
inline HDensityReport verify_H_density(const HIteration& H, const std::vector<char>& essential_elements,
                                       const Ball& ball, double delta) {
  HDensityReport rep;
  const int hops = static_cast<int>(std::floor(4 * delta));
  for (ElementId g = 0; g < ball.size(); ++g) {
    if (!essential_elements[static_cast<std::size_t>(g)]) continue;
    if (ball.dist(g) > H.interior_radius) continue;
    ++rep.checked;
    bool found = H.fixed_point[static_cast<std::size_t>(g)] != 0;
    if (found) continue;
    if (hops == 0) {
      rep.violations.push_back(g);
      continue;
    }
    // breadth-first to depth 4 delta
    std::vector<char> seen(static_cast<std::size_t>(ball.size()), 0);
    std::vector<ElementId> frontier{g};
    seen[static_cast<std::size_t>(g)] = 1;
    for (int depth = 1; depth <= hops && !found; ++depth) {
      std::vector<ElementId> next;
      for (ElementId v : frontier) {
        for (int x = 0; x < ball.degree() && !found; ++x) {
          ElementId n = ball.neighbor(v, static_cast<Letter>(x));
          if (n < 0 || seen[static_cast<std::size_t>(n)]) continue;
          seen[static_cast<std::size_t>(n)] = 1;
          next.push_back(n);
          if (H.credited(n)) found = true;
        }
        if (found) break;
      }
      frontier = std::move(next);
    }
    if (!found) rep.violations.push_back(g);
  }
  return rep;
}

}  // namespace hypergrowth
