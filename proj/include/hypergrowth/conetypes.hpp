#pragma once

// Cone types, the cone-type automaton, the growth rate as its Perron value,
// and the classification of essential types with the empirical beta / gamma
// constants.
//
// States are truncated cone signatures {u in B(R) : |gu| = |g| + |u|}.
// Transitions follow lexicographic-geodesic extensions (sigma_{gx} =
// sigma_g x). Every element then contributes exactly one accepted path per
// radius, so automaton path counts must reproduce BFS sphere counts
// exactly; the builder cross-checks that signature-equal elements behave
// identically and rejects the lookahead otherwise.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "hypergrowth/cayley.hpp"
#include "hypergrowth/errors.hpp"
#include "hypergrowth/lexgeo.hpp"

namespace hypergrowth {

using StateId = std::int32_t;

// Truncated cone type of g: member ids u (in B(R)) with |gu| = |g| + |u|.
// Contains the identity and is closed under geodesic prefixes.
inline std::vector<ElementId> cone_signature(const Ball& ball, ElementId g, int R) {
  if (ball.dist(g) + R > ball.radius)
    throw GuardError("cone_signature: |g| + R exceeds the ball radius");
  std::vector<ElementId> members;
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(R) + 1]);
  int dg = ball.dist(g);
  for (ElementId u = 0; u < limit; ++u) {
    ElementId gu = ball.walk(g, ball.elements[static_cast<std::size_t>(u)]);
    if (gu >= 0 && ball.dist(gu) == dg + ball.dist(u)) members.push_back(u);
  }
  return members;
}

class ConeAutomaton {
 public:
  int lookahead = 0;                     // R
  StateId start = 0;
  std::vector<std::vector<ElementId>> state_members;  // signature sets
  std::vector<ElementId> state_rep;                   // smallest element with the signature
  std::vector<std::vector<StateId>> delta;            // delta[s][letter], -1 if absent
  std::vector<std::vector<long long>> counts;         // counts[s][t] = #letters s -> t
  std::vector<StateId> state_of;                      // element id -> state, -1 past the margin
  int classified_radius = 0;                          // elements with |g| <= this have states

  StateId state_count() const { return static_cast<StateId>(state_members.size()); }

  // Number of accepted paths of each length r = 0..rmax; equals the sphere
  // counts of the underlying group for every checkable radius.
  std::vector<long long> path_counts(int rmax) const {
    std::vector<long long> cur(static_cast<std::size_t>(state_count()), 0);
    cur[static_cast<std::size_t>(start)] = 1;
    std::vector<long long> out{1};
    for (int r = 1; r <= rmax; ++r) {
      std::vector<long long> next(static_cast<std::size_t>(state_count()), 0);
      for (StateId s = 0; s < state_count(); ++s) {
        if (cur[static_cast<std::size_t>(s)] == 0) continue;
        for (StateId t = 0; t < state_count(); ++t)
          next[static_cast<std::size_t>(t)] += cur[static_cast<std::size_t>(s)] * counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      }
      long long total = 0;
      for (long long v : next) total += v;
      out.push_back(total);
      cur = std::move(next);
    }
    return out;
  }
};

// Builds the cone-type automaton over the elements of B(radius - R).
// Signatures are computed for all of them; transitions are recorded for
// elements one step further inside, where successor signatures exist.
inline ConeAutomaton build_automaton(const Ball& ball, const LexGeodesicMap& lexmap, int R) {
  if (R < 1) throw GuardError("build_automaton: lookahead must be >= 1");
  if (2 * R > ball.radius)
    throw GuardError("build_automaton: need 2R <= ball radius to compute successor signatures");
  const int margin = ball.radius - R;
  const int deg = ball.degree();

  ConeAutomaton aut;
  aut.lookahead = R;
  aut.classified_radius = margin;
  aut.state_of.assign(static_cast<std::size_t>(ball.size()), -1);

  std::map<std::vector<ElementId>, StateId> key_to_state;
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(margin) + 1]);
  for (ElementId g = 0; g < limit; ++g) {
    std::vector<ElementId> sig = cone_signature(ball, g, R);
    auto [it, fresh] = key_to_state.try_emplace(std::move(sig), aut.state_count());
    if (fresh) {
      aut.state_members.push_back(it->first);
      aut.state_rep.push_back(g);
    }
    aut.state_of[static_cast<std::size_t>(g)] = it->second;
  }
  aut.start = aut.state_of[0];

  // Transition profile per element: the set of lexicographic extension
  // letters and their target states. Elements sharing a signature must
  // agree, otherwise R is too small to separate their types.
  aut.delta.assign(static_cast<std::size_t>(aut.state_count()), std::vector<StateId>(static_cast<std::size_t>(deg), -1));
  std::vector<ElementId> profile_owner(static_cast<std::size_t>(aut.state_count()), -1);
  ElementId inner = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(margin)]);
  for (ElementId g = 0; g < inner; ++g) {
    StateId s = aut.state_of[static_cast<std::size_t>(g)];
    std::vector<StateId> prof(static_cast<std::size_t>(deg), -1);
    for (int x = 0; x < deg; ++x) {
      ElementId gx = ball.neighbor(g, static_cast<Letter>(x));
      if (gx < 0 || ball.dist(gx) != ball.dist(g) + 1) continue;
      if (lexmap.parent[static_cast<std::size_t>(gx)] != g) continue;  // not the sigma extension
      prof[static_cast<std::size_t>(x)] = aut.state_of[static_cast<std::size_t>(gx)];
    }
    if (profile_owner[static_cast<std::size_t>(s)] < 0) {
      profile_owner[static_cast<std::size_t>(s)] = g;
      aut.delta[static_cast<std::size_t>(s)] = std::move(prof);
    } else if (aut.delta[static_cast<std::size_t>(s)] != prof) {
      const Alphabet& a = ball.alphabet();
      throw SignatureCollisionError(
          "build_automaton: elements '" + a.display(ball.elements[static_cast<std::size_t>(profile_owner[static_cast<std::size_t>(s)])] ) +
          "' and '" + a.display(ball.elements[static_cast<std::size_t>(g)]) +
          "' share a signature but extend differently; increase the lookahead R");
    }
  }

  aut.counts.assign(static_cast<std::size_t>(aut.state_count()), std::vector<long long>(static_cast<std::size_t>(aut.state_count()), 0));
  for (StateId s = 0; s < aut.state_count(); ++s)
    for (int x = 0; x < deg; ++x) {
      StateId t = aut.delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
      if (t >= 0) ++aut.counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
    }
  return aut;
}

namespace detail {

// Tarjan strongly connected components over the transition digraph.
inline std::vector<int> strongly_connected_components(const std::vector<std::vector<long long>>& counts, int& n_sccs) {
  const int n = static_cast<int>(counts.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0), comp(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  int next_index = 0;
  n_sccs = 0;

  struct Frame {
    int v;
    int next_w;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      bool descended = false;
      while (f.next_w < n) {
        int w = f.next_w++;
        if (counts[static_cast<std::size_t>(f.v)][static_cast<std::size_t>(w)] == 0) continue;
        if (index[static_cast<std::size_t>(w)] == -1) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[static_cast<std::size_t>(w)])
          low[static_cast<std::size_t>(f.v)] = std::min(low[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
      }
      if (descended) continue;
      if (low[static_cast<std::size_t>(f.v)] == index[static_cast<std::size_t>(f.v)]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = n_sccs;
          if (w == f.v) break;
        }
        ++n_sccs;
      }
      int v = f.v;
      call.pop_back();
      if (!call.empty())
        low[static_cast<std::size_t>(call.back().v)] = std::min(low[static_cast<std::size_t>(call.back().v)], low[static_cast<std::size_t>(v)]);
    }
  }
  return comp;
}

// Perron value of an irreducible nonnegative matrix via power iteration on
// M + I (primitive on a strongly connected component), using the
// Collatz-Wielandt bracket as the stopping criterion.
inline double perron_value_scc(const std::vector<std::vector<long long>>& counts, const std::vector<int>& nodes,
                               double tol, long long max_iters) {
  const std::size_t m = nodes.size();
  if (m == 1) {
    return static_cast<double>(counts[static_cast<std::size_t>(nodes[0])][static_cast<std::size_t>(nodes[0])]);
  }
  std::vector<double> x(m, 1.0), y(m);
  double width = std::numeric_limits<double>::infinity();
  for (long long it = 0; it < max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double acc = x[i];  // the +I shift
      const auto& row = counts[static_cast<std::size_t>(nodes[i])];
      for (std::size_t j = 0; j < m; ++j) acc += static_cast<double>(row[static_cast<std::size_t>(nodes[j])]) * x[j];
      y[i] = acc;
      double ratio = acc / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      norm = std::max(norm, acc);
    }
    width = hi - lo;
    if (width <= tol * std::max(1.0, hi)) return 0.5 * (hi + lo) - 1.0;
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
  }
  throw ConvergenceError("perron_value_scc: power iteration did not converge; residual bracket width " +
                         std::to_string(width));
}

}  // namespace detail

struct EssentialClassification {
  double lambda = 0;
  double tol = 1e-9;
  std::vector<double> state_value;  // Perron value of the best reachable SCC
  std::vector<char> essential;      // per state
  std::vector<int> scc_of;
  std::vector<double> scc_value;

  bool is_essential_state(StateId s) const { return essential[static_cast<std::size_t>(s)] != 0; }
};

// Per-state growth values: the Perron value of the best strongly connected
// component reachable from each state. The global rate is the start state's
// value.
inline EssentialClassification classify_growth(const ConeAutomaton& aut, double tol_perron = 1e-12,
                                               long long max_iters = 200000) {
  EssentialClassification cls;
  const int n = aut.state_count();
  int n_sccs = 0;
  cls.scc_of = detail::strongly_connected_components(aut.counts, n_sccs);
  cls.scc_value.assign(static_cast<std::size_t>(n_sccs), 0.0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_sccs));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(cls.scc_of[static_cast<std::size_t>(v)])].push_back(v);
  for (int c = 0; c < n_sccs; ++c)
    cls.scc_value[static_cast<std::size_t>(c)] = detail::perron_value_scc(aut.counts, members[static_cast<std::size_t>(c)], tol_perron, max_iters);

  // Tarjan emits components in reverse topological order: edges from
  // component c land in components with smaller ids, so one sweep in
  // increasing id order finalizes the reachable maxima.
  std::vector<double> best(cls.scc_value);
  for (int c = 0; c < n_sccs; ++c)
    for (int v : members[static_cast<std::size_t>(c)])
      for (int w = 0; w < n; ++w) {
        if (aut.counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] == 0) continue;
        int cw = cls.scc_of[static_cast<std::size_t>(w)];
        if (cw != c) best[static_cast<std::size_t>(c)] = std::max(best[static_cast<std::size_t>(c)], best[static_cast<std::size_t>(cw)]);
      }

  cls.state_value.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) cls.state_value[static_cast<std::size_t>(v)] = best[static_cast<std::size_t>(cls.scc_of[static_cast<std::size_t>(v)])];
  cls.lambda = cls.state_value[static_cast<std::size_t>(aut.start)];
  return cls;
}

// Perron value of the transition-count matrix: the growth rate lambda.
inline double spectral_radius(const ConeAutomaton& aut, double tol = 1e-12) {
  return classify_growth(aut, tol).lambda;
}

// Marks the states whose growth value is within a relative tolerance of
// lambda as essential.
inline EssentialClassification classify_essential(const ConeAutomaton& aut, double lambda, double tol = 1e-9) {
  EssentialClassification cls = classify_growth(aut);
  cls.lambda = lambda;
  cls.tol = tol;
  cls.essential.resize(cls.state_value.size());
  for (std::size_t s = 0; s < cls.state_value.size(); ++s)
    cls.essential[s] = std::fabs(cls.state_value[s] - lambda) <= tol * std::max(1.0, lambda) ? 1 : 0;
  return cls;
}

struct HeredityReport {
  long long checked = 0;
  std::vector<std::pair<StateId, StateId>> violations;  // (s, essential successor) with s not essential

  bool ok() const { return violations.empty(); }
};

// If gu is essential then so is g: per transition s -> t, an essential t
// forces an essential s. Violations must be empty on every automaton.
inline HeredityReport verify_heredity(const EssentialClassification& cls, const ConeAutomaton& aut) {
  HeredityReport rep;
  for (StateId s = 0; s < aut.state_count(); ++s)
    for (StateId t = 0; t < aut.state_count(); ++t) {
      if (aut.counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] == 0) continue;
      ++rep.checked;
      if (cls.is_essential_state(t) && !cls.is_essential_state(s)) rep.violations.emplace_back(s, t);
    }
  return rep;
}

struct BetaGammaEstimate {
  double beta = 0;
  double gamma = 0;
  StateId beta_state = -1;
  int beta_radius = 0;
  ElementId gamma_element = -1;
  int gamma_radius = 0;
  long long gamma_elements_scanned = 0;
};

// Empirical lower-bound witnesses for the essential-type growth constants:
//   beta-hat  = min over essential types T, 1 <= r <= r_max of |T n B(r)| / lambda^r
//   gamma-hat = min over essential g, 1 <= r <= r_max of
//               |T_g n g^-1 E n A(r, e)| / lambda^r
// (r = 0 contributes the uninformative ratio 1 and is used only when
// r_max = 0.)
inline BetaGammaEstimate estimate_beta_gamma(const Ball& ball, const ConeAutomaton& aut,
                                             const EssentialClassification& cls, int r_max, double e) {
  if (e < 1.0) throw GuardError("estimate_beta_gamma: effective width must be >= 1");
  if (r_max < 0) throw GuardError("estimate_beta_gamma: r_max must be >= 0");
  BetaGammaEstimate est;
  const double lambda = cls.lambda;
  const int rlo = r_max >= 1 ? 1 : 0;

  // beta-hat over essential types, using the smallest representative that
  // leaves room for a radius-r_max cone.
  est.beta = std::numeric_limits<double>::infinity();
  for (StateId s = 0; s < aut.state_count(); ++s) {
    if (!cls.is_essential_state(s)) continue;
    ElementId rep = -1;
    for (ElementId g = 0; g < static_cast<ElementId>(aut.state_of.size()); ++g) {
      if (aut.state_of[static_cast<std::size_t>(g)] == s && ball.dist(g) + r_max <= ball.radius) {
        rep = g;
        break;
      }
    }
    if (rep < 0)
      throw GuardError("estimate_beta_gamma: no representative of an essential type fits |g| + r_max <= N");
    std::vector<ElementId> members = cone_signature(ball, rep, r_max);
    std::vector<long long> cum(static_cast<std::size_t>(r_max) + 1, 0);
    for (ElementId u : members) ++cum[static_cast<std::size_t>(ball.dist(u))];
    for (int r = 1; r <= r_max; ++r) cum[static_cast<std::size_t>(r)] += cum[static_cast<std::size_t>(r) - 1];
    for (int r = rlo; r <= r_max; ++r) {
      double ratio = static_cast<double>(cum[static_cast<std::size_t>(r)]) / std::pow(lambda, r);
      if (ratio < est.beta) {
        est.beta = ratio;
        est.beta_state = s;
        est.beta_radius = r;
      }
    }
  }

  // gamma-hat over essential elements with enough room that every extension
  // gu still has a classified state.
  est.gamma = std::numeric_limits<double>::infinity();
  int g_limit = aut.classified_radius - r_max;
  if (g_limit < 0) throw GuardError("estimate_beta_gamma: r_max exceeds the classified margin");
  ElementId g_end = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(g_limit) + 1]);
  for (ElementId g = 0; g < g_end; ++g) {
    StateId s = aut.state_of[static_cast<std::size_t>(g)];
    if (s < 0 || !cls.is_essential_state(s)) continue;
    ++est.gamma_elements_scanned;
    std::vector<ElementId> members = cone_signature(ball, g, r_max);
    std::vector<long long> essential_at(static_cast<std::size_t>(r_max) + 1, 0);
    for (ElementId u : members) {
      ElementId gu = ball.walk(g, ball.elements[static_cast<std::size_t>(u)]);
      StateId su = aut.state_of[static_cast<std::size_t>(gu)];
      if (su >= 0 && cls.is_essential_state(su)) ++essential_at[static_cast<std::size_t>(ball.dist(u))];
    }
    for (int r = rlo; r <= r_max; ++r) {
      int len_lo = std::max(0, static_cast<int>(std::ceil(static_cast<double>(r) - e)));
      long long count = 0;
      for (int len = len_lo; len <= r; ++len) count += essential_at[static_cast<std::size_t>(len)];
      double ratio = static_cast<double>(count) / std::pow(lambda, r);
      if (ratio < est.gamma) {
        est.gamma = ratio;
        est.gamma_element = g;
        est.gamma_radius = r;
      }
    }
  }
  return est;
}

}  // namespace hypergrowth
