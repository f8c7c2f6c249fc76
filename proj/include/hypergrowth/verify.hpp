#pragma once

// The bundled test groups, the ledger derivation pipeline, and the
// verification battery driven by `hypergrowth verify` and by the acceptance
// suite. Report text is fully deterministic: identical runs produce
// byte-identical reports (timings are kept out of the text).

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hypergrowth/aperiodic.hpp"
#include "hypergrowth/bounds.hpp"
#include "hypergrowth/cayley.hpp"
#include "hypergrowth/conetypes.hpp"
#include "hypergrowth/fset.hpp"
#include "hypergrowth/lexgeo.hpp"
#include "hypergrowth/oracles.hpp"
#include "hypergrowth/presentation.hpp"

namespace hypergrowth {

struct BundledGroup {
  std::string name;
  std::string text;
  int kb_max_rules = 4000;
  int kb_max_rule_len = 16;
  int automaton_radius = 8;  // ball radius for automaton-based checks
  int lookahead = 1;
};

inline const std::vector<BundledGroup>& bundled_groups() {
  static const std::vector<BundledGroup> groups = {
      {"f2", "gens: a b\nassert: torsion-free\n", 100, 16, 8, 1},
      {"f3", "gens: a b c\nassert: torsion-free\n", 100, 16, 6, 1},
      {"z2", "gens: a b\nrel: abAB\nassert: torsion-free\n", 200, 16, 8, 2},
      {"surface", "gens: a b c d\nrel: abABcdCD\nassert: torsion-free\n", 4000, 16, 6, 3},
  };
  return groups;
}

// Caches oracles, balls and lex maps across criteria so the battery does
// not rebuild the same geometry repeatedly.
class GroupCache {
 public:
  explicit GroupCache(std::string presentations_dir = "") : dir_(std::move(presentations_dir)) {}

  const BundledGroup& spec(const std::string& name) const {
    for (const BundledGroup& g : bundled_groups())
      if (g.name == name) return g;
    throw ParseError("unknown bundled group '" + name + "'");
  }

  const GroupOracle& oracle(const std::string& name) {
    auto it = oracles_.find(name);
    if (it != oracles_.end()) return *it->second;
    const BundledGroup& g = spec(name);
    Presentation p = dir_.empty() ? parse_presentation(g.text, g.name)
                                  : load_presentation_file(dir_ + "/" + g.name + ".grp");
    auto oracle = std::make_shared<GroupOracle>(GroupOracle::for_presentation(p, g.kb_max_rules, g.kb_max_rule_len));
    return *oracles_.emplace(name, std::move(oracle)).first->second;
  }

  const Ball& ball(const std::string& name, int radius) {
    auto key = std::make_pair(name, radius);
    auto it = balls_.find(key);
    if (it != balls_.end()) return *it->second;
    auto b = std::make_shared<Ball>(build_ball(oracle(name), radius));
    return *balls_.emplace(key, std::move(b)).first->second;
  }

  const LexGeodesicMap& lexmap(const std::string& name, int radius) {
    auto key = std::make_pair(name, radius);
    auto it = lexmaps_.find(key);
    if (it != lexmaps_.end()) return *it->second;
    auto m = std::make_shared<LexGeodesicMap>(lex_geodesics(ball(name, radius)));
    return *lexmaps_.emplace(key, std::move(m)).first->second;
  }

 private:
  std::string dir_;
  std::map<std::string, std::shared_ptr<GroupOracle>> oracles_;
  std::map<std::pair<std::string, int>, std::shared_ptr<Ball>> balls_;
  std::map<std::pair<std::string, int>, std::shared_ptr<LexGeodesicMap>> lexmaps_;
};

// ---------------------------------------------------------------------------
// Ledger derivation

// Derives the full constants ledger from one group's computed geometry.
// Everything is an empirical witness over the computed range except where
// tree mode makes values exact.
inline ConstantsLedger derive_ledger(const Ball& ball, const LexGeodesicMap& lexmap, const ConeAutomaton& aut,
                                     const EssentialClassification& cls, int r_max, int stable_samples = 12,
                                     int power_steps = 6) {
  (void)lexmap;
  double delta_hat = estimate_delta(ball);
  double lambda = cls.lambda;
  double alpha_hat = lambda > 1 ? coornaert_alpha(ball.ball_counts(), lambda) : 1.0;
  double e = std::max(9.0 * delta_hat, 1.0);
  BetaGammaEstimate bg = estimate_beta_gamma(ball, aut, cls, r_max, e);

  long long ball20 = ball.ball_count(std::min(ball.radius, static_cast<int>(std::ceil(20 * delta_hat))));
  long long ball4 = ball.ball_count(std::min(ball.radius, static_cast<int>(std::ceil(4 * delta_hat))));
  double rho = 1.0 / static_cast<double>(ball20);
  double nu = rho * bg.gamma * std::pow(lambda, -4.0 * delta_hat) / static_cast<double>(ball4);

  std::vector<Rational> lengths;
  int taken = 0;
  for (ElementId g = 1; g < ball.size() && taken < stable_samples; ++g) {
    const Word& w = ball.elements[static_cast<std::size_t>(g)];
    if (static_cast<int>(w.size()) * (power_steps + 1) > ball.oracle.certified_length()) continue;
    StableLengthEstimate est = stable_length(ball.oracle, w, std::max(4, power_steps));
    if (est.value > 0) {
      lengths.push_back(est.value);
      ++taken;
    }
  }
  Rational tau_hat = lengths.empty() ? Rational(1) : estimate_tau(lengths);
  double tau = static_cast<double>(numerator(tau_hat)) / static_cast<double>(denominator(tau_hat));

  bool tree = ball.oracle.is_free();
  Provenance flag = tree ? Provenance::exact : Provenance::empirical;
  return ConstantsLedger::derived(Real(delta_hat), Real(lambda), Real(alpha_hat), Real(bg.beta), Real(bg.gamma),
                                  Real(rho), Real(nu), Real(tau), flag);
}

// ---------------------------------------------------------------------------
// Battery

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyOptions {
  std::string group_filter;       // empty = all bundled groups
  std::string presentations_dir;  // empty = embedded texts
};

namespace battery {

inline bool group_selected(const VerifyOptions& opt, const std::string& name) {
  return opt.group_filter.empty() || opt.group_filter == name;
}

// (L,m)-aperiodicity flags for every element of the ball.
inline std::vector<char> aperiodic_flags(const Ball& ball, const LexGeodesicMap& lexmap, int L, int m) {
  std::vector<char> flags(static_cast<std::size_t>(ball.size()), 0);
  ElementId limit = static_cast<ElementId>(ball.sphere_start[static_cast<std::size_t>(ball.radius - L) + 1]);
  for (ElementId g = 0; g < limit; ++g)
    flags[static_cast<std::size_t>(g)] = detect_Lm_power(ball, lexmap, g, L, m) ? 0 : 1;
  return flags;
}

// Runs one group's share of a criterion, turning any error into a FAIL
// entry for that group without touching the others.
template <typename Fn>
void per_group(CriterionResult& res, std::ostringstream& detail, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    res.pass = false;
    detail << name << " errored: " << e.what() << "; ";
  }
}

inline CriterionResult ball_counts_exact(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"ball-counts-exact", true, "", 0};
  std::ostringstream detail;
  if (group_selected(opt, "f2")) per_group(res, detail, "f2", [&] {
    const Ball& b = cache.ball("f2", 12);
    long long expect = 1;
    for (int r = 0; r <= 12; ++r) {
      if (b.ball_count(r) != expect) {
        res.pass = false;
        detail << "F2 |B(" << r << ")| = " << b.ball_count(r) << " != " << expect << "; ";
      }
      expect = expect * 3 + 2;  // 2*3^(r+1) - 1 from 2*3^r - 1
    }
    detail << "F2 |B(12)| = " << b.ball_count(12) << "; ";
  });
  if (group_selected(opt, "z2")) per_group(res, detail, "z2", [&] {
    const Ball& b = cache.ball("z2", 12);
    for (int r = 0; r <= 12; ++r) {
      long long expect = 2LL * r * r + 2 * r + 1;
      if (b.ball_count(r) != expect) {
        res.pass = false;
        detail << "Z2 |B(" << r << ")| = " << b.ball_count(r) << " != " << expect << "; ";
      }
    }
    detail << "Z2 |B(12)| = " << cache.ball("z2", 12).ball_count(12);
  });
  res.detail = detail.str();
  return res;
}

inline CriterionResult automaton_growth(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"automaton-growth", true, "", 0};
  std::ostringstream detail;
  for (const auto& [name, expect] : {std::pair<std::string, double>{"f2", 3.0}, {"f3", 5.0}}) {
    if (!group_selected(opt, name)) continue;
    per_group(res, detail, name, [&, name = name, expect = expect] {
      const BundledGroup& g = cache.spec(name);
      const Ball& b = cache.ball(name, g.automaton_radius);
      ConeAutomaton aut = build_automaton(b, cache.lexmap(name, g.automaton_radius), g.lookahead);
      double lambda = spectral_radius(aut);
      if (std::fabs(lambda - expect) > 1e-9) {
        res.pass = false;
        detail << name << " lambda = " << lambda << " != " << expect << "; ";
      }
      std::vector<long long> pc = aut.path_counts(b.radius - g.lookahead);
      for (int r = 0; r <= b.radius - g.lookahead; ++r)
        if (pc[static_cast<std::size_t>(r)] != b.sphere_count(r)) {
          res.pass = false;
          detail << name << " path count r=" << r << " " << pc[static_cast<std::size_t>(r)] << " != "
                 << b.sphere_count(r) << "; ";
        }
      detail << name << " lambda = " << lambda << ", path counts match spheres for r <= "
             << b.radius - g.lookahead << "; ";
    });
  }
  res.detail = detail.str();
  return res;
}

inline CriterionResult ball_dominates_lambda(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"ball-dominates-lambda", true, "", 0};
  std::ostringstream detail;
  for (const BundledGroup& g : bundled_groups()) {
    if (!group_selected(opt, g.name)) continue;
    per_group(res, detail, g.name, [&, &g = g] {
      const Ball& b = cache.ball(g.name, g.automaton_radius);
      ConeAutomaton aut = build_automaton(b, cache.lexmap(g.name, g.automaton_radius), g.lookahead);
      double lambda = spectral_radius(aut);
      for (int r = 0; r <= b.radius; ++r) {
        double need = std::pow(lambda, r);
        if (static_cast<double>(b.ball_count(r)) < need * (1 - 1e-12)) {
          res.pass = false;
          detail << g.name << " |B(" << r << ")| = " << b.ball_count(r) << " < lambda^r = " << need << "; ";
        }
      }
      detail << g.name << " ok (lambda = " << lambda << "); ";
    });
  }
  res.detail = detail.str();
  return res;
}

inline CriterionResult free_recurrence(GroupCache&, const VerifyOptions& opt) {
  CriterionResult res{"free-recurrence", true, "", 0};
  if (!group_selected(opt, "f2")) {
    res.detail = "skipped by group filter";
    return res;
  }
  std::ostringstream detail;
  for (int m : {2, 3, 4}) {
    AperiodicCountTable t = count_aperiodic_free(2, m, 12);
    RecurrenceReport rep = verify_free_recurrence(t);
    if (!rep.ok) res.pass = false;
    detail << "m=" << m << (rep.ok ? " holds" : " VIOLATED") << " for s <= 12 (|F_m n B(12)| = "
           << t.counts[12] << "); ";
  }
  res.detail = detail.str();
  return res;
}

inline CriterionResult aperiodic_fixed_point(GroupCache&, const VerifyOptions& opt) {
  CriterionResult res{"aperiodic-fixed-point", true, "", 0};
  if (!group_selected(opt, "f2")) {
    res.detail = "skipped by group filter";
    return res;
  }
  std::ostringstream detail;
  auto m0 = find_m0_free<Real>(2, Real(5));
  auto m0_rescan = find_m0_free<Real200>(2, Real200(5));
  if (m0.m0 != 5 || m0_rescan.m0 != 5) {
    res.pass = false;
    detail << "m0 = " << m0.m0 << " (60 digits) / " << m0_rescan.m0 << " (200 digits), expected 5; ";
  } else {
    detail << "m0(k=2, a=5) = 5 at 60 and 200 digits; ";
  }
  for (int m : {5, 6}) {
    AperiodicCountTable t = count_aperiodic_free(2, m, 12);
    // mu_m = 3 (1 - 5 * 3^-m), exact rational
    BigInt three_m = 1;
    for (int i = 0; i < m; ++i) three_m *= 3;
    Rational mu = Rational(3) * (1 - Rational(5) / Rational(three_m));
    Rational mu_pow = 1;
    bool ok = true;
    for (int s = 0; s <= 12; ++s) {
      if (Rational(t.counts[static_cast<std::size_t>(s)]) < mu_pow) ok = false;
      mu_pow *= mu;
    }
    if (!ok) res.pass = false;
    detail << "m=" << m << " counts " << (ok ? ">=" : "FAIL <") << " mu^s for s <= 12; ";
  }
  res.detail = detail.str();
  return res;
}

inline CriterionResult power_oracle_equivalence(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"power-oracle-equivalence", true, "", 0};
  if (!group_selected(opt, "f2")) {
    res.detail = "skipped by group filter";
    return res;
  }
  const Ball& b = cache.ball("f2", 10);
  const LexGeodesicMap& lm = cache.lexmap("f2", 10);
  const Alphabet& a = b.alphabet();
  long long disagreements = 0, checked = 0;
  ElementId limit = static_cast<ElementId>(b.sphere_start[9]);
  for (int L : {0, 1, 2}) {
    std::vector<std::vector<char>> naive_by_m(4);
    for (int m : {2, 3}) naive_by_m[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(limit), 0);
    for (ElementId g = 0; g < limit; ++g)
      for (int m : {2, 3})
        naive_by_m[static_cast<std::size_t>(m)][static_cast<std::size_t>(g)] =
            oracles::contains_Lm_power_free(a, b.elements[static_cast<std::size_t>(g)], L, m) ? 1 : 0;
    for (int m : {2, 3})
      for (ElementId g = 0; g < limit; ++g) {
        bool detected = detect_Lm_power(b, lm, g, L, m).has_value();
        ++checked;
        if (detected != (naive_by_m[static_cast<std::size_t>(m)][static_cast<std::size_t>(g)] != 0)) ++disagreements;
      }
  }
  res.pass = disagreements == 0;
  std::ostringstream detail;
  detail << checked << " (g, L, m) cases, " << disagreements << " disagreements";
  res.detail = detail.str();
  return res;
}

inline CriterionResult aperiodicity_monotone(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"aperiodicity-monotone", true, "", 0};
  std::ostringstream detail;
  auto check = [&](const std::string& name, int radius, std::vector<int> Ls, std::vector<int> ms) {
    per_group(res, detail, name, [&] {
      const Ball& b = cache.ball(name, radius);
      const LexGeodesicMap& lm = cache.lexmap(name, radius);
      long long violations = 0;
      for (int L : Ls)
        for (int m : ms) {
          std::vector<char> flags = aperiodic_flags(b, lm, L, m);
          ElementId limit = static_cast<ElementId>(b.sphere_start[static_cast<std::size_t>(b.radius - L) + 1]);
          for (ElementId g = 1; g < limit; ++g) {
            ElementId h = lm.parent[static_cast<std::size_t>(g)];
            // g aperiodic requires its sigma-prefix h aperiodic
            if (flags[static_cast<std::size_t>(g)] && !flags[static_cast<std::size_t>(h)]) ++violations;
          }
        }
      if (violations != 0) res.pass = false;
      detail << name << " N=" << radius << ": " << violations << " violations; ";
    });
  };
  if (group_selected(opt, "f2")) check("f2", 10, {0}, {2, 3});
  if (group_selected(opt, "z2")) check("z2", 8, {0, 1}, {2, 3});
  res.detail = detail.str();
  return res;
}

inline CriterionResult lex_machinery(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"lex-machinery", true, "", 0};
  std::ostringstream detail;
  for (const auto& [name, radius] : {std::pair<std::string, int>{"f2", 8}, {"z2", 8}, {"surface", 5}}) {
    if (!group_selected(opt, name)) continue;
    per_group(res, detail, name, [&, name = name, radius = radius] {
      const Ball& b = cache.ball(name, radius);
      PrefixPropertyReport rep = verify_prefix_property(b, cache.lexmap(name, radius));
      if (!rep.ok()) res.pass = false;
      detail << name << " prefix property: " << rep.violations.size() << " violations in " << rep.checked
             << " checks; ";
    });
  }
  if (group_selected(opt, "z2")) per_group(res, detail, "z2", [&] {
    const Ball& b = cache.ball("z2", 8);
    const LexGeodesicMap& lm = cache.lexmap("z2", 8);
    long long mismatches = 0, checked = 0;
    ElementId limit = static_cast<ElementId>(b.sphere_start[7]);
    for (ElementId g = 0; g < limit; ++g) {
      ++checked;
      if (oracles::lex_least_geodesic(b, g) != lm.word(g)) ++mismatches;
    }
    if (mismatches != 0) res.pass = false;
    detail << "z2 brute-force lex minimality |g| <= 6: " << mismatches << " mismatches in " << checked;
  });
  res.detail = detail.str();
  return res;
}

inline CriterionResult hf_construction(GroupCache& cache, const VerifyOptions& opt) {
  CriterionResult res{"hf-construction", true, "", 0};
  std::ostringstream detail;
  if (group_selected(opt, "f2")) per_group(res, detail, "f2", [&] {
    const Ball& b = cache.ball("f2", 10);
    const LexGeodesicMap& lm = cache.lexmap("f2", 10);
    HIteration H = build_H(b, lm, 2.0, 1.0, 0.0, 3.0);
    FSet F = build_F(b, lm, H, 2.0);
    FPropertyReport rep = verify_F_properties(F, H, b, lm, 2.0, 1.0, 3.0);
    if (!rep.ok()) res.pass = false;
    detail << "f2 tree mode (r=2, nu=1, N=10): property1 " << (rep.identity_in_F ? "ok" : "FAIL") << ", property2 "
           << rep.growth_violations.size() << " violations, property3 " << rep.gap_violations.size()
           << " violations over " << rep.interior_members << " interior members; ";
  });
  for (const BundledGroup& g : bundled_groups()) {
    if (!group_selected(opt, g.name)) continue;
    per_group(res, detail, g.name, [&, &g = g] {
      const Ball& b = cache.ball(g.name, g.automaton_radius);
      ConeAutomaton aut = build_automaton(b, cache.lexmap(g.name, g.automaton_radius), g.lookahead);
      EssentialClassification cls = classify_essential(aut, spectral_radius(aut));
      HeredityReport her = verify_heredity(cls, aut);
      if (!her.ok()) res.pass = false;
      detail << g.name << " heredity: " << her.violations.size() << " violations in " << her.checked
             << " transitions; ";
    });
  }
  res.detail = detail.str();
  return res;
}

inline CriterionResult bound_calculators(GroupCache&, const VerifyOptions&) {
  CriterionResult res{"bound-calculators", true, "", 0};
  std::ostringstream detail;

  // Hand-computed value: lambda = 3, a = 5, eps = 0.01, n = 10^4 -> 2.7.
  Real hand = burnside_general_formula<Real>(Real(3), Real(5), Real("0.01"), 10000);
  if (abs(hand - Real("2.7")) > Real("1e-40")) {
    res.pass = false;
    detail << "general formula at n=10^4 = " << hand.str(20) << " != 2.7; ";
  } else {
    detail << "general formula <lambda=3, a=5, eps=0.01, n=10^4> = 2.7 exactly; ";
  }

  // Free bound: monotone over odd n, limit within 1e-9 at n ~ 10^9.
  {
    Real prev = -1;
    bool monotone = true;
    for (long long n : {13LL, 101LL, 1001LL, 100001LL, 1000000001LL}) {
      Real v = burnside_bound_free<Real>(2, Real(5), 0, 13, n).value;
      if (v <= prev) monotone = false;
      prev = v;
    }
    bool limit_ok = abs(Real(3) - prev) < Real("1e-9");
    if (!monotone || !limit_ok) res.pass = false;
    detail << "free bound monotone " << (monotone ? "ok" : "FAIL") << ", |3 - value(1e9+1)| < 1e-9 "
           << (limit_ok ? "ok" : "FAIL") << "; ";
  }

  // General bound: monotone and within 1e-9 of lambda at n ~ 10^9 for a
  // ledger with kappa1 close to 1 (a small).
  {
    ConstantsLedger l;
    l.delta = {Real(0), Provenance::user};
    l.lambda = {Real(3), Provenance::user};
    l.alpha = {Real(2), Provenance::user};
    l.beta = {Real(1), Provenance::user};
    l.gamma = {Real(1), Provenance::user};
    l.rho = {Real(1), Provenance::user};
    l.nu = {Real("0.99"), Provenance::user};
    l.tau = {Real(1), Provenance::user};
    l.kappa1 = {Real("0.99"), Provenance::user};
    l.kappa2 = {Real("0.01"), Provenance::user};
    int m0 = find_m0_general<Real>(l, Real(0)).m0;
    Real prev = -1;
    bool monotone = true;
    for (long long n : {10001LL, 100001LL, 10000001LL, 1000000001LL}) {
      Real v = burnside_bound_general<Real>(l, Real(0), Real(1), 3, n, m0).value;
      if (v <= prev) monotone = false;
      prev = v;
    }
    bool limit_ok = abs(Real(3) - prev) < Real("1e-9");
    if (!monotone || !limit_ok) res.pass = false;
    detail << "general bound monotone " << (monotone ? "ok" : "FAIL") << ", |lambda - value(1e9+1)| < 1e-9 "
           << (limit_ok ? "ok" : "FAIL") << " (m0 = " << m0 << ")";
  }
  res.detail = detail.str();
  return res;
}

}  // namespace battery

inline std::vector<CriterionResult> run_verify_battery(const VerifyOptions& opt) {
  GroupCache cache(opt.presentations_dir);
  using Fn = std::function<CriterionResult(GroupCache&, const VerifyOptions&)>;
  const std::vector<std::pair<std::string, Fn>> criteria = {
      {"ball-counts-exact", battery::ball_counts_exact},
      {"automaton-growth", battery::automaton_growth},
      {"ball-dominates-lambda", battery::ball_dominates_lambda},
      {"free-recurrence", battery::free_recurrence},
      {"aperiodic-fixed-point", battery::aperiodic_fixed_point},
      {"power-oracle-equivalence", battery::power_oracle_equivalence},
      {"aperiodicity-monotone", battery::aperiodicity_monotone},
      {"lex-machinery", battery::lex_machinery},
      {"hf-construction", battery::hf_construction},
      {"bound-calculators", battery::bound_calculators},
  };
  std::vector<CriterionResult> out;
  for (const auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = fn(cache, opt);
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("errored: ") + e.what();
    }
    res.name = name;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(res));
  }
  return out;
}

// Deterministic report: correctness verdicts only, no timings.
inline std::string render_report(const std::vector<CriterionResult>& results, const VerifyOptions& opt) {
  std::ostringstream out;
  out << "hypergrowth verification report\n";
  out << "group filter: " << (opt.group_filter.empty() ? "(all)" : opt.group_filter) << "\n";
  int passed = 0;
  for (const CriterionResult& r : results) {
    out << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
    if (r.pass) ++passed;
  }
  out << "summary: " << passed << "/" << results.size() << " criteria passed\n";
  return out.str();
}

}  // namespace hypergrowth
