#pragma once

// Translation lengths, the discreteness constant tau, the constants ledger,
// the f_m / f_{L,m} calculators with their m_0 solvers, and the Burnside
// growth lower-bound formulas.
//
// All f_m / f_{L,m} / m_0 computations run in >= 60 decimal digits; the
// m = 4 versus m = 5 decision for (k = 2, a = 5) is separated by ~1e-3 and
// must not depend on rounding. A 200-digit instantiation is available for
// re-scans.

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypergrowth/aperiodic.hpp"
#include "hypergrowth/errors.hpp"
#include "hypergrowth/presentation.hpp"

namespace hypergrowth {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<60>>;
using Real200 = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<200>>;

// ---------------------------------------------------------------------------
// Translation lengths and tau

struct StableLengthEstimate {
  Rational value;
  bool exact = false;  // free groups: equals |cyclic_reduce(g)|
};

// Estimates lim |g^n| / n from the subadditive sequence of power lengths:
// the smallest period q whose tail differences are constant gives the best
// rational with denominator <= q.
inline StableLengthEstimate stable_length(const GroupOracle& oracle, const Word& g, int n_max = 16) {
  if (n_max < 4) throw GuardError("stable_length: n_max must be >= 4");
  Word nf = oracle.normal_form(g);
  if (oracle.is_free()) return {Rational(static_cast<long long>(cyclic_reduce(nf).size())), true};
  if (nf.empty()) return {Rational(0), true};

  std::vector<long long> len{0};
  Word acc;
  for (int n = 1; n <= n_max; ++n) {
    acc = oracle.normal_form(acc + nf);
    len.push_back(static_cast<long long>(acc.size()));
  }
  for (int q = 1; 3 * q <= n_max; ++q) {
    long long p = len[static_cast<std::size_t>(n_max)] - len[static_cast<std::size_t>(n_max - q)];
    bool constant = true;
    for (int n = n_max - 2 * q; n + q <= n_max; ++n)
      if (len[static_cast<std::size_t>(n + q)] - len[static_cast<std::size_t>(n)] != p) {
        constant = false;
        break;
      }
    if (constant) return {Rational(p, q), false};
  }
  // No period detected: fall back to the subadditive upper bound a_n / n.
  return {Rational(len[static_cast<std::size_t>(n_max)], n_max), false};
}

// Largest rational tau-hat (bounded denominator) with every sample in
// tau-hat * N: the rational gcd of the nonzero samples.
inline Rational estimate_tau(const std::vector<Rational>& samples) {
  using boost::multiprecision::gcd;
  using boost::multiprecision::lcm;
  BigInt num = 0, den = 1;
  for (const Rational& s : samples) {
    if (s == 0) continue;
    if (s < 0) throw DomainError("estimate_tau: stable lengths cannot be negative");
    BigInt p = numerator(s), q = denominator(s);
    // gcd(num/den, p/q) = gcd(num*q, p*den) / (den*q)
    BigInt new_den = den * q;
    BigInt new_num = gcd(num * q, p * den);
    BigInt g = gcd(new_num, new_den);
    num = new_num / g;
    den = new_den / g;
  }
  if (num == 0) throw DomainError("estimate_tau: all samples are zero");
  return Rational(num, den);
}

// ---------------------------------------------------------------------------
// Constants ledger

enum class Provenance { exact, empirical, user };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::empirical: return "empirical";
    case Provenance::user: return "user";
  }
  return "user";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "exact") return Provenance::exact;
  if (s == "empirical") return Provenance::empirical;
  if (s == "user") return Provenance::user;
  throw ParseError("unknown provenance '" + s + "'");
}

struct LedgerEntry {
  Real value = 0;
  Provenance provenance = Provenance::user;
};

// The paper's constants with provenance flags. kappa1 = rho * nu and
// kappa2 = alpha^3 lambda^(50 delta) when derived from the others.
struct ConstantsLedger {
  LedgerEntry delta, lambda, alpha, beta, gamma, rho, nu, tau, kappa1, kappa2;

  void validate() const {
    if (lambda.value <= 1) throw DomainError("ledger: lambda must exceed 1 for non-elementary groups");
    if (alpha.value < 1) throw DomainError("ledger: alpha must be >= 1");
    if (tau.value <= 0) throw DomainError("ledger: tau must be positive");
    if (kappa1.value <= 0 || kappa1.value > 1) throw DomainError("ledger: kappa1 must lie in (0, 1]");
    if (kappa2.value < 0) throw DomainError("ledger: kappa2 must be >= 0");
    if (delta.value < 0) throw DomainError("ledger: delta must be >= 0");
  }

  static ConstantsLedger derived(Real delta_v, Real lambda_v, Real alpha_v, Real beta_v, Real gamma_v, Real rho_v,
                                 Real nu_v, Real tau_v, Provenance flag = Provenance::empirical) {
    ConstantsLedger l;
    l.delta = {delta_v, flag};
    l.lambda = {lambda_v, flag};
    l.alpha = {alpha_v, flag};
    l.beta = {beta_v, flag};
    l.gamma = {gamma_v, flag};
    l.rho = {rho_v, flag};
    l.nu = {nu_v, flag};
    l.tau = {tau_v, flag};
    l.kappa1 = {rho_v * nu_v, flag};
    l.kappa2 = {pow(alpha_v, 3) * pow(lambda_v, 50 * delta_v), flag};
    return l;
  }
};

// ---------------------------------------------------------------------------
// f_m and the free-case m_0

// f_m(mu) = lambda - 2 k mu / (mu^m - lambda) on (lambda^(1/m), lambda),
// lambda = 2k - 1.
template <typename R = Real>
R f_m_eval(int k, int m, const R& mu) {
  if (k < 2) throw GuardError("f_m_eval: k must be >= 2");
  if (m < 1) throw GuardError("f_m_eval: m must be >= 1");
  const R lambda = 2 * k - 1;
  if (mu <= 0 || mu >= lambda) throw DomainError("f_m_eval: mu must lie in (lambda^(1/m), lambda)");
  R mu_m = pow(mu, m);
  if (mu_m <= lambda) throw DomainError("f_m_eval: mu below the pole lambda^(1/m)");
  return lambda - 2 * k * mu / (mu_m - lambda);
}

template <typename R = Real>
struct M0FreeResult {
  int m0 = 0;
  int window = 0;
  // margins[m] = f_m(mu_m) - mu_m for every m where mu_m is in the domain
  std::map<int, R> margins;
};

// Least m0 with f_m(mu_m) >= mu_m across [m0, m0 + window], mu_m =
// lambda (1 - a lambda^-m), plus an asymptotic-margin check: the scaled
// margin approaches a - 2k from the expansion of f_m at mu_m.
template <typename R = Real>
M0FreeResult<R> find_m0_free(int k, const R& a, int window = 64, int m_cap = 4096) {
  if (k < 2) throw GuardError("find_m0_free: k must be >= 2");
  const R lambda = 2 * k - 1;
  if (a <= 2 * k) throw DomainError("find_m0_free: requires a > 2k");
  M0FreeResult<R> out;
  out.window = window;

  auto mu_of = [&](int m) { return lambda * (1 - a / pow(lambda, m)); };
  auto valid = [&](int m) {
    R mu = mu_of(m);
    return mu > 0 && mu < lambda && pow(mu, m) > lambda;
  };
  auto margin = [&](int m) { return f_m_eval<R>(k, m, mu_of(m)) - mu_of(m); };

  int streak_start = -1;
  for (int m = 1; m <= m_cap + window; ++m) {
    bool ok = valid(m);
    if (ok) out.margins.emplace(m, margin(m));
    ok = ok && out.margins.at(m) >= 0;
    if (ok) {
      if (streak_start < 0) streak_start = m;
      if (m - streak_start >= window) {
        // scaled margin at the window end must sit in the asymptotic regime
        R scaled = out.margins.at(m) * pow(lambda, m - 1);
        if (scaled >= (a - 2 * k) / 2) {
          out.m0 = streak_start;
          return out;
        }
      }
    } else {
      streak_start = -1;
    }
  }
  throw ConvergenceError("find_m0_free: no m0 with a passing window below the scan cap");
}

// ---------------------------------------------------------------------------
// f_{L,m} and the general-case m_0

// f_{L,m}(mu, r) = kappa1 lambda^r
//                  - kappa2 lambda^(4(L+r)) lambda^tau / (mu^(m tau) - lambda^tau).
// The proposition preceding it displays the exponent 2(L+r); its proof
// absorbs an extra mu^(2(r+L)) <= lambda^(2(r+L)) factor, which is where
// the displayed 4(L+r) comes from. Both variants are exposed.
enum class TailExponent { four_Lr, two_Lr };

template <typename R = Real>
R f_Lm_eval(const ConstantsLedger& ledger, const R& L, int m, const R& mu, const R& r,
            TailExponent variant = TailExponent::four_Lr) {
  const R lambda = static_cast<R>(ledger.lambda.value);
  const R tau = static_cast<R>(ledger.tau.value);
  const R kappa1 = static_cast<R>(ledger.kappa1.value);
  const R kappa2 = static_cast<R>(ledger.kappa2.value);
  if (m < 1) throw GuardError("f_Lm_eval: m must be >= 1");
  if (mu <= 0 || mu >= lambda) throw DomainError("f_Lm_eval: mu must lie in (lambda^(1/m), lambda)");
  R mu_m = pow(mu, m);
  if (mu_m <= lambda) throw DomainError("f_Lm_eval: mu below the pole lambda^(1/m)");
  R mu_mtau = pow(mu_m, tau);
  R lam_tau = pow(lambda, tau);
  R expo = (variant == TailExponent::four_Lr ? R(4) : R(2)) * (L + r);
  return kappa1 * pow(lambda, r) - kappa2 * pow(lambda, expo) * lam_tau / (mu_mtau - lam_tau);
}

template <typename R = Real>
struct M0GeneralRow {
  int m = 0;
  bool domain_ok = false;
  R cond1 = 0;  // m b - max(10 delta, 1-in-tree-mode)
  R cond2 = 0;  // m tau - (2 L + m b)
  R cond3 = 0;  // mu^m - lambda
  R cond4 = 0;  // f_{L,m}(mu, m b) - mu^(m b)
  bool pass() const { return domain_ok && cond1 >= 0 && cond2 >= 0 && cond3 > 0 && cond4 >= 0; }
};

template <typename R = Real>
struct M0GeneralResult {
  int m0 = 0;
  int window = 0;
  R a = 0;  // 5 (1 - kappa1) / tau
  R b = 0;  // tau / 4
  std::vector<M0GeneralRow<R>> certificate;
  std::string blocking_condition;  // set when no m0 was found
};

// Least m0 such that the four conditions of the growth proof hold across
// [m0, m0 + window], with per-condition margins in the certificate:
//   (1) m b >= 10 delta   (clamped to >= 1 in tree mode),
//   (2) m tau >= 2 L + m b,
//   (3) mu_m^m > lambda           (i.e. m ln mu_m > ln lambda),
//   (4) f_{L,m}(mu_m, m b) >= mu_m^(m b),     mu_m = lambda (1 - a/m).
template <typename R = Real>
M0GeneralResult<R> find_m0_general(const ConstantsLedger& ledger, const R& L, int window = 64, int m_cap = 65536,
                                   TailExponent variant = TailExponent::four_Lr) {
  ledger.validate();
  const R lambda = static_cast<R>(ledger.lambda.value);
  const R tau = static_cast<R>(ledger.tau.value);
  const R kappa1 = static_cast<R>(ledger.kappa1.value);
  const R delta = static_cast<R>(ledger.delta.value);
  M0GeneralResult<R> out;
  out.window = window;
  out.a = 5 * (1 - kappa1) / tau;
  out.b = tau / 4;
  if (out.a <= 0) throw DomainError("find_m0_general: kappa1 = 1 makes a = 0; the scan is vacuous");
  const R r_floor = delta > 0 ? 10 * delta : R(1);

  auto row_of = [&](int m) {
    M0GeneralRow<R> row;
    row.m = m;
    R mb = m * out.b;
    row.cond1 = mb - r_floor;
    row.cond2 = m * tau - (2 * L + mb);
    R mu = lambda * (1 - out.a / m);
    if (mu <= 0 || mu >= lambda) return row;  // domain_ok stays false
    R mu_m = pow(mu, m);
    row.cond3 = mu_m - lambda;
    if (row.cond3 <= 0) return row;
    row.domain_ok = true;
    row.cond4 = f_Lm_eval<R>(ledger, L, m, mu, mb, variant) - pow(mu, mb);
    return row;
  };

  int streak_start = -1;
  for (int m = 1; m <= m_cap + window; ++m) {
    M0GeneralRow<R> row = row_of(m);
    out.certificate.push_back(row);
    if (row.pass()) {
      if (streak_start < 0) streak_start = m;
      if (m - streak_start >= window) {
        out.m0 = streak_start;
        return out;
      }
    } else {
      streak_start = -1;
    }
  }
  // Name the condition that blocked most recently.
  const M0GeneralRow<R>& last = out.certificate.back();
  if (!last.domain_ok || last.cond3 <= 0)
    out.blocking_condition = "(3) mu_m^m > lambda (domain)";
  else if (last.cond1 < 0)
    out.blocking_condition = "(1) m b >= 10 delta";
  else if (last.cond2 < 0)
    out.blocking_condition = "(2) m tau >= 2L + m b";
  else
    out.blocking_condition = "(4) f_{L,m}(mu_m, m b) >= mu_m^(m b)";
  throw ConvergenceError("find_m0_general: conditions unsatisfiable within the scan cap; blocking condition " +
                         out.blocking_condition);
}

// ---------------------------------------------------------------------------
// Burnside lower bounds

// Plain formula values, no validity window. The windowed calculators below
// add the window checks the theorems require (odd n, n large enough).
template <typename R = Real>
R burnside_free_formula(int k, const R& a, long long eta, long long n) {
  const R lambda = 2 * k - 1;
  const R kappa = a * pow(lambda, R(eta) + 1);
  return lambda * (1 - kappa / pow(lambda, R(n) / 2));
}

template <typename R = Real>
R burnside_general_formula(const R& lambda, const R& a, const R& eps, long long n) {
  return lambda * (1 - 2 * a / (eps * n));
}

template <typename R = Real>
struct BurnsideFreeResult {
  R value = 0;        // (2k-1) (1 - kappa (2k-1)^(-n/2))
  R kappa = 0;        // a (2k-1)^(eta+1)
  R value_at_m = 0;   // (2k-1) (1 - a (2k-1)^(-m)), m = floor(n/2) - eta
  int m = 0;
  int m0 = 0;
};

// Growth lower bound for the free Burnside quotient B(k, n), n odd, with
// Adian's constants eta and n0 supplied by the caller.
template <typename R = Real>
BurnsideFreeResult<R> burnside_bound_free(int k, const R& a, long long eta, long long n0, long long n,
                                          std::optional<int> m0_hint = std::nullopt, int window = 64) {
  if (k < 2) throw GuardError("burnside_bound_free: k must be >= 2");
  if (a <= 2 * k) throw ValidityError("burnside_bound_free: needs a > 2k");
  BurnsideFreeResult<R> out;
  out.m0 = m0_hint ? *m0_hint : find_m0_free<R>(k, a, window).m0;

  std::vector<std::string> failed;
  if (n % 2 == 0) failed.push_back("n must be odd");
  long long floor_window = std::max(n0, 2 * static_cast<long long>(out.m0) + 2 * eta + 2);
  if (n < floor_window)
    failed.push_back("n must be >= max{n0, 2 m0 + 2 eta + 2} = " + std::to_string(floor_window));
  if (!failed.empty()) {
    std::string msg = "burnside_bound_free: validity window violated:";
    for (const std::string& f : failed) msg += " [" + f + "]";
    throw ValidityError(msg);
  }

  const R lambda = 2 * k - 1;
  out.m = static_cast<int>(n / 2 - eta);
  out.kappa = a * pow(lambda, R(eta) + 1);
  out.value = burnside_free_formula<R>(k, a, eta, n);
  out.value_at_m = lambda * (1 - a / pow(lambda, out.m));
  return out;
}

template <typename R = Real>
struct BurnsideGeneralResult {
  R value = 0;  // lambda (1 - 2a / (eps n))
  R kappa = 0;  // 2 a / eps
  long long m = 0;
  int m0 = 0;
};

// Growth lower bound for the periodic quotient G/G^n with Ol'shanskii's
// constants L, eps and n(G) supplied by the caller and the ledger providing
// everything else.
template <typename R = Real>
BurnsideGeneralResult<R> burnside_bound_general(const ConstantsLedger& ledger, const R& L, const R& eps,
                                                long long nG, long long n, std::optional<int> m0_hint = std::nullopt,
                                                int window = 64) {
  ledger.validate();
  if (eps <= 0 || eps > 1) throw ValidityError("burnside_bound_general: eps must lie in (0, 1]");
  BurnsideGeneralResult<R> out;
  M0GeneralResult<R> m0res;
  if (m0_hint) {
    out.m0 = *m0_hint;
  } else {
    m0res = find_m0_general<R>(ledger, L, window);
    out.m0 = m0res.m0;
  }
  const R a = 5 * (1 - static_cast<R>(ledger.kappa1.value)) / static_cast<R>(ledger.tau.value);

  std::vector<std::string> failed;
  if (n % 2 == 0) failed.push_back("n must be odd");
  R n_floor_1 = (out.m0 + 1) / eps;
  if (R(n) < n_floor_1) failed.push_back("n must be >= (m0 + 1) / eps");
  if (n < nG) failed.push_back("n must be >= n(G)");
  if (R(n) < 2 / eps) failed.push_back("n must be >= 2 / eps");
  if (!failed.empty()) {
    std::string msg = "burnside_bound_general: validity window violated:";
    for (const std::string& f : failed) msg += " [" + f + "]";
    throw ValidityError(msg);
  }

  const R lambda = static_cast<R>(ledger.lambda.value);
  out.m = floor(eps * n).template convert_to<long long>();
  out.kappa = 2 * a / eps;
  out.value = burnside_general_formula<R>(lambda, a, eps, n);
  return out;
}

}  // namespace hypergrowth
