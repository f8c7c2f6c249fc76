#pragma once

// Group input: finite presentations, bounded shortlex Knuth-Bendix
// completion, and the resulting normal-form oracle answering the word
// problem at desk scale.
//
// A presentation file is UTF-8 text:
//
//   gens: a b
//   order: a A b B          (optional; capitals are inverses)
//   rel: abAB               (zero or more)
//   assert: torsion-free    (optional; recorded, never verified)
//
// Completion either terminates with a confluent system or stops at the
// configured limits with the partial system flagged non-confluent. The
// flag is honest: certified normal forms are only available when it is set.

#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hypergrowth/errors.hpp"
#include "hypergrowth/words.hpp"

namespace hypergrowth {

struct Presentation {
  Alphabet alphabet;
  std::vector<Word> relators;  // cyclically reduced, non-empty
  bool torsion_free_asserted = false;
  std::string name;

  void add_relator(const Word& r) {
    Word c = cyclic_reduce(reduce(r));
    if (c.empty()) throw ParseError("relator reduces to the empty word");
    relators.push_back(c);
  }
};

inline Presentation parse_presentation(std::istream& in, const std::string& name = "") {
  Presentation p;
  p.name = name;
  bool have_gens = false;
  std::vector<std::pair<std::string, std::string>> deferred;  // (key, value) before gens
  std::string line;
  int lineno = 0;
  auto apply = [&](const std::string& key, const std::string& value) {
    if (key == "gens") throw ParseError("duplicate gens line");
    if (key == "order") {
      std::istringstream ss(value);
      std::vector<std::string> names;
      std::string tok;
      while (ss >> tok) names.push_back(tok);
      p.alphabet.set_order(names);
    } else if (key == "rel") {
      p.add_relator(p.alphabet.parse_word(value));
    } else if (key == "assert") {
      if (value != "torsion-free") throw ParseError("unknown assertion '" + value + "'");
      p.torsion_free_asserted = true;
    } else {
      throw ParseError("unknown directive '" + key + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t colon = line.find(':');
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) continue;
    if (colon == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    auto strip = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r\n"));
      s.erase(s.find_last_not_of(" \t\r\n") + 1);
    };
    strip(key);
    strip(value);
    if (key == "gens") {
      std::istringstream ss(value);
      std::vector<std::string> gens;
      std::string tok;
      while (ss >> tok) gens.push_back(tok);
      p.alphabet = Alphabet(gens);
      have_gens = true;
      for (auto& [k, v] : deferred) apply(k, v);
      deferred.clear();
    } else if (!have_gens) {
      deferred.emplace_back(key, value);
    } else {
      apply(key, value);
    }
  }
  if (!have_gens) throw ParseError("presentation has no gens line");
  if (!deferred.empty()) throw ParseError("directives must follow the gens line");
  return p;
}

inline Presentation parse_presentation(const std::string& text, const std::string& name = "") {
  std::istringstream in(text);
  return parse_presentation(in, name);
}

inline Presentation load_presentation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open presentation file '" + path + "'");
  return parse_presentation(in, path);
}

struct Rule {
  Word lhs;
  Word rhs;  // strictly shortlex-smaller than lhs
};

// A shortlex string rewriting system. `confluent` certifies that every
// critical pair resolves, hence that normal forms are unique. When global
// completion diverges, `confluent_horizon` > 0 certifies the weaker desk
// statement: every critical pair whose overlapped word has length at most
// the horizon resolves. Rules never increase length, so rewriting any word
// no longer than the horizon is then confluent.
class RewritingSystem {
 public:
  Alphabet alphabet;
  std::vector<Rule> rules;
  bool confluent = false;
  int confluent_horizon = 0;   // 0 when no bounded certificate was computed
  int omitted_equations = 0;   // equations dropped for exceeding max_rule_len
  bool hit_rule_cap = false;

  RewritingSystem() = default;
  explicit RewritingSystem(Alphabet a) : alphabet(std::move(a)) {}

  void rebuild_index() {
    by_last_.assign(static_cast<std::size_t>(alphabet.size()), {});
    for (std::size_t i = 0; i < rules.size(); ++i)
      by_last_[static_cast<Letter>(rules[i].lhs.back())].push_back(static_cast<int>(i));
  }

  // Applies rules until no left-hand side occurs. Terminates because every
  // step strictly decreases shortlex. Valid on any system; uniqueness of
  // the result is only guaranteed when confluent.
  Word rewrite(const Word& w) const {
    Word out;
    out.reserve(w.size());
    std::vector<char> feed(w.rbegin(), w.rend());
    while (true) {
      int hit = -1;
      if (!out.empty()) {
        for (int ri : by_last_[static_cast<Letter>(out.back())]) {
          const Word& l = rules[static_cast<std::size_t>(ri)].lhs;
          if (l.size() <= out.size() && std::equal(l.begin(), l.end(), out.end() - static_cast<long>(l.size()))) {
            hit = ri;
            break;
          }
        }
      }
      if (hit >= 0) {
        const Rule& r = rules[static_cast<std::size_t>(hit)];
        out.resize(out.size() - r.lhs.size());
        feed.insert(feed.end(), r.rhs.rbegin(), r.rhs.rend());
        continue;
      }
      if (feed.empty()) break;
      out.push_back(feed.back());
      feed.pop_back();
    }
    return out;
  }

 private:
  std::vector<std::vector<int>> by_last_;
};

// Certified normal form. Refuses to answer on systems without a confluence
// certificate covering the input length.
inline Word normal_form(const RewritingSystem& rs, const Word& w) {
  if (!rs.confluent) {
    if (rs.confluent_horizon > 0 && static_cast<int>(w.size()) <= rs.confluent_horizon)
      return rs.rewrite(w);
    throw NotConfluentError("rewriting system is not confluent; normal forms are not certified" +
                            std::string(rs.confluent_horizon > 0
                                            ? " beyond length " + std::to_string(rs.confluent_horizon)
                                            : ""));
  }
  return rs.rewrite(w);
}

namespace detail {

// All overlap words of two left-hand sides together with their two
// one-step reductions.
inline void critical_pairs_of(const Rule& r1, const Rule& r2, bool same_rule,
                              std::vector<std::pair<Word, Word>>& out) {
  const Word& A = r1.lhs;
  const Word& B = r2.lhs;
  // Proper overlap: a nonempty proper suffix of A equals a proper prefix of B.
  std::size_t tmax = std::min(A.size(), B.size()) - 1;
  for (std::size_t t = 1; t <= tmax; ++t) {
    if (std::equal(B.begin(), B.begin() + static_cast<long>(t), A.end() - static_cast<long>(t))) {
      Word left = r1.rhs + B.substr(t);
      Word right = A.substr(0, A.size() - t) + r2.rhs;
      out.emplace_back(std::move(left), std::move(right));
    }
  }
  // Containment: B occurs inside A.
  if (B.size() <= A.size()) {
    for (std::size_t i = 0; i + B.size() <= A.size(); ++i) {
      if (same_rule && i == 0 && B.size() == A.size()) continue;
      if (std::equal(B.begin(), B.end(), A.begin() + static_cast<long>(i))) {
        Word right = A.substr(0, i) + r2.rhs + A.substr(i + B.size());
        out.emplace_back(r1.rhs, std::move(right));
      }
    }
  }
}

}  // namespace detail

// Re-derives every critical pair and checks that both sides rewrite to the
// same word. Used to certify the flag kb_complete reports.
inline bool check_confluence(const RewritingSystem& rs) {
  std::vector<std::pair<Word, Word>> pairs;
  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    for (std::size_t j = 0; j < rs.rules.size(); ++j)
      detail::critical_pairs_of(rs.rules[i], rs.rules[j], i == j, pairs);
  for (const auto& [u, v] : pairs)
    if (rs.rewrite(u) != rs.rewrite(v)) return false;
  return true;
}

// Bounded variant: only critical pairs coming from overlapped words of
// length <= horizon must resolve. Since rules are length-nonincreasing,
// a pass certifies unique rewriting results for every input of length
// <= horizon (Newman's lemma restricted to that finite, closed set).
inline bool check_confluence_bounded(const RewritingSystem& rs, int horizon) {
  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    for (std::size_t j = 0; j < rs.rules.size(); ++j) {
      const Rule& r1 = rs.rules[i];
      const Rule& r2 = rs.rules[j];
      const Word& A = r1.lhs;
      const Word& B = r2.lhs;
      std::size_t tmax = std::min(A.size(), B.size()) - 1;
      for (std::size_t t = 1; t <= tmax; ++t) {
        if (A.size() + B.size() - t > static_cast<std::size_t>(horizon)) continue;
        if (!std::equal(B.begin(), B.begin() + static_cast<long>(t), A.end() - static_cast<long>(t))) continue;
        Word left = r1.rhs + B.substr(t);
        Word right = A.substr(0, A.size() - t) + r2.rhs;
        if (rs.rewrite(left) != rs.rewrite(right)) return false;
      }
      if (B.size() <= A.size() && A.size() <= static_cast<std::size_t>(horizon)) {
        for (std::size_t pos = 0; pos + B.size() <= A.size(); ++pos) {
          if (i == j && pos == 0 && B.size() == A.size()) continue;
          if (!std::equal(B.begin(), B.end(), A.begin() + static_cast<long>(pos))) continue;
          Word right = A.substr(0, pos) + r2.rhs + A.substr(pos + B.size());
          if (rs.rewrite(r1.rhs) != rs.rewrite(right)) return false;
        }
      }
    }
  return true;
}

// Bounded shortlex Knuth-Bendix completion. Returns a system flagged
// confluent iff all critical pairs resolved within the limits; otherwise
// the partial system is returned flagged non-confluent (a normal outcome,
// not a failure).
inline RewritingSystem kb_complete(const Presentation& p, int max_rules = 4000, int max_rule_len = 64) {
  if (max_rules <= 0 || max_rule_len <= 0) throw GuardError("kb_complete: limits must be positive");
  RewritingSystem rs(p.alphabet);
  const Alphabet& a = rs.alphabet;

  std::vector<Rule> active;
  // Free cancellations are always present: one rule per ordered pair.
  for (int x = 0; x < a.size(); ++x) {
    Word l;
    l.push_back(static_cast<char>(x));
    l.push_back(static_cast<char>(inverse_letter(static_cast<Letter>(x))));
    active.push_back(Rule{l, Word()});
  }

  // Pending equations, smallest first. Processing order does not affect the
  // final system (the reduced confluent system for a fixed order is unique)
  // but it decides how far bounded completion gets.
  using PendingPair = std::tuple<std::size_t, std::size_t, Word, Word>;
  std::set<PendingPair> queue;
  auto enqueue = [&queue](Word u, Word v) {
    if (u == v) return;
    std::size_t mx = std::max(u.size(), v.size());
    std::size_t sm = u.size() + v.size();
    queue.emplace(mx, sm, std::move(u), std::move(v));
  };
  for (const Word& r : p.relators) enqueue(r, Word());
  for (std::size_t i = 0; i < active.size(); ++i)
    for (std::size_t j = 0; j < active.size(); ++j) {
      std::vector<std::pair<Word, Word>> cp;
      detail::critical_pairs_of(active[i], active[j], i == j, cp);
      for (auto& pr : cp) enqueue(std::move(pr.first), std::move(pr.second));
    }

  // One live system, re-synced whenever the active rule set changes.
  RewritingSystem live(a);
  auto sync = [&]() {
    live.rules = active;
    live.rebuild_index();
  };
  sync();

  int omitted = 0;
  bool hit_cap = false;
  while (!queue.empty()) {
    auto it = queue.begin();
    Word u = std::get<2>(*it);
    Word v = std::get<3>(*it);
    queue.erase(it);
    Word nu = live.rewrite(u);
    Word nv = live.rewrite(v);
    if (nu == nv) continue;
    if (shortlex_less(a, nu, nv)) std::swap(nu, nv);
    if (static_cast<int>(nu.size()) > max_rule_len) {
      // Equation omitted: the system stays sound but cannot be certified
      // globally confluent.
      ++omitted;
      continue;
    }
    Rule fresh{std::move(nu), std::move(nv)};

    // Interreduce: drop active rules whose lhs contains the new lhs and
    // requeue them as equations.
    std::vector<Rule> kept;
    kept.reserve(active.size() + 1);
    for (Rule& r : active) {
      bool contains = r.lhs.size() >= fresh.lhs.size() &&
                      r.lhs.find(fresh.lhs) != std::string::npos;
      if (contains)
        enqueue(std::move(r.lhs), std::move(r.rhs));
      else
        kept.push_back(std::move(r));
    }
    active = std::move(kept);
    active.push_back(fresh);
    if (static_cast<int>(active.size()) > max_rules) {
      hit_cap = true;
      break;
    }
    sync();

    std::size_t newest = active.size() - 1;
    for (std::size_t i = 0; i < active.size(); ++i) {
      std::vector<std::pair<Word, Word>> cp;
      detail::critical_pairs_of(active[i], active[newest], i == newest, cp);
      detail::critical_pairs_of(active[newest], active[i], i == newest, cp);
      for (auto& pr : cp) enqueue(std::move(pr.first), std::move(pr.second));
    }
  }

  // Canonical interreduction: normalize right-hand sides and drop rules
  // whose lhs is reducible by the others, then order deterministically.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < active.size(); ++i) {
      RewritingSystem others(a);
      for (std::size_t j = 0; j < active.size(); ++j)
        if (j != i) others.rules.push_back(active[j]);
      others.rebuild_index();
      if (others.rewrite(active[i].lhs) != active[i].lhs) {
        active.erase(active.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
      Word nr = others.rewrite(active[i].rhs);
      if (nr != active[i].rhs) {
        active[i].rhs = std::move(nr);
        changed = true;
      }
    }
  }
  std::sort(active.begin(), active.end(), [&](const Rule& r1, const Rule& r2) {
    return shortlex_compare(a, r1.lhs, r2.lhs) == std::strong_ordering::less;
  });
  rs.rules = std::move(active);
  rs.rebuild_index();
  rs.omitted_equations = omitted;
  rs.hit_rule_cap = hit_cap;
  rs.confluent = omitted == 0 && !hit_cap && check_confluence(rs);
  if (rs.confluent) {
    rs.confluent_horizon = -1;  // unbounded
  } else if (!hit_cap) {
    // Every equation with both sides short enough was resolved; certify the
    // corresponding bounded horizon independently.
    rs.confluent_horizon = check_confluence_bounded(rs, max_rule_len) ? max_rule_len : 0;
  }
  return rs;
}

// Normal-form oracle answering the word problem: either built-in free
// reduction or a confluent rewriting system.
class GroupOracle {
 public:
  enum class Kind { free_group, rewriting_system };

  static GroupOracle free_group(int k) {
    GroupOracle o;
    o.kind_ = Kind::free_group;
    o.alphabet_ = Alphabet::with_rank(k);
    return o;
  }

  static GroupOracle free_group(Alphabet a) {
    GroupOracle o;
    o.kind_ = Kind::free_group;
    o.alphabet_ = std::move(a);
    return o;
  }

  static GroupOracle from_rewriting_system(RewritingSystem rs) {
    if (!rs.confluent && rs.confluent_horizon <= 0)
      throw NotConfluentError("oracle requires a confluence certificate (global or bounded)");
    GroupOracle o;
    o.kind_ = Kind::rewriting_system;
    o.alphabet_ = rs.alphabet;
    o.rs_ = std::move(rs);
    return o;
  }

  // Builds the natural oracle for a presentation: free reduction when there
  // are no relators, otherwise bounded Knuth-Bendix completion.
  static GroupOracle for_presentation(const Presentation& p, int max_rules = 4000, int max_rule_len = 64) {
    if (p.relators.empty()) return free_group(p.alphabet);
    RewritingSystem rs = kb_complete(p, max_rules, max_rule_len);
    if (!rs.confluent && rs.confluent_horizon <= 0)
      throw NotConfluentError("Knuth-Bendix completion did not reach confluence within limits (" +
                              std::to_string(rs.rules.size()) + " rules)");
    return from_rewriting_system(std::move(rs));
  }

  // Largest input length with a certified unique normal form; INT_MAX for
  // globally confluent oracles and free groups.
  int certified_length() const {
    if (kind_ == Kind::free_group || rs_->confluent) return std::numeric_limits<int>::max();
    return rs_->confluent_horizon;
  }

  Kind kind() const { return kind_; }
  bool is_free() const { return kind_ == Kind::free_group; }
  const Alphabet& alphabet() const { return alphabet_; }
  const RewritingSystem& rewriting_system() const { return *rs_; }

  Word normal_form(const Word& w) const {
    if (kind_ == Kind::free_group) return reduce(w);
    return hypergrowth::normal_form(*rs_, w);
  }

  Word multiply(const Word& u, const Word& v) const { return normal_form(u + v); }
  Word inverse(const Word& w) const { return normal_form(inverse_word(w)); }

 private:
  Kind kind_ = Kind::free_group;
  Alphabet alphabet_;
  std::optional<RewritingSystem> rs_;
};

inline bool equal(const GroupOracle& oracle, const Word& w1, const Word& w2) {
  return oracle.normal_form(w1) == oracle.normal_form(w2);
}

}  // namespace hypergrowth
