// Command-line front end: presentation ingestion, subcommand dispatch, and
// result serialization. Outputs are deterministic: JSON keys sorted, one
// canonical formatting per build, thread count 1 unless requested.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hypergrowth/aperiodic.hpp"
#include "hypergrowth/bounds.hpp"
#include "hypergrowth/cayley.hpp"
#include "hypergrowth/conetypes.hpp"
#include "hypergrowth/fset.hpp"
#include "hypergrowth/ledger_io.hpp"
#include "hypergrowth/lexgeo.hpp"
#include "hypergrowth/presentation.hpp"
#include "hypergrowth/verify.hpp"

namespace hg = hypergrowth;
using nlohmann::json;

namespace {

int thread_count_from_env(int cli_value) {
  if (cli_value > 0) return cli_value;
  if (const char* env = std::getenv("HYPERGROWTH_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hg::ParseError("cannot open output file '" + out_path + "'");
  out << text;
}

void emit_json(const std::string& out_path, const json& j) { emit(out_path, j.dump(2) + "\n"); }

std::uint64_t fnv1a(const std::vector<hg::ElementId>& ids) {
  std::uint64_t h = 1469598103934665603ull;
  for (hg::ElementId id : ids) {
    for (int b = 0; b < 4; ++b) {
      h ^= static_cast<std::uint64_t>((id >> (8 * b)) & 0xff);
      h *= 1099511628211ull;
    }
  }
  return h;
}

struct OracleOptions {
  std::string presentation;
  int max_rules = 4000;
  int max_rule_len = 16;
};

hg::GroupOracle make_oracle(const OracleOptions& opt) {
  hg::Presentation p = hg::load_presentation_file(opt.presentation);
  return hg::GroupOracle::for_presentation(p, opt.max_rules, opt.max_rule_len);
}

int run_ball(const OracleOptions& oopt, int radius, const std::string& out, int threads) {
  hg::GroupOracle oracle = make_oracle(oopt);
  hg::Ball ball = hg::build_ball(oracle, radius);
  json j;
  j["radius"] = radius;
  j["counts"] = ball.ball_counts();
  j["delta_hat"] = hg::estimate_delta(ball, threads);
  j["growth_upper"] = hg::growth_upper_estimate(ball.ball_counts());
  emit_json(out, j);
  return 0;
}

int run_cone_types(const OracleOptions& oopt, int radius, int lookahead, int rmax, double e, const std::string& out,
                   const std::string& ledger_out) {
  hg::GroupOracle oracle = make_oracle(oopt);
  hg::Ball ball = hg::build_ball(oracle, radius);
  hg::LexGeodesicMap lexmap = hg::lex_geodesics(ball);
  hg::ConeAutomaton aut = hg::build_automaton(ball, lexmap, lookahead);
  double lambda = hg::spectral_radius(aut);
  hg::EssentialClassification cls = hg::classify_essential(aut, lambda);
  if (rmax < 0) rmax = std::min(6, aut.classified_radius);
  if (e < 1) e = 1;
  hg::BetaGammaEstimate bg = hg::estimate_beta_gamma(ball, aut, cls, rmax, e);

  json states = json::array();
  json delta = json::array();
  json essential = json::array();
  for (hg::StateId s = 0; s < aut.state_count(); ++s) {
    states.push_back(fnv1a(aut.state_members[static_cast<std::size_t>(s)]));
    delta.push_back(aut.delta[static_cast<std::size_t>(s)]);
    essential.push_back(cls.is_essential_state(s));
  }
  json j;
  j["lookahead"] = lookahead;
  j["states"] = states;
  j["transitions"] = delta;
  j["lambda"] = lambda;
  j["essential"] = essential;
  j["beta_hat"] = bg.beta;
  j["gamma_hat"] = bg.gamma;
  emit_json(out, j);

  if (!ledger_out.empty()) {
    hg::ConstantsLedger ledger = hg::derive_ledger(ball, lexmap, aut, cls, rmax);
    emit_json(ledger_out, hg::ledger_to_json(ledger));
  }
  return 0;
}

int run_lexgeo(const OracleOptions& oopt, int radius, const std::string& element, int lookahead,
               const std::string& out) {
  hg::GroupOracle oracle = make_oracle(oopt);
  hg::Ball ball = hg::build_ball(oracle, radius);
  hg::LexGeodesicMap lexmap = hg::lex_geodesics(ball);
  const hg::Alphabet& a = ball.alphabet();
  json j;
  j["radius"] = radius;
  if (!element.empty()) {
    hg::Word nf = oracle.normal_form(a.parse_word(element));
    hg::ElementId g = ball.id_of(nf);
    if (g < 0) throw hg::GuardError("element '" + element + "' lies outside the ball");
    j["element"] = a.display(nf);
    j["sigma"] = a.display(lexmap.word(g));
    if (lookahead > 0) {
      hg::LexTypeSample s = hg::lex_type_sample(ball, lexmap, g, lookahead);
      j["lex_type_sample_size"] = s.members.size();
      j["lookahead"] = lookahead;
    }
  } else if (lookahead > 0) {
    // Census: number of distinct truncated lex-type samples per radius.
    // Reported as data; the finiteness of the set of lexicographic types is
    // open, so no conclusion is drawn.
    json census = json::array();
    for (int r = 0; r + lookahead <= radius; ++r) {
      std::set<std::vector<hg::ElementId>> distinct;
      for (hg::ElementId g = static_cast<hg::ElementId>(ball.sphere_start[static_cast<std::size_t>(r)]);
           g < static_cast<hg::ElementId>(ball.sphere_start[static_cast<std::size_t>(r) + 1]); ++g)
        distinct.insert(hg::lex_type_sample(ball, lexmap, g, lookahead).members);
      census.push_back({{"radius", r}, {"distinct_samples", distinct.size()}});
    }
    j["lookahead"] = lookahead;
    j["lex_type_census"] = census;
  } else {
    j["elements"] = ball.size();
  }
  emit_json(out, j);
  return 0;
}

int run_aperiodic_free(int k, int m, int max_len, const std::string& out) {
  hg::AperiodicCountTable t = hg::count_aperiodic_free(k, m, max_len);
  std::ostringstream csv;
  csv << "s,ball_count,aperiodic_count,ratio\n";
  long long ball = 1;
  for (int s = 0; s <= max_len; ++s) {
    if (s > 0) ball += 2LL * k * static_cast<long long>(std::pow(2 * k - 1, s - 1));
    double ratio = static_cast<double>(t.counts[static_cast<std::size_t>(s)]) / static_cast<double>(ball);
    csv << s << "," << ball << "," << t.counts[static_cast<std::size_t>(s)] << "," << ratio << "\n";
  }
  emit(out, csv.str());
  return 0;
}

int run_aperiodic_general(const OracleOptions& oopt, int L, int m, int radius, const std::string& out) {
  hg::GroupOracle oracle = make_oracle(oopt);
  hg::Ball ball = hg::build_ball(oracle, radius);
  hg::LexGeodesicMap lexmap = hg::lex_geodesics(ball);
  int s_max = radius - L;
  std::vector<long long> counts = hg::count_F_Lm(ball, lexmap, L, m, s_max);
  std::ostringstream csv;
  csv << "s,ball_count,aperiodic_count,ratio\n";
  for (int s = 0; s <= s_max; ++s) {
    long long bc = ball.ball_count(s);
    double ratio = static_cast<double>(counts[static_cast<std::size_t>(s)]) / static_cast<double>(bc);
    csv << s << "," << bc << "," << counts[static_cast<std::size_t>(s)] << "," << ratio << "\n";
  }
  emit(out, csv.str());
  return 0;
}

int run_fset(const OracleOptions& oopt, int radius, double r, double nu, double delta, double lambda,
             const std::string& out) {
  hg::GroupOracle oracle = make_oracle(oopt);
  hg::Ball ball = hg::build_ball(oracle, radius);
  hg::LexGeodesicMap lexmap = hg::lex_geodesics(ball);
  if (lambda <= 0) {
    hg::ConeAutomaton aut = hg::build_automaton(ball, lexmap, 1);
    lambda = hg::spectral_radius(aut);
  }
  hg::HIteration H = hg::build_H(ball, lexmap, r, nu, delta, lambda);
  hg::FSet F = hg::build_F(ball, lexmap, H, r);
  hg::FPropertyReport rep = hg::verify_F_properties(F, H, ball, lexmap, r, nu, lambda);

  json stages = json::array();
  for (const auto& st : H.stages) {
    long long n = 0;
    for (std::size_t i = 0; i < st.size(); ++i)
      if (st[i] && !H.assumed[i]) ++n;
    stages.push_back(n);
  }
  json fstages = json::array();
  for (const auto& st : F.stages) fstages.push_back(st.size());
  json j;
  j["lambda"] = lambda;
  j["r"] = r;
  j["nu"] = nu;
  j["delta"] = delta;
  j["effective_width"] = H.effective_width;
  j["interior_radius"] = H.interior_radius;
  j["h_stage_sizes"] = stages;
  j["h_fixed_point_size"] = H.interior_count();
  j["identity_in_h"] = H.identity_in_H;
  j["f_stage_sizes"] = fstages;
  j["f_size"] = F.size();
  j["properties"] = {{"identity_in_f", rep.identity_in_F},
                     {"growth_violations", rep.growth_violations.size()},
                     {"gap_violations", rep.gap_violations.size()},
                     {"interior_members", rep.interior_members}};
  emit_json(out, j);
  return rep.ok() ? 0 : 0;  // infeasible parameters are a report, not an error
}

int run_bounds_free(int k, const std::string& a, long long eta, long long n0, long long n, const std::string& out) {
  auto res = hg::burnside_bound_free<hg::Real>(k, hg::Real(a), eta, n0, n);
  json j;
  j["k"] = k;
  j["a"] = a;
  j["eta"] = eta;
  j["n0"] = n0;
  j["n"] = n;
  j["m"] = res.m;
  j["m0"] = res.m0;
  j["kappa"] = hg::real_to_string(res.kappa);
  j["value"] = hg::real_to_string(res.value);
  j["value_at_m"] = hg::real_to_string(res.value_at_m);
  j["provenance"] = {{"eta", "user"}, {"n0", "user"}, {"a", "user"}};
  emit_json(out, j);
  return 0;
}

int run_bounds_general(const std::string& ledger_path, const std::string& L, const std::string& eps, long long nG,
                       long long n, const std::string& out) {
  std::ifstream in(ledger_path);
  if (!in) throw hg::ParseError("cannot open ledger file '" + ledger_path + "'");
  json jl = json::parse(in);
  hg::ConstantsLedger ledger = hg::ledger_from_json(jl);
  auto res = hg::burnside_bound_general<hg::Real>(ledger, hg::Real(L), hg::Real(eps), nG, n);
  json j;
  j["L"] = L;
  j["eps"] = eps;
  j["nG"] = nG;
  j["n"] = n;
  j["m"] = res.m;
  j["m0"] = res.m0;
  j["kappa"] = hg::real_to_string(res.kappa);
  j["value"] = hg::real_to_string(res.value);
  j["ledger"] = hg::ledger_to_json(ledger);
  j["provenance"] = {{"L", "user"}, {"eps", "user"}, {"nG", "user"}};
  emit_json(out, j);
  return 0;
}

int run_verify(const std::string& group, const std::string& dir, const std::string& out) {
  hg::VerifyOptions opt;
  opt.group_filter = group;
  opt.presentations_dir = dir;
  std::vector<hg::CriterionResult> results = hg::run_verify_battery(opt);
  emit(out, hg::render_report(results, opt));
  for (const hg::CriterionResult& r : results)
    std::cerr << r.name << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.seconds << "s)\n";
  for (const hg::CriterionResult& r : results)
    if (!r.pass) return 5;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth machinery for hyperbolic groups and their periodic quotients"};
  app.require_subcommand(1);

  OracleOptions oopt;
  int threads = 0;
  std::string out;

  auto add_oracle_opts = [&](CLI::App* cmd, bool required = true) {
    auto* p = cmd->add_option("--presentation", oopt.presentation, "presentation file");
    if (required) p->required();
    cmd->add_option("--max-rules", oopt.max_rules, "Knuth-Bendix rule cap");
    cmd->add_option("--max-rule-len", oopt.max_rule_len, "Knuth-Bendix rule length cap");
    cmd->add_option("--out", out, "output file (default stdout)");
    cmd->add_option("--threads", threads, "thread count (default 1; env HYPERGROWTH_THREADS)");
  };

  // ball
  auto* ball_cmd = app.add_subcommand("ball", "enumerate a Cayley ball and its geometry");
  int radius = 6;
  add_oracle_opts(ball_cmd);
  ball_cmd->add_option("--radius", radius, "ball radius")->required();

  // cone-types
  auto* cone_cmd = app.add_subcommand("cone-types", "cone-type automaton, growth rate, essential types");
  int lookahead = 1, rmax = -1;
  double width_e = 1.0;
  add_oracle_opts(cone_cmd);
  cone_cmd->add_option("--radius", radius, "ball radius")->required();
  cone_cmd->add_option("--lookahead", lookahead, "cone signature lookahead R")->required();
  cone_cmd->add_option("--rmax", rmax, "radius range for beta/gamma estimates");
  cone_cmd->add_option("--e", width_e, "annulus width for gamma");
  std::string ledger_out;
  cone_cmd->add_option("--ledger-out", ledger_out, "also write a derived constants ledger");

  // lexgeo
  auto* lex_cmd = app.add_subcommand("lexgeo", "lexicographic geodesics and types");
  std::string element;
  int lex_lookahead = 0;
  add_oracle_opts(lex_cmd);
  lex_cmd->add_option("--radius", radius, "ball radius")->required();
  lex_cmd->add_option("--element", element, "single element to report");
  lex_cmd->add_option("--lookahead", lex_lookahead, "lex type sample radius");

  // aperiodic
  auto* ap_cmd = app.add_subcommand("aperiodic", "power-free counting");
  int ap_k = 0, ap_m = 2, ap_maxlen = 10, ap_L = 0;
  ap_cmd->add_option("--k", ap_k, "free mode: rank");
  ap_cmd->add_option("--m", ap_m, "power exponent")->required();
  ap_cmd->add_option("--max-len", ap_maxlen, "free mode: maximum length");
  ap_cmd->add_option("--presentation", oopt.presentation, "general mode: presentation file");
  ap_cmd->add_option("--L", ap_L, "general mode: neighbourhood width");
  ap_cmd->add_option("--radius", radius, "general mode: ball radius");
  ap_cmd->add_option("--max-rules", oopt.max_rules, "Knuth-Bendix rule cap");
  ap_cmd->add_option("--max-rule-len", oopt.max_rule_len, "Knuth-Bendix rule length cap");
  ap_cmd->add_option("--out", out, "output file (default stdout)");

  // fset
  auto* fs_cmd = app.add_subcommand("fset", "H/F construction and property checks");
  double fs_r = 2.0, fs_nu = 1.0, fs_delta = 0.0, fs_lambda = 0.0;
  add_oracle_opts(fs_cmd);
  fs_cmd->add_option("--radius", radius, "ball radius")->required();
  fs_cmd->add_option("--r", fs_r, "extension radius r")->required();
  fs_cmd->add_option("--nu", fs_nu, "density threshold nu")->required();
  fs_cmd->add_option("--delta", fs_delta, "hyperbolicity constant (0 = tree mode)");
  fs_cmd->add_option("--lambda", fs_lambda, "growth rate (default: from the automaton)");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Burnside growth lower bounds");
  bounds_cmd->require_subcommand(1);
  auto* bf_cmd = bounds_cmd->add_subcommand("free", "free Burnside quotients");
  int bf_k = 2;
  std::string bf_a = "5";
  long long bf_eta = 0, bf_n0 = 1, bf_n = 665;
  bf_cmd->add_option("--k", bf_k, "rank")->required();
  bf_cmd->add_option("--a", bf_a, "constant a > 2k")->required();
  bf_cmd->add_option("--eta", bf_eta, "Adian eta (user-supplied)")->required();
  bf_cmd->add_option("--n0", bf_n0, "Adian n0 (user-supplied)")->required();
  bf_cmd->add_option("--n", bf_n, "odd exponent")->required();
  bf_cmd->add_option("--out", out, "output file (default stdout)");

  auto* bg_cmd = bounds_cmd->add_subcommand("general", "periodic quotients of hyperbolic groups");
  std::string bg_ledger, bg_L = "0", bg_eps = "0.01";
  long long bg_nG = 1, bg_n = 10001;
  bg_cmd->add_option("--ledger", bg_ledger, "constants ledger JSON")->required();
  bg_cmd->add_option("--L", bg_L, "Ol'shanskii L (user-supplied)")->required();
  bg_cmd->add_option("--eps", bg_eps, "Ol'shanskii epsilon (user-supplied)")->required();
  bg_cmd->add_option("--nG", bg_nG, "Ol'shanskii n(G) (user-supplied)")->required();
  bg_cmd->add_option("--n", bg_n, "odd exponent")->required();
  bg_cmd->add_option("--out", out, "output file (default stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the verification battery");
  std::string verify_group, verify_dir;
  verify_cmd->add_option("--group", verify_group, "restrict to one bundled group");
  verify_cmd->add_option("--presentations-dir", verify_dir, "load <dir>/<name>.grp instead of bundled texts");
  verify_cmd->add_option("--out", out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
    if (*ball_cmd) return run_ball(oopt, radius, out, thread_count_from_env(threads));
    if (*cone_cmd) return run_cone_types(oopt, radius, lookahead, rmax, width_e, out, ledger_out);
    if (*lex_cmd) return run_lexgeo(oopt, radius, element, lex_lookahead, out);
    if (*ap_cmd) {
      if (!oopt.presentation.empty()) return run_aperiodic_general(oopt, ap_L, ap_m, radius, out);
      if (ap_k < 2) throw hg::GuardError("aperiodic: need --k >= 2 (free mode) or --presentation");
      return run_aperiodic_free(ap_k, ap_m, ap_maxlen, out);
    }
    if (*fs_cmd) return run_fset(oopt, radius, fs_r, fs_nu, fs_delta, fs_lambda, out);
    if (*bf_cmd) return run_bounds_free(bf_k, bf_a, bf_eta, bf_n0, bf_n, out);
    if (*bg_cmd) return run_bounds_general(bg_ledger, bg_L, bg_eps, bg_nG, bg_n, out);
    if (*verify_cmd) return run_verify(verify_group, verify_dir, out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hg::ParseError& e) {
    std::cerr << json{{"error", {{"type", "parse"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  } catch (const hg::LimitError& e) {
    std::cerr << json{{"error", {{"type", "limit"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  } catch (const hg::ConvergenceError& e) {
    std::cerr << json{{"error", {{"type", "convergence"}, {"message", e.what()}}}}.dump() << "\n";
    return 4;
  } catch (const hg::Error& e) {
    std::cerr << json{{"error", {{"type", "precondition"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}
