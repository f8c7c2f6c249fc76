#pragma once

// Ledger JSON round-trip. Values are serialized as decimal strings so the
// high-precision constants survive unchanged; keys come out sorted, keeping
// files diffable.

#include <json.hpp>

#include <string>

#include "hypergrowth/bounds.hpp"
#include "hypergrowth/errors.hpp"

namespace hypergrowth {

inline std::string real_to_string(const Real& v, int digits = 40) {
  return v.str(digits);
}

inline nlohmann::json ledger_entry_to_json(const LedgerEntry& e) {
  return nlohmann::json{{"value", real_to_string(e.value)}, {"provenance", to_string(e.provenance)}};
}

inline LedgerEntry ledger_entry_from_json(const nlohmann::json& j) {
  LedgerEntry e;
  try {
    e.value = Real(j.at("value").get<std::string>());
  } catch (const std::exception& ex) {
    throw ParseError(std::string("ledger entry: bad value: ") + ex.what());
  }
  e.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  return e;
}

inline nlohmann::json ledger_to_json(const ConstantsLedger& l) {
  return nlohmann::json{
      {"delta", ledger_entry_to_json(l.delta)},   {"lambda", ledger_entry_to_json(l.lambda)},
      {"alpha", ledger_entry_to_json(l.alpha)},   {"beta", ledger_entry_to_json(l.beta)},
      {"gamma", ledger_entry_to_json(l.gamma)},   {"rho", ledger_entry_to_json(l.rho)},
      {"nu", ledger_entry_to_json(l.nu)},         {"tau", ledger_entry_to_json(l.tau)},
      {"kappa1", ledger_entry_to_json(l.kappa1)}, {"kappa2", ledger_entry_to_json(l.kappa2)},
  };
}

inline ConstantsLedger ledger_from_json(const nlohmann::json& j) {
  ConstantsLedger l;
  l.delta = ledger_entry_from_json(j.at("delta"));
  l.lambda = ledger_entry_from_json(j.at("lambda"));
  l.alpha = ledger_entry_from_json(j.at("alpha"));
  l.beta = ledger_entry_from_json(j.at("beta"));
  l.gamma = ledger_entry_from_json(j.at("gamma"));
  l.rho = ledger_entry_from_json(j.at("rho"));
  l.nu = ledger_entry_from_json(j.at("nu"));
  l.tau = ledger_entry_from_json(j.at("tau"));
  l.kappa1 = ledger_entry_from_json(j.at("kappa1"));
  l.kappa2 = ledger_entry_from_json(j.at("kappa2"));
  return l;
}

}  // namespace hypergrowth
