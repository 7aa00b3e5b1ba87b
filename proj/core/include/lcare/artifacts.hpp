#pragma once

#include <string>

#include "lcare/backtest.hpp"
#include "lcare/care.hpp"
#include "lcare/caviar.hpp"
#include "lcare/lpa.hpp"

namespace lcare {

/// JSON round trip for the persisted artifacts; the strings are stable so
/// rerunning with the same seed reproduces files byte for byte.
std::string to_json(const CareFit& fit);
std::string to_json(const CaviarFit& fit);
std::string to_json(const RiskBound& bound);
RiskBound risk_bound_from_json(const std::string& text);
std::string to_json(const CriticalValueTable& table);
CriticalValueTable critical_values_from_json(const std::string& text);

/// FNV-1a over a canonical key string; used to name artifact files.
std::string artifact_key(double tau, double r, const std::string& scenario,
                         std::uint64_t seed, int n_paths);

} // namespace lcare
