#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "guesswork/exponents.hpp"
#include "guesswork/markov.hpp"
#include "guesswork/pmf.hpp"
#include "guesswork/simulator.hpp"

namespace guesswork {

using Json = nlohmann::ordered_json;

/// Finite numbers as JSON numbers, infinities as the strings "inf"/"-inf".
Json real_to_json(double x);
double real_from_json(const Json& j, const std::string& what);

/// {"symbols": [...], "probs": [...], "source_hash": "..."}; the hash is
/// optional on input.
Json pmf_to_json(const Pmf& p, const std::optional<std::string>& source_hash = std::nullopt);
Pmf pmf_from_json(const Json& j);

/// {"states": [...], "transitions": [[...], ...]}
Json markov_to_json(const MarkovModel& m);
MarkovModel markov_from_json(const Json& j);

Json report_to_json(const ExponentReport& r);
Json stats_to_json(const SimStats& s);

}  // namespace guesswork
