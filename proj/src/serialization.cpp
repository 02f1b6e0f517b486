#include "guesswork/serialization.hpp"

#include <cmath>
#include <vector>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

Json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

double real_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError(what + ": expected a number, got " + j.dump());
}

Json pmf_to_json(const Pmf& p, const std::optional<std::string>& source_hash) {
  Json j;
  j["symbols"] = p.symbols();
  Json probs = Json::array();
  for (double x : p.probs()) probs.push_back(x);
  j["probs"] = std::move(probs);
  if (source_hash) j["source_hash"] = *source_hash;
  return j;
}

Pmf pmf_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("symbols") || !j.contains("probs")) {
    throw InputError("distribution JSON needs \"symbols\" and \"probs\"");
  }
  const Json& syms = j.at("symbols");
  const Json& probs = j.at("probs");
  if (!syms.is_array() || !probs.is_array()) throw InputError("\"symbols\" and \"probs\" must be arrays");
  std::vector<std::string> s;
  for (const Json& x : syms) {
    if (!x.is_string()) throw InputError("distribution symbols must be strings");
    s.push_back(x.get<std::string>());
  }
  std::vector<double> p;
  for (const Json& x : probs) p.push_back(real_from_json(x, "probs"));
  try {
    return Pmf(std::move(s), std::move(p));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

Json markov_to_json(const MarkovModel& m) {
  Json j;
  j["states"] = m.states();
  j["transitions"] = m.transitions().to_rows();
  return j;
}

MarkovModel markov_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("states") || !j.contains("transitions")) {
    throw InputError("Markov JSON needs \"states\" and \"transitions\"");
  }
  std::vector<std::string> states;
  std::vector<std::vector<double>> rows;
  try {
    states = j.at("states").get<std::vector<std::string>>();
    rows = j.at("transitions").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed Markov JSON: ") + e.what());
  }
  if (rows.size() != states.size()) throw InputError("Markov JSON: one transition row per state required");
  for (const auto& r : rows) {
    if (r.size() != states.size()) throw InputError("Markov JSON: transition matrix must be square");
  }
  try {
    return MarkovModel(std::move(states), SquareMatrix::from_rows(rows));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

Json report_to_json(const ExponentReport& r) {
  Json j;
  j["value"] = real_to_json(r.value);
  j["argmin_type"] = pmf_to_json(r.argmin_type);
  j["solver"] = std::string(to_string(r.solver));
  j["residual"] = real_to_json(r.residual);
  j["type_tilt"] = r.type_tilt ? real_to_json(*r.type_tilt) : Json(nullptr);
  if (r.guesser_tilt) j["guesser_tilt"] = real_to_json(*r.guesser_tilt);
  return j;
}

Json stats_to_json(const SimStats& s) {
  Json j;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["rho"] = s.rho;
  j["mean_G"] = real_to_json(s.mean_G);
  j["se_G"] = real_to_json(s.se_G);
  j["mean_G_pow_rho"] = real_to_json(s.mean_G_pow_rho);
  j["se_G_pow_rho"] = real_to_json(s.se_G_pow_rho);
  j["successes"] = s.successes;
  j["success_within_J"] = s.success_within_J;
  j["se_success"] = s.se_success;
  j["budget"] = s.budget ? Json(*s.budget) : Json(nullptr);
  return j;
}

}  // namespace guesswork
