#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "guesswork/corpus.hpp"
#include "guesswork/errors.hpp"
#include "guesswork/exponents.hpp"
#include "guesswork/guesswork.hpp"
#include "guesswork/markov.hpp"
#include "guesswork/numeric.hpp"
#include "guesswork/oracle.hpp"
#include "guesswork/pmf.hpp"
#include "guesswork/serialization.hpp"
#include "guesswork/simulator.hpp"
#include "guesswork/zipf.hpp"

namespace guesswork::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

namespace {

// --verify found an oracle disagreement.
class VerifyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw InputError("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

struct Context {
  std::string command;
  Json cfg = Json::object();
  fs::path out_dir = ".";
  bool bits = false;
  bool verify = false;
  std::uint64_t seed = 1;
  std::ostream* out = nullptr;

  double unit(double nats) const { return bits ? nats / std::log(2.0) : nats; }
  double from_unit(double v) const { return bits ? v * std::log(2.0) : v; }
  Json unit_json(double nats) const { return real_to_json(unit(nats)); }
  std::string unit_name() const { return bits ? "bits" : "nats"; }

  template <class T>
  std::optional<T> get(const std::string& key) const {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
    try {
      return cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("config key '" + key + "': " + e.what());
    }
  }
  template <class T>
  T get_or(const std::string& key, T fallback) const {
    return get<T>(key).value_or(fallback);
  }

  void emit(Json report) const {
    Json head = Json::object();
    head["command"] = command;
    head["unit"] = unit_name();
    head.update(report);
    const std::string text = head.dump(2) + "\n";
    write_text(out_dir / (command + ".json"), text);
    *out << text;
  }
};

double require_real(const Json& j, const std::string& what) { return real_from_json(j, what); }

std::string alphabet_fingerprint(const Alphabet& symbols) {
  std::string joined;
  for (const auto& s : symbols) {
    joined += s;
    joined += '\n';
  }
  return sha256_hex(joined).substr(0, 16);
}

Pmf pmf_from_source_json(const Json& src) {
  if (src.contains("dist")) {
    const Json j = src.at("dist");
    if (j.is_string()) return pmf_from_json(read_json_file(j.get<std::string>()));
    return pmf_from_json(j);
  }
  if (src.contains("bernoulli")) {
    try {
      return Pmf::bernoulli(require_real(src.at("bernoulli"), "bernoulli"));
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }
  if (src.contains("probs")) {
    Json j = Json::object();
    j["probs"] = src.at("probs");
    if (src.contains("symbols")) {
      j["symbols"] = src.at("symbols");
    } else {
      Json syms = Json::array();
      for (std::size_t i = 0; i < src.at("probs").size(); ++i) syms.push_back(std::to_string(i));
      j["symbols"] = syms;
    }
    return pmf_from_json(j);
  }
  if (src.contains("zipf")) {
    const Json& z = src.at("zipf");
    const auto variant = z.value("variant", std::string("pdf"));
    if (variant != "pdf" && variant != "cdf") throw InputError("zipf variant must be pdf or cdf");
    try {
      return zipf_pmf(ZipfSpec::make(z.at("m").get<std::size_t>(), require_real(z.at("s"), "zipf.s"),
                                     variant == "pdf" ? ZipfVariant::kPdf : ZipfVariant::kCdf));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("zipf source: ") + e.what());
    }
  }
  throw InputError("no source distribution: give --dist, --bernoulli or --probs");
}

MarkovModel markov_from_ref(const Json& j) {
  if (j.is_string()) return markov_from_json(read_json_file(j.get<std::string>()));
  return markov_from_json(j);
}

std::vector<double> parse_grid(const Json& j, const std::string& what) {
  // [from, to, count] with count >= 2, endpoints included.
  if (!j.is_array() || j.size() != 3) throw InputError(what + " must be [from, to, count]");
  const double a = require_real(j[0], what);
  const double b = require_real(j[1], what);
  const auto count = j[2].get<std::size_t>();
  if (count < 2) throw InputError(what + ": count must be >= 2");
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return xs;
}

Json grid_from_flag(const std::string& s, const std::string& what) {
  // "from:to:count"
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw InputError(what + " expects from:to:count");
  try {
    return Json::array({std::stod(parts[0]), std::stod(parts[1]), std::stoull(parts[2])});
  } catch (const std::exception&) {
    throw InputError(what + " expects from:to:count");
  }
}

void check(bool ok, const std::string& what) {
  if (!ok) throw VerifyFailure("verify: " + what);
}

// ---------------------------------------------------------------- ingest

void cmd_ingest(Context& ctx) {
  const auto input = ctx.get<std::string>("input");
  if (!input) throw InputError("ingest: an input frequency file is required");
  const std::string bytes = read_file(*input);
  std::istringstream in(bytes);
  const auto rows = parse_frequency_text(in);
  Pmf p = empirical_from_counts(rows);
  const auto top_k = ctx.get<std::size_t>("top_k");
  if (top_k) {
    if (*top_k < 1) throw InputError("--top-k must be >= 1");
    if (*top_k < p.size()) p = truncate_top_k(p, *top_k);
  }
  const std::string hash = sha256_hex(bytes);
  const fs::path dist_path = ctx.out_dir / "distribution.json";
  write_text(dist_path, pmf_to_json(p, hash).dump(2) + "\n");
  Json r;
  r["input"] = *input;
  r["lines"] = rows.size();
  r["symbols"] = p.size();
  r["top_k"] = top_k ? Json(*top_k) : Json(nullptr);
  r["truncated"] = top_k && *top_k < rows.size();
  r["source_hash"] = hash;
  r["alphabet_fingerprint"] = alphabet_fingerprint(p.symbols());
  r["entropy"] = ctx.unit_json(shannon_entropy(p));
  r["distribution"] = dist_path.string();
  ctx.emit(r);
}

// ------------------------------------------------------------------ tilt

void cmd_tilt(Context& ctx) {
  const Pmf p = pmf_from_source_json(ctx.cfg);
  double theta = 0.0;
  if (auto t = ctx.get<double>("theta")) {
    theta = *t;
  } else {
    const double rho = ctx.get_or<double>("rho", 1.0);
    if (!(rho > 0.0)) throw InputError("--rho must be positive");
    theta = 1.0 / (1.0 + rho);
  }
  const Pmf q = tilt(p, theta);
  write_text(ctx.out_dir / "tilted_distribution.json", pmf_to_json(q).dump(2) + "\n");
  Json r;
  r["theta"] = theta;
  r["alphabet_fingerprint"] = alphabet_fingerprint(p.symbols());
  r["distribution"] = pmf_to_json(q);
  r["entropy"] = ctx.unit_json(shannon_entropy(q));
  if (ctx.verify) {
    // Direct ratio p^theta / sum p^theta in linear space.
    double z = 0.0;
    for (double x : p.probs()) z += x > 0.0 ? std::pow(x, theta) : 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double direct = p[i] > 0.0 ? std::pow(p[i], theta) / z : 0.0;
      check(std::abs(direct - q[i]) <= 1e-9 * std::max(1e-300, direct) + 1e-15, "tilt disagrees with direct ratio");
    }
    r["verified"] = true;
  }
  ctx.emit(r);
}

// --------------------------------------------------------------- moments

double iid_series_reference(const Pmf& p, const Pmf& phat, double rho) {
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (phat[i] == 0.0) return kInf;
    s += p[i] * truncated_series_moment(phat[i], rho, 1e-12).value;
  }
  return s.value();
}

void cmd_moments(Context& ctx) {
  const Pmf p = pmf_from_source_json(ctx.cfg);
  const double rho = ctx.get_or<double>("rho", 1.0);
  const MomentParam param = MomentParam::make(rho, ctx.get<double>("gamma"));
  const auto exact = exact_guesswork_moment(p, rho);
  const auto bounds = arikan_bounds(p, rho);
  const auto opt = optimal_iid_distribution(p, rho);
  const auto naive_v = iid_v_moment(p, p, rho);
  const auto opt_g = iid_g_moment_numeric(p, opt.distribution, rho);
  const auto naive_g = iid_g_moment_numeric(p, p, rho);

  Json r;
  r["rho"] = rho;
  r["alphabet_fingerprint"] = alphabet_fingerprint(p.symbols());
  r["exact_guesswork"] = real_to_json(exact.value);
  r["arikan_lower"] = real_to_json(bounds.lower.value);
  r["arikan_upper"] = real_to_json(bounds.upper.value);
  r["sync_exponent"] = ctx.unit_json(sync_exponent(p, rho));
  r["renyi_entropy"] = ctx.unit_json(renyi_entropy(p, 1.0 / (1.0 + rho)));
  Json o;
  o["distribution"] = pmf_to_json(opt.distribution);
  o["E_V"] = real_to_json(std::exp(opt.log_moment.value));
  o["log_E_V"] = ctx.unit_json(opt.log_moment.value);
  o["E_G"] = real_to_json(opt_g.value);
  r["optimal_iid"] = o;
  Json nv;
  nv["E_V"] = real_to_json(naive_v.value);
  nv["E_G"] = real_to_json(naive_g.value);
  r["naive_iid"] = nv;

  Json q = Json::object();
  q["optimal_list.E[G^rho]"] = {{"value", real_to_json(exact.value)}};
  q["iid_optimal.E[G^rho]"] = {{"value", real_to_json(opt_g.value)}};
  q["iid_naive.E[G^rho]"] = {{"value", real_to_json(naive_g.value)}};
  q["iid_optimal.E[V_rho]"] = {{"value", real_to_json(std::exp(opt.log_moment.value))}};
  q["iid_naive.E[V_rho]"] = {{"value", real_to_json(naive_v.value)}};

  if (param.gamma) {
    const double g = *param.gamma;
    const Pmf tuned = tilt(p, 1.0 / (1.0 + g));
    Json m;
    m["gamma"] = g;
    m["log_E_V"] = ctx.unit_json(mismatch_exponent(p, rho, g));
    m["E_G"] = real_to_json(iid_g_moment_numeric(p, tuned, rho).value);
    r["mismatch"] = m;
    q["iid_gamma.E[G^rho]"] = {{"value", m["E_G"]}};
  }
  r["quantities"] = q;

  if (ctx.cfg.contains("rho_grid")) {
    const auto grid = parse_grid(ctx.cfg.at("rho_grid"), "rho_grid");
    CsvWriter csv(ctx.out_dir / "moments_curves.csv");
    csv.row({"series", "rho", "log_moment", "unit"});
    for (double x : grid) {
      if (!(x > 0.0)) throw InputError("rho_grid values must be positive");
      csv.row({"optimal", number(x), number(ctx.unit(sync_exponent(p, x))), ctx.unit_name()});
    }
    if (param.gamma) {
      const std::string label = "mismatch_gamma=" + number(*param.gamma);
      for (double x : grid) {
        csv.row({label, number(x), number(ctx.unit(mismatch_exponent(p, x, *param.gamma))), ctx.unit_name()});
      }
    }
    r["curves"] = (ctx.out_dir / "moments_curves.csv").string();
  }

  if (ctx.verify) {
    if (p.size() <= 1'000'000) {
      const double oracle = exhaustive_guesswork(p, 1, rho).value;
      check(std::abs(oracle - exact.value) <= 1e-9 * oracle, "exact moment disagrees with enumeration");
    }
    check(bounds.lower.value <= exact.value * (1 + 1e-12) && exact.value <= bounds.upper.value * (1 + 1e-12),
          "Arikan bounds do not sandwich the exact moment");
    const double series = iid_series_reference(p, opt.distribution, rho);
    check(std::abs(series - opt_g.value) <= 1e-7 * series, "i.i.d. moment disagrees with series oracle");
    if (p.size() == 2) {
      const auto grid = simplex_grid_min(
          [&](std::span<const double> qv) {
            if (qv[0] <= 0.0 || qv[1] <= 0.0) return kInf;
            return p[0] / std::pow(qv[0], rho) + p[1] / std::pow(qv[1], rho);
          },
          2, 1e-6);
      check(std::abs(grid.value - std::exp(opt.log_moment.value)) <= 1e-5, "optimal i.i.d. moment disagrees with grid");
    }
    r["verified"] = true;
  }
  ctx.emit(r);
}

// ------------------------------------------------------------- exponents

Json report_json(const Context& ctx, const ExponentReport& rep) {
  Json j = report_to_json(rep);
  j["value"] = ctx.unit_json(rep.value);
  return j;
}

// Sync exponent straight from its definition on the binary grid: the
// cheapest cross-entropy among types with entropy >= alpha sets the list
// boundary, then the closest type inside the boundary.
double binary_sync_oracle(const Pmf& p, double alpha) {
  auto h = [](std::span<const double> q) {
    double s = 0.0;
    for (double x : q) s -= x > 0.0 ? x * std::log(x) : 0.0;
    return s;
  };
  auto ce = [&](std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      if (q[i] == 0.0) continue;
      if (p[i] == 0.0) return kInf;
      s -= q[i] * std::log(p[i]);
    }
    return s;
  };
  const double boundary =
      simplex_grid_min([&](std::span<const double> q) { return h(q) >= alpha ? ce(q) : kInf; }, 2, 1e-6).value;
  return simplex_grid_min(
             [&](std::span<const double> q) {
               const double c = ce(q);
               return c <= boundary + 1e-12 ? c - h(q) : kInf;
             },
             2, 1e-6)
      .value;
}

void cmd_exponents(Context& ctx) {
  const Pmf p = pmf_from_source_json(ctx.cfg);
  double alpha = 0.0;
  if (auto a = ctx.get<double>("alpha")) {
    alpha = ctx.from_unit(*a);
  } else if (auto le = ctx.get<double>("list_exponent")) {
    alpha = ListGrowthRate::from_base_exponent(*le, p.size()).nats();
  } else {
    throw InputError("exponents: give --alpha or --list-exponent");
  }
  const double cap = std::log(static_cast<double>(p.size()));
  if (alpha < 0.0 || alpha > cap + 1e-12) throw InputError("alpha outside [0, log|X|]");
  alpha = std::min(alpha, cap);
  const bool restrict = ctx.get_or<bool>("restrict", false);
  const AsyncDomain domain = restrict ? AsyncDomain::kGuessListTypes : AsyncDomain::kFullSimplex;

  const auto sync = sync_success_exponent(p, alpha);
  const auto minb = min_beta_async_exponent(p, alpha);
  const auto fail = failure_exponent(p, alpha);
  Json r;
  r["alphabet_fingerprint"] = alphabet_fingerprint(p.symbols());
  r["alpha"] = ctx.unit_json(alpha);
  r["entropy"] = ctx.unit_json(shannon_entropy(p));
  r["threshold_type"] = pmf_to_json(threshold_type(p, alpha));
  r["sync_success"] = report_json(ctx, sync);
  r["min_beta_async_success"] = report_json(ctx, minb);
  r["failure"] = report_json(ctx, fail);
  r["j_guesswork_exponent"] = ctx.unit_json(j_guesswork_exponent(p, alpha));
  r["async_domain"] = restrict ? "guess_list_types" : "full_simplex";
  if (auto beta = ctx.get<double>("beta")) {
    r["async_success"] = report_json(ctx, async_success_exponent(p, alpha, *beta, domain));
  }

  if (auto points = ctx.get<std::size_t>("alpha_points")) {
    if (*points < 2) throw InputError("alpha_points must be >= 2");
    CsvWriter csv(ctx.out_dir / "exponent_curves.csv");
    csv.row({"series", "alpha", "exponent", "unit"});
    std::vector<double> xs(*points);
    for (std::size_t i = 0; i < *points; ++i) xs[i] = cap * static_cast<double>(i) / static_cast<double>(*points - 1);
    for (double x : xs) csv.row({"sync_success", number(ctx.unit(x)), number(ctx.unit(sync_success_exponent(p, x).value)), ctx.unit_name()});
    for (double x : xs) {
      csv.row({"min_beta_async_success", number(ctx.unit(x)), number(ctx.unit(min_beta_async_exponent(p, x).value)),
               ctx.unit_name()});
    }
    for (double x : xs) csv.row({"failure", number(ctx.unit(x)), number(ctx.unit(failure_exponent(p, x).value)), ctx.unit_name()});
    r["curves"] = (ctx.out_dir / "exponent_curves.csv").string();
  }

  if (ctx.verify) {
    check(std::abs(minb.value - sync.value) <= 1e-5, "min-beta async exponent differs from sync exponent");
    if (p.size() == 2 && !p.is_uniform_on_support()) {
      check(std::abs(binary_sync_oracle(p, alpha) - sync.value) <= 1e-5, "sync exponent disagrees with grid oracle");
      r["verified"] = "grid";
    } else {
      r["verified"] = "dual-solver";
    }
  }
  ctx.emit(r);
}

// ---------------------------------------------------------------- markov

void cmd_markov(Context& ctx) {
  Json chain_ref = ctx.cfg.contains("chain") ? ctx.cfg.at("chain") : Json(nullptr);
  if (chain_ref.is_null()) throw InputError("markov: give --chain <file>");
  const MarkovModel source = markov_from_ref(chain_ref);
  const double rho = ctx.get_or<double>("rho", 1.0);
  const PerronData pd = tilted_perron(source, rho);
  const MarkovModel guesser = optimal_markov_guesser(source, rho);
  write_text(ctx.out_dir / "markov_guesser.json", markov_to_json(guesser).dump(2) + "\n");
  Json r;
  r["rho"] = rho;
  r["alphabet_fingerprint"] = alphabet_fingerprint(source.states());
  r["lambda"] = pd.lambda;
  r["perron_iterations"] = pd.iterations;
  r["exponent"] = ctx.unit_json(markov_sync_exponent(source, rho));
  r["source_stationary"] = pmf_to_json(source.stationary());
  r["guesser"] = markov_to_json(guesser);
  r["guesser_stationary"] = pmf_to_json(guesser.stationary());
  if (ctx.verify) {
    const std::size_t n = pd.w.size();
    for (std::size_t a = 0; a < n; ++a) {
      double wr = 0.0;
      for (std::size_t b = 0; b < n; ++b) wr += pd.w(a, b) * pd.right[b];
      check(std::abs(wr - pd.lambda * pd.right[a]) <= 1e-9 * pd.lambda * pd.right[a], "Perron eigen-equation residual");
    }
    r["verified"] = true;
  }
  ctx.emit(r);
}

// ------------------------------------------------------------------ zipf

void cmd_zipf(Context& ctx) {
  const auto m = ctx.get<std::size_t>("m");
  const auto s = ctx.get<double>("s");
  if (!m || !s) throw InputError("zipf: --m and --s are required");
  const auto variant_name = ctx.get_or<std::string>("variant", "pdf");
  if (variant_name != "pdf" && variant_name != "cdf") throw InputError("--variant must be pdf or cdf");
  const ZipfVariant variant = variant_name == "pdf" ? ZipfVariant::kPdf : ZipfVariant::kCdf;
  const double rho = ctx.get_or<double>("rho", 1.0);
  const ZipfSpec spec = ZipfSpec::make(*m, *s, variant);
  const Pmf p = zipf_pmf(spec);
  const auto opt = optimal_iid_distribution(p, rho);
  write_text(ctx.out_dir / "zipf_distribution.json", pmf_to_json(p).dump(2) + "\n");
  Json r;
  r["m"] = *m;
  r["s"] = *s;
  r["variant"] = variant_name;
  r["rho"] = rho;
  r["alphabet_fingerprint"] = alphabet_fingerprint(p.symbols());
  r["normalizer"] = spec.normalizer;
  r["log_E_V_optimal"] = ctx.unit_json(opt.log_moment.value);
  r["E_V_optimal"] = real_to_json(std::exp(opt.log_moment.value));
  r["E_V_naive"] = real_to_json(iid_v_moment(p, p, 1.0).value);
  r["exact_guesswork"] = real_to_json(exact_guesswork_moment(p, rho).value);
  if (variant == ZipfVariant::kPdf) {
    const double s_opt = *s / (1.0 + rho);
    const double closed =
        (1.0 + rho) * std::log(generalized_harmonic(*m, s_opt)) - std::log(generalized_harmonic(*m, *s));
    r["optimal_guesser_parameter"] = s_opt;
    r["log_E_V_closed_form"] = ctx.unit_json(closed);
    if (ctx.verify) {
      check(std::abs(closed - opt.log_moment.value) <= 1e-9 * std::max(1.0, std::abs(closed)),
            "Zipf closed form disagrees with tilted moment");
      const Pmf family = zipf_pmf(ZipfSpec::make(*m, s_opt, ZipfVariant::kPdf));
      check(l1_distance(family, opt.distribution) <= 1e-12, "tilted Zipf is not Zipf(s/(1+rho))");
      r["verified"] = true;
    }
  } else {
    r["optimal_guesser_parameter"] = nullptr;
    r["optimal_guesser"] = pmf_to_json(opt.distribution);
    if (ctx.verify) r["verified"] = "no closed form for this variant";
  }
  ctx.emit(r);
}

// -------------------------------------------------------------- simulate

struct SimSource {
  PasswordSource source;
  Pmf marginal;  // per-symbol law (stationary for Markov sources)
  std::optional<MarkovModel> chain;
};

SimSource load_sim_source(const Json& cfg, std::size_t n) {
  if (!cfg.contains("source")) throw InputError("simulate: config needs a \"source\"");
  const Json& src = cfg.at("source");
  if (src.contains("markov")) {
    MarkovModel model = markov_from_ref(src.at("markov"));
    Pmf marginal = model.stationary();
    return {MarkovSource{model, n}, marginal, model};
  }
  Pmf p = pmf_from_source_json(src);
  return {IidSource{p, n}, p, std::nullopt};
}

GuessStrategy parse_strategy(const Json& j, const SimSource& src, double rho) {
  if (!j.is_object() || !j.contains("kind")) throw InputError("strategy needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "shared_list") return SharedOptimalList{};
  if (kind == "replicated_list") return ReplicatedOptimalList{};
  if (kind == "partitioned_list") {
    const auto mode = j.value("mode", std::string("interleaved"));
    if (mode != "interleaved" && mode != "contiguous") throw InputError("partition mode must be interleaved or contiguous");
    return PartitionedLists{mode == "interleaved" ? PartitionMode::kInterleaved : PartitionMode::kContiguous};
  }
  if (kind == "iid") {
    const Json d = j.contains("distribution") ? j.at("distribution") : Json("optimal");
    if (d.is_string() && d.get<std::string>() == "source") return IidSampler{src.marginal};
    if (d.is_string() && d.get<std::string>() == "optimal") return IidSampler{tilt(src.marginal, 1.0 / (1.0 + rho))};
    if (d.is_object() && d.contains("tilt")) return IidSampler{tilt(src.marginal, require_real(d.at("tilt"), "tilt"))};
    if (d.is_object() && d.contains("probs")) {
      Json pj = Json::object();
      pj["symbols"] = src.marginal.symbols();
      pj["probs"] = d.at("probs");
      return IidSampler{pmf_from_json(pj)};
    }
    throw InputError("iid distribution must be \"source\", \"optimal\", {\"tilt\": t} or {\"probs\": [...]}");
  }
  if (kind == "markov") {
    const Json c = j.contains("chain") ? j.at("chain") : Json("optimal");
    if (c.is_string() && c.get<std::string>() == "optimal") {
      if (!src.chain) throw InputError("markov strategy \"optimal\" needs a Markov source");
      return MarkovSampler{optimal_markov_guesser(*src.chain, rho)};
    }
    return MarkovSampler{markov_from_ref(c)};
  }
  throw InputError("unknown strategy kind '" + kind + "'");
}

Schedule parse_schedule(const Json& j, std::uint64_t seed) {
  const Json obj = j.is_string() ? Json{{"kind", j}} : j;
  if (!obj.is_object() || !obj.contains("kind")) throw InputError("schedule needs a \"kind\"");
  const auto kind = obj.at("kind").get<std::string>();
  if (kind == "round_robin") return RoundRobin{};
  if (kind == "random_interleave") return RandomInterleave{obj.value("seed", derive_seed(seed, 0x5c4ed))};
  if (kind == "worst_case") return WorstCase{};
  if (kind == "explicit") {
    ExplicitPermutation e;
    for (const Json& pair : obj.at("prefix")) {
      if (!pair.is_array() || pair.size() != 2) throw InputError("explicit prefix entries are [agent, k]");
      e.prefix.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::uint64_t>());
    }
    return e;
  }
  throw InputError("unknown schedule kind '" + kind + "'");
}

std::vector<Agent> parse_agents(const Json& cell, const SimSource& src, double rho) {
  std::vector<Agent> agents;
  const Json a = cell.contains("agents") ? cell.at("agents") : Json(1);
  if (a.is_number_unsigned() || a.is_number_integer()) {
    const auto count = a.get<long long>();
    if (count < 1) throw InputError("agent count must be >= 1");
    if (!cell.contains("strategy")) throw InputError("cell needs a \"strategy\" when agents is a count");
    const GuessStrategy s = parse_strategy(cell.at("strategy"), src, rho);
    for (long long i = 0; i < count; ++i) agents.push_back({"agent" + std::to_string(i), s});
  } else if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      agents.push_back({a[i].value("id", "agent" + std::to_string(i)), parse_strategy(a[i].at("strategy"), src, rho)});
    }
  } else {
    throw InputError("\"agents\" must be a count or an array");
  }
  return agents;
}

struct Cell {
  std::string label;
  std::vector<Agent> agents;
  Schedule schedule;
  std::optional<std::string> quantity;
};

std::vector<Cell> parse_cells(const Json& cfg, const SimSource& src, double rho, std::uint64_t seed) {
  std::vector<Cell> cells;
  if (cfg.contains("matrix")) {
    const Json& m = cfg.at("matrix");
    const Json count = m.contains("agents") ? m.at("agents") : Json(1);
    for (const Json& s : m.at("strategies")) {
      for (const Json& sch : m.at("schedules")) {
        Json cell = Json::object();
        cell["agents"] = count;
        cell["strategy"] = s.at("strategy");
        const Schedule schedule = parse_schedule(sch, seed);
        const std::string label = s.value("label", s.at("strategy").at("kind").get<std::string>()) + "/" +
                                  schedule_name(schedule);
        cells.push_back({label, parse_agents(cell, src, rho), schedule, std::nullopt});
      }
    }
  }
  if (cfg.contains("cells")) {
    for (const Json& c : cfg.at("cells")) {
      const Schedule schedule = parse_schedule(c.contains("schedule") ? c.at("schedule") : Json("round_robin"), seed);
      const std::string label = c.value("label", "cell" + std::to_string(cells.size()));
      std::optional<std::string> quantity;
      if (c.contains("quantity")) quantity = c.at("quantity").get<std::string>();
      cells.push_back({label, parse_agents(c, src, rho), schedule, quantity});
    }
  }
  if (cells.empty()) throw InputError("simulate: config needs \"cells\" or \"matrix\"");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cells[i].label == cells[j].label) throw InputError("duplicate cell label '" + cells[i].label + "'");
    }
  }
  return cells;
}

std::vector<std::uint64_t> default_success_grid(std::uint64_t max_queries) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t i = 1; i <= std::min<std::uint64_t>(16, max_queries); ++i) grid.push_back(i);
  std::uint64_t x = 16;
  while (x < max_queries) {
    x = std::max(x + 1, static_cast<std::uint64_t>(std::ceil(static_cast<double>(x) * 1.25)));
    grid.push_back(std::min(x, max_queries));
  }
  return grid;
}

std::string file_label(const std::string& label) {
  std::string s;
  for (char c : label) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

// Closed-form E[G] when every agent guesses i.i.d. from one per-symbol law
// over an i.i.d. source: the merged query stream is i.i.d., so
// E[G] = (sum_x p(x)/phat(x))^n.
std::optional<double> iid_mean_reference(const Cell& cell, const SimSource& src, std::size_t n) {
  if (!std::holds_alternative<IidSource>(src.source)) return std::nullopt;
  const auto* first = std::get_if<IidSampler>(&cell.agents.front().strategy);
  if (first == nullptr) return std::nullopt;
  for (const Agent& a : cell.agents) {
    const auto* s = std::get_if<IidSampler>(&a.strategy);
    if (s == nullptr || !std::equal(s->per_symbol.probs().begin(), s->per_symbol.probs().end(),
                                    first->per_symbol.probs().begin(), first->per_symbol.probs().end())) {
      return std::nullopt;
    }
  }
  const double v = iid_v_moment(src.marginal, first->per_symbol, 1.0).value;
  return std::pow(v, static_cast<double>(n));
}

void cmd_simulate(Context& ctx) {
  const Json& cfg = ctx.cfg;
  const auto n = ctx.get_or<std::size_t>("n", 1);
  const double rho = ctx.get_or<double>("rho", 1.0);
  if (!(rho > 0.0)) throw InputError("rho must be positive");
  const auto trials = ctx.get_or<std::uint64_t>("trials", 10000);
  if (trials < 1) throw InputError("trials must be >= 1");
  const auto threads = ctx.get_or<unsigned>("threads", 0);
  const auto budget = ctx.get<std::uint64_t>("budget");
  const bool trace = ctx.get_or<bool>("trace", false);
  const SimSource src = load_sim_source(cfg, n);
  const auto cells = parse_cells(cfg, src, rho, ctx.seed);

  Json r;
  r["seed"] = ctx.seed;
  r["trials"] = trials;
  r["rho"] = rho;
  r["n"] = n;
  r["alphabet_fingerprint"] = alphabet_fingerprint(src.marginal.symbols());
  Json cell_json = Json::array();
  Json quantities = Json::object();
  std::vector<std::vector<TrialRecord>> all_records;
  std::uint64_t max_queries = 1;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    const PreparedPlan plan(AttackPlan{cell.agents, src.source, budget});
    const std::uint64_t cell_seed = derive_seed(ctx.seed, c);
    auto records = monte_carlo_records(plan, cell.schedule, trials, cell_seed, threads);
    const SimStats stats = summarize(records, rho, cell_seed, budget);
    for (const auto& rec : records) max_queries = std::max(max_queries, rec.total_queries);

    Json cj;
    cj["label"] = cell.label;
    Json strategies = Json::array();
    for (const Agent& a : cell.agents) strategies.push_back(strategy_name(a.strategy));
    cj["strategies"] = strategies;
    cj["schedule"] = schedule_name(cell.schedule);
    cj["stats"] = stats_to_json(stats);
    if (trace) {
      const fs::path path = ctx.out_dir / ("trace_" + std::to_string(c) + "_" + file_label(cell.label) + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw InputError("cannot write " + path.string());
      write_trace_csv(out, records);
      cj["trace"] = path.string();
    }
    if (ctx.verify) {
      if (auto ref = iid_mean_reference(cell, src, n); ref && !budget) {
        check(std::abs(stats.mean_G - *ref) <= 4.0 * stats.se_G + 1e-12,
              "cell '" + cell.label + "' mean " + number(stats.mean_G) + " vs closed form " + number(*ref));
        cj["verified_against"] = *ref;
      }
    }
    cell_json.push_back(cj);

    const Json moment = {{"value", real_to_json(stats.mean_G_pow_rho)}, {"se", real_to_json(stats.se_G_pow_rho)}};
    quantities[cell.label + ".E[G^rho]"] = moment;
    quantities[cell.label + ".E[G]"] = {{"value", real_to_json(stats.mean_G)}, {"se", real_to_json(stats.se_G)}};
    if (cell.quantity) quantities[*cell.quantity] = moment;
    all_records.push_back(std::move(records));
  }
  r["cells"] = cell_json;
  r["quantities"] = quantities;

  std::vector<std::uint64_t> grid;
  if (cfg.contains("success_grid")) {
    grid = cfg.at("success_grid").get<std::vector<std::uint64_t>>();
  } else {
    grid = default_success_grid(max_queries);
  }
  CsvWriter csv(ctx.out_dir / "success_curves.csv");
  csv.row({"series", "queries", "success_probability", "unit"});
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto ys = success_curve(all_records[c], grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.row({cells[c].label, std::to_string(grid[i]), number(ys[i]), "probability"});
    }
  }
  r["success_curves"] = (ctx.out_dir / "success_curves.csv").string();
  if (ctx.verify) r["verified"] = true;
  ctx.emit(r);
}

// ---------------------------------------------------------------- report

void cmd_report(Context& ctx) {
  const auto inputs = ctx.get<std::vector<std::string>>("inputs");
  if (!inputs || inputs->empty()) throw InputError("report: at least one input JSON is required");
  const double tol = ctx.get_or<double>("tolerance_se", 3.0);
  std::optional<std::string> fingerprint;
  struct Entry {
    std::optional<double> analytic;
    std::optional<double> simulated;
    double se = 0.0;
  };
  std::vector<std::string> order;
  std::map<std::string, Entry> entries;
  for (const auto& path : *inputs) {
    const Json j = read_json_file(path);
    if (!j.contains("quantities") || !j.at("quantities").is_object()) {
      throw InputError(path + ": no \"quantities\" object");
    }
    const auto fp = j.value("alphabet_fingerprint", std::string());
    if (fingerprint && *fingerprint != fp) {
      throw InputError(path + ": alphabet fingerprint " + fp + " differs from " + *fingerprint);
    }
    fingerprint = fp;
    for (const auto& [name, q] : j.at("quantities").items()) {
      if (!entries.count(name)) order.push_back(name);
      Entry& e = entries[name];
      const double v = real_from_json(q.at("value"), name);
      if (q.contains("se")) {
        e.simulated = v;
        e.se = real_from_json(q.at("se"), name);
      } else {
        e.analytic = v;
      }
    }
  }
  CsvWriter csv(ctx.out_dir / "report.csv");
  csv.row({"quantity", "analytic", "simulated", "se", "z", "status"});
  Json rows = Json::array();
  std::size_t mismatches = 0;
  std::ostringstream table;
  table << std::left << std::setw(36) << "quantity" << std::setw(16) << "analytic" << std::setw(16) << "simulated"
        << std::setw(12) << "se" << "status\n";
  for (const auto& name : order) {
    const Entry& e = entries.at(name);
    std::string status = "UNPAIRED";
    double z = std::nan("");
    if (e.analytic && e.simulated) {
      const double diff = std::abs(*e.analytic - *e.simulated);
      z = e.se > 0.0 ? diff / e.se : (diff == 0.0 ? 0.0 : kInf);
      status = diff <= tol * e.se + 1e-12 * std::max(1.0, std::abs(*e.analytic)) ? "OK" : "MISMATCH";
      if (status == "MISMATCH") ++mismatches;
    }
    auto cell = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
    csv.row({name, cell(e.analytic), cell(e.simulated), e.simulated ? number(e.se) : "", std::isnan(z) ? "" : number(z),
             status});
    table << std::setw(36) << name << std::setw(16) << cell(e.analytic) << std::setw(16) << cell(e.simulated)
          << std::setw(12) << (e.simulated ? number(e.se) : "") << status << "\n";
    Json row;
    row["quantity"] = name;
    row["analytic"] = e.analytic ? real_to_json(*e.analytic) : Json(nullptr);
    row["simulated"] = e.simulated ? real_to_json(*e.simulated) : Json(nullptr);
    row["se"] = e.simulated ? real_to_json(e.se) : Json(nullptr);
    row["status"] = status;
    rows.push_back(row);
  }
  Json r;
  r["alphabet_fingerprint"] = fingerprint.value_or("");
  r["tolerance_se"] = tol;
  r["rows"] = rows;
  r["mismatches"] = mismatches;
  r["table"] = (ctx.out_dir / "report.csv").string();
  write_text(ctx.out_dir / "report.txt", table.str());
  ctx.emit(r);
  if (ctx.verify && mismatches > 0) throw VerifyFailure("report: " + std::to_string(mismatches) + " mismatched rows");
}

// ------------------------------------------------------------ dispatcher

struct Override {
  CLI::Option* option;
  std::string key;
  std::function<Json()> value;
};

template <class T>
void add_override(CLI::App* app, std::vector<Override>& overrides, const std::string& flag, const std::string& key,
                  std::shared_ptr<T> storage, const std::string& help) {
  CLI::Option* opt = app->add_option(flag, *storage, help);
  overrides.push_back({opt, key, [storage] { return Json(*storage); }});
}

void add_source_flags(CLI::App* app, std::vector<Override>& o) {
  add_override(app, o, "--dist", "dist", std::make_shared<std::string>(), "distribution JSON {symbols, probs}");
  add_override(app, o, "--bernoulli", "bernoulli", std::make_shared<double>(), "binary source with P(0) = value");
  add_override(app, o, "--probs", "probs", std::make_shared<std::vector<double>>(), "inline probabilities");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guesswork analytics: optimal guessing strategies, moments, exponents and attack simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool bits = false;
  bool verify = false;
  auto* config_opt = app.add_option("--config", config_path, "JSON config file (flags override its keys)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--bits", bits, "report entropies and exponents in bits");
  app.add_flag("--verify", verify, "cross-check against brute-force oracles");

  std::map<CLI::App*, std::vector<Override>> overrides;
  std::map<CLI::App*, std::function<void(Context&)>> handlers;

  auto* ingest = app.add_subcommand("ingest", "read a frequency file into a distribution JSON");
  add_override(ingest, overrides[ingest], "input", "input", std::make_shared<std::string>(), "frequency TSV");
  add_override(ingest, overrides[ingest], "--top-k", "top_k", std::make_shared<std::size_t>(), "keep the k most frequent");
  handlers[ingest] = cmd_ingest;

  auto* tilt_cmd = app.add_subcommand("tilt", "tilted distribution p^theta");
  add_source_flags(tilt_cmd, overrides[tilt_cmd]);
  add_override(tilt_cmd, overrides[tilt_cmd], "--theta", "theta", std::make_shared<double>(), "tilt exponent");
  add_override(tilt_cmd, overrides[tilt_cmd], "--rho", "rho", std::make_shared<double>(), "use theta = 1/(1+rho)");
  handlers[tilt_cmd] = cmd_tilt;

  auto* moments = app.add_subcommand("moments", "guesswork moments, bounds and optimal i.i.d. guesser");
  add_source_flags(moments, overrides[moments]);
  add_override(moments, overrides[moments], "--rho", "rho", std::make_shared<double>(), "moment order");
  add_override(moments, overrides[moments], "--gamma", "gamma", std::make_shared<double>(), "order the guesser was tuned for");
  {
    auto grid = std::make_shared<std::string>();
    CLI::Option* opt = moments->add_option("--rho-grid", *grid, "from:to:count curve over rho");
    overrides[moments].push_back({opt, "rho_grid", [grid] { return grid_from_flag(*grid, "--rho-grid"); }});
  }
  handlers[moments] = cmd_moments;

  auto* exps = app.add_subcommand("exponents", "success and failure exponents for exp(n alpha) guesses");
  add_source_flags(exps, overrides[exps]);
  add_override(exps, overrides[exps], "--alpha", "alpha", std::make_shared<double>(), "list growth rate (nats, or bits with --bits)");
  add_override(exps, overrides[exps], "--list-exponent", "list_exponent", std::make_shared<double>(),
               "list size exponent a in J = |X|^(n a)");
  add_override(exps, overrides[exps], "--beta", "beta", std::make_shared<double>(), "tilt of an i.i.d. guesser");
  add_override(exps, overrides[exps], "--alpha-points", "alpha_points", std::make_shared<std::size_t>(),
               "write exponent curves over this many alphas");
  {
    auto flag = std::make_shared<bool>(false);
    CLI::Option* opt = exps->add_flag("--restrict", *flag, "restrict the async minimization to guess-list types");
    overrides[exps].push_back({opt, "restrict", [flag] { return Json(*flag); }});
  }
  handlers[exps] = cmd_exponents;

  auto* markov = app.add_subcommand("markov", "Perron-Frobenius guesser for a Markov source");
  add_override(markov, overrides[markov], "--chain", "chain", std::make_shared<std::string>(), "Markov JSON {states, transitions}");
  add_override(markov, overrides[markov], "--rho", "rho", std::make_shared<double>(), "moment order");
  handlers[markov] = cmd_markov;

  auto* zipf = app.add_subcommand("zipf", "optimal guessing of Zipf-distributed passwords");
  add_override(zipf, overrides[zipf], "--m", "m", std::make_shared<std::size_t>(), "number of passwords");
  add_override(zipf, overrides[zipf], "--s", "s", std::make_shared<double>(), "Zipf exponent");
  add_override(zipf, overrides[zipf], "--variant", "variant", std::make_shared<std::string>(), "pdf or cdf");
  add_override(zipf, overrides[zipf], "--rho", "rho", std::make_shared<double>(), "moment order");
  handlers[zipf] = cmd_zipf;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo attack simulation from a JSON config");
  add_override(simulate, overrides[simulate], "--trials", "trials", std::make_shared<std::uint64_t>(), "trials per cell");
  add_override(simulate, overrides[simulate], "--threads", "threads", std::make_shared<unsigned>(), "worker threads");
  add_override(simulate, overrides[simulate], "--budget", "budget", std::make_shared<std::uint64_t>(), "query budget J");
  {
    auto flag = std::make_shared<bool>(false);
    CLI::Option* opt = simulate->add_flag("--trace", *flag, "write per-trial CSV traces");
    overrides[simulate].push_back({opt, "trace", [flag] { return Json(*flag); }});
  }
  handlers[simulate] = cmd_simulate;

  auto* report = app.add_subcommand("report", "merge analytic and simulated quantities");
  add_override(report, overrides[report], "inputs", "inputs", std::make_shared<std::vector<std::string>>(),
               "JSON outputs of other subcommands");
  add_override(report, overrides[report], "--tolerance-se", "tolerance_se", std::make_shared<double>(),
               "allowed distance in standard errors");
  handlers[report] = cmd_report;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx;
  ctx.command = sub->get_name();
  ctx.out = &out;
  ctx.bits = bits;
  ctx.verify = verify;
  try {
    if (config_opt->count() > 0) {
      ctx.cfg = read_json_file(config_path);
      if (!ctx.cfg.is_object()) throw InputError(config_path + ": config must be a JSON object");
    }
    for (const Override& o : overrides[sub]) {
      if (o.option->count() > 0) ctx.cfg[o.key] = o.value();
    }
    if (seed_opt->count() > 0) {
      ctx.cfg["seed"] = seed;
    }
    ctx.seed = ctx.get_or<std::uint64_t>("seed", 1);
    ctx.out_dir = out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir + ": " + ec.message());

    Json resolved;
    resolved["command"] = ctx.command;
    resolved["unit"] = ctx.unit_name();
    resolved["seed"] = ctx.seed;
    resolved["verify"] = ctx.verify;
    resolved["config"] = ctx.cfg;
    write_text(ctx.out_dir / "resolved_config.json", resolved.dump(2) + "\n");

    handlers.at(sub)(ctx);
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const VerifyFailure& e) {
    err << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace guesswork::cli
