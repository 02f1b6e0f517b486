#include "guesswork/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <random>
#include <set>
#include <thread>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"

namespace guesswork {

namespace {

using Rng = SplitMix64;

constexpr std::uint64_t kMaxCodes = std::uint64_t{1} << 62;
constexpr std::uint64_t kMaxListSize = 10'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class CategoricalSampler {
 public:
  CategoricalSampler() = default;
  explicit CategoricalSampler(std::span<const double> probs) : probs_(probs.begin(), probs.end()) {
    cdf_.resize(probs.size());
    CompensatedSum acc;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf_[i] = acc.value();
      if (probs[i] > 0.0) last_ = i;
    }
    cdf_[last_] = 1.0;
    for (std::size_t i = last_ + 1; i < cdf_.size(); ++i) cdf_[i] = 1.0;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = std::generate_canonical<double, 53>(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), last_);
  }

  double prob(std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::size_t last_ = 0;
};

enum class AgentKind { kShared, kReplicated, kPartitioned, kSymbolIid, kSequenceIid, kMarkov };

struct RandomGuesser {
  AgentKind kind = AgentKind::kSymbolIid;
  CategoricalSampler first;
  std::vector<CategoricalSampler> rows;
};

struct AgentInfo {
  AgentKind kind = AgentKind::kShared;
  std::size_t partition_index = 0;  // among partitioned agents
  std::size_t guesser = 0;          // index into Impl::guessers
};

bool deterministic_kind(AgentKind k) {
  return k == AgentKind::kShared || k == AgentKind::kReplicated || k == AgentKind::kPartitioned;
}

}  // namespace

struct PreparedPlan::Impl {
  explicit Impl(AttackPlan p) : plan(std::move(p)) {}

  AttackPlan plan;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t count = 0;
  bool markov_source = false;
  CategoricalSampler source_first;
  std::vector<CategoricalSampler> source_rows;
  std::vector<AgentInfo> agents;
  std::vector<RandomGuesser> guessers;
  std::size_t partition_count = 0;
  PartitionMode partition_mode = PartitionMode::kInterleaved;
  bool has_shared = false;
  bool has_deterministic = false;
  bool has_random = false;
  std::vector<std::uint64_t> order;  // rank - 1 -> code
  std::vector<std::uint64_t> rank;   // code -> rank

  void digits_of(std::uint64_t code, std::vector<std::size_t>& out) const {
    out.resize(n);
    for (std::size_t i = n; i-- > 0;) {
      out[i] = static_cast<std::size_t>(code % m);
      code /= m;
    }
  }

  std::uint64_t list_length(std::size_t agent) const {
    const AgentInfo& info = agents[agent];
    if (info.kind != AgentKind::kPartitioned) return count;
    const std::uint64_t p = partition_count;
    const std::uint64_t j = info.partition_index;
    if (partition_mode == PartitionMode::kInterleaved) return j < count ? (count - j + p - 1) / p : 0;
    const std::uint64_t block = (count + p - 1) / p;
    const std::uint64_t lo = j * block;
    return lo >= count ? 0 : std::min(lo + block, count) - lo;
  }

  // Local 1-based position of the target in a deterministic agent's list.
  std::optional<std::uint64_t> local_rank(std::size_t agent, std::uint64_t target_rank) const {
    const AgentInfo& info = agents[agent];
    if (info.kind != AgentKind::kPartitioned) return target_rank;
    const std::uint64_t p = partition_count;
    const std::uint64_t j = info.partition_index;
    if (partition_mode == PartitionMode::kInterleaved) {
      if ((target_rank - 1) % p != j) return std::nullopt;
      return (target_rank - 1) / p + 1;
    }
    const std::uint64_t block = (count + p - 1) / p;
    if ((target_rank - 1) / block != j) return std::nullopt;
    return target_rank - j * block;
  }

  std::uint64_t list_item(std::size_t agent, std::uint64_t k) const {
    const AgentInfo& info = agents[agent];
    std::uint64_t r = k;
    if (info.kind == AgentKind::kPartitioned) {
      const std::uint64_t p = partition_count;
      const std::uint64_t j = info.partition_index;
      r = partition_mode == PartitionMode::kInterleaved ? (k - 1) * p + j + 1 : j * ((count + p - 1) / p) + k;
    }
    return order[r - 1];
  }

  bool can_generate(const RandomGuesser& g, std::uint64_t target, const std::vector<std::size_t>& digits) const {
    switch (g.kind) {
      case AgentKind::kSequenceIid:
        return g.first.prob(target) > 0.0;
      case AgentKind::kSymbolIid:
        return std::all_of(digits.begin(), digits.end(), [&](std::size_t d) { return g.first.prob(d) > 0.0; });
      case AgentKind::kMarkov:
        if (!(g.first.prob(digits[0]) > 0.0)) return false;
        for (std::size_t i = 1; i < digits.size(); ++i) {
          if (!(g.rows[digits[i - 1]].prob(digits[i]) > 0.0)) return false;
        }
        return true;
      default:
        return false;
    }
  }
};

namespace {

// Draws one guess and reports whether it equals the target, stopping at the
// first mismatching symbol.
bool draw_hit(const RandomGuesser& g, Rng& rng, std::uint64_t target, const std::vector<std::size_t>& digits) {
  switch (g.kind) {
    case AgentKind::kSequenceIid:
      return g.first(rng) == target;
    case AgentKind::kSymbolIid:
      for (std::size_t d : digits) {
        if (g.first(rng) != d) return false;
      }
      return true;
    case AgentKind::kMarkov: {
      if (g.first(rng) != digits[0]) return false;
      for (std::size_t i = 1; i < digits.size(); ++i) {
        if (g.rows[digits[i - 1]](rng) != digits[i]) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

const Alphabet& source_alphabet(const PasswordSource& s) {
  return std::visit(Overloaded{[](const IidSource& x) -> const Alphabet& { return x.per_symbol.symbols(); },
                               [](const MarkovSource& x) -> const Alphabet& { return x.model.states(); }},
                    s);
}

std::size_t source_length(const PasswordSource& s) {
  return std::visit([](const auto& x) { return x.n; }, s);
}

std::vector<CategoricalSampler> row_samplers(const MarkovModel& model) {
  std::vector<CategoricalSampler> rows;
  rows.reserve(model.size());
  for (std::size_t a = 0; a < model.size(); ++a) rows.emplace_back(model.transitions().row(a));
  return rows;
}

}  // namespace

PreparedPlan::PreparedPlan(AttackPlan plan) : impl_(std::make_unique<Impl>(std::move(plan))) {
  Impl& d = *impl_;
  if (d.plan.agents.empty()) throw InputError("attack plan needs at least one agent");
  d.n = source_length(d.plan.source);
  if (d.n < 1) throw InputError("attack plan: sequence length n must be >= 1");
  if (d.plan.budget && *d.plan.budget < 1) throw InputError("attack plan: budget must be >= 1");
  const Alphabet& alphabet = source_alphabet(d.plan.source);
  d.m = alphabet.size();
  d.count = 1;
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d.count > kMaxCodes / d.m) throw InputError("attack plan: |X|^n is too large to index sequences");
    d.count *= d.m;
  }

  if (const auto* iid = std::get_if<IidSource>(&d.plan.source)) {
    d.source_first = CategoricalSampler(iid->per_symbol.probs());
  } else {
    const auto& mk = std::get<MarkovSource>(d.plan.source);
    d.markov_source = true;
    d.source_first = CategoricalSampler(mk.model.stationary().probs());
    d.source_rows = row_samplers(mk.model);
  }

  std::optional<PartitionMode> mode;
  for (const Agent& agent : d.plan.agents) {
    AgentInfo info;
    std::visit(
        Overloaded{
            [&](const SharedOptimalList&) {
              info.kind = AgentKind::kShared;
              d.has_shared = true;
            },
            [&](const ReplicatedOptimalList&) { info.kind = AgentKind::kReplicated; },
            [&](const PartitionedLists& s) {
              if (mode && *mode != s.mode) throw InputError("partitioned agents must use one partition mode");
              mode = s.mode;
              info.kind = AgentKind::kPartitioned;
              info.partition_index = d.partition_count++;
            },
            [&](const IidSampler& s) {
              if (s.per_symbol.symbols() != alphabet) {
                throw InputError("agent '" + agent.id + "': sampler alphabet differs from the source alphabet");
              }
              info.kind = AgentKind::kSymbolIid;
              info.guesser = d.guessers.size();
              d.guessers.push_back({AgentKind::kSymbolIid, CategoricalSampler(s.per_symbol.probs()), {}});
            },
            [&](const IidSequenceSampler& s) {
              if (s.over_sequences.size() != d.count) {
                throw InputError("agent '" + agent.id + "': sequence sampler must cover |X|^n sequences");
              }
              info.kind = AgentKind::kSequenceIid;
              info.guesser = d.guessers.size();
              d.guessers.push_back({AgentKind::kSequenceIid, CategoricalSampler(s.over_sequences.probs()), {}});
            },
            [&](const MarkovSampler& s) {
              if (s.chain.states() != alphabet) {
                throw InputError("agent '" + agent.id + "': chain states differ from the source alphabet");
              }
              info.kind = AgentKind::kMarkov;
              info.guesser = d.guessers.size();
              d.guessers.push_back(
                  {AgentKind::kMarkov, CategoricalSampler(s.chain.stationary().probs()), row_samplers(s.chain)});
            }},
        agent.strategy);
    d.has_deterministic = d.has_deterministic || deterministic_kind(info.kind);
    d.has_random = d.has_random || !deterministic_kind(info.kind);
    d.agents.push_back(info);
  }
  if (mode) d.partition_mode = *mode;
  if (d.has_deterministic) materialize_ranks();
}

PreparedPlan::~PreparedPlan() = default;
PreparedPlan::PreparedPlan(PreparedPlan&&) noexcept = default;
PreparedPlan& PreparedPlan::operator=(PreparedPlan&&) noexcept = default;

const AttackPlan& PreparedPlan::plan() const { return impl_->plan; }
std::size_t PreparedPlan::alphabet_size() const { return impl_->m; }
std::size_t PreparedPlan::length() const { return impl_->n; }
std::uint64_t PreparedPlan::sequence_count() const { return impl_->count; }

void PreparedPlan::materialize_ranks() {
  Impl& d = *impl_;
  if (!d.order.empty()) return;
  if (d.count > kMaxListSize) {
    throw InputError("optimal list over " + std::to_string(d.count) + " sequences exceeds the enumeration cap of " +
                     std::to_string(kMaxListSize));
  }
  std::vector<double> prob(d.count);
  if (const auto* iid = std::get_if<IidSource>(&d.plan.source)) {
    const Pmf product = product_pmf(iid->per_symbol, d.n);
    std::copy(product.probs().begin(), product.probs().end(), prob.begin());
  } else {
    const auto& model = std::get<MarkovSource>(d.plan.source).model;
    std::vector<std::size_t> digits;
    for (std::uint64_t c = 0; c < d.count; ++c) {
      d.digits_of(c, digits);
      prob[c] = model.sequence_probability(digits);
    }
  }
  d.order.resize(d.count);
  for (std::uint64_t c = 0; c < d.count; ++c) d.order[c] = c;
  std::stable_sort(d.order.begin(), d.order.end(), [&](std::uint64_t a, std::uint64_t b) { return prob[a] > prob[b]; });
  d.rank.resize(d.count);
  for (std::uint64_t r = 0; r < d.count; ++r) d.rank[d.order[r]] = r + 1;
}

std::uint64_t PreparedPlan::rank_of(std::uint64_t code) const {
  if (impl_->rank.empty()) throw InputError("rank_of: optimal list not materialized");
  return impl_->rank.at(code);
}

std::uint64_t PreparedPlan::code_at_rank(std::uint64_t rank) const {
  if (impl_->order.empty()) throw InputError("code_at_rank: optimal list not materialized");
  return impl_->order.at(rank - 1);
}

std::vector<std::vector<std::uint64_t>> PreparedPlan::deterministic_lists() const {
  const Impl& d = *impl_;
  std::vector<std::vector<std::uint64_t>> lists;
  bool shared_done = false;
  for (std::size_t a = 0; a < d.agents.size(); ++a) {
    const AgentKind kind = d.agents[a].kind;
    if (!deterministic_kind(kind)) continue;
    if (kind == AgentKind::kShared) {
      if (shared_done) continue;
      shared_done = true;
    }
    std::vector<std::uint64_t> list(d.list_length(a));
    for (std::uint64_t k = 1; k <= list.size(); ++k) list[k - 1] = d.list_item(a, k);
    lists.push_back(std::move(list));
  }
  return lists;
}

bool is_deterministic(const GuessStrategy& s) {
  return std::holds_alternative<SharedOptimalList>(s) || std::holds_alternative<ReplicatedOptimalList>(s) ||
         std::holds_alternative<PartitionedLists>(s);
}

std::string strategy_name(const GuessStrategy& s) {
  return std::visit(Overloaded{[](const SharedOptimalList&) { return std::string("shared_list"); },
                               [](const ReplicatedOptimalList&) { return std::string("replicated_list"); },
                               [](const PartitionedLists&) { return std::string("partitioned_list"); },
                               [](const IidSampler&) { return std::string("iid"); },
                               [](const IidSequenceSampler&) { return std::string("iid_sequence"); },
                               [](const MarkovSampler&) { return std::string("markov"); }},
                    s);
}

std::string schedule_name(const Schedule& s) {
  return std::visit(Overloaded{[](const RoundRobin&) { return std::string("round_robin"); },
                               [](const RandomInterleave&) { return std::string("random_interleave"); },
                               [](const WorstCase&) { return std::string("worst_case"); },
                               [](const ExplicitPermutation&) { return std::string("explicit"); }},
                    s);
}

namespace {

class Trial {
 public:
  Trial(const PreparedPlan::Impl& plan, std::uint64_t seed) : p_(plan), seed_(seed) {
    Rng target_rng(derive_seed(seed, 0));
    digits_.resize(p_.n);
    digits_[0] = p_.source_first(target_rng);
    for (std::size_t i = 1; i < p_.n; ++i) {
      digits_[i] = p_.markov_source ? p_.source_rows[digits_[i - 1]](target_rng) : p_.source_first(target_rng);
    }
    target_ = 0;
    for (std::size_t d : digits_) target_ = target_ * p_.m + d;
    if (!p_.rank.empty()) target_rank_ = p_.rank[target_];

    const std::size_t count = p_.agents.size();
    rngs_.reserve(count);
    for (std::size_t a = 0; a < count; ++a) rngs_.emplace_back(derive_seed(seed, a + 1));
    next_.assign(count, 1);
    for (std::size_t a = 0; a < count; ++a) {
      const AgentInfo& info = p_.agents[a];
      if (deterministic_kind(info.kind)) {
        covered_ = covered_ || p_.local_rank(a, target_rank_).has_value();
      } else if (p_.can_generate(p_.guessers[info.guesser], target_, digits_)) {
        covered_ = true;
        random_covers_ = true;
      }
    }
  }

  TrialRecord run(const Schedule& schedule) {
    if (!covered_ && !p_.plan.budget) {
      throw NonTerminationError("no agent can ever guess the sampled target and no budget is set");
    }
    return std::visit(Overloaded{[&](const RoundRobin&) { return run_sequential(std::nullopt); },
                                 [&](const RandomInterleave& s) { return run_sequential(s.seed); },
                                 [&](const WorstCase&) { return run_worst_case(); },
                                 [&](const ExplicitPermutation& s) { return run_explicit(s); }},
                      schedule);
  }

 private:
  bool exhausted(std::size_t a) const {
    const AgentKind kind = p_.agents[a].kind;
    if (kind == AgentKind::kShared) return shared_pos_ >= p_.count;
    if (deterministic_kind(kind)) return next_[a] > p_.list_length(a);
    return false;
  }

  // Delivers query k of agent a (the next shared item for shared agents).
  bool deliver(std::size_t a, std::uint64_t k) {
    const AgentInfo& info = p_.agents[a];
    switch (info.kind) {
      case AgentKind::kShared:
        return ++shared_pos_ == target_rank_;
      case AgentKind::kReplicated:
      case AgentKind::kPartitioned:
        return p_.local_rank(a, target_rank_) == std::optional<std::uint64_t>(k);
      default:
        break;
    }
    const RandomGuesser& g = p_.guessers[info.guesser];
    if (!cache_mode_) return draw_hit(g, rngs_[a], target_, digits_);
    auto& flags = cache_[a];
    while (flags.size() < k) flags.push_back(draw_hit(g, rngs_[a], target_, digits_) ? 1 : 0);
    return flags[k - 1] != 0;
  }

  std::uint64_t guard() const {
    const auto a = static_cast<std::uint64_t>(p_.agents.size());
    return p_.count > (~std::uint64_t{0} - 1) / a ? ~std::uint64_t{0} : p_.count * a + 1;
  }

  TrialRecord fail(std::uint64_t delivered) const { return {delivered, false, target_}; }
  TrialRecord hit(std::uint64_t delivered) const { return {delivered, true, target_}; }

  TrialRecord no_agent_left(std::uint64_t delivered) const {
    if (p_.plan.budget) return fail(delivered);
    throw NonTerminationError("every query list is exhausted without reaching the target");
  }

  void check_guard(std::uint64_t delivered) const {
    if (!p_.has_random && delivered > guard()) {
      throw NonTerminationError("deterministic plan exceeded " + std::to_string(guard()) + " deliveries");
    }
  }

  TrialRecord run_sequential(std::optional<std::uint64_t> interleave_seed) {
    const std::size_t count = p_.agents.size();
    std::optional<Rng> pick_rng;
    if (interleave_seed) pick_rng.emplace(derive_seed(seed_ ^ mix64(*interleave_seed), count + 1));
    std::vector<std::size_t> active;
    std::size_t cursor = 0;
    std::uint64_t delivered = 0;
    for (;;) {
      if (p_.plan.budget && delivered >= *p_.plan.budget) return fail(delivered);
      std::optional<std::size_t> chosen;
      if (pick_rng) {
        if (!p_.has_deterministic) {
          chosen = std::uniform_int_distribution<std::size_t>(0, count - 1)(*pick_rng);
        } else {
          active.clear();
          for (std::size_t a = 0; a < count; ++a) {
            if (!exhausted(a)) active.push_back(a);
          }
          if (!active.empty()) {
            chosen = active[std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(*pick_rng)];
          }
        }
      } else {
        for (std::size_t step = 0; step < count; ++step) {
          const std::size_t a = (cursor + step) % count;
          if (!exhausted(a)) {
            chosen = a;
            cursor = (a + 1) % count;
            break;
          }
        }
      }
      if (!chosen) return no_agent_left(delivered);
      ++delivered;
      if (deliver(*chosen, next_[*chosen]++)) return hit(delivered);
      check_guard(delivered);
    }
  }

  TrialRecord run_worst_case() {
    // Every deterministic query that misses goes first.
    std::uint64_t misses = 0;
    bool det_hit_available = false;
    bool shared_counted = false;
    for (std::size_t a = 0; a < p_.agents.size(); ++a) {
      const AgentKind kind = p_.agents[a].kind;
      if (!deterministic_kind(kind)) continue;
      if (kind == AgentKind::kShared) {
        if (shared_counted) continue;
        shared_counted = true;
      }
      const auto local = p_.local_rank(a, target_rank_);
      misses += local ? *local - 1 : p_.list_length(a);
      det_hit_available = det_hit_available || local.has_value();
    }
    const auto budget = p_.plan.budget;
    if (budget && misses >= *budget) return fail(*budget);
    std::uint64_t delivered = misses;
    if (random_covers_) {
      std::vector<std::size_t> random_agents;
      for (std::size_t a = 0; a < p_.agents.size(); ++a) {
        if (!deterministic_kind(p_.agents[a].kind)) random_agents.push_back(a);
      }
      for (std::size_t i = 0;; i = (i + 1) % random_agents.size()) {
        if (budget && delivered >= *budget) return fail(delivered);
        const std::size_t a = random_agents[i];
        ++delivered;
        if (deliver(a, next_[a]++)) return hit(delivered);
      }
    }
    if (det_hit_available) return hit(delivered + 1);
    if (budget) return fail(*budget);
    throw NonTerminationError("no agent can ever guess the sampled target");
  }

  TrialRecord run_explicit(const ExplicitPermutation& s) {
    const std::size_t count = p_.agents.size();
    cache_mode_ = true;
    cache_.assign(count, {});
    std::vector<std::set<std::uint64_t>> done(count);
    std::uint64_t delivered = 0;
    for (const auto& [a, k] : s.prefix) {
      if (a >= count) throw InputError("explicit schedule references agent " + std::to_string(a));
      if (k < 1) throw InputError("explicit schedule query indices start at 1");
      if (!done[a].insert(k).second) {
        throw InputError("explicit schedule repeats query " + std::to_string(k) + " of agent " + std::to_string(a));
      }
      const AgentKind kind = p_.agents[a].kind;
      if (kind == AgentKind::kShared ? shared_pos_ >= p_.count
                                     : deterministic_kind(kind) && k > p_.list_length(a)) {
        throw InputError("explicit schedule asks agent " + std::to_string(a) + " for query " + std::to_string(k) +
                         " beyond its list");
      }
      if (p_.plan.budget && delivered >= *p_.plan.budget) return fail(delivered);
      ++delivered;
      if (deliver(a, k)) return hit(delivered);
      check_guard(delivered);
    }
    // Round-robin over the lowest undelivered query of each agent.
    auto advance = [&](std::size_t a) {
      while (done[a].count(next_[a]) != 0) ++next_[a];
    };
    for (std::size_t a = 0; a < count; ++a) advance(a);
    std::size_t cursor = 0;
    for (;;) {
      if (p_.plan.budget && delivered >= *p_.plan.budget) return fail(delivered);
      std::optional<std::size_t> chosen;
      for (std::size_t step = 0; step < count; ++step) {
        const std::size_t a = (cursor + step) % count;
        if (!exhausted(a)) {
          chosen = a;
          cursor = (a + 1) % count;
          break;
        }
      }
      if (!chosen) return no_agent_left(delivered);
      const std::size_t a = *chosen;
      const std::uint64_t k = next_[a];
      done[a].insert(k);
      ++delivered;
      if (deliver(a, k)) return hit(delivered);
      check_guard(delivered);
      advance(a);
    }
  }

  const PreparedPlan::Impl& p_;
  std::uint64_t seed_;
  std::vector<std::size_t> digits_;
  std::uint64_t target_ = 0;
  std::uint64_t target_rank_ = 0;
  bool covered_ = false;
  bool random_covers_ = false;
  std::vector<Rng> rngs_;
  std::vector<std::uint64_t> next_;
  std::uint64_t shared_pos_ = 0;
  bool cache_mode_ = false;
  std::vector<std::vector<std::uint8_t>> cache_;
};

}  // namespace

TrialRecord run_trial(const PreparedPlan& plan, const Schedule& schedule, std::uint64_t seed) {
  Trial trial(plan.impl(), seed);
  return trial.run(schedule);
}

TrialRecord run_trial(const AttackPlan& plan, const Schedule& schedule, std::uint64_t seed) {
  return run_trial(PreparedPlan(plan), schedule, seed);
}

std::optional<std::uint64_t> worst_case_deterministic(const PreparedPlan& plan, std::uint64_t target_code) {
  const auto& d = plan.impl();
  if (d.has_random) throw InputError("worst_case_deterministic: every agent must use a deterministic list");
  if (target_code >= d.count) throw InputError("worst_case_deterministic: target code out of range");
  const std::uint64_t target_rank = d.rank[target_code];
  std::uint64_t misses = 0;
  bool found = false;
  bool shared_counted = false;
  for (std::size_t a = 0; a < d.agents.size(); ++a) {
    if (d.agents[a].kind == AgentKind::kShared) {
      if (shared_counted) continue;
      shared_counted = true;
    }
    const auto local = d.local_rank(a, target_rank);
    misses += local ? *local - 1 : d.list_length(a);
    found = found || local.has_value();
  }
  if (!found) return std::nullopt;
  return misses + 1;
}

std::vector<TrialRecord> monte_carlo_records(const PreparedPlan& plan, const Schedule& schedule, std::uint64_t trials,
                                             std::uint64_t master_seed, unsigned threads) {
  if (trials < 1) throw InputError("monte_carlo: trials must be >= 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<TrialRecord> records(trials);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) records[i] = run_trial(plan, schedule, derive_seed(master_seed, i));
  };
  if (threads == 1) {
    work(0, trials);
    return records;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = std::min(trials, t * chunk);
    const std::uint64_t end = std::min(trials, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

SimStats summarize(const std::vector<TrialRecord>& records, double rho, std::uint64_t master_seed,
                   std::optional<std::uint64_t> budget) {
  if (records.empty()) throw InputError("summarize: no trial records");
  if (!(rho > 0.0)) throw DomainError("summarize: rho must be positive");
  SimStats s;
  s.trials = records.size();
  s.rho = rho;
  s.seed = master_seed;
  s.budget = budget;
  const double t = static_cast<double>(s.trials);
  CompensatedSum g_sum;
  CompensatedSum gr_sum;
  for (const TrialRecord& r : records) {
    const double g = static_cast<double>(r.total_queries);
    g_sum += g;
    gr_sum += std::pow(g, rho);
    if (r.success) ++s.successes;
  }
  s.mean_G = g_sum.value() / t;
  s.mean_G_pow_rho = gr_sum.value() / t;
  CompensatedSum g_var;
  CompensatedSum gr_var;
  for (const TrialRecord& r : records) {
    const double g = static_cast<double>(r.total_queries);
    g_var += (g - s.mean_G) * (g - s.mean_G);
    const double gr = std::pow(g, rho) - s.mean_G_pow_rho;
    gr_var += gr * gr;
  }
  if (s.trials > 1) {
    s.se_G = std::sqrt(g_var.value() / (t - 1.0) / t);
    s.se_G_pow_rho = std::sqrt(gr_var.value() / (t - 1.0) / t);
  }
  s.success_within_J = static_cast<double>(s.successes) / t;
  s.se_success = std::sqrt(s.success_within_J * (1.0 - s.success_within_J) / t);
  return s;
}

SimStats monte_carlo(const PreparedPlan& plan, const Schedule& schedule, std::uint64_t trials, double rho,
                     std::uint64_t master_seed, unsigned threads) {
  return summarize(monte_carlo_records(plan, schedule, trials, master_seed, threads), rho, master_seed,
                   plan.plan().budget);
}

std::vector<double> success_curve(const std::vector<TrialRecord>& records, const std::vector<std::uint64_t>& points) {
  if (records.empty()) throw InputError("success_curve: no trial records");
  std::vector<std::uint64_t> hits;
  for (const TrialRecord& r : records) {
    if (r.success) hits.push_back(r.total_queries);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<double> out;
  out.reserve(points.size());
  for (std::uint64_t i : points) {
    const auto c = std::upper_bound(hits.begin(), hits.end(), i) - hits.begin();
    out.push_back(static_cast<double>(c) / static_cast<double>(records.size()));
  }
  return out;
}

double ks_statistic(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b) {
  if (a.empty() || b.empty()) throw InputError("ks_statistic: empty sample");
  auto values = [](const std::vector<TrialRecord>& r) {
    std::vector<std::uint64_t> v;
    v.reserve(r.size());
    for (const auto& x : r) v.push_back(x.total_queries);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto x = values(a);
  const auto y = values(b);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    std::uint64_t v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_threshold(std::uint64_t n, std::uint64_t m) {
  const double a = static_cast<double>(n);
  const double b = static_cast<double>(m);
  return 1.949 * std::sqrt((a + b) / (a * b));
}

namespace {

void check_homogeneous(const AttackPlan& plan) {
  const GuessStrategy& first = plan.agents.front().strategy;
  for (const Agent& agent : plan.agents) {
    const GuessStrategy& s = agent.strategy;
    if (s.index() != first.index()) {
      throw InputError("schedule_invariance_check: agents mix strategy kinds (" + strategy_name(first) + " and " +
                       strategy_name(s) + ")");
    }
    const bool same = std::visit(
        Overloaded{[&](const IidSampler& x) {
                     const auto& y = std::get<IidSampler>(first).per_symbol.probs();
                     return std::equal(x.per_symbol.probs().begin(), x.per_symbol.probs().end(), y.begin(), y.end());
                   },
                   [&](const IidSequenceSampler& x) {
                     const auto& y = std::get<IidSequenceSampler>(first).over_sequences.probs();
                     return std::equal(x.over_sequences.probs().begin(), x.over_sequences.probs().end(), y.begin(),
                                       y.end());
                   },
                   [&](const MarkovSampler& x) {
                     return x.chain.transitions().to_rows() == std::get<MarkovSampler>(first).chain.transitions().to_rows();
                   },
                   [](const auto&) { return true; }},
        s);
    if (!same) throw InputError("schedule_invariance_check: randomized agents use different distributions");
  }
}

}  // namespace

InvarianceReport schedule_invariance_check(const PreparedPlan& plan, const std::vector<Schedule>& schedules,
                                           std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (schedules.size() < 2) throw InputError("schedule_invariance_check: need at least two schedules");
  check_homogeneous(plan.plan());
  std::vector<std::vector<TrialRecord>> samples;
  samples.reserve(schedules.size());
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    samples.push_back(monte_carlo_records(plan, schedules[k], trials, derive_seed(seed, k), threads));
  }
  InvarianceReport report;
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    for (std::size_t j = i + 1; j < schedules.size(); ++j) {
      ScheduleComparison c{i, j, ks_statistic(samples[i], samples[j]), ks_threshold(trials, trials), false};
      c.passed = c.statistic < c.threshold;
      report.all_passed = report.all_passed && c.passed;
      report.comparisons.push_back(c);
    }
  }
  return report;
}

ExponentFit estimate_exponent(const std::function<AttackPlan(std::size_t)>& make_plan, const std::vector<std::size_t>& ns,
                              const Schedule& schedule, double rho, std::uint64_t trials_per_n, std::uint64_t seed,
                              unsigned threads) {
  if (ns.size() < 3) throw InputError("estimate_exponent: need at least three values of n");
  ExponentFit fit;
  for (std::size_t n : ns) {
    const PreparedPlan plan(make_plan(n));
    ExponentPoint point{n, monte_carlo(plan, schedule, trials_per_n, rho, derive_seed(seed, n), threads), 0.0};
    point.log_moment = std::log(point.stats.mean_G_pow_rho);
    if (!std::isfinite(point.log_moment)) {
      throw NumericError("estimate_exponent: non-finite estimate at n = " + std::to_string(n));
    }
    fit.points.push_back(point);
  }
  const double k = static_cast<double>(fit.points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& pt : fit.points) {
    mx += static_cast<double>(pt.n);
    my += pt.log_moment;
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& pt : fit.points) {
    const double dx = static_cast<double>(pt.n) - mx;
    sxy += dx * (pt.log_moment - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InputError("estimate_exponent: values of n must differ");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

void write_trace_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial_index,total_queries,success\r\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << i << ',' << records[i].total_queries << ',' << (records[i].success ? 1 : 0) << "\r\n";
  }
}

}  // namespace guesswork
