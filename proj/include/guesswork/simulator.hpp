#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "guesswork/markov.hpp"
#include "guesswork/pmf.hpp"

namespace guesswork {

// Sequences of length n over an m-symbol alphabet are identified with codes
// in [0, m^n), first symbol most significant, so code order is lexicographic.

/// All agents holding this strategy advance one shared pointer into the
/// optimal list.
struct SharedOptimalList {};
/// Every agent walks its own copy of the optimal list.
struct ReplicatedOptimalList {};

enum class PartitionMode {
  kInterleaved,  // agent j gets list ranks j+1, j+1+P, j+1+2P, ...
  kContiguous,   // agent j gets the j-th block of ceil(N/P) ranks
};

/// The optimal list split into disjoint cells, one per partitioned agent.
struct PartitionedLists {
  PartitionMode mode = PartitionMode::kInterleaved;
};

/// Guesses drawn i.i.d., symbol by symbol, from a per-symbol distribution.
struct IidSampler {
  Pmf per_symbol;
};

/// Guesses drawn i.i.d. from a distribution over whole sequences (indexed by
/// sequence code).
struct IidSequenceSampler {
  Pmf over_sequences;
};

/// Guesses drawn from a Markov chain; the first symbol comes from the
/// chain's stationary distribution.
struct MarkovSampler {
  MarkovModel chain;
};

using GuessStrategy =
    std::variant<SharedOptimalList, ReplicatedOptimalList, PartitionedLists, IidSampler, IidSequenceSampler, MarkovSampler>;

bool is_deterministic(const GuessStrategy& s);
std::string strategy_name(const GuessStrategy& s);

struct Agent {
  std::string id;
  GuessStrategy strategy;
};

struct IidSource {
  Pmf per_symbol;
  std::size_t n = 1;
};

/// First symbol from the stationary distribution.
struct MarkovSource {
  MarkovModel model;
  std::size_t n = 1;
};

using PasswordSource = std::variant<IidSource, MarkovSource>;

struct AttackPlan {
  std::vector<Agent> agents;
  PasswordSource source;
  std::optional<std::uint64_t> budget;  // stop after this many deliveries
};

struct RoundRobin {};
struct RandomInterleave {
  std::uint64_t seed = 0;
};
/// Adversarial order: every non-hitting deterministic query first, hitting
/// queries withheld while randomized agents can still find the target.
struct WorstCase {};
/// (agent index, 1-based query index of that agent) pairs delivered first,
/// then round-robin over what is left. Queries of SharedOptimalList agents
/// always take the next item of the shared list.
struct ExplicitPermutation {
  std::vector<std::pair<std::size_t, std::uint64_t>> prefix;
};

using Schedule = std::variant<RoundRobin, RandomInterleave, WorstCase, ExplicitPermutation>;
std::string schedule_name(const Schedule& s);

struct TrialRecord {
  std::uint64_t total_queries = 0;
  bool success = false;
  std::uint64_t target = 0;  // sequence code
};

/// A validated plan with the optimal list of the source materialized when a
/// deterministic strategy needs it.
class PreparedPlan {
 public:
  explicit PreparedPlan(AttackPlan plan);
  ~PreparedPlan();
  PreparedPlan(PreparedPlan&&) noexcept;
  PreparedPlan& operator=(PreparedPlan&&) noexcept;

  const AttackPlan& plan() const;
  std::size_t alphabet_size() const;
  std::size_t length() const;
  /// m^n.
  std::uint64_t sequence_count() const;
  /// 1-based rank of a sequence code in the optimal list (needs a
  /// deterministic strategy in the plan or an explicit call to
  /// materialize_ranks()).
  std::uint64_t rank_of(std::uint64_t code) const;
  std::uint64_t code_at_rank(std::uint64_t rank) const;
  void materialize_ranks();
  /// Query lists of the deterministic agents, the shared-pointer group
  /// counted once.
  std::vector<std::vector<std::uint64_t>> deterministic_lists() const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

TrialRecord run_trial(const PreparedPlan& plan, const Schedule& schedule, std::uint64_t seed);
TrialRecord run_trial(const AttackPlan& plan, const Schedule& schedule, std::uint64_t seed);

/// sup over delivery orders of the query count needed to hit `target_code`:
/// 1 + sum over lists of (local rank - 1) or the full list length. nullopt
/// when no list contains the target.
std::optional<std::uint64_t> worst_case_deterministic(const PreparedPlan& plan, std::uint64_t target_code);

struct SimStats {
  std::uint64_t trials = 0;
  double rho = 1.0;
  double mean_G = 0.0;
  double se_G = 0.0;
  double mean_G_pow_rho = 0.0;
  double se_G_pow_rho = 0.0;
  std::uint64_t successes = 0;
  double success_within_J = 0.0;
  double se_success = 0.0;
  std::optional<std::uint64_t> budget;
  std::uint64_t seed = 0;
};

/// Trial i uses seed derive_seed(master_seed, i). Records come back in trial
/// order regardless of `threads` (0 = hardware concurrency).
std::vector<TrialRecord> monte_carlo_records(const PreparedPlan& plan, const Schedule& schedule,
                                             std::uint64_t trials, std::uint64_t master_seed,
                                             unsigned threads = 0);
SimStats summarize(const std::vector<TrialRecord>& records, double rho, std::uint64_t master_seed,
                   std::optional<std::uint64_t> budget = std::nullopt);
SimStats monte_carlo(const PreparedPlan& plan, const Schedule& schedule, std::uint64_t trials, double rho,
                     std::uint64_t master_seed, unsigned threads = 0);

/// Fraction of trials that succeeded within i queries, for each i in `points`.
std::vector<double> success_curve(const std::vector<TrialRecord>& records, const std::vector<std::uint64_t>& points);

/// Two-sample Kolmogorov-Smirnov statistic of the total_queries samples.
double ks_statistic(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b);
/// Critical value at level 0.001 for sample sizes n and m.
double ks_threshold(std::uint64_t n, std::uint64_t m);

struct ScheduleComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct InvarianceReport {
  std::vector<ScheduleComparison> comparisons;
  bool all_passed = true;
};

/// Runs every schedule with `trials` trials (schedule k uses master seed
/// derive_seed(seed, k)) and compares each pair of query-count samples.
/// All agents must hold the same kind of strategy; randomized agents must
/// share one distribution.
InvarianceReport schedule_invariance_check(const PreparedPlan& plan, const std::vector<Schedule>& schedules,
                                           std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

struct ExponentPoint {
  std::size_t n = 0;
  SimStats stats;
  double log_moment = 0.0;  // log mean_G_pow_rho
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<ExponentPoint> points;
};

/// Least-squares slope of log E[G^rho] against n; plan for length n built by
/// `make_plan(n)`, simulated with seed derive_seed(seed, n).
ExponentFit estimate_exponent(const std::function<AttackPlan(std::size_t)>& make_plan, const std::vector<std::size_t>& ns,
                              const Schedule& schedule, double rho, std::uint64_t trials_per_n, std::uint64_t seed,
                              unsigned threads = 0);

/// CSV with header trial_index,total_queries,success.
void write_trace_csv(std::ostream& out, const std::vector<TrialRecord>& records);

}  // namespace guesswork
