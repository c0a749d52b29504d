#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "pairsamp/bits.hpp"
#include "pairsamp/engine.hpp"
#include "pairsamp/model.hpp"

namespace pairsamp {

// Coverage bookkeeping for the construction heuristic. Per-trail truth
// bitsets live on the trails themselves; this class holds the per-literal
// infeasibility bitsets (which persist across heuristic runs) and the
// scratch used to enumerate uncovered interactions by OR-ing the truth
// bitsets of every trail a literal appears in.
class CoverageIndex {
 public:
  CoverageIndex(std::uint32_t num_features,
                const std::vector<std::uint8_t> &concrete);

  void mark_infeasible(const Interaction &i);
  bool known_infeasible(const Interaction &i) const {
    return infeasible_with_[i.a].test(i.b);
  }
  std::size_t infeasible_count() const { return infeasible_count_; }
  const std::vector<Lit> &concrete_lits() const { return concrete_lits_; }

  // Calls fn(i) for every candidate interaction that no trail currently
  // contains and that is not known infeasible, in canonical order. The
  // relatively expensive full scan; callers keep it rare via the queue.
  void for_each_uncovered(const std::vector<std::unique_ptr<Trail>> &trails,
                          const std::function<void(const Interaction &)> &fn);

 private:
  std::uint32_t num_lits_ = 0;
  std::vector<Lit> concrete_lits_;     // ascending literal codes
  Bitset concrete_mask_;               // over literal codes
  std::vector<Bitset> infeasible_with_;  // per literal: proven-bad partners
  std::vector<std::vector<std::uint32_t>> true_in_;  // rebuilt per scan
  Bitset acc_, unc_;                   // scratch rows
  std::size_t infeasible_count_ = 0;
};

std::vector<Interaction> enumerate_uncovered(
    CoverageIndex &index, const std::vector<std::unique_ptr<Trail>> &trails);

// Shortlist of uncovered interactions, popped in ascending order of how many
// trails could still take them (fewest candidates first). Keys go stale when
// trails change; entries are re-counted at pop, and covered or infeasible
// ones are discarded there.
class InteractionQueue {
 public:
  void reset();
  void insert(const Interaction &i,
              const std::vector<std::unique_ptr<Trail>> &trails);
  std::optional<Interaction> pop_live(
      const std::vector<std::unique_ptr<Trail>> &trails,
      const CoverageIndex &index);

 private:
  struct Entry {
    Interaction i{0, 0};
    Bitset candidates;  // trails with neither literal false (as of refresh)
  };
  using Key = std::pair<std::uint32_t, std::uint32_t>;  // (count, seq)

  static std::uint32_t refresh(
      Entry &e, const std::vector<std::unique_ptr<Trail>> &trails);
  static bool covered(const Interaction &i,
                      const std::vector<std::unique_ptr<Trail>> &trails);

  std::vector<Entry> entries_;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap_;
};

// Tries to place the interaction on an existing trail, preferring trails
// that already contain one of its literals; trails with a literal falsified
// are skipped outright. True once some trail holds both literals.
bool extend_confs(std::vector<std::unique_ptr<Trail>> &trails,
                  const Interaction &i);

// Completes every trail to a total configuration. Stops at the first trail
// that had to revert prior assignments and returns false; the caller must
// then re-enumerate uncovered interactions.
bool complete_all(Engine &engine,
                  std::vector<std::unique_ptr<Trail>> &trails);

struct InitialParams {
  int rounds = 6;
  std::uint32_t queue_start = 64;  // target queue size, doubles per refill
  std::uint32_t queue_cap = 4096;
  std::uint32_t refill_factor = 4;  // refill draws min(remaining, factor*k)
};

struct InitialStats {
  int runs = 0;
  std::uint64_t trails_created = 0;
  std::uint64_t extend_calls = 0;
  std::uint64_t feasibility_probes = 0;
  std::uint64_t queue_refills = 0;
  std::uint64_t completion_passes = 0;
  std::vector<std::size_t> run_sizes;
};

// How one heuristic run starts: the first run seeds a greedy all-negative
// configuration plus positive literal pairs and classifies every spawner
// candidate with a full search; later runs start empty, seeded by the best
// exclusive set, with feasibility already settled.
struct RunSeed {
  bool greedy_negative = false;
  bool classify_with_search = false;
  std::vector<Interaction> queue;
};

struct RunOutput {
  Sample sample;
  std::vector<Interaction> spawners;  // first insertion per created trail
  std::vector<Interaction> pushed;    // every popped interaction placed on a trail
};

// One full run of the construction heuristic on the shared engine. Returns
// nullopt only for an unsatisfiable model. Requires >= 2 concrete features
// (degenerate universes are handled by run_initial_phase directly).
std::optional<RunOutput> initial_run(Engine &engine, CoverageIndex &index,
                                     const RunSeed &seed,
                                     const InitialParams &params,
                                     InitialStats &stats);

// Computes an exclusive set from the spawners of the last run and of all
// runs so far; wired to the lower-bound machinery by the orchestrator.
using CliqueHook = std::function<std::vector<Interaction>(
    const std::vector<Interaction> &last_run_spawners,
    const std::vector<Interaction> &all_spawners)>;

struct InitialResult {
  Sample sample;                        // smallest across runs
  std::vector<Interaction> feasible;    // exact candidate partition
  std::vector<Interaction> best_clique; // largest hook result, may be empty
  std::vector<Interaction> spawners;    // all runs, deduped, insertion order
  std::vector<Interaction> best_run_spawners;  // from the best run alone
  std::vector<Interaction> last_run_pushed;    // placements in the final run
  InitialStats stats;
};

// Standalone single run, matching initial_run's first-run seeding.
std::optional<InitialResult> initial_solve(const FeatureModel &model,
                                           std::uint64_t seed,
                                           const InitialParams &params = {});

// The repeated-runs initial phase: first run decides feasibility of every
// candidate, then binary clauses make every infeasible pair visible to unit
// propagation (appended to both the model and the engine); later runs seed
// from the best exclusive set so far. Stops early once the best sample
// matches the best exclusive set, since no run can improve on that.
std::optional<InitialResult> run_initial_phase(
    FeatureModel &model, Engine &engine, const InitialParams &params = {},
    const CliqueHook &clique_hook = {});

}  // namespace pairsamp
