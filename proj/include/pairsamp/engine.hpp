#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pairsamp/bits.hpp"
#include "pairsamp/inline_vec.hpp"
#include "pairsamp/model.hpp"

namespace pairsamp {

// Offset into the clause arena; 0 is a sentinel meaning "no clause".
using ClauseRef = std::uint32_t;
constexpr ClauseRef kNoClause = 0;

// Append-only clause storage shared by every trail of one engine instance.
// Single-threaded by contract: trails and the database belong to exactly one
// worker. Clause literal order never changes after append, which is what
// lets trails keep independent watch positions into the same storage.
class ClauseDatabase {
 public:
  explicit ClauseDatabase(const FeatureModel &model);

  std::uint32_t num_features() const { return num_features_; }
  std::uint32_t num_lits() const { return 2 * num_features_; }

  // Empty clause marks the database unsatisfiable and returns kNoClause.
  // Unit clauses go to the level-0 list instead of the watched ordinals.
  ClauseRef add_clause(const std::vector<Lit> &lits);

  std::uint32_t clause_count() const {
    return std::uint32_t(clauses_.size());
  }
  ClauseRef clause_at(std::uint32_t ordinal) const {
    return clauses_[ordinal];
  }
  std::uint32_t clause_size(ClauseRef ref) const { return arena_[ref]; }
  const Lit *clause_lits(ClauseRef ref) const { return &arena_[ref + 1]; }

  const std::vector<ClauseRef> &unit_clauses() const { return units_; }
  bool unsat() const { return unsat_; }
  void mark_unsat() { unsat_ = true; }

 private:
  std::vector<std::uint32_t> arena_;
  std::vector<ClauseRef> clauses_;  // ordinal -> arena offset
  std::vector<ClauseRef> units_;
  std::uint32_t num_features_;
  bool unsat_ = false;
};

// Activity-ordered decision heap, shared per engine and rebuilt per search.
class SearchHeap {
 public:
  void init(std::uint32_t num_features);
  void init_if_needed(std::uint32_t num_features) {
    if (act_.size() != num_features) init(num_features);
  }
  void bump(Feature f);
  void decay() { inc_ *= (1.0 / 0.95); }
  void rebuild(const std::vector<std::int8_t> &vals);
  void reinsert(Feature f) {
    if (f < act_.size() && pos_[f] < 0) heap_insert(f);
  }
  // Highest-activity feature currently unassigned, or -1.
  std::int32_t pick(const std::vector<std::int8_t> &vals);

 private:
  void sift_up(std::uint32_t pos);
  void sift_down(std::uint32_t pos);
  void heap_insert(Feature f);

  std::vector<double> act_;
  std::vector<Feature> heap_;
  std::vector<std::int32_t> pos_;  // -1 when not in heap
  double inc_ = 1.0;
};

enum class SearchStatus { Sat, Infeasible, ModelUnsat, Aborted };

// One partial configuration under construction: assignment stack, watched
// literal indices into the shared database, and the literal bitset used by
// the coverage machinery. All conflict-driven learning appends to the shared
// database; other trails pick new clauses up lazily on their next propagate.
class Trail {
 public:
  explicit Trail(ClauseDatabase *db);

  std::uint32_t num_features() const { return db_->num_features(); }

  // -1 unassigned, 0 false, 1 true (for the literal, not the feature).
  int value(Lit l) const {
    std::int8_t v = vals_[feature_of(l)];
    if (v < 0) return -1;
    return (v == 1) == is_positive(l) ? 1 : 0;
  }
  bool has(Lit l) const { return value(l) == 1; }

  std::uint32_t decision_level() const {
    return std::uint32_t(trail_lim_.size());
  }
  std::uint32_t assigned_count() const { return std::uint32_t(trail_.size()); }
  bool is_total() const { return assigned_count() == num_features(); }
  const std::vector<Lit> &assignment_stack() const { return trail_; }
  const Bitset &literal_bits() const { return lits_; }

  Config config() const;  // requires is_total()

  // Adds the literals as fresh decisions and propagates to closure. Conflicts
  // are resolved by learning and backjumping, which can revise earlier
  // content. True iff all pushed literals hold afterwards; either way the
  // trail ends conflict-free and propagation-closed.
  bool push_and_propagate(const std::vector<Lit> &lits);

  // Grow-only variant: propagation without learning. On conflict the trail
  // is restored exactly and false is returned.
  bool probe_push(const std::vector<Lit> &lits);

  // CDCL search until every feature is assigned. Decisions prefer literals
  // whose earlier decisions got reverted by conflicts, then saved phases
  // (negative on first use). True iff nothing assigned at entry was lost.
  bool complete(SearchHeap &heap, std::mt19937_64 &rng);

  // Full CDCL feasibility probe under assumptions, starting from scratch.
  // Learned clauses persist in the shared database. Sat leaves the trail at
  // the witness assignment; Infeasible and ModelUnsat leave it at level 0.
  // `budget` in conflicts, 0 = unlimited; Aborted when exhausted or stopped.
  SearchStatus solve(const std::vector<Lit> &assumptions, SearchHeap &heap,
                     std::mt19937_64 &rng, std::uint64_t budget = 0,
                     const std::atomic<bool> *stop = nullptr);

  void backtrack_to(std::uint32_t level);
  void hard_reset();  // backtrack to level 0

  std::uint64_t conflicts() const { return conflicts_; }

  // Debug audit of the two-watch scheme; returns an empty string when every
  // attached clause is correctly watched, otherwise a description.
  std::string check_watch_invariant();

 private:
  struct Watcher {
    std::uint32_t ordinal;
    Lit blocker;
  };

  bool enqueue(Lit l, ClauseRef reason);
  // Returns a conflicting clause ref or kNoClause. Attaching a clause under
  // a partial assignment may record it as fragile: its watches may rest on
  // false literals, so it gets re-examined after backtracking until both
  // watches are sound again.
  ClauseRef attach_clause(std::uint32_t ordinal);
  void detach_clause(std::uint32_t ordinal);
  ClauseRef attach_pending();
  ClauseRef recheck_fragile();
  ClauseRef apply_units();
  ClauseRef propagate();
  void new_level() { trail_lim_.push_back(std::uint32_t(trail_.size())); }
  // First-UIP analysis; fills learned_ and returns the backjump level.
  std::uint32_t analyze(ClauseRef confl);
  bool resolve_conflict(ClauseRef confl);  // false when unsat at level 0

  ClauseDatabase *db_;
  std::vector<std::int8_t> vals_;      // per feature
  std::vector<std::uint32_t> level_;   // per feature
  std::vector<ClauseRef> reason_;      // per feature
  std::vector<std::int8_t> phase_;     // per feature, saved on unassign
  std::vector<Lit> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::uint32_t qhead_ = 0;
  std::vector<InlineVec<Watcher, 3>> watches_;        // per literal
  std::vector<std::pair<std::uint32_t, std::uint32_t>> watch_pos_;
  std::uint32_t attached_ = 0;
  std::uint32_t units_seen_ = 0;
  bool units_dirty_ = false;
  std::vector<std::uint32_t> fragile_;  // ordinals watched on false literals
  bool fragile_dirty_ = false;
  Bitset lits_;  // set bit per assigned literal code

  // Conflict analysis scratch.
  std::vector<std::uint8_t> seen_;
  std::vector<Lit> learned_;
  SearchHeap *heap_ = nullptr;  // non-null only inside complete()/solve()

  // Decisions reverted by conflicts, retried first by complete().
  bool record_failed_ = false;
  std::vector<Lit> failed_;
  std::vector<std::uint8_t> failed_mark_;  // per literal

  std::uint64_t conflicts_ = 0;
};

// Per-worker solver handle: one database, a scratch trail for probes, the
// decision heap, and the RNG that owns this worker's nondeterminism.
class Engine {
 public:
  Engine(const FeatureModel &model, std::uint64_t seed);

  ClauseDatabase &db() { return db_; }
  const ClauseDatabase &db() const { return db_; }
  SearchHeap &heap() { return heap_; }
  std::mt19937_64 &rng() { return rng_; }

  // Full CDCL probe; nullopt means infeasible under the database.
  std::optional<Config> decide_feasibility(const Interaction &i);
  std::optional<Config> solve_with_assumptions(const std::vector<Lit> &lits);

  // True iff unit propagation alone refutes the literal set.
  bool up_refutes(const std::vector<Lit> &lits);

  bool is_satisfiable();

 private:
  ClauseDatabase db_;
  Trail scratch_;
  SearchHeap heap_;
  std::mt19937_64 rng_;
  std::int8_t sat_cache_ = -1;
};

}  // namespace pairsamp
