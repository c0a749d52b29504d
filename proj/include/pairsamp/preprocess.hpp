#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pairsamp/engine.hpp"
#include "pairsamp/model.hpp"

namespace pairsamp {

constexpr Feature kNoFeature = 0xffffffffu;

// One simplification step, recorded in original feature indices. Restoring a
// configuration replays the stack backwards, so each event may refer to
// features that are either kept or recovered by a later event, never to ones
// eliminated earlier.
struct ReconstructionEvent {
  enum class Kind : std::uint8_t {
    kFixed,       // feature forced to `value`
    kEquivalent,  // feature's positive literal mirrors literal `rep`
    kEliminated,  // resolved away; `clauses` pin down a satisfying value
  };
  Kind kind = Kind::kFixed;
  Feature feature = 0;
  bool value = false;
  Lit rep = 0;
  std::vector<Clause> clauses;
};

// How to turn configurations of the simplified model back into configurations
// of the original one, preserving cardinality and pairwise coverage.
struct ReconstructionMap {
  std::uint32_t original_features = 0;
  std::vector<std::uint8_t> original_concrete;
  std::vector<ReconstructionEvent> events;  // application order
  std::vector<Feature> new_of_old;          // kNoFeature when dropped
  std::vector<Feature> old_of_new;
};

struct SimplifyResult {
  bool unsat = false;
  FeatureModel model;  // meaningless when unsat
  ReconstructionMap map;
};

// Simplification pipeline that keeps minimum samples in one-to-one
// correspondence with the input model's: failed/equivalent-literal
// elimination, variable elimination restricted to non-concrete features and
// zero clause growth, clause vivification, and subsumption, applied
// round-robin until a fixpoint or the round budget. Equivalent-literal
// substitution never drops the concrete feature count below two.
SimplifyResult simplify(const FeatureModel &model, int max_rounds = 10);

// Maps a sample of the simplified model back to the original feature space,
// one configuration per input configuration. Also enforces the
// degenerate-universe conventions: a satisfiable model gets at least one
// configuration, and a lone concrete feature with both polarities feasible
// gets one configuration of each.
Sample restore_sample(const SimplifyResult &simplified, const Sample &sample);

// Makes unit propagation refute every listed infeasible pair from either
// literal, adding a binary clause (to the model and the engine's database)
// only where propagation cannot already see the conflict. Returns the number
// of clauses added.
int learn_infeasible_binaries(FeatureModel &model, Engine &engine,
                              const std::vector<Interaction> &infeasible);

struct UniverseReduceBudget {
  double seconds = 5.0;  // wall-clock cap for the pairwise rule
  // When nonzero, counts probed interactions instead of elapsed time, which
  // keeps reduction reproducible across machines.
  std::uint64_t work_units = 0;
};

struct UniverseReduction {
  std::vector<Interaction> retained;
  // eliminated interaction -> retained implier; covering the implier in any
  // valid configuration covers the eliminated interaction.
  std::unordered_map<Interaction, Interaction, InteractionHash> implier;
};

// Drops feasible interactions whose coverage is forced whenever some retained
// interaction is covered: single-literal implications first (exhaustively),
// then unit propagation over retained pairs until the budget runs out.
UniverseReduction universe_reduce(Engine &engine,
                                  const std::vector<Interaction> &feasible,
                                  const UniverseReduceBudget &budget = {});

}  // namespace pairsamp
