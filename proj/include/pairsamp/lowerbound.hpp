#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include "pairsamp/engine.hpp"
#include "pairsamp/initial.hpp"
#include "pairsamp/model.hpp"
#include "pairsamp/simplex.hpp"

namespace pairsamp {

// A set of feasible interactions no two of which survive unit propagation
// together. No single configuration can cover two of its members, so its
// size lower-bounds every sample with full pairwise coverage.
struct ExclusiveSet {
  std::vector<Interaction> members;
  std::size_t size() const { return members.size(); }
};

// True iff unit propagation refutes the union of the two interactions.
// `scratch` must be a level-0 trail over the engine's database and is
// restored before returning. Sound against any learned clauses in the
// database, since those are implied by the model.
bool g2_adjacent(Trail &scratch, const Interaction &a, const Interaction &b);

// Audits the pairwise half of the ExclusiveSet invariant.
bool pairwise_exclusive(Trail &scratch,
                        const std::vector<Interaction> &members);

// Random maximal conflict clique, best of `repeats` restarts: each restart
// repeatedly picks a uniformly random vertex among the candidates still
// adjacent to everything chosen so far.
ExclusiveSet greedy_clique(Trail &scratch,
                           const std::vector<Interaction> &candidates,
                           int repeats, std::mt19937_64 &rng);

// Clique hook for run_initial_phase: random maximal cliques over the last
// run's spawners and over all spawners, `repeats` restarts each, larger
// result returned. The engine must outlive the returned hook.
CliqueHook make_spawner_clique_hook(Engine &engine, int repeats = 10);

// Fractional relaxation of the maximum conflict clique: one column per
// active interaction (x_I >= 0, objective 1), one <= 1 row per independent
// set. An independent set is represented by a propagation-closed trail Q
// and contains every interaction I with both literals true on Q — including
// interactions that are not active columns yet.
class CliqueRelaxation {
 public:
  CliqueRelaxation(Engine &engine, LpBackend &lp);

  std::uint32_t add_column(const Interaction &i);  // dedupes, returns index
  bool has_column(const Interaction &i) const {
    return index_.find(i) != index_.end();
  }
  const std::vector<Interaction> &columns() const { return cols_; }

  // Constraint from a total configuration (every literal pushed).
  void add_constraint_config(const Config &c);
  // Constraint from an existing propagation-closed trail.
  void add_constraint(std::unique_ptr<Trail> t);
  std::size_t num_constraints() const { return constraints_.size(); }
  Trail &constraint(std::size_t k) { return *constraints_[k]; }

  bool solve();  // false when the backend fails to reach optimality
  double objective() const { return sol_.objective; }
  const std::vector<double> &primal() const { return sol_.x; }
  const std::vector<double> &dual() const { return sol_.dual; }

  // Σ of dual weights over the constraints containing the interaction;
  // values below 1 mark columns whose entry could raise the objective.
  double dual_coverage(const Interaction &i) const;
  // Σ x*_I over active columns the constraint contains, under the current
  // primal solution.
  double row_weight(std::size_t k) const;

 private:
  Engine *engine_;
  LpBackend *lp_;
  std::vector<Interaction> cols_;
  std::unordered_map<Interaction, std::uint32_t, InteractionHash> index_;
  std::vector<std::unique_ptr<Trail>> constraints_;
  LpSolution sol_;
};

enum class BoundStatus { Improved, OptimalOnSubgraph, Stalled };

struct CutPriceLimits {
  double seconds = 10.0;         // wall budget when work_units == 0
  std::uint64_t work_units = 0;  // relaxation-solve budget when nonzero
  std::uint32_t price_cap = 5000;          // columns introduced per call
  std::uint32_t random_price = 50000;      // random pricing tier sample size
  std::uint32_t forced_price_period = 40;  // price after this many quiet rounds
  std::uint32_t max_new_constraints = 10;  // per generation round
  std::uint32_t big_set_threshold = 20000; // spawner set size cutoff
};

struct CutPriceSeeds {
  Sample sample;                    // initial constraints; covers all feasible
  std::vector<Interaction> clique;  // starting exclusive set
  std::vector<Interaction> spawners_all;
  std::vector<Interaction> spawners_best;  // spawners of the best run
  std::vector<Interaction> last_pushed;    // placements in the final run
};

CutPriceSeeds seeds_from_initial(const InitialResult &res);

struct CutPriceResult {
  ExclusiveSet best;
  BoundStatus status = BoundStatus::Stalled;
  double objective = 0.0;  // value of the last solved relaxation
  std::uint64_t lp_solves = 0;
  std::uint64_t columns_priced = 0;
  std::uint64_t constraints_added = 0;
  std::uint64_t strengthenings = 0;
};

// The cut, price & round loop: solve the relaxation, harvest cliques by
// greedy rounding, then either certify optimality on the active subgraph by
// a full pricing pass, cut off the solution via violated non-edges or
// constraint strengthening/generation, or price in fresh columns. Requires
// the infeasible pairs to be propagation-visible (binary clauses learned).
// Throws std::runtime_error if the LP backend fails.
CutPriceResult cut_price_round(const FeatureModel &model, Engine &engine,
                               const std::vector<Interaction> &feasible,
                               const CutPriceSeeds &seeds,
                               const CutPriceLimits &limits = {},
                               LpBackend *lp = nullptr);

}  // namespace pairsamp
