#include "pairsamp/lowerbound.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pairsamp {

namespace {

constexpr double kViolTol = 1e-7;   // a constraint counts as violated above this
constexpr double kPriceTol = 1e-6;  // dual-coverage buffer, matches rounding

// The four literals of a pair of interactions, deduplicated.
std::vector<Lit> union_lits(const Interaction &a, const Interaction &b) {
  std::vector<Lit> lits{a.a, a.b, b.a, b.b};
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return lits;
}

}  // namespace

bool g2_adjacent(Trail &scratch, const Interaction &a, const Interaction &b) {
  const std::array<Lit, 4> ls{a.a, a.b, b.a, b.b};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (ls[i] == negate_lit(ls[j])) return true;
  if (scratch.probe_push(union_lits(a, b))) {
    scratch.backtrack_to(0);
    return false;
  }
  return true;
}

bool pairwise_exclusive(Trail &scratch,
                        const std::vector<Interaction> &members) {
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (!g2_adjacent(scratch, members[i], members[j])) return false;
  return true;
}

ExclusiveSet greedy_clique(Trail &scratch,
                           const std::vector<Interaction> &candidates,
                           int repeats, std::mt19937_64 &rng) {
  ExclusiveSet best;
  for (int r = 0; r < repeats; ++r) {
    std::vector<Interaction> pool = candidates;
    std::vector<Interaction> clique;
    while (!pool.empty()) {
      std::size_t pick =
          std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
      Interaction v = pool[pick];
      pool[pick] = pool.back();
      pool.pop_back();
      clique.push_back(v);
      std::vector<Interaction> next;
      next.reserve(pool.size());
      for (const Interaction &w : pool)
        if (g2_adjacent(scratch, v, w)) next.push_back(w);
      pool = std::move(next);
    }
    if (clique.size() > best.members.size()) best.members = std::move(clique);
  }
  return best;
}

CliqueHook make_spawner_clique_hook(Engine &engine, int repeats) {
  return [&engine, repeats](const std::vector<Interaction> &last,
                            const std::vector<Interaction> &all) {
    Trail scratch(&engine.db());
    ExclusiveSet a = greedy_clique(scratch, last, repeats, engine.rng());
    ExclusiveSet b = greedy_clique(scratch, all, repeats, engine.rng());
    return a.members.size() >= b.members.size() ? std::move(a.members)
                                                : std::move(b.members);
  };
}

CliqueRelaxation::CliqueRelaxation(Engine &engine, LpBackend &lp)
    : engine_(&engine), lp_(&lp) {}

std::uint32_t CliqueRelaxation::add_column(const Interaction &i) {
  auto it = index_.find(i);
  if (it != index_.end()) return it->second;
  const std::uint32_t idx = std::uint32_t(cols_.size());
  cols_.push_back(i);
  index_.emplace(i, idx);
  return idx;
}

void CliqueRelaxation::add_constraint_config(const Config &c) {
  auto t = std::make_unique<Trail>(&engine_->db());
  std::vector<Lit> lits;
  lits.reserve(c.size());
  for (Feature f = 0; f < Feature(c.size()); ++f)
    lits.push_back(make_lit(f, c[f] != 0));
  const bool ok = t->probe_push(lits);
  assert(ok && "a valid configuration cannot conflict");
  if (!ok) return;
  constraints_.push_back(std::move(t));
}

void CliqueRelaxation::add_constraint(std::unique_ptr<Trail> t) {
  constraints_.push_back(std::move(t));
}

bool CliqueRelaxation::solve() {
  LpProblem p;
  p.num_vars = cols_.size();
  p.objective.assign(cols_.size(), 1.0);
  p.upper.assign(cols_.size(), std::numeric_limits<double>::infinity());
  p.rows.resize(constraints_.size());
  p.rhs.assign(constraints_.size(), 1.0);
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    const Trail &t = *constraints_[k];
    for (std::uint32_t j = 0; j < cols_.size(); ++j)
      if (t.has(cols_[j].a) && t.has(cols_[j].b))
        p.rows[k].emplace_back(j, 1.0);
  }
  return lp_->solve(p, sol_) == LpStatus::Optimal;
}

double CliqueRelaxation::dual_coverage(const Interaction &i) const {
  double sum = 0.0;
  const std::size_t m = std::min(constraints_.size(), sol_.dual.size());
  for (std::size_t k = 0; k < m; ++k) {
    const Trail &t = *constraints_[k];
    if (t.has(i.a) && t.has(i.b)) sum += sol_.dual[k];
  }
  return sum;
}

double CliqueRelaxation::row_weight(std::size_t k) const {
  const Trail &t = *constraints_[k];
  double sum = 0.0;
  const std::size_t n = std::min(cols_.size(), sol_.x.size());
  for (std::size_t j = 0; j < n; ++j)
    if (t.has(cols_[j].a) && t.has(cols_[j].b)) sum += sol_.x[j];
  return sum;
}

CutPriceSeeds seeds_from_initial(const InitialResult &res) {
  CutPriceSeeds s;
  s.sample = res.sample;
  s.clique = res.best_clique;
  s.spawners_all = res.spawners;
  s.spawners_best = res.best_run_spawners;
  s.last_pushed = res.last_run_pushed;
  return s;
}

namespace {

// Shared state of one cut_price_round invocation.
struct BoundLoop {
  const FeatureModel &model;
  Engine &engine;
  const std::vector<Interaction> &feasible;
  const CutPriceSeeds &seeds;
  const CutPriceLimits &limits;
  CliqueRelaxation rel;
  Trail scratch;
  CutPriceResult &res;
  CoverageIndex cov;  // infeasibility marks for the heuristic fallback

  BoundLoop(const FeatureModel &m, Engine &e,
            const std::vector<Interaction> &feas, const CutPriceSeeds &sd,
            const CutPriceLimits &lim, LpBackend &lp, CutPriceResult &r)
      : model(m),
        engine(e),
        feasible(feas),
        seeds(sd),
        limits(lim),
        rel(e, lp),
        scratch(&e.db()),
        res(r),
        cov(m.num_features, m.concrete) {
    std::unordered_set<Interaction, InteractionHash> feas_set(feas.begin(),
                                                              feas.end());
    for (const Interaction &i : enumerate_candidate_interactions(m))
      if (feas_set.find(i) == feas_set.end()) cov.mark_infeasible(i);
  }

  // Indices of active columns with nonzero primal value, by non-increasing
  // x* (ties by index, keeping the order deterministic).
  std::vector<std::uint32_t> nonzero_order() const {
    const std::vector<double> &x = rel.primal();
    std::vector<std::uint32_t> order;
    for (std::uint32_t j = 0; j < x.size(); ++j)
      if (x[j] > 1e-9) order.push_back(j);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (x[a] != x[b]) return x[a] > x[b];
                return a < b;
              });
    return order;
  }

  // Greedy rounding plus a random maximality pass; records improvements.
  void round_and_record() {
    std::vector<std::uint32_t> order = nonzero_order();
    std::vector<Interaction> clique;
    auto fits = [&](const Interaction &i) {
      for (const Interaction &j : clique)
        if (!g2_adjacent(scratch, i, j)) return false;
      return true;
    };
    for (std::uint32_t idx : order)
      if (fits(rel.columns()[idx])) clique.push_back(rel.columns()[idx]);
    std::vector<std::uint32_t> perm(rel.columns().size());
    for (std::uint32_t j = 0; j < perm.size(); ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), engine.rng());
    for (std::uint32_t idx : perm)
      if (fits(rel.columns()[idx])) clique.push_back(rel.columns()[idx]);
    if (clique.size() > res.best.members.size())
      res.best.members = std::move(clique);
  }

  // All pairs of active columns with x*_I + x*_J > 1 whose union survives
  // propagation; each pair appears at most once.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> violated_nonedges() {
    const std::vector<double> &x = rel.primal();
    std::vector<std::uint32_t> order = nonzero_order();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t a = 0; a + 1 < order.size(); ++a) {
      if (x[order[a]] + x[order[a + 1]] <= 1.0 + kViolTol) break;
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        if (x[order[a]] + x[order[b]] <= 1.0 + kViolTol) break;
        if (!g2_adjacent(scratch, rel.columns()[order[a]],
                         rel.columns()[order[b]]))
          pairs.emplace_back(order[a], order[b]);
      }
    }
    return pairs;
  }

  // Forbids each violated non-edge by strengthening an existing constraint
  // (preferred) or adding a new one, at most one new constraint per
  // interaction per round. Returns the number of changes.
  std::size_t handle_nonedges(
      const std::vector<std::pair<std::uint32_t, std::uint32_t>> &pairs) {
    std::size_t changed = 0;
    std::unordered_set<Interaction, InteractionHash> freshly_constrained;
    for (const auto &[ia, ib] : pairs) {
      const Interaction &i = rel.columns()[ia];
      const Interaction &j = rel.columns()[ib];
      const std::vector<Lit> lits = union_lits(i, j);
      bool done = false;
      for (std::size_t k = 0; k < rel.num_constraints() && !done; ++k) {
        Trail &q = rel.constraint(k);
        if (q.is_total()) continue;
        std::vector<Lit> missing;
        bool blocked = false;
        for (Lit l : lits) {
          const int v = q.value(l);
          if (v == 0) {
            blocked = true;
            break;
          }
          if (v == -1) missing.push_back(l);
        }
        if (blocked) continue;
        if (missing.empty() || q.probe_push(missing)) {
          done = true;
          ++res.strengthenings;
          ++changed;
        }
      }
      if (done) continue;
      if (freshly_constrained.count(i) != 0 ||
          freshly_constrained.count(j) != 0)
        continue;
      auto t = std::make_unique<Trail>(&engine.db());
      const bool ok = t->probe_push(lits);
      assert(ok && "a verified non-edge cannot conflict");
      if (!ok) continue;
      rel.add_constraint(std::move(t));
      ++res.constraints_added;
      ++changed;
      freshly_constrained.insert(i);
      freshly_constrained.insert(j);
    }
    return changed;
  }

  // Quiet-round strengthening: dry-run the weight a constraint could reach,
  // then greedily push the non-contradicting interactions for real (changes
  // are kept even when the final weight stays below the bar).
  std::size_t strengthen_quiet() {
    const std::vector<double> &x = rel.primal();
    std::vector<std::uint32_t> order = nonzero_order();
    std::size_t created = 0;
    for (std::size_t k = 0; k < rel.num_constraints(); ++k) {
      Trail &q = rel.constraint(k);
      double could = 0.0;
      for (std::uint32_t idx : order) {
        const Interaction &i = rel.columns()[idx];
        if (q.value(i.a) != 0 && q.value(i.b) != 0) could += x[idx];
      }
      if (could <= 1.0 + kViolTol) continue;
      for (std::uint32_t idx : order) {
        const Interaction &i = rel.columns()[idx];
        std::vector<Lit> missing;
        bool blocked = false;
        for (Lit l : {i.a, i.b}) {
          const int v = q.value(l);
          if (v == 0) {
            blocked = true;
            break;
          }
          if (v == -1) missing.push_back(l);
        }
        if (blocked || missing.empty()) continue;
        (void)q.probe_push(missing);
      }
      ++res.strengthenings;
      if (rel.row_weight(k) > 1.0 + kViolTol) ++created;
    }
    return created;
  }

  // Builds candidate constraints from rolling starts over the nonzero list
  // and adds the most strongly violated ones.
  std::size_t generate_constraints() {
    const std::vector<double> &x = rel.primal();
    std::vector<std::uint32_t> order = nonzero_order();
    if (order.empty()) return 0;
    struct Rec {
      double weight;
      std::unique_ptr<Trail> trail;
      std::vector<Lit> key;
    };
    std::vector<Rec> recs;
    for (std::size_t start = 0; start < order.size(); ++start) {
      auto t = std::make_unique<Trail>(&engine.db());
      double w = 0.0;
      for (std::size_t step = 0; step < order.size(); ++step) {
        const std::uint32_t idx = order[(start + step) % order.size()];
        const Interaction &i = rel.columns()[idx];
        std::vector<Lit> missing;
        bool blocked = false;
        for (Lit l : {i.a, i.b}) {
          const int v = t->value(l);
          if (v == 0) {
            blocked = true;
            break;
          }
          if (v == -1) missing.push_back(l);
        }
        if (blocked) continue;
        if (missing.empty() || t->probe_push(missing)) w += x[idx];
      }
      if (w <= 1.0 + kViolTol) continue;
      std::vector<Lit> key = t->assignment_stack();
      std::sort(key.begin(), key.end());
      bool dup = false;
      for (const Rec &r : recs) dup = dup || r.key == key;
      if (dup) continue;
      recs.push_back(Rec{w, std::move(t), std::move(key)});
    }
    std::stable_sort(recs.begin(), recs.end(),
                     [](const Rec &a, const Rec &b) {
                       return a.weight > b.weight;
                     });
    std::size_t added = 0;
    for (Rec &r : recs) {
      if (added >= limits.max_new_constraints) break;
      rel.add_constraint(std::move(r.trail));
      ++res.constraints_added;
      ++added;
    }
    return added;
  }

  // Re-runs the construction heuristic from the best exclusive set and
  // turns any violated resulting configurations into constraints.
  std::size_t heuristic_constraints() {
    if (model.concrete_count() < 2) return 0;
    RunSeed rs;
    rs.queue = res.best.members;
    InitialStats st;
    auto out = initial_run(engine, cov, rs, InitialParams{}, st);
    if (!out) return 0;
    const std::vector<double> &x = rel.primal();
    std::vector<std::uint32_t> order = nonzero_order();
    std::size_t added = 0;
    for (const Config &c : out->sample) {
      double w = 0.0;
      for (std::uint32_t idx : order)
        if (covers(c, rel.columns()[idx])) w += x[idx];
      if (w <= 1.0 + kViolTol) continue;
      rel.add_constraint_config(c);
      ++res.constraints_added;
      ++added;
    }
    return added;
  }

  // Pricing tiers: all spawners, then the last run's placements, then a
  // random sample of the feasible set, then (only when allowed) the full
  // set. Introduces columns whose dual coverage leaves room to improve.
  std::size_t price(bool full_pass_allowed) {
    auto try_tier = [&](const std::vector<Interaction> &tier) {
      std::size_t added = 0;
      for (const Interaction &i : tier) {
        if (added >= limits.price_cap) break;
        if (rel.has_column(i)) continue;
        if (rel.dual_coverage(i) < 1.0 - kPriceTol) {
          rel.add_column(i);
          ++added;
        }
      }
      return added;
    };
    std::size_t added = try_tier(seeds.spawners_all);
    if (added == 0) added = try_tier(seeds.last_pushed);
    if (added == 0) {
      std::vector<Interaction> rnd;
      const std::size_t want =
          std::min<std::size_t>(limits.random_price, feasible.size());
      std::sample(feasible.begin(), feasible.end(), std::back_inserter(rnd),
                  want, engine.rng());
      added = try_tier(rnd);
    }
    if (added == 0 && full_pass_allowed) added = try_tier(feasible);
    res.columns_priced += added;
    return added;
  }
};

}  // namespace

CutPriceResult cut_price_round(const FeatureModel &model, Engine &engine,
                               const std::vector<Interaction> &feasible,
                               const CutPriceSeeds &seeds,
                               const CutPriceLimits &limits, LpBackend *lp) {
  CutPriceResult res;
  res.best.members = seeds.clique;
  if (feasible.empty() || seeds.sample.empty()) return res;

  std::unique_ptr<LpBackend> own;
  if (lp == nullptr) {
    own = make_dense_simplex();
    lp = own.get();
  }
  BoundLoop loop(model, engine, feasible, seeds, limits, *lp, res);

  for (const Interaction &i : seeds.clique) loop.rel.add_column(i);
  const std::vector<Interaction> *spawners = &seeds.spawners_all;
  if (seeds.spawners_all.size() > limits.big_set_threshold &&
      seeds.spawners_best.size() < seeds.spawners_all.size())
    spawners = &seeds.spawners_best;
  for (const Interaction &i : *spawners) loop.rel.add_column(i);
  for (const Config &c : seeds.sample) loop.rel.add_constraint_config(c);

  const auto t0 = std::chrono::steady_clock::now();
  auto out_of_budget = [&]() {
    if (limits.work_units != 0) return res.lp_solves >= limits.work_units;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return elapsed >= limits.seconds;
  };

  std::uint32_t quiet = 0;
  while (!out_of_budget()) {
    if (!loop.rel.solve())
      throw std::runtime_error("lower-bound relaxation: LP backend failed");
    ++res.lp_solves;
    res.objective = loop.rel.objective();

    loop.round_and_record();

    // Optimality on the active subgraph: the clique matches the rounded
    // relaxation value, so only new columns can help.
    const double floor_o = std::floor(loop.rel.objective() + kPriceTol);
    if (double(res.best.members.size()) >= floor_o) {
      if (loop.price(true) == 0) {
        res.status = BoundStatus::OptimalOnSubgraph;
        return res;
      }
      continue;
    }

    auto pairs = loop.violated_nonedges();
    if (!pairs.empty()) {
      quiet = 0;
      const std::size_t changed = loop.handle_nonedges(pairs);
      assert(changed > 0 && "a violated non-edge round must change a row");
      (void)changed;
      continue;
    }

    ++quiet;
    if (quiet % limits.forced_price_period == 0 && loop.price(false) > 0)
      continue;
    if (loop.strengthen_quiet() > 0) continue;
    if (loop.generate_constraints() > 0) continue;
    if (loop.heuristic_constraints() > 0) continue;
    if (loop.price(true) > 0) continue;
    break;  // stuck on the current relaxation
  }
  res.status = res.best.members.size() > seeds.clique.size()
                   ? BoundStatus::Improved
                   : BoundStatus::Stalled;
  return res;
}

}  // namespace pairsamp
