#include "pairsamp/initial.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <random>
#include <unordered_set>

#include "pairsamp/preprocess.hpp"

namespace pairsamp {

CoverageIndex::CoverageIndex(std::uint32_t num_features,
                             const std::vector<std::uint8_t> &concrete)
    : num_lits_(2 * num_features) {
  concrete_mask_.resize(num_lits_);
  infeasible_with_.assign(num_lits_, Bitset(num_lits_));
  true_in_.resize(num_lits_);
  acc_.resize(num_lits_);
  unc_.resize(num_lits_);
  for (Feature f = 0; f < num_features; ++f) {
    if (!concrete[f]) continue;
    for (int pol = 0; pol < 2; ++pol) {
      Lit l = make_lit(f, pol == 0);
      concrete_lits_.push_back(l);
      concrete_mask_.set(l);
    }
  }
  std::sort(concrete_lits_.begin(), concrete_lits_.end());
}

void CoverageIndex::mark_infeasible(const Interaction &i) {
  if (infeasible_with_[i.a].test(i.b)) return;
  infeasible_with_[i.a].set(i.b);
  infeasible_with_[i.b].set(i.a);
  ++infeasible_count_;
}

void CoverageIndex::for_each_uncovered(
    const std::vector<std::unique_ptr<Trail>> &trails,
    const std::function<void(const Interaction &)> &fn) {
  for (auto &v : true_in_) v.clear();
  for (std::uint32_t t = 0; t < trails.size(); ++t)
    trails[t]->literal_bits().for_each_set(
        [&](std::size_t code) { true_in_[code].push_back(t); });
  for (Lit l : concrete_lits_) {
    // Partners already covered with l: true alongside l in some trail.
    acc_.reset();
    acc_.or_with(infeasible_with_[l]);
    for (std::uint32_t t : true_in_[l])
      acc_.or_with(trails[t]->literal_bits());
    bits::active_kernels().andnot_into(unc_.data(), concrete_mask_.data(),
                                       acc_.data(), unc_.num_words());
    Feature fl = feature_of(l);
    unc_.for_each_set([&](std::size_t code) {
      if (feature_of(Lit(code)) > fl) fn(Interaction{l, Lit(code)});
    });
  }
}

std::vector<Interaction> enumerate_uncovered(
    CoverageIndex &index, const std::vector<std::unique_ptr<Trail>> &trails) {
  std::vector<Interaction> out;
  index.for_each_uncovered(trails,
                           [&](const Interaction &i) { out.push_back(i); });
  return out;
}

bool extend_confs(std::vector<std::unique_ptr<Trail>> &trails,
                  const Interaction &i) {
  // Trails that already hold one literal first; never try trails where a
  // literal is false, their push is doomed.
  std::vector<std::uint32_t> one, zero;
  for (std::uint32_t t = 0; t < trails.size(); ++t) {
    int va = trails[t]->value(i.a);
    int vb = trails[t]->value(i.b);
    if (va == 0 || vb == 0) continue;
    if (va == 1 && vb == 1) return true;  // already covered
    (va == 1 || vb == 1 ? one : zero).push_back(t);
  }
  for (std::uint32_t t : one)
    if (trails[t]->push_and_propagate({i.a, i.b})) return true;
  for (std::uint32_t t : zero)
    if (trails[t]->push_and_propagate({i.a, i.b})) return true;
  return false;
}

bool complete_all(Engine &engine,
                  std::vector<std::unique_ptr<Trail>> &trails) {
  for (auto &t : trails)
    if (!t->complete(engine.heap(), engine.rng())) return false;
  return true;
}

void InteractionQueue::reset() {
  entries_.clear();
  heap_ = decltype(heap_)();
}

void InteractionQueue::insert(
    const Interaction &i, const std::vector<std::unique_ptr<Trail>> &trails) {
  Entry e;
  e.i = i;
  std::uint32_t cnt = refresh(e, trails);
  std::uint32_t seq = std::uint32_t(entries_.size());
  entries_.push_back(std::move(e));
  heap_.push({cnt, seq});
}

std::optional<Interaction> InteractionQueue::pop_live(
    const std::vector<std::unique_ptr<Trail>> &trails,
    const CoverageIndex &index) {
  while (!heap_.empty()) {
    auto [cnt, seq] = heap_.top();
    Entry &e = entries_[seq];
    if (covered(e.i, trails) || index.known_infeasible(e.i)) {
      heap_.pop();
      continue;
    }
    std::uint32_t cur = refresh(e, trails);
    if (cur != cnt) {  // stale key: re-file under the current count
      heap_.pop();
      heap_.push({cur, seq});
      continue;
    }
    heap_.pop();
    return e.i;
  }
  return std::nullopt;
}

std::uint32_t InteractionQueue::refresh(
    Entry &e, const std::vector<std::unique_ptr<Trail>> &trails) {
  e.candidates.resize(trails.size());
  std::uint32_t cnt = 0;
  for (std::uint32_t t = 0; t < trails.size(); ++t) {
    if (trails[t]->value(e.i.a) == 0 || trails[t]->value(e.i.b) == 0)
      continue;
    e.candidates.set(t);
    ++cnt;
  }
  return cnt;
}

bool InteractionQueue::covered(
    const Interaction &i, const std::vector<std::unique_ptr<Trail>> &trails) {
  for (auto &t : trails)
    if (t->has(i.a) && t->has(i.b)) return true;
  return false;
}

namespace {

std::vector<Interaction> positive_pair_seeds(const FeatureModel &model,
                                             std::uint32_t limit) {
  std::vector<std::uint64_t> occ(model.num_features, 0);
  for (const Clause &c : model.clauses)
    for (Lit l : c)
      if (is_positive(l)) ++occ[feature_of(l)];
  std::vector<Feature> fs = model.concrete_features();
  std::stable_sort(fs.begin(), fs.end(),
                   [&](Feature a, Feature b) { return occ[a] > occ[b]; });
  std::vector<Interaction> out;
  for (std::size_t b = 1; b < fs.size() && out.size() < limit; ++b)
    for (std::size_t a = 0; a < b && out.size() < limit; ++a)
      out.push_back(
          make_interaction(make_lit(fs[a], true), make_lit(fs[b], true)));
  return out;
}

// Sample for a model whose candidate universe is empty (< 2 concrete
// features): one configuration, or one per feasible polarity of a lone
// concrete feature.
Sample degenerate_sample(Engine &engine, const FeatureModel &model) {
  Sample s;
  std::vector<Feature> conc = model.concrete_features();
  if (conc.size() == 1) {
    for (int pol = 0; pol < 2; ++pol)
      if (auto c = engine.solve_with_assumptions({make_lit(conc[0], pol == 0)}))
        s.push_back(std::move(*c));
  }
  if (s.empty())
    if (auto c = engine.solve_with_assumptions({})) s.push_back(std::move(*c));
  return s;
}

}  // namespace

std::optional<RunOutput> initial_run(Engine &engine, CoverageIndex &index,
                                     const RunSeed &seed,
                                     const InitialParams &params,
                                     InitialStats &stats) {
  if (engine.db().unsat() || !engine.is_satisfiable()) return std::nullopt;
  ++stats.runs;

  std::vector<std::unique_ptr<Trail>> trails;
  if (seed.greedy_negative) {
    auto t = std::make_unique<Trail>(&engine.db());
    for (Feature f = 0; f < engine.db().num_features(); ++f)
      if (t->value(make_lit(f, true)) == -1)
        (void)t->push_and_propagate({make_lit(f, false)});
    trails.push_back(std::move(t));
  }

  InteractionQueue queue;
  for (const Interaction &i : seed.queue)
    if (!index.known_infeasible(i)) queue.insert(i, trails);

  std::uint32_t k = params.queue_start;
  std::vector<Interaction> spawners;
  std::vector<Interaction> pushed;
  while (true) {
    std::optional<Interaction> next = queue.pop_live(trails, index);
    if (!next) {
      // Queue drained: draw a fresh random shortlist of uncovered
      // interactions, growing the target size each time.
      std::uint64_t cap = std::uint64_t(params.refill_factor) * k;
      std::vector<Interaction> drawn;
      std::uint64_t seen = 0;
      index.for_each_uncovered(trails, [&](const Interaction &i) {
        ++seen;
        if (drawn.size() < cap) {
          drawn.push_back(i);
          return;
        }
        std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(
            0, seen - 1)(engine.rng());
        if (j < cap) drawn[j] = i;
      });
      if (drawn.empty()) {
        ++stats.completion_passes;
        if (complete_all(engine, trails)) break;
        continue;  // completion reverted assignments; rescan coverage
      }
      ++stats.queue_refills;
      queue.reset();
      for (const Interaction &i : drawn) queue.insert(i, trails);
      k = std::min(params.queue_cap, k * 2);
      continue;
    }

    const Interaction i = *next;
    ++stats.extend_calls;
    if (extend_confs(trails, i)) {
      pushed.push_back(i);
      continue;
    }

    if (seed.classify_with_search) {
      ++stats.feasibility_probes;
      if (!engine.decide_feasibility(i)) {
        index.mark_infeasible(i);
        continue;
      }
    }
    auto t = std::make_unique<Trail>(&engine.db());
    if (!t->push_and_propagate({i.a, i.b})) {
      // Propagation is sound, so a fresh-trail refutation proves the pair
      // infeasible; unreachable once the pair is classified feasible.
      assert(false && "fresh trail refuted a feasible interaction");
      index.mark_infeasible(i);
      continue;
    }
    spawners.push_back(i);
    pushed.push_back(i);
    trails.push_back(std::move(t));
    ++stats.trails_created;
  }

  RunOutput out;
  out.sample.reserve(trails.size());
  for (auto &t : trails) out.sample.push_back(t->config());
  out.spawners = std::move(spawners);
  out.pushed = std::move(pushed);
  stats.run_sizes.push_back(out.sample.size());
  return out;
}

std::optional<InitialResult> initial_solve(const FeatureModel &model,
                                           std::uint64_t seed,
                                           const InitialParams &params) {
  Engine engine(model, seed);
  if (!engine.is_satisfiable()) return std::nullopt;
  InitialResult res;
  if (model.concrete_count() < 2) {
    res.sample = degenerate_sample(engine, model);
    return res;
  }
  CoverageIndex index(model.num_features, model.concrete);
  RunSeed rs;
  rs.greedy_negative = true;
  rs.classify_with_search = true;
  rs.queue = positive_pair_seeds(model, params.queue_start);
  auto out = initial_run(engine, index, rs, params, res.stats);
  if (!out) return std::nullopt;
  res.sample = std::move(out->sample);
  res.spawners = std::move(out->spawners);
  res.best_run_spawners = res.spawners;
  res.last_run_pushed = std::move(out->pushed);
  for (const Interaction &i : enumerate_candidate_interactions(model))
    if (!index.known_infeasible(i)) res.feasible.push_back(i);
  return res;
}

std::optional<InitialResult> run_initial_phase(FeatureModel &model,
                                               Engine &engine,
                                               const InitialParams &params,
                                               const CliqueHook &clique_hook) {
  if (!engine.is_satisfiable()) return std::nullopt;
  InitialResult res;
  if (model.concrete_count() < 2) {
    res.sample = degenerate_sample(engine, model);
    return res;
  }

  CoverageIndex index(model.num_features, model.concrete);
  std::unordered_set<Interaction, InteractionHash> seen;
  for (int run = 0; run < params.rounds; ++run) {
    RunSeed rs;
    if (run == 0) {
      rs.greedy_negative = true;
      rs.classify_with_search = true;
      rs.queue = positive_pair_seeds(model, params.queue_start);
    } else {
      rs.queue = res.best_clique;
    }
    auto out = initial_run(engine, index, rs, params, res.stats);
    if (!out) return std::nullopt;

    if (run == 0) {
      // The first run decided every candidate: covered ones constructively
      // feasible, the rest refuted by search. Make the infeasible ones
      // visible to unit propagation before any exclusive-set work.
      std::vector<Interaction> infeasible;
      for (const Interaction &i : enumerate_candidate_interactions(model)) {
        if (index.known_infeasible(i))
          infeasible.push_back(i);
        else
          res.feasible.push_back(i);
      }
      learn_infeasible_binaries(model, engine, infeasible);
    }

    if (res.sample.empty() || out->sample.size() < res.sample.size()) {
      res.sample = std::move(out->sample);
      res.best_run_spawners = out->spawners;
    }
    for (const Interaction &i : out->spawners)
      if (seen.insert(i).second) res.spawners.push_back(i);
    res.last_run_pushed = std::move(out->pushed);
    if (clique_hook) {
      std::vector<Interaction> clique =
          clique_hook(out->spawners, res.spawners);
      if (clique.size() > res.best_clique.size())
        res.best_clique = std::move(clique);
    }
    // A sample matching the exclusive-set bound (or of size 1) is optimal.
    if (!res.sample.empty() &&
        res.sample.size() <= std::max<std::size_t>(res.best_clique.size(), 1))
      break;
  }
  return res;
}

}  // namespace pairsamp
