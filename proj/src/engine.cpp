#include "pairsamp/engine.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace pairsamp {

// ---------------------------------------------------------------- database

ClauseDatabase::ClauseDatabase(const FeatureModel &model)
    : num_features_(model.num_features) {
  arena_.push_back(0);  // sentinel so that 0 is never a valid ref
  for (const Clause &c : model.clauses) add_clause(c);
}

ClauseRef ClauseDatabase::add_clause(const std::vector<Lit> &lits) {
  if (lits.empty()) {
    unsat_ = true;
    return kNoClause;
  }
  ClauseRef ref = ClauseRef(arena_.size());
  arena_.push_back(std::uint32_t(lits.size()));
  for (Lit l : lits) arena_.push_back(l);
  if (lits.size() == 1) {
    units_.push_back(ref);
  } else {
    clauses_.push_back(ref);
  }
  return ref;
}

// ------------------------------------------------------------- search heap

void SearchHeap::init(std::uint32_t num_features) {
  act_.assign(num_features, 0.0);
  pos_.assign(num_features, -1);
  heap_.clear();
  inc_ = 1.0;
}

void SearchHeap::bump(Feature f) {
  act_[f] += inc_;
  if (act_[f] > 1e100) {
    for (auto &a : act_) a *= 1e-100;
    inc_ *= 1e-100;
  }
  if (pos_[f] >= 0) sift_up(std::uint32_t(pos_[f]));
}

void SearchHeap::heap_insert(Feature f) {
  pos_[f] = std::int32_t(heap_.size());
  heap_.push_back(f);
  sift_up(std::uint32_t(heap_.size() - 1));
}

void SearchHeap::rebuild(const std::vector<std::int8_t> &vals) {
  for (Feature f : heap_) pos_[f] = -1;
  heap_.clear();
  for (Feature f = 0; f < vals.size(); ++f)
    if (vals[f] < 0) heap_insert(f);
}

std::int32_t SearchHeap::pick(const std::vector<std::int8_t> &vals) {
  while (!heap_.empty()) {
    Feature f = heap_[0];
    pos_[f] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      pos_[heap_[0]] = 0;
      sift_down(0);
    }
    if (vals[f] < 0) return std::int32_t(f);
  }
  return -1;
}

void SearchHeap::sift_up(std::uint32_t i) {
  Feature f = heap_[i];
  while (i > 0) {
    std::uint32_t parent = (i - 1) / 2;
    if (act_[heap_[parent]] >= act_[f]) break;
    heap_[i] = heap_[parent];
    pos_[heap_[i]] = std::int32_t(i);
    i = parent;
  }
  heap_[i] = f;
  pos_[f] = std::int32_t(i);
}

void SearchHeap::sift_down(std::uint32_t i) {
  Feature f = heap_[i];
  for (;;) {
    std::uint32_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() &&
        act_[heap_[child + 1]] > act_[heap_[child]])
      ++child;
    if (act_[heap_[child]] <= act_[f]) break;
    heap_[i] = heap_[child];
    pos_[heap_[i]] = std::int32_t(i);
    i = child;
  }
  heap_[i] = f;
  pos_[f] = std::int32_t(i);
}

// ------------------------------------------------------------------- trail

Trail::Trail(ClauseDatabase *db) : db_(db) {
  std::uint32_t n = db_->num_features();
  vals_.assign(n, -1);
  level_.assign(n, 0);
  reason_.assign(n, kNoClause);
  phase_.assign(n, 0);
  watches_.resize(2 * n);
  lits_.resize(2 * n);
  seen_.assign(n, 0);
  failed_mark_.assign(2 * n, 0);
}

Config Trail::config() const {
  assert(is_total());
  Config c(num_features());
  for (Feature f = 0; f < num_features(); ++f) c[f] = vals_[f] == 1;
  return c;
}

bool Trail::enqueue(Lit l, ClauseRef reason) {
  Feature f = feature_of(l);
  assert(vals_[f] < 0);
  vals_[f] = is_positive(l) ? 1 : 0;
  level_[f] = decision_level();
  reason_[f] = reason;
  trail_.push_back(l);
  lits_.set(l);
  return true;
}

void Trail::backtrack_to(std::uint32_t level) {
  if (decision_level() <= level) return;
  std::uint32_t target = trail_lim_[level];
  while (trail_.size() > target) {
    Lit l = trail_.back();
    Feature f = feature_of(l);
    bool was_decision = reason_[f] == kNoClause && level_[f] > 0;
    trail_.pop_back();
    phase_[f] = vals_[f];
    vals_[f] = -1;
    reason_[f] = kNoClause;
    lits_.clear(l);
    if (heap_) heap_->reinsert(f);
    if (record_failed_ && was_decision && !failed_mark_[l]) {
      failed_mark_[l] = 1;
      failed_.push_back(l);
    }
  }
  trail_lim_.resize(level);
  if (qhead_ > trail_.size()) qhead_ = std::uint32_t(trail_.size());
  units_dirty_ = true;
  fragile_dirty_ = !fragile_.empty();
}

void Trail::hard_reset() { backtrack_to(0); }

ClauseRef Trail::attach_clause(std::uint32_t ordinal) {
  ClauseRef ref = db_->clause_at(ordinal);
  const Lit *lits = db_->clause_lits(ref);
  std::uint32_t size = db_->clause_size(ref);
  assert(size >= 2);

  std::uint32_t nonfalse[2];
  std::uint32_t found = 0;
  for (std::uint32_t k = 0; k < size && found < 2; ++k)
    if (value(lits[k]) != 0) nonfalse[found++] = k;

  auto max_false_pos = [&](std::uint32_t skip) {
    std::uint32_t best = UINT32_MAX, best_level = 0;
    for (std::uint32_t k = 0; k < size; ++k) {
      if (k == skip || value(lits[k]) != 0) continue;
      std::uint32_t lv = level_[feature_of(lits[k])];
      if (best == UINT32_MAX || lv > best_level) {
        best = k;
        best_level = lv;
      }
    }
    return best;
  };

  ClauseRef conflict = kNoClause;
  std::uint32_t w0, w1;
  if (found == 2) {
    w0 = nonfalse[0];
    w1 = nonfalse[1];
  } else if (found == 1) {
    w0 = nonfalse[0];
    w1 = max_false_pos(w0);
    if (value(lits[w0]) < 0) enqueue(lits[w0], ref);
  } else {
    // Falsified under the current assignment: move to the highest level
    // involved and report the clause as a conflict there. All literals stay
    // false after the backtrack since maxlv is their maximum level.
    std::uint32_t maxlv = 0;
    for (std::uint32_t k = 0; k < size; ++k)
      maxlv = std::max(maxlv, level_[feature_of(lits[k])]);
    backtrack_to(maxlv);
    w0 = max_false_pos(UINT32_MAX);
    w1 = max_false_pos(w0);
    conflict = ref;
  }

  if (watch_pos_.size() <= ordinal) watch_pos_.resize(ordinal + 1, {0, 0});
  watch_pos_[ordinal] = {w0, w1};
  watches_[lits[w0]].push_back(Watcher{ordinal, lits[w1]});
  watches_[lits[w1]].push_back(Watcher{ordinal, lits[w0]});
  // A watch resting on a false literal can silently lose its duty when a
  // backtrack unwinds the other watch; track such clauses until both
  // watches are sound.
  if (value(lits[w0]) == 0 || value(lits[w1]) == 0)
    fragile_.push_back(ordinal);
  return conflict;
}

void Trail::detach_clause(std::uint32_t ordinal) {
  ClauseRef ref = db_->clause_at(ordinal);
  const Lit *lits = db_->clause_lits(ref);
  auto [p0, p1] = watch_pos_[ordinal];
  for (Lit l : {lits[p0], lits[p1]}) {
    auto &ws = watches_[l];
    for (std::uint32_t i = 0; i < ws.size(); ++i)
      if (ws[i].ordinal == ordinal) {
        ws.erase_swap(i);
        break;
      }
  }
}

ClauseRef Trail::recheck_fragile() {
  fragile_dirty_ = false;
  std::vector<std::uint32_t> pending;
  pending.swap(fragile_);  // attach_clause below may append to fragile_
  for (std::size_t i = 0; i < pending.size(); ++i) {
    std::uint32_t ordinal = pending[i];
    ClauseRef ref = db_->clause_at(ordinal);
    const Lit *lits = db_->clause_lits(ref);
    auto [p0, p1] = watch_pos_[ordinal];
    int v0 = value(lits[p0]), v1 = value(lits[p1]);
    if (v0 != 0 && v1 != 0) continue;  // healed, drop from the list
    if (v0 == 1 || v1 == 1) {
      fragile_.push_back(ordinal);  // satisfied but still resting on false
      continue;
    }
    // Some watch false, none true: redo the attachment.
    detach_clause(ordinal);
    ClauseRef confl = attach_clause(ordinal);
    if (confl) {
      for (std::size_t j = i + 1; j < pending.size(); ++j)
        fragile_.push_back(pending[j]);
      fragile_dirty_ = true;
      return confl;
    }
  }
  return kNoClause;
}

ClauseRef Trail::attach_pending() {
  while (attached_ < db_->clause_count()) {
    std::uint32_t ordinal = attached_++;
    if (ClauseRef c = attach_clause(ordinal)) return c;
  }
  return kNoClause;
}

ClauseRef Trail::apply_units() {
  const auto &units = db_->unit_clauses();
  if (units_seen_ == units.size() && !units_dirty_) return kNoClause;
  for (ClauseRef ref : units) {
    Lit l = db_->clause_lits(ref)[0];
    int v = value(l);
    if (v == 1) continue;
    if (v == -1) {
      enqueue(l, ref);
      continue;
    }
    // Falsified unit: conflict at the level of the falsifying assignment.
    backtrack_to(level_[feature_of(l)]);
    return ref;
  }
  units_seen_ = std::uint32_t(units.size());
  units_dirty_ = false;
  return kNoClause;
}

ClauseRef Trail::propagate() {
  if (ClauseRef c = attach_pending()) return c;
  if (ClauseRef c = apply_units()) return c;
  if (fragile_dirty_) {
    if (ClauseRef c = recheck_fragile()) return c;
  }

  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit fp = negate_lit(p);  // literal that just became false
    auto &ws = watches_[fp];
    for (std::uint32_t i = 0; i < ws.size();) {
      Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ++i;
        continue;
      }
      ClauseRef ref = db_->clause_at(w.ordinal);
      const Lit *lits = db_->clause_lits(ref);
      std::uint32_t size = db_->clause_size(ref);
      auto &[p0, p1] = watch_pos_[w.ordinal];
      std::uint32_t fpos = lits[p0] == fp ? p0 : p1;
      std::uint32_t opos = lits[p0] == fp ? p1 : p0;
      Lit other = lits[opos];
      if (value(other) == 1) {
        ws[i].blocker = other;
        ++i;
        continue;
      }
      std::uint32_t repl = UINT32_MAX;
      for (std::uint32_t k = 0; k < size; ++k) {
        if (k == p0 || k == p1) continue;
        if (value(lits[k]) != 0) {
          repl = k;
          break;
        }
      }
      if (repl != UINT32_MAX) {
        (fpos == p0 ? p0 : p1) = repl;
        watches_[lits[repl]].push_back(Watcher{w.ordinal, other});
        ws.erase_swap(i);
        continue;
      }
      if (value(other) == 0) {
        qhead_ = std::uint32_t(trail_.size());
        return ref;  // conflict
      }
      enqueue(other, ref);
      ++i;
    }
  }
  return kNoClause;
}

std::uint32_t Trail::analyze(ClauseRef confl) {
  learned_.clear();
  learned_.push_back(0);  // placeholder for the asserting literal
  std::vector<Feature> toclear;
  std::uint32_t counter = 0;
  Lit p = 0;
  bool have_p = false;
  std::size_t idx = trail_.size();
  std::uint32_t cur = decision_level();

  for (;;) {
    assert(confl != kNoClause);
    const Lit *lits = db_->clause_lits(confl);
    std::uint32_t size = db_->clause_size(confl);
    for (std::uint32_t k = 0; k < size; ++k) {
      Lit q = lits[k];
      if (have_p && q == p) continue;
      Feature f = feature_of(q);
      if (seen_[f] || level_[f] == 0) continue;
      seen_[f] = 1;
      toclear.push_back(f);
      if (heap_) heap_->bump(f);
      if (level_[f] >= cur)
        ++counter;
      else
        learned_.push_back(q);
    }
    while (!seen_[feature_of(trail_[idx - 1])]) --idx;
    --idx;
    p = trail_[idx];
    have_p = true;
    confl = reason_[feature_of(p)];
    --counter;
    if (counter == 0) break;
  }
  learned_[0] = negate_lit(p);

  // Basic self-subsumption: drop literals whose whole reason is already in
  // the clause (or fixed at level 0).
  std::size_t kept = 1;
  for (std::size_t j = 1; j < learned_.size(); ++j) {
    Feature f = feature_of(learned_[j]);
    ClauseRef r = reason_[f];
    bool redundant = r != kNoClause;
    if (redundant) {
      const Lit *lits = db_->clause_lits(r);
      std::uint32_t size = db_->clause_size(r);
      for (std::uint32_t k = 0; k < size && redundant; ++k) {
        Feature g = feature_of(lits[k]);
        if (g == f || seen_[g] || level_[g] == 0) continue;
        redundant = false;
      }
    }
    if (!redundant) learned_[kept++] = learned_[j];
  }
  learned_.resize(kept);

  for (Feature f : toclear) seen_[f] = 0;

  if (learned_.size() == 1) return 0;
  std::size_t maxj = 1;
  for (std::size_t j = 2; j < learned_.size(); ++j)
    if (level_[feature_of(learned_[j])] >
        level_[feature_of(learned_[maxj])])
      maxj = j;
  std::swap(learned_[1], learned_[maxj]);
  return level_[feature_of(learned_[1])];
}

bool Trail::resolve_conflict(ClauseRef confl) {
  ++conflicts_;
  if (decision_level() == 0) {
    db_->mark_unsat();
    return false;
  }
  std::uint32_t bj = analyze(confl);
  backtrack_to(bj);
  ClauseRef ref = db_->add_clause(learned_);
  if (learned_.size() >= 2) {
    std::uint32_t ordinal = db_->clause_count() - 1;
    if (ordinal == attached_) {
      // Eager attach. learned_[0] is open and learned_[1] is the deepest
      // false literal, sitting exactly at the backjump level, so the watch
      // pair always unwinds together: no fragile registration needed.
      attached_ = ordinal + 1;
      if (watch_pos_.size() <= ordinal) watch_pos_.resize(ordinal + 1, {0, 0});
      watch_pos_[ordinal] = {0, 1};
      watches_[learned_[0]].push_back(Watcher{ordinal, learned_[1]});
      watches_[learned_[1]].push_back(Watcher{ordinal, learned_[0]});
      enqueue(learned_[0], ref);
    }
    // Otherwise the conflict surfaced while draining the attach frontier;
    // attach_pending() reaches this ordinal on the next propagate() and
    // enqueues the asserting literal through its one-open-literal path.
  } else {
    // Unit learned clause: asserted at level 0 through the unit list.
    assert(bj == 0);
    if (value(learned_[0]) == -1) enqueue(learned_[0], ref);
    units_seen_ = 0;  // force a rescan so the unit is tracked as applied
  }
  if (heap_) heap_->decay();
  return true;
}

bool Trail::push_and_propagate(const std::vector<Lit> &lits) {
  if (db_->unsat()) return false;
  // One decision per closure round: backjumps may unwind literals pushed
  // earlier, so keep re-pushing until all of them hold at once.
  for (;;) {
    for (;;) {
      ClauseRef c = propagate();
      if (!c) break;
      if (!resolve_conflict(c)) return false;
    }
    bool progressed = false;
    for (Lit l : lits) {
      if (value(l) == 1) continue;
      if (value(l) == 0) return false;
      new_level();
      enqueue(l, kNoClause);
      progressed = true;
      break;
    }
    if (!progressed) return true;
  }
}

bool Trail::probe_push(const std::vector<Lit> &lits) {
  if (db_->unsat()) return false;
  // Sync with the shared database first; conflicts here are resolved
  // chronologically (no learning) and may shrink stale content.
  for (;;) {
    ClauseRef c = propagate();
    if (!c) break;
    if (decision_level() == 0) {
      db_->mark_unsat();
      return false;
    }
    backtrack_to(decision_level() - 1);
  }
  std::uint32_t entry = decision_level();
  for (Lit l : lits) {
    if (value(l) == 1) continue;
    if (value(l) == 0) {  // complementary to the state or an earlier push
      backtrack_to(entry);
      return false;
    }
    new_level();
    enqueue(l, kNoClause);
  }
  ClauseRef c = propagate();
  if (c) {
    if (entry == 0 && decision_level() == 0) db_->mark_unsat();
    backtrack_to(entry);
    return false;
  }
  return true;
}

bool Trail::complete(SearchHeap &heap, std::mt19937_64 &rng) {
  (void)rng;
  if (db_->unsat()) return false;
  heap_ = &heap;
  heap.init_if_needed(num_features());
  heap.rebuild(vals_);
  record_failed_ = true;
  std::vector<Lit> snapshot = trail_;

  bool ok = true;
  for (;;) {
    ClauseRef c = propagate();
    if (c) {
      if (!resolve_conflict(c)) {
        ok = false;
        break;
      }
      continue;
    }
    if (is_total()) break;
    Lit d = 0;
    bool have = false;
    while (!failed_.empty()) {
      Lit cand = failed_.back();
      failed_.pop_back();
      failed_mark_[cand] = 0;
      if (value(cand) == -1) {
        d = cand;
        have = true;
        break;
      }
    }
    if (!have) {
      std::int32_t f = heap.pick(vals_);
      assert(f >= 0);
      d = make_lit(Feature(f), phase_[f] == 1);
    }
    new_level();
    enqueue(d, kNoClause);
  }

  record_failed_ = false;
  heap_ = nullptr;
  if (!ok) return false;
  for (Lit l : snapshot)
    if (value(l) != 1) return false;
  return true;
}

SearchStatus Trail::solve(const std::vector<Lit> &assumptions,
                          SearchHeap &heap, std::mt19937_64 &rng,
                          std::uint64_t budget,
                          const std::atomic<bool> *stop) {
  (void)rng;
  if (db_->unsat()) return SearchStatus::ModelUnsat;
  hard_reset();
  heap_ = &heap;
  heap.init_if_needed(num_features());
  heap.rebuild(vals_);

  auto luby = [](std::uint64_t i) {
    // Luby sequence, 1-indexed.
    std::uint64_t k = 1;
    while ((std::uint64_t(1) << (k + 1)) - 1 <= i + 1) ++k;
    while ((std::uint64_t(1) << k) - 1 != i + 1) {
      i = i - ((std::uint64_t(1) << k) - 1);
      while ((std::uint64_t(1) << k) - 1 > i + 1) --k;
    }
    return std::uint64_t(1) << (k - 1);
  };

  std::uint64_t restart_idx = 0;
  std::uint64_t restart_limit = 100 * luby(restart_idx);
  std::uint64_t conflicts_here = 0, conflicts_since_restart = 0;
  SearchStatus result;

  for (;;) {
    ClauseRef c = propagate();
    if (c) {
      if (!resolve_conflict(c)) {
        result = SearchStatus::ModelUnsat;
        break;
      }
      ++conflicts_here;
      ++conflicts_since_restart;
      if (budget && conflicts_here >= budget) {
        result = SearchStatus::Aborted;
        break;
      }
      if (stop && stop->load(std::memory_order_relaxed)) {
        result = SearchStatus::Aborted;
        break;
      }
      continue;
    }
    if (conflicts_since_restart >= restart_limit) {
      ++restart_idx;
      restart_limit = 100 * luby(restart_idx);
      conflicts_since_restart = 0;
      backtrack_to(0);
      continue;
    }
    std::uint32_t lvl = decision_level();
    if (lvl < assumptions.size()) {
      Lit a = assumptions[lvl];
      int v = value(a);
      if (v == 0) {
        result = SearchStatus::Infeasible;
        break;
      }
      new_level();
      if (v == -1) enqueue(a, kNoClause);
      continue;
    }
    if (is_total()) {
      result = SearchStatus::Sat;
      break;
    }
    std::int32_t f = heap.pick(vals_);
    assert(f >= 0);
    new_level();
    enqueue(make_lit(Feature(f), phase_[f] == 1), kNoClause);
  }

  heap_ = nullptr;
  if (result != SearchStatus::Sat) backtrack_to(0);
  return result;
}

std::string Trail::check_watch_invariant() {
  // A level-zero conflict kills the database and aborts propagation mid-wave
  // without a repairing backjump; every search entry point short-circuits on
  // an unsat database, so there is no watch state left worth auditing.
  if (db_->unsat()) return "";
  // Value-dependent checks only hold on a propagation-closed trail.
  bool closed = qhead_ == trail_.size() && !fragile_dirty_;
  for (std::uint32_t ordinal = 0; ordinal < attached_; ++ordinal) {
    ClauseRef ref = db_->clause_at(ordinal);
    const Lit *lits = db_->clause_lits(ref);
    std::uint32_t size = db_->clause_size(ref);
    auto [p0, p1] = watch_pos_[ordinal];
    if (p0 == p1 || p0 >= size || p1 >= size)
      return "bad watch positions on ordinal " + std::to_string(ordinal);
    auto in_list = [&](Lit l) {
      for (const Watcher &w : watches_[l])
        if (w.ordinal == ordinal) return true;
      return false;
    };
    if (!in_list(lits[p0]) || !in_list(lits[p1]))
      return "watcher missing from list on ordinal " + std::to_string(ordinal);
    if (!closed) continue;
    int v0 = value(lits[p0]), v1 = value(lits[p1]);
    bool any_true = false;
    std::uint32_t opens = 0;
    for (std::uint32_t k = 0; k < size; ++k) {
      int v = value(lits[k]);
      if (v == 1) any_true = true;
      if (v == -1) ++opens;
    }
    if (!any_true) {
      // Nothing satisfies the clause, so it must be inert (two open
      // watches); anything else is a missed unit or missed conflict.
      if (opens == 0) return "undetected conflict, ordinal " +
                             std::to_string(ordinal);
      if (v0 != -1 || v1 != -1)
        return (opens == 1 ? "undetected unit, ordinal "
                           : "false watch on unsatisfied clause, ordinal ") +
               std::to_string(ordinal);
      continue;
    }
    if (v0 == 1 || v1 == 1) continue;  // a true watch carries no duty
    // Satisfied clause, no true watch: every false watch needs a true
    // literal at or below its level (so the support outlives the watch), or
    // the clause must be queued for re-examination after backtracks.
    bool is_fragile = false;
    for (std::uint32_t f : fragile_) is_fragile |= f == ordinal;
    if (is_fragile) continue;
    for (std::uint32_t w : {p0, p1}) {
      if (value(lits[w]) != 0) continue;
      std::uint32_t wl = level_[feature_of(lits[w])];
      bool supported = false;
      for (std::uint32_t k = 0; k < size && !supported; ++k)
        supported = value(lits[k]) == 1 && level_[feature_of(lits[k])] <= wl;
      if (!supported)
        return "false watch outliving its clause's support, ordinal " +
               std::to_string(ordinal);
    }
  }
  // Every watcher entry must agree with the recorded positions.
  for (Lit l = 0; l < db_->num_lits(); ++l)
    for (const Watcher &w : watches_[l]) {
      if (w.ordinal >= attached_)
        return "watcher for unattached ordinal " + std::to_string(w.ordinal);
      auto [p0, p1] = watch_pos_[w.ordinal];
      ClauseRef ref = db_->clause_at(w.ordinal);
      const Lit *lits = db_->clause_lits(ref);
      if (lits[p0] != l && lits[p1] != l)
        return "stale watcher entry on literal " + std::to_string(l);
    }
  return "";
}

// ------------------------------------------------------------------ engine

Engine::Engine(const FeatureModel &model, std::uint64_t seed)
    : db_(model), scratch_(&db_), rng_(seed) {
  heap_.init(model.num_features);
}

std::optional<Config> Engine::decide_feasibility(const Interaction &i) {
  return solve_with_assumptions({i.a, i.b});
}

std::optional<Config> Engine::solve_with_assumptions(
    const std::vector<Lit> &lits) {
  scratch_.hard_reset();
  SearchStatus st = scratch_.solve(lits, heap_, rng_);
  if (st != SearchStatus::Sat) return std::nullopt;
  Config c = scratch_.config();
  scratch_.hard_reset();
  return c;
}

bool Engine::up_refutes(const std::vector<Lit> &lits) {
  scratch_.hard_reset();
  if (db_.unsat()) return true;
  bool ok = scratch_.probe_push(lits);
  scratch_.hard_reset();
  return !ok;
}

bool Engine::is_satisfiable() {
  if (sat_cache_ < 0)
    sat_cache_ = solve_with_assumptions({}).has_value() ? 1 : 0;
  return sat_cache_ == 1;
}

}  // namespace pairsamp
