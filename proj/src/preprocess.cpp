#include "pairsamp/preprocess.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <optional>
#include <unordered_set>
#include <utility>

namespace pairsamp {
namespace {

// Sorted, duplicate-free form; nullopt for tautologies. Literal codes order
// the two polarities of a feature adjacently, so complementary pairs meet.
std::optional<Clause> normalize_clause(Clause c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] == negate_lit(c[i - 1])) return std::nullopt;
  return c;
}

// Pipeline state, always in the original feature numbering. Clauses only ever
// mention alive features; eliminated ones live on in the event stack.
struct Work {
  std::uint32_t n = 0;
  std::vector<Clause> clauses;
  std::vector<std::uint8_t> alive;
  std::vector<std::uint8_t> concrete;
  std::vector<std::int8_t> fixed_val;  // -1 while unfixed
  std::vector<ReconstructionEvent> events;
  bool unsat = false;

  std::uint32_t concrete_alive() const {
    std::uint32_t k = 0;
    for (std::uint32_t f = 0; f < n; ++f)
      if (alive[f] && concrete[f]) ++k;
    return k;
  }
};

FeatureModel working_model(const Work &w) {
  FeatureModel m;
  m.num_features = w.n;
  m.clauses = w.clauses;
  m.concrete.assign(w.n, 0);  // the engine never looks at concreteness
  return m;
}

// Fixes every literal in `forced` true and sweeps the clause set to a
// fixpoint: satisfied clauses drop, false literals shrink, fresh units join
// the queue. Contradictions and empty clauses mark the instance unsat.
void propagate_fixes(Work &w, std::vector<Lit> forced) {
  while (!forced.empty()) {
    for (Lit l : forced) {
      Feature f = feature_of(l);
      std::int8_t v = is_positive(l) ? 1 : 0;
      if (w.fixed_val[f] >= 0) {
        if (w.fixed_val[f] != v) {
          w.unsat = true;
          return;
        }
        continue;
      }
      assert(w.alive[f]);
      w.fixed_val[f] = v;
      w.alive[f] = 0;
      ReconstructionEvent e;
      e.kind = ReconstructionEvent::Kind::kFixed;
      e.feature = f;
      e.value = v == 1;
      w.events.push_back(std::move(e));
    }
    forced.clear();
    std::vector<Clause> next;
    next.reserve(w.clauses.size());
    for (Clause &c : w.clauses) {
      bool satisfied = false;
      Clause kept;
      kept.reserve(c.size());
      for (Lit l : c) {
        std::int8_t fv = w.fixed_val[feature_of(l)];
        if (fv < 0) {
          kept.push_back(l);
          continue;
        }
        if ((fv == 1) == is_positive(l)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (kept.empty()) {
        w.unsat = true;
        return;
      }
      if (kept.size() == 1) forced.push_back(kept[0]);
      next.push_back(std::move(kept));
    }
    w.clauses = std::move(next);
  }
}

// Literal-level union-find keeping classes complement-consistent: uniting two
// literals unites their negations, and the root is always the lowest literal
// code, which makes the representative the lowest-numbered feature.
struct LitUnionFind {
  std::vector<Lit> parent;

  explicit LitUnionFind(std::uint32_t nlits) : parent(nlits) {
    for (std::uint32_t i = 0; i < nlits; ++i) parent[i] = Lit(i);
  }
  Lit find(Lit l) {
    while (parent[l] != l) {
      Lit up = parent[parent[l]];
      parent[l] = up;
      parent[negate_lit(l)] = negate_lit(up);
      l = up;
    }
    return l;
  }
  // False when the union would identify a literal with its own negation.
  bool unite(Lit a, Lit b) {
    Lit ra = find(a);
    Lit rb = find(b);
    if (ra == rb) return true;
    if (ra == negate_lit(rb)) return false;
    Lit root = std::min(ra, rb);
    Lit child = root == ra ? rb : ra;
    parent[child] = root;
    parent[negate_lit(child)] = negate_lit(root);
    return true;
  }
};

// Tarjan over the literal implication graph, iterative to survive long
// implication chains. Nodes with probed[l] == 0 do not take part.
std::vector<std::vector<Lit>> literal_sccs(
    const std::vector<std::vector<Lit>> &adj,
    const std::vector<std::uint8_t> &probed) {
  const std::uint32_t n = std::uint32_t(adj.size());
  constexpr std::uint32_t kUnseen = 0xffffffffu;
  std::vector<std::uint32_t> index(n, kUnseen), low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<Lit> stack;
  std::vector<std::pair<Lit, std::uint32_t>> frames;
  std::vector<std::vector<Lit>> sccs;
  std::uint32_t next_index = 0;

  for (std::uint32_t s = 0; s < n; ++s) {
    if (!probed[s] || index[s] != kUnseen) continue;
    frames.emplace_back(Lit(s), 0);
    index[s] = low[s] = next_index++;
    stack.push_back(Lit(s));
    on_stack[s] = 1;
    while (!frames.empty()) {
      auto &[v, child] = frames.back();
      if (child < adj[v].size()) {
        Lit to = adj[v][child++];
        if (!probed[to]) continue;
        if (index[to] == kUnseen) {
          index[to] = low[to] = next_index++;
          stack.push_back(to);
          on_stack[to] = 1;
          frames.emplace_back(to, 0);
        } else if (on_stack[to]) {
          low[v] = std::min(low[v], index[to]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<Lit> scc;
        for (;;) {
          Lit m = stack.back();
          stack.pop_back();
          on_stack[m] = 0;
          scc.push_back(m);
          if (m == v) break;
        }
        if (scc.size() > 1) sccs.push_back(std::move(scc));
      }
      Lit done = v;
      frames.pop_back();
      if (!frames.empty())
        low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  return sccs;
}

// Probes every literal of every alive feature. Failed literals (either via a
// direct refutation or via agreement of both polarities' closures) become
// fixes; otherwise strongly connected implication classes collapse onto their
// lowest-feature representative, suppressed where the substitution would drop
// the alive concrete count below two. Returns true when anything changed.
bool failed_and_equivalent_pass(Work &w) {
  FeatureModel m = working_model(w);
  ClauseDatabase db(m);
  Trail trail(&db);
  if (!trail.push_and_propagate({})) {
    w.unsat = true;
    return true;
  }
  if (!trail.assignment_stack().empty()) {
    propagate_fixes(w, trail.assignment_stack());
    return true;
  }

  std::vector<std::vector<Lit>> closure(2 * w.n);
  std::vector<std::uint8_t> probed(2 * w.n, 0);
  std::vector<Lit> forced;
  for (Feature f = 0; f < w.n; ++f) {
    if (!w.alive[f]) continue;
    for (int s = 0; s < 2; ++s) {
      Lit l = make_lit(f, s == 0);
      if (!trail.probe_push({l})) {
        forced.push_back(negate_lit(l));  // failed literal
        continue;
      }
      const std::vector<Lit> &stack = trail.assignment_stack();
      closure[l].assign(stack.begin() + 1, stack.end());
      std::sort(closure[l].begin(), closure[l].end());
      probed[l] = 1;
      trail.backtrack_to(0);
    }
    Lit pos = make_lit(f, true);
    Lit neg = make_lit(f, false);
    if (probed[pos] && probed[neg]) {
      // Literals implied by both polarities hold unconditionally.
      std::set_intersection(closure[pos].begin(), closure[pos].end(),
                            closure[neg].begin(), closure[neg].end(),
                            std::back_inserter(forced));
    }
  }
  if (!forced.empty()) {
    propagate_fixes(w, std::move(forced));
    return true;
  }

  LitUnionFind uf(2 * w.n);
  for (const std::vector<Lit> &scc : literal_sccs(closure, probed)) {
    for (std::size_t i = 1; i < scc.size(); ++i) {
      if (!uf.unite(scc[0], scc[i])) {
        w.unsat = true;
        return true;
      }
    }
  }

  std::uint32_t cc = w.concrete_alive();
  std::vector<Lit> subst(2 * w.n);
  for (std::uint32_t l = 0; l < 2 * w.n; ++l) subst[l] = Lit(l);
  bool changed = false;
  for (Feature f = 0; f < w.n; ++f) {
    if (!w.alive[f]) continue;
    Lit pos = make_lit(f, true);
    Lit rep = uf.find(pos);
    Feature rf = feature_of(rep);
    if (rf == f) continue;  // class representative keeps its feature
    assert(w.alive[rf]);
    if (w.concrete[f]) {
      if (w.concrete[rf]) {
        if (cc <= 2) continue;  // keep at least two concrete features
        --cc;
      } else {
        w.concrete[rf] = 1;  // the representative inherits concreteness
      }
    }
    w.alive[f] = 0;
    subst[pos] = rep;
    subst[negate_lit(pos)] = negate_lit(rep);
    ReconstructionEvent e;
    e.kind = ReconstructionEvent::Kind::kEquivalent;
    e.feature = f;
    e.rep = rep;
    w.events.push_back(std::move(e));
    changed = true;
  }
  if (!changed) return false;

  std::vector<Clause> next;
  next.reserve(w.clauses.size());
  for (Clause &c : w.clauses) {
    Clause r;
    r.reserve(c.size());
    for (Lit l : c) r.push_back(subst[l]);
    if (auto norm = normalize_clause(std::move(r)))
      next.push_back(std::move(*norm));
  }
  w.clauses = std::move(next);
  return true;
}

// Resolution-based elimination of non-concrete features whose removal does
// not grow the clause count. The removed clauses go into the event stack:
// during restore one of the two values satisfies all of them.
bool bve_pass(Work &w) {
  std::vector<std::vector<std::uint32_t>> occ(2 * w.n);
  std::vector<std::uint8_t> dead(w.clauses.size(), 0);
  for (std::uint32_t i = 0; i < w.clauses.size(); ++i)
    for (Lit l : w.clauses[i]) occ[l].push_back(i);

  bool changed = false;
  for (Feature f = 0; f < w.n; ++f) {
    if (!w.alive[f] || w.concrete[f]) continue;
    Lit pos = make_lit(f, true);
    Lit neg = make_lit(f, false);
    std::vector<std::uint32_t> ps, ns;
    for (std::uint32_t i : occ[pos])
      if (!dead[i]) ps.push_back(i);
    for (std::uint32_t i : occ[neg])
      if (!dead[i]) ns.push_back(i);

    std::vector<Clause> resolvents;
    bool empty_resolvent = false;
    for (std::uint32_t pi : ps) {
      for (std::uint32_t ni : ns) {
        Clause r;
        r.reserve(w.clauses[pi].size() + w.clauses[ni].size());
        for (Lit l : w.clauses[pi])
          if (l != pos) r.push_back(l);
        for (Lit l : w.clauses[ni])
          if (l != neg) r.push_back(l);
        if (auto norm = normalize_clause(std::move(r))) {
          if (norm->empty()) {
            empty_resolvent = true;
            break;
          }
          resolvents.push_back(std::move(*norm));
        }
      }
      if (empty_resolvent) break;
    }
    if (empty_resolvent) {  // the occurrences were complementary units
      w.unsat = true;
      return true;
    }
    if (resolvents.size() > ps.size() + ns.size()) continue;

    ReconstructionEvent e;
    e.kind = ReconstructionEvent::Kind::kEliminated;
    e.feature = f;
    for (std::uint32_t i : ps) e.clauses.push_back(w.clauses[i]);
    for (std::uint32_t i : ns) e.clauses.push_back(w.clauses[i]);
    w.events.push_back(std::move(e));
    for (std::uint32_t i : ps) dead[i] = 1;
    for (std::uint32_t i : ns) dead[i] = 1;
    for (Clause &r : resolvents) {
      std::uint32_t idx = std::uint32_t(w.clauses.size());
      dead.push_back(0);
      for (Lit l : r) occ[l].push_back(idx);
      w.clauses.push_back(std::move(r));
    }
    w.alive[f] = 0;
    changed = true;
  }

  if (changed) {
    std::vector<Clause> next;
    next.reserve(w.clauses.size());
    for (std::uint32_t i = 0; i < w.clauses.size(); ++i)
      if (!dead[i]) next.push_back(std::move(w.clauses[i]));
    w.clauses = std::move(next);
  }
  return changed;
}

// Assumes the negation of a clause literal by literal. A refutation or an
// implied literal along the way proves a shorter clause; literals falsified
// by the assumed prefix are redundant and dropped. Replacements are implied
// by the model and subsume what they replace, so the solution set survives.
bool vivify_pass(Work &w) {
  if (w.clauses.empty()) return false;
  FeatureModel m = working_model(w);
  ClauseDatabase db(m);
  Trail trail(&db);
  if (!trail.push_and_propagate({})) {
    w.unsat = true;
    return true;
  }
  bool changed = false;
  for (Clause &c : w.clauses) {
    if (c.size() < 2) continue;
    Clause kept;
    bool terminal = false;
    bool dropped = false;
    for (Lit l : c) {
      int v = trail.value(l);
      if (v == 1) {  // prefix already implies the clause
        kept.push_back(l);
        terminal = true;
        break;
      }
      if (v == 0) {  // literal redundant under the prefix
        dropped = true;
        continue;
      }
      if (!trail.probe_push({negate_lit(l)})) {  // prefix plus this refutes
        kept.push_back(l);
        terminal = true;
        break;
      }
      kept.push_back(l);
    }
    trail.backtrack_to(0);
    if (kept.empty()) {  // every literal false at level zero
      w.unsat = true;
      return true;
    }
    if ((terminal && kept.size() < c.size()) || (!terminal && dropped)) {
      c = std::move(kept);
      changed = true;
    }
  }
  return changed;
}

std::uint64_t clause_signature(const Clause &c) {
  std::uint64_t s = 0;
  for (Lit l : c) s |= std::uint64_t(1) << (l & 63);
  return s;
}

// Removes strict supersets and duplicate clauses. Candidates come from the
// occurrence list of each clause's rarest literal; a 64-bit literal signature
// filters most non-subsets before the two-pointer check.
bool subsume_pass(Work &w) {
  const std::size_t m = w.clauses.size();
  if (m < 2) return false;
  std::vector<std::uint32_t> order(m);
  for (std::uint32_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (w.clauses[a].size() != w.clauses[b].size())
      return w.clauses[a].size() < w.clauses[b].size();
    return a < b;
  });
  std::vector<std::uint64_t> sig(m);
  std::vector<std::vector<std::uint32_t>> occ(2 * w.n);
  for (std::uint32_t i = 0; i < m; ++i) {
    sig[i] = clause_signature(w.clauses[i]);
    for (Lit l : w.clauses[i]) occ[l].push_back(i);
  }
  std::vector<std::uint8_t> dead(m, 0);
  bool changed = false;
  for (std::uint32_t idx : order) {
    if (dead[idx]) continue;
    const Clause &a = w.clauses[idx];
    Lit rare = a[0];
    for (Lit l : a)
      if (occ[l].size() < occ[rare].size()) rare = l;
    for (std::uint32_t j : occ[rare]) {
      if (j == idx || dead[j]) continue;
      const Clause &b = w.clauses[j];
      if (b.size() < a.size()) continue;
      if (b.size() == a.size() && j < idx) continue;  // earlier duplicate wins
      if ((sig[idx] & ~sig[j]) != 0) continue;
      if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        dead[j] = 1;
        changed = true;
      }
    }
  }
  if (changed) {
    std::vector<Clause> next;
    next.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i)
      if (!dead[i]) next.push_back(std::move(w.clauses[i]));
    w.clauses = std::move(next);
  }
  return changed;
}

bool clause_satisfied_with(const Clause &c, const Config &config, Feature f,
                           bool fval) {
  for (Lit l : c) {
    Feature g = feature_of(l);
    bool gval = g == f ? fval : config[g] == 1;
    if (gval == is_positive(l)) return true;
  }
  return false;
}

}  // namespace

SimplifyResult simplify(const FeatureModel &model, int max_rounds) {
  Work w;
  w.n = model.num_features;
  w.alive.assign(w.n, 1);
  w.concrete = model.concrete;
  w.fixed_val.assign(w.n, -1);
  w.clauses.reserve(model.clauses.size());
  for (const Clause &c : model.clauses) {
    if (auto norm = normalize_clause(c)) {
      if (norm->empty()) {
        w.unsat = true;
        break;
      }
      w.clauses.push_back(std::move(*norm));
    }
  }

  for (int round = 0; round < max_rounds && !w.unsat; ++round) {
    bool changed = false;
    std::vector<Lit> units;
    for (const Clause &c : w.clauses)
      if (c.size() == 1) units.push_back(c[0]);
    if (!units.empty()) {
      propagate_fixes(w, std::move(units));
      changed = true;
    }
    if (!w.unsat) changed |= failed_and_equivalent_pass(w);
    if (!w.unsat) changed |= bve_pass(w);
    if (!w.unsat) changed |= vivify_pass(w);
    if (!w.unsat) changed |= subsume_pass(w);
    if (!changed) break;
  }

  SimplifyResult res;
  res.map.original_features = w.n;
  res.map.original_concrete = model.concrete;
  res.map.events = std::move(w.events);
  if (w.unsat) {
    res.unsat = true;
    return res;
  }

  res.map.new_of_old.assign(w.n, kNoFeature);
  for (Feature f = 0; f < w.n; ++f) {
    if (!w.alive[f]) continue;
    res.map.new_of_old[f] = Feature(res.map.old_of_new.size());
    res.map.old_of_new.push_back(f);
  }
  res.model.num_features = std::uint32_t(res.map.old_of_new.size());
  res.model.concrete.assign(res.model.num_features, 0);
  for (std::size_t g = 0; g < res.map.old_of_new.size(); ++g)
    res.model.concrete[g] = w.concrete[res.map.old_of_new[g]];
  res.model.clauses.reserve(w.clauses.size());
  for (const Clause &c : w.clauses) {
    Clause r;
    r.reserve(c.size());
    for (Lit l : c) {
      Feature nf = res.map.new_of_old[feature_of(l)];
      assert(nf != kNoFeature);
      r.push_back(make_lit(nf, is_positive(l)));
    }
    // renumbering is monotone in the feature, so sortedness survives
    res.model.clauses.push_back(std::move(r));
  }
  return res;
}

Sample restore_sample(const SimplifyResult &simplified, const Sample &sample) {
  if (simplified.unsat) return {};
  const ReconstructionMap &map = simplified.map;

  Sample padded = sample;
  Engine engine(simplified.model, 1);
  if (padded.empty()) {
    if (auto c = engine.solve_with_assumptions({}))
      padded.push_back(std::move(*c));
    else
      return {};  // simplification stopped short of spotting unsat
  }
  std::vector<Feature> conc = simplified.model.concrete_features();
  if (conc.size() == 1) {
    // A lone concrete feature needs each feasible polarity represented.
    Feature g = conc[0];
    for (int pol = 0; pol < 2; ++pol) {
      bool want = pol == 0;
      bool present = false;
      for (const Config &c : padded) present |= (c[g] == 1) == want;
      if (present) continue;
      if (auto c = engine.solve_with_assumptions({make_lit(g, want)}))
        padded.push_back(std::move(*c));
    }
  }

  Sample out;
  out.reserve(padded.size());
  for (const Config &cs : padded) {
    assert(cs.size() == simplified.model.num_features);
    Config co(map.original_features, 0);
    std::vector<std::uint8_t> done(map.original_features, 0);
    for (std::size_t g = 0; g < map.old_of_new.size(); ++g) {
      co[map.old_of_new[g]] = cs[g];
      done[map.old_of_new[g]] = 1;
    }
    for (auto it = map.events.rbegin(); it != map.events.rend(); ++it) {
      const ReconstructionEvent &e = *it;
      switch (e.kind) {
        case ReconstructionEvent::Kind::kFixed:
          co[e.feature] = e.value ? 1 : 0;
          break;
        case ReconstructionEvent::Kind::kEquivalent: {
          Feature rf = feature_of(e.rep);
          assert(done[rf]);
          bool rep_true = (co[rf] == 1) == is_positive(e.rep);
          co[e.feature] = rep_true ? 1 : 0;
          break;
        }
        case ReconstructionEvent::Kind::kEliminated: {
          bool ok = true;
          for (const Clause &c : e.clauses)
            ok = ok && clause_satisfied_with(c, co, e.feature, true);
          if (!ok) {
            for ([[maybe_unused]] const Clause &c : e.clauses)
              assert(clause_satisfied_with(c, co, e.feature, false));
          }
          co[e.feature] = ok ? 1 : 0;
          break;
        }
      }
      done[e.feature] = 1;
    }
#ifndef NDEBUG
    for (std::uint8_t d : done) assert(d);
#endif
    out.push_back(std::move(co));
  }
  return out;
}

int learn_infeasible_binaries(FeatureModel &model, Engine &engine,
                              const std::vector<Interaction> &infeasible) {
  Trail trail(&engine.db());
  auto detects = [&](Lit from, Lit other) {
    if (!trail.probe_push({from})) return true;  // the literal itself is dead
    bool seen = trail.value(other) == 0;
    trail.backtrack_to(0);
    return seen;
  };
  int added = 0;
  for (const Interaction &i : infeasible) {
    if (engine.db().unsat()) break;
    if (detects(i.a, i.b) && detects(i.b, i.a)) continue;
    Clause c{negate_lit(i.a), negate_lit(i.b)};
    std::sort(c.begin(), c.end());
    engine.db().add_clause(c);
    model.clauses.push_back(std::move(c));
    ++added;
  }
  return added;
}

UniverseReduction universe_reduce(Engine &engine,
                                  const std::vector<Interaction> &feasible,
                                  const UniverseReduceBudget &budget) {
  UniverseReduction out;
  std::unordered_map<Interaction, Interaction, InteractionHash> direct;
  std::unordered_set<Interaction, InteractionHash> fset(feasible.begin(),
                                                        feasible.end());

  std::unordered_map<Lit, std::vector<Lit>> partners;
  for (const Interaction &i : feasible) {
    partners[i.a].push_back(i.b);
    partners[i.b].push_back(i.a);
  }
  std::vector<Lit> lits;
  lits.reserve(partners.size());
  for (auto &[l, ps] : partners) {
    std::sort(ps.begin(), ps.end());
    lits.push_back(l);
  }
  std::sort(lits.begin(), lits.end());

  // Impliers form a functional graph: each eliminated interaction points at
  // the interaction that fired for it. An edge is only added when the target
  // chain does not lead back to the candidate, which keeps chains acyclic.
  auto chain_blocks = [&](const Interaction &j, Interaction k) {
    for (;;) {
      if (k == j) return true;
      auto it = direct.find(k);
      if (it == direct.end()) return false;
      k = it->second;
    }
  };
  auto try_eliminate = [&](const Interaction &j, const Interaction &k) {
    if (j == k || !fset.count(j) || direct.count(j) || !fset.count(k)) return;
    if (chain_blocks(j, k)) return;
    direct.emplace(j, k);
  };

  Trail trail(&engine.db());
  if (!trail.push_and_propagate({})) {
    out.retained = feasible;
    return out;
  }

  // Single-literal rule: l2 in UP({l1}) makes {l2,l3} implied by {l1,l3} for
  // every shared partner l3, so only the l1 pair needs explicit coverage.
  for (Lit l1 : lits) {
    if (!trail.probe_push({l1})) continue;  // dead literal, pairs infeasible
    std::vector<Lit> closure(trail.assignment_stack());
    trail.backtrack_to(0);
    std::sort(closure.begin(), closure.end());
    const std::vector<Lit> &p1 = partners[l1];
    for (Lit l2 : closure) {
      if (l2 == l1 || feature_of(l2) == feature_of(l1)) continue;
      auto pit = partners.find(l2);
      if (pit == partners.end()) continue;
      const std::vector<Lit> &p2 = pit->second;
      std::size_t x = 0, y = 0;
      while (x < p1.size() && y < p2.size()) {
        if (p1[x] < p2[y]) {
          ++x;
        } else if (p2[y] < p1[x]) {
          ++y;
        } else {
          Lit l3 = p1[x];
          ++x;
          ++y;
          if (feature_of(l3) == feature_of(l1) ||
              feature_of(l3) == feature_of(l2))
            continue;
          try_eliminate(make_interaction(l2, l3), make_interaction(l1, l3));
        }
      }
    }
  }

  // Pairwise rule: propagate each retained pair and eliminate every other
  // feasible pair inside the closure. Budgeted, because closures over pairs
  // are where the time goes on big universes.
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t probed = 0;
  for (const Interaction &i : feasible) {
    if (direct.count(i)) continue;
    if (budget.work_units != 0) {
      if (probed >= budget.work_units) break;
    } else {
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      if (elapsed > budget.seconds) break;
    }
    if (!trail.probe_push({i.a, i.b})) continue;  // stale feasibility info
    ++probed;
    std::vector<Lit> closure;
    for (Lit l : trail.assignment_stack())
      if (partners.count(l)) closure.push_back(l);
    trail.backtrack_to(0);
    std::sort(closure.begin(), closure.end());
    for (std::size_t x = 0; x < closure.size(); ++x) {
      for (std::size_t y = x + 1; y < closure.size(); ++y) {
        if (feature_of(closure[x]) == feature_of(closure[y])) continue;
        Interaction j = make_interaction(closure[x], closure[y]);
        if (j == i || !fset.count(j)) continue;
        try_eliminate(j, i);
      }
    }
  }

  // Compress chains so published impliers are themselves retained.
  std::unordered_map<Interaction, Interaction, InteractionHash> memo;
  auto resolve = [&](Interaction i) {
    std::vector<Interaction> path;
    for (;;) {
      auto m = memo.find(i);
      if (m != memo.end()) {
        i = m->second;
        break;
      }
      auto d = direct.find(i);
      if (d == direct.end()) break;
      path.push_back(i);
      i = d->second;
    }
    for (const Interaction &p : path) memo.emplace(p, i);
    return i;
  };
  for (const Interaction &i : feasible) {
    if (direct.count(i))
      out.implier.emplace(i, resolve(i));
    else
      out.retained.push_back(i);
  }
  return out;
}

}  // namespace pairsamp
