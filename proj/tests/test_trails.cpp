// Trail and engine behavior: propagation closure, conflict-driven pushes,
// completion, assumption solving, and the bookkeeping invariants that the
// multi-trail sharing scheme depends on.

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "pairsamp/engine.hpp"
#include "pairsamp/model.hpp"

using namespace pairsamp;

namespace {

FeatureModel from_text(const std::string &text) {
  FeatureModel m;
  std::string err;
  std::istringstream in(text);
  REQUIRE_MESSAGE(parse_dimacs(in, m, err), err);
  return m;
}

FeatureModel random_model(std::mt19937_64 &rng, int n_lo, int n_hi, int m_lo,
                          int m_hi, int len_lo = 1, int len_hi = 3) {
  std::uniform_int_distribution<int> nf(n_lo, n_hi);
  int n = nf(rng);
  std::uniform_int_distribution<int> nc(m_lo, m_hi);
  int m = nc(rng);
  FeatureModel fm;
  fm.num_features = std::uint32_t(n);
  fm.concrete.assign(std::size_t(n), 1);
  std::uniform_int_distribution<int> len_d(len_lo, len_hi);
  std::uniform_int_distribution<int> fd(0, n - 1);
  std::uniform_int_distribution<int> pd(0, 1);
  for (int c = 0; c < m; ++c) {
    Clause cl;
    int len = len_d(rng);
    for (int k = 0; k < len; ++k)
      cl.push_back(make_lit(Feature(fd(rng)), pd(rng) == 0));
    fm.clauses.push_back(cl);
  }
  return fm;
}

Lit random_lit(std::mt19937_64 &rng, const FeatureModel &m) {
  std::uniform_int_distribution<int> fd(0, int(m.num_features) - 1);
  std::uniform_int_distribution<int> pd(0, 1);
  return make_lit(Feature(fd(rng)), pd(rng) == 0);
}

std::multiset<Lit> stack_lits(const Trail &t) {
  return {t.assignment_stack().begin(), t.assignment_stack().end()};
}

bool lit_true_in(const Config &c, Lit l) {
  return (c[feature_of(l)] == 1) == is_positive(l);
}

// Every clause in the database (originals, learned, units) holds under the
// total assignment.
bool db_satisfied(const ClauseDatabase &db, const Config &c) {
  if (db.unsat()) return false;
  for (ClauseRef ref : db.unit_clauses())
    if (!lit_true_in(c, db.clause_lits(ref)[0])) return false;
  for (std::uint32_t ord = 0; ord < db.clause_count(); ++ord) {
    ClauseRef ref = db.clause_at(ord);
    const Lit *lits = db.clause_lits(ref);
    std::uint32_t size = db.clause_size(ref);
    bool sat = false;
    for (std::uint32_t k = 0; k < size && !sat; ++k)
      sat = lit_true_in(c, lits[k]);
    if (!sat) return false;
  }
  return true;
}

// The literal bitset must mirror the assignment stack exactly.
bool bits_match_stack(const Trail &t) {
  std::size_t count = 0;
  bool ok = true;
  t.literal_bits().for_each_set([&](std::size_t code) {
    ++count;
    if (t.value(Lit(code)) != 1) ok = false;
  });
  return ok && count == t.assignment_stack().size();
}

// Pigeonhole instance: `pigeons` objects into `holes` slots, one clause per
// pigeon plus mutual exclusions per hole. Unsatisfiable when pigeons > holes
// and never refutable by unit propagation alone.
FeatureModel pigeonhole(int pigeons, int holes) {
  FeatureModel m;
  m.num_features = std::uint32_t(pigeons * holes);
  m.concrete.assign(std::size_t(pigeons * holes), 1);
  auto var = [&](int p, int h) { return Feature(p * holes + h); };
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h) c.push_back(make_lit(var(p, h), true));
    m.clauses.push_back(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q)
        m.clauses.push_back(
            {make_lit(var(p, h), false), make_lit(var(q, h), false)});
  return m;
}

}  // namespace

TEST_CASE("level zero propagation matches the reference closure") {
  std::mt19937_64 rng(0xA11CE);
  for (int round = 0; round < 200; ++round) {
    FeatureModel m = random_model(rng, 3, 9, 1, 14);
    CAPTURE(round);
    auto ref = unit_propagate(m, {});
    ClauseDatabase db(m);
    Trail t(&db);
    bool ok = t.push_and_propagate({});
    if (!ref) {
      // Reference conflict at level zero: the database must be marked
      // unsatisfiable by the time the push settles.
      CHECK_FALSE(ok);
      CHECK(db.unsat());
    } else {
      REQUIRE(ok);
      CHECK(t.decision_level() == 0);
      std::multiset<Lit> expect(ref->begin(), ref->end());
      CHECK(stack_lits(t) == expect);
      CHECK(bits_match_stack(t));
    }
  }
}

TEST_CASE("single literal pushes agree with reference unit propagation") {
  std::mt19937_64 rng(0xB0B);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    FeatureModel m = random_model(rng, 3, 8, 1, 12);
    if (!unit_propagate(m, {})) continue;  // level-zero conflicts done above
    Lit l = random_lit(rng, m);
    CAPTURE(round);
    CAPTURE(l);
    auto ref = unit_propagate(m, {l});
    ClauseDatabase db(m);
    Trail t(&db);
    bool ok = t.push_and_propagate({l});
    if (!ref) {
      CHECK_FALSE(ok);
    } else {
      REQUIRE(ok);
      std::multiset<Lit> expect(ref->begin(), ref->end());
      CHECK(stack_lits(t) == expect);
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("push failures leave a usable conflict-free trail") {
  // x0 forces a contradiction; the push must fail, mark nothing absurd, and
  // the trail must keep accepting further work.
  FeatureModel m = from_text("p cnf 3 2\n-1 2 0\n-1 -2 0\n");
  ClauseDatabase db(m);
  Trail t(&db);
  CHECK_FALSE(t.push_and_propagate({make_lit(0, true)}));
  CHECK_FALSE(db.unsat());
  CHECK(t.value(make_lit(0, false)) == 1);  // learned unit asserted x0 false
  CHECK(t.check_watch_invariant().empty());

  CHECK(t.push_and_propagate({make_lit(2, true)}));
  CHECK(t.has(make_lit(2, true)));
  CHECK(t.check_watch_invariant().empty());

  // Complementary literals in one call fail without corrupting anything.
  CHECK_FALSE(t.push_and_propagate({make_lit(1, true), make_lit(1, false)}));
  CHECK(t.check_watch_invariant().empty());
  CHECK(bits_match_stack(t));
}

TEST_CASE("feasibility decisions agree with exhaustive enumeration") {
  std::mt19937_64 rng(0xC0FFEE);
  int models = 0, queries = 0;
  while (models < 120) {
    FeatureModel m = random_model(rng, 3, 8, 1, 12);
    ++models;
    CAPTURE(models);
    auto valid = oracle::all_valid_configs(m);
    Engine eng(m, 17 + models);
    CHECK(eng.is_satisfiable() == !valid.empty());
    for (const Interaction &i : enumerate_candidate_interactions(m)) {
      ++queries;
      bool feasible = false;
      for (const Config &c : valid)
        if (covers(c, i)) {
          feasible = true;
          break;
        }
      auto witness = eng.decide_feasibility(i);
      CAPTURE(i.a);
      CAPTURE(i.b);
      REQUIRE(witness.has_value() == feasible);
      if (witness) {
        CHECK(satisfies(*witness, m));
        CHECK(covers(*witness, i));
      }
    }
  }
  CHECK(queries > 2000);
}

TEST_CASE("learned clauses preserve the solution set") {
  std::mt19937_64 rng(0xD1CE);
  for (int round = 0; round < 40; ++round) {
    FeatureModel m = random_model(rng, 6, 12, 6, 24, 2, 3);
    CAPTURE(round);
    Engine eng(m, 101 + round);
    // Provoke learning across the whole candidate universe.
    for (const Interaction &i : enumerate_candidate_interactions(m))
      (void)eng.decide_feasibility(i);
    std::uint64_t total = std::uint64_t(1) << m.num_features;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
      Config c(m.num_features);
      for (Feature f = 0; f < m.num_features; ++f)
        c[f] = std::uint8_t((bits >> f) & 1);
      bool original = satisfies(c, m);
      bool database = db_satisfied(eng.db(), c);
      if (original != database) {
        CAPTURE(bits);
        REQUIRE(original == database);
      }
    }
    if (eng.db().unsat()) CHECK(oracle::all_valid_configs(m).empty());
  }
}

TEST_CASE("trails sharing a database stay independent") {
  FeatureModel chain = from_text("p cnf 3 2\n-1 2 0\n-2 3 0\n");
  ClauseDatabase db(chain);
  Trail a(&db), b(&db);
  CHECK(a.push_and_propagate({make_lit(0, true)}));
  CHECK(b.push_and_propagate({make_lit(2, false)}));
  // a: x0 -> x1 -> x2 all true; b: !x2 -> !x1 -> !x0.
  for (Feature f = 0; f < 3; ++f) {
    CHECK(a.has(make_lit(f, true)));
    CHECK(b.has(make_lit(f, false)));
  }
  CHECK(a.check_watch_invariant().empty());
  CHECK(b.check_watch_invariant().empty());

  // A unit learned through one trail reaches the other lazily.
  FeatureModel contra = from_text("p cnf 2 2\n-1 2 0\n-1 -2 0\n");
  ClauseDatabase db2(contra);
  Trail c(&db2), d(&db2);
  CHECK_FALSE(c.push_and_propagate({make_lit(0, true)}));
  CHECK(c.has(make_lit(0, false)));
  // d has not synced yet; a probe forces it to pick up the learned unit.
  CHECK_FALSE(d.probe_push({make_lit(0, true)}));
  CHECK(d.has(make_lit(0, false)));
  CHECK(d.check_watch_invariant().empty());
}

TEST_CASE("probe failures restore the assignment exactly") {
  std::mt19937_64 rng(0xF00D);
  int restored = 0;
  for (int round = 0; round < 150; ++round) {
    FeatureModel m = random_model(rng, 4, 10, 3, 18);
    ClauseDatabase db(m);
    Trail t(&db);
    if (!t.push_and_propagate({random_lit(rng, m)})) continue;
    auto before_stack = t.assignment_stack();
    auto before_level = t.decision_level();
    std::vector<Lit> probe{random_lit(rng, m), random_lit(rng, m)};
    bool ok = t.probe_push(probe);
    CAPTURE(round);
    if (ok) {
      // Grow-only: everything that was there is still there, probed literals
      // hold, and nothing was learned into the database by the probe.
      for (Lit l : before_stack) CHECK(t.value(l) == 1);
      for (Lit l : probe) CHECK(t.value(l) == 1);
      CHECK(t.decision_level() >= before_level);
    } else {
      ++restored;
      CHECK(t.assignment_stack() == before_stack);
      CHECK(t.decision_level() == before_level);
      CHECK(bits_match_stack(t));
    }
    CHECK(t.check_watch_invariant().empty());
  }
  CHECK(restored > 10);
}

TEST_CASE("complete extends a consistent trail and keeps its content") {
  FeatureModel xy = from_text("p cnf 3 1\n1 2 0\n");
  ClauseDatabase db(xy);
  Trail t(&db);
  SearchHeap heap;
  std::mt19937_64 rng(7);
  REQUIRE(t.push_and_propagate({make_lit(0, false)}));  // !x forces y
  CHECK(t.has(make_lit(1, true)));
  REQUIRE(t.complete(heap, rng));
  CHECK(t.is_total());
  CHECK(t.has(make_lit(0, false)));
  CHECK(t.has(make_lit(1, true)));
  Config c = t.config();
  CHECK(satisfies(c, xy));
  // Default polarity is negative, so the free feature completes to false.
  CHECK(c[2] == 0);
  CHECK(t.check_watch_invariant().empty());
}

TEST_CASE("complete reports content losses honestly") {
  std::mt19937_64 rng(0xBEEF);
  SearchHeap heap;
  int completions = 0;
  for (int round = 0; round < 150; ++round) {
    FeatureModel m = random_model(rng, 4, 10, 3, 16, 2, 3);
    ClauseDatabase db(m);
    Trail t(&db);
    std::vector<Lit> seed{random_lit(rng, m)};
    if (!t.push_and_propagate(seed)) continue;
    auto snapshot = t.assignment_stack();
    bool kept = t.complete(heap, rng);
    CAPTURE(round);
    if (db.unsat()) continue;  // nothing to check, model collapsed
    ++completions;
    REQUIRE(t.is_total());
    Config c = t.config();
    CHECK(satisfies(c, m));
    bool actually_kept = true;
    for (Lit l : snapshot) actually_kept &= t.value(l) == 1;
    CHECK(kept == actually_kept);
    CHECK(bits_match_stack(t));
    CHECK(t.check_watch_invariant().empty());
  }
  CHECK(completions > 80);
}

TEST_CASE("watch bookkeeping survives a randomized workout") {
  std::mt19937_64 rng(20260822);
  SearchHeap heap;
  int audited = 0;
  for (int round = 0; round < 60; ++round) {
    FeatureModel m = random_model(rng, 8, 14, 10, 40, 2, 3);
    ClauseDatabase db(m);
    std::vector<Trail> trails;
    trails.reserve(3);
    for (int k = 0; k < 3; ++k) trails.emplace_back(&db);
    CAPTURE(round);
    for (int op = 0; op < 300 && !db.unsat(); ++op) {
      std::uniform_int_distribution<int> td(0, 2);
      Trail &t = trails[std::size_t(td(rng))];
      std::uniform_int_distribution<int> od(0, 9);
      int kind = od(rng);
      if (kind < 4) {
        (void)t.push_and_propagate({random_lit(rng, m), random_lit(rng, m)});
      } else if (kind < 6) {
        (void)t.probe_push({random_lit(rng, m)});
      } else if (kind < 8) {
        if (t.decision_level() > 0) {
          std::uniform_int_distribution<std::uint32_t> ld(
              0, t.decision_level() - 1);
          t.backtrack_to(ld(rng));
        }
      } else if (kind == 8) {
        (void)t.complete(heap, rng);
      } else {
        (void)t.solve({random_lit(rng, m)}, heap, rng, 50);
      }
      CAPTURE(op);
      for (Trail &each : trails) {
        std::string audit = each.check_watch_invariant();
        CHECK_MESSAGE(audit.empty(), audit);
        CHECK(bits_match_stack(each));
        ++audited;
      }
    }
  }
  CHECK(audited > 20000);
}

TEST_CASE("solve honours conflict budgets and stop flags") {
  FeatureModel php = pigeonhole(4, 3);
  {
    Engine eng(php, 5);
    SearchStatus st =
        Trail(&eng.db()).solve({}, eng.heap(), eng.rng(), /*budget=*/1);
    CHECK(st == SearchStatus::Aborted);
    CHECK_FALSE(eng.db().unsat());  // aborting proves nothing
  }
  {
    Engine eng(php, 5);
    std::atomic<bool> stop{true};
    Trail t(&eng.db());
    SearchStatus st = t.solve({}, eng.heap(), eng.rng(), 0, &stop);
    CHECK(st == SearchStatus::Aborted);
  }
  {
    Engine eng(php, 5);
    Trail t(&eng.db());
    SearchStatus st = t.solve({}, eng.heap(), eng.rng());
    CHECK(st == SearchStatus::ModelUnsat);
    CHECK(eng.db().unsat());
    CHECK_FALSE(eng.is_satisfiable());
  }
  // The satisfiable variant leaves a witness on the trail.
  FeatureModel ok = pigeonhole(3, 3);
  Engine eng(ok, 5);
  Trail t(&eng.db());
  REQUIRE(t.solve({}, eng.heap(), eng.rng()) == SearchStatus::Sat);
  CHECK(t.is_total());
  CHECK(satisfies(t.config(), ok));
}

TEST_CASE("assumptions falsified at level zero come back infeasible") {
  FeatureModel m = from_text("p cnf 2 1\n-1 0\n");
  Engine eng(m, 3);
  Trail t(&eng.db());
  CHECK(t.solve({make_lit(0, true)}, eng.heap(), eng.rng()) ==
        SearchStatus::Infeasible);
  CHECK_FALSE(eng.db().unsat());
  // Self-contradictory assumption lists are infeasible, not a model error.
  CHECK(t.solve({make_lit(1, true), make_lit(1, false)}, eng.heap(),
                eng.rng()) == SearchStatus::Infeasible);
  CHECK_FALSE(eng.db().unsat());
  // The database survives infeasible probes: a feasible query still works.
  CHECK(eng.decide_feasibility({make_lit(0, false), make_lit(1, true)})
            .has_value());
}
