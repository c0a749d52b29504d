#include "oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <cstdio>

namespace pairsamp::oracle {

namespace {

// Minimal word-array bitset, local to the oracle.
struct Bits {
  std::vector<std::uint64_t> w;

  explicit Bits(std::size_t nbits = 0) : w((nbits + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool test(std::size_t i) const {
    return (w[i >> 6] >> (i & 63)) & 1;
  }
  int count() const {
    int n = 0;
    for (auto x : w) n += __builtin_popcountll(x);
    return n;
  }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  bool intersects(const Bits &o) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] & o.w[i]) return true;
    return false;
  }
  bool subset_of(const Bits &o) const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] & ~o.w[i]) return false;
    return true;
  }
  Bits and_with(const Bits &o) const {
    Bits r;
    r.w.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & o.w[i];
    return r;
  }
  void or_with(const Bits &o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  int first() const {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i]) return int(i * 64 + __builtin_ctzll(w[i]));
    return -1;
  }
  void clear(std::size_t i) { w[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
  friend bool operator==(const Bits &a, const Bits &b) { return a.w == b.w; }
};

bool eval_clause(const Clause &c, const Config &cfg) {
  for (Lit l : c)
    if ((cfg[feature_of(l)] == 1) == is_positive(l)) return true;
  return false;
}

bool eval_model(const FeatureModel &m, const Config &cfg) {
  for (const Clause &c : m.clauses)
    if (!eval_clause(c, cfg)) return false;
  return true;
}

bool config_covers(const Config &cfg, const Interaction &i) {
  return (cfg[feature_of(i.a)] == 1) == is_positive(i.a) &&
         (cfg[feature_of(i.b)] == 1) == is_positive(i.b);
}

// UP over an explicit clause list; true iff no conflict.
bool up_ok(const std::vector<Clause> &clauses, std::uint32_t num_features,
           const std::vector<Lit> &seed) {
  std::vector<std::int8_t> val(num_features, -1);
  for (Lit l : seed) {
    std::int8_t want = is_positive(l) ? 1 : 0;
    std::int8_t &s = val[feature_of(l)];
    if (s == -1)
      s = want;
    else if (s != want)
      return false;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause &c : clauses) {
      Lit unit = 0;
      int open = 0;
      bool sat = false;
      for (Lit l : c) {
        std::int8_t v = val[feature_of(l)];
        if (v == -1) {
          ++open;
          unit = l;
          if (open > 1) break;
        } else if ((v == 1) == is_positive(l)) {
          sat = true;
          break;
        }
      }
      if (sat || open > 1) continue;
      if (open == 0) return false;
      val[feature_of(unit)] = is_positive(unit) ? 1 : 0;
      changed = true;
    }
  }
  return true;
}

std::vector<Clause> with_infeasible_binaries(const FeatureModel &m) {
  std::vector<Clause> clauses = m.clauses;
  std::vector<Config> valid;
  for (std::uint64_t x = 0; x < (std::uint64_t(1) << m.num_features); ++x) {
    Config cfg(m.num_features);
    for (Feature f = 0; f < m.num_features; ++f) cfg[f] = (x >> f) & 1;
    if (eval_model(m, cfg)) valid.push_back(std::move(cfg));
  }
  for (const Interaction &i : enumerate_candidate_interactions(m)) {
    bool feasible = false;
    for (const Config &cfg : valid)
      if (config_covers(cfg, i)) {
        feasible = true;
        break;
      }
    if (!feasible) clauses.push_back({negate_lit(i.a), negate_lit(i.b)});
  }
  return clauses;
}

// Plain branch-and-bound maximum clique over adjacency bitsets.
struct CliqueSearch {
  const std::vector<Bits> &adj;
  int best = 0;

  void expand(Bits cand, int size) {
    if (size > best) best = size;
    while (cand.any()) {
      if (size + cand.count() <= best) return;
      int v = cand.first();
      cand.clear(std::size_t(v));
      expand(cand.and_with(adj[std::size_t(v)]), size + 1);
    }
  }
};

int max_clique(const std::vector<Bits> &adj) {
  CliqueSearch s{adj};
  Bits all(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) all.set(v);
  s.expand(all, 0);
  return s.best;
}

}  // namespace

std::vector<Config> all_valid_configs(const FeatureModel &model) {
  assert(model.num_features <= 24);
  std::vector<Config> out;
  for (std::uint64_t x = 0; x < (std::uint64_t(1) << model.num_features);
       ++x) {
    Config cfg(model.num_features);
    for (Feature f = 0; f < model.num_features; ++f) cfg[f] = (x >> f) & 1;
    if (eval_model(model, cfg)) out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<Interaction> feasible_interactions(const FeatureModel &model) {
  std::vector<Config> valid = all_valid_configs(model);
  std::vector<Interaction> out;
  for (const Interaction &i : enumerate_candidate_interactions(model))
    for (const Config &cfg : valid)
      if (config_covers(cfg, i)) {
        out.push_back(i);
        break;
      }
  return out;
}

bool up_consistent(const FeatureModel &model, const std::vector<Lit> &seed) {
  return up_ok(model.clauses, model.num_features, seed);
}

bool up_conflicts(const FeatureModel &model, const Interaction &i,
                  const Interaction &j) {
  std::vector<Clause> clauses = with_infeasible_binaries(model);
  std::vector<Lit> seed{i.a, i.b, j.a, j.b};
  std::sort(seed.begin(), seed.end());
  seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
  return !up_ok(clauses, model.num_features, seed);
}

int max_up_clique(const FeatureModel &model,
                  const std::vector<Interaction> &verts) {
  std::vector<Clause> clauses = with_infeasible_binaries(model);
  std::size_t n = verts.size();
  std::vector<Bits> adj(n, Bits(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<Lit> seed{verts[a].a, verts[a].b, verts[b].a, verts[b].b};
      std::sort(seed.begin(), seed.end());
      seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
      if (!up_ok(clauses, model.num_features, seed)) {
        adj[a].set(b);
        adj[b].set(a);
      }
    }
  return max_clique(adj);
}

int max_true_exclusive_set(const FeatureModel &model,
                           const std::vector<Interaction> &verts) {
  std::vector<Config> valid = all_valid_configs(model);
  std::size_t n = verts.size();
  std::vector<Bits> covering(n, Bits(valid.size()));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t c = 0; c < valid.size(); ++c)
      if (config_covers(valid[c], verts[v])) covering[v].set(c);
  std::vector<Bits> adj(n, Bits(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!covering[a].intersects(covering[b])) {
        adj[a].set(b);
        adj[b].set(a);
      }
  return max_clique(adj);
}

int min_sample_size(const FeatureModel &model) {
  std::vector<Config> valid = all_valid_configs(model);
  if (valid.empty()) return 0;
  std::vector<Interaction> universe = feasible_interactions(model);
  std::size_t nu = universe.size();
  if (nu == 0) return 0;

  // Coverage signature per config; drop exact duplicates and dominated ones.
  std::vector<Bits> cover;
  for (const Config &cfg : valid) {
    Bits b(nu);
    for (std::size_t u = 0; u < nu; ++u)
      if (config_covers(cfg, universe[u])) b.set(u);
    cover.push_back(std::move(b));
  }
  std::vector<Bits> kept;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < cover.size() && !dominated; ++j) {
      if (i == j) continue;
      if (cover[i].subset_of(cover[j])) {
        // Strict subset is always dominated; ties keep the lower index.
        if (!(cover[j].subset_of(cover[i])) || j < i) dominated = true;
      }
    }
    if (!dominated) kept.push_back(cover[i]);
  }
  cover = std::move(kept);

  std::vector<Bits> covering(nu, Bits(cover.size()));
  for (std::size_t c = 0; c < cover.size(); ++c)
    for (std::size_t u = 0; u < nu; ++u)
      if (cover[c].test(u)) covering[u].set(c);
  for (std::size_t u = 0; u < nu; ++u) assert(covering[u].any());

  // Greedy cover for the initial upper bound.
  int best;
  {
    Bits done(nu);
    best = 0;
    while (done.count() < int(nu)) {
      std::size_t pick = 0;
      int gain = -1;
      for (std::size_t c = 0; c < cover.size(); ++c) {
        int g = 0;
        for (std::size_t u = 0; u < nu; ++u)
          if (cover[c].test(u) && !done.test(u)) ++g;
        if (g > gain) {
          gain = g;
          pick = c;
        }
      }
      done.or_with(cover[pick]);
      ++best;
    }
  }

  // Greedy anti-chain of pairwise non-co-coverable interactions.
  auto lower_bound = [&](const Bits &done) {
    std::vector<std::size_t> chosen;
    for (std::size_t u = 0; u < nu; ++u) {
      if (done.test(u)) continue;
      bool ok = true;
      for (std::size_t v : chosen)
        if (covering[u].intersects(covering[v])) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(u);
    }
    return int(chosen.size());
  };

  std::uint64_t nodes = 0;
  auto dfs = [&](auto &&self, const Bits &done, int depth) -> void {
    if (++nodes > 200000000ull) {
      std::fprintf(stderr, "oracle: set cover search exploded\n");
      std::abort();
    }
    if (done.count() == int(nu)) {
      if (depth < best) best = depth;
      return;
    }
    if (depth + lower_bound(done) >= best) return;
    // Branch on the uncovered interaction with fewest covering configs.
    std::size_t pivot = nu;
    int fewest = -1;
    for (std::size_t u = 0; u < nu; ++u) {
      if (done.test(u)) continue;
      int k = covering[u].count();
      if (fewest < 0 || k < fewest) {
        fewest = k;
        pivot = u;
      }
    }
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t c = 0; c < cover.size(); ++c) {
      if (!cover[c].test(pivot)) continue;
      int g = 0;
      for (std::size_t u = 0; u < nu; ++u)
        if (cover[c].test(u) && !done.test(u)) ++g;
      order.push_back({-g, c});
    }
    std::sort(order.begin(), order.end());
    for (auto [negg, c] : order) {
      Bits next = done;
      next.or_with(cover[c]);
      self(self, next, depth + 1);
    }
  };
  dfs(dfs, Bits(nu), 0);
  return best;
}

}  // namespace pairsamp::oracle
