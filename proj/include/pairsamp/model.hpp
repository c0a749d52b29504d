#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pairsamp {

// Literal encoding: feature f asserted positively is 2*f, negated is 2*f+1.
// Feature indices are 0-based internally; DIMACS input/output is 1-based.
using Lit = std::uint32_t;
using Feature = std::uint32_t;

constexpr Lit make_lit(Feature f, bool positive) {
  return 2 * f + (positive ? 0u : 1u);
}
constexpr Feature feature_of(Lit l) { return l >> 1; }
constexpr bool is_positive(Lit l) { return (l & 1u) == 0; }
constexpr Lit negate_lit(Lit l) { return l ^ 1u; }

int lit_to_dimacs(Lit l);

using Clause = std::vector<Lit>;

// A pair of literals over two distinct features, feature_of(a) < feature_of(b).
struct Interaction {
  Lit a;
  Lit b;

  friend bool operator==(const Interaction &x, const Interaction &y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const Interaction &x, const Interaction &y) {
    return !(x == y);
  }
  friend bool operator<(const Interaction &x, const Interaction &y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  }
};

Interaction make_interaction(Lit x, Lit y);

struct InteractionHash {
  std::size_t operator()(const Interaction &i) const {
    std::uint64_t k = (std::uint64_t(i.a) << 32) | i.b;
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return std::size_t(k);
  }
};

// Total assignment, one byte per feature, 0 = false, 1 = true.
using Config = std::vector<std::uint8_t>;
using Sample = std::vector<Config>;

struct FeatureModel {
  std::uint32_t num_features = 0;
  std::vector<Clause> clauses;
  std::vector<std::uint8_t> concrete;  // per feature, 1 = interaction-relevant

  bool is_concrete(Feature f) const { return concrete[f] != 0; }
  std::uint32_t concrete_count() const;
  std::vector<Feature> concrete_features() const;
};

// DIMACS CNF with optional "c concrete <1-based ids...>" comment lines
// (repeatable). Without any such line every feature is concrete. Tautologies
// are dropped, duplicate literals within a clause are deduplicated.
bool parse_dimacs(std::istream &in, FeatureModel &out, std::string &err);
bool parse_dimacs_file(const std::string &path, FeatureModel &out,
                       std::string &err);

// Newline/whitespace separated 1-based feature ids; replaces any concrete
// declaration picked up from the DIMACS input.
bool load_concrete_sidecar(std::istream &in, FeatureModel &model,
                           std::string &err);
bool load_concrete_sidecar_file(const std::string &path, FeatureModel &model,
                                std::string &err);

// Unit propagation closure of `seed` over the model's clauses. Returns the
// closure (seed literals included, ascending, duplicate-free), or nullopt on
// conflict. Straightforward reference implementation; the trail engine has
// its own watched-literal one.
std::optional<std::vector<Lit>> unit_propagate(const FeatureModel &model,
                                               const std::vector<Lit> &seed);

// All 4 * C(k,2) candidate interactions over the k concrete features, in
// canonical order (a ascending, then b).
std::vector<Interaction> enumerate_candidate_interactions(
    const FeatureModel &model);

std::uint64_t candidate_universe_size(const FeatureModel &model);

bool covers(const Config &config, const Interaction &i);
bool satisfies(const Config &config, const FeatureModel &model);

}  // namespace pairsamp
