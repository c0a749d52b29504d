#include "pairsamp/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pairsamp {

int lit_to_dimacs(Lit l) {
  int v = int(feature_of(l)) + 1;
  return is_positive(l) ? v : -v;
}

Interaction make_interaction(Lit x, Lit y) {
  if (feature_of(x) > feature_of(y)) std::swap(x, y);
  return Interaction{x, y};
}

std::uint32_t FeatureModel::concrete_count() const {
  std::uint32_t n = 0;
  for (auto c : concrete) n += c != 0;
  return n;
}

std::vector<Feature> FeatureModel::concrete_features() const {
  std::vector<Feature> out;
  for (Feature f = 0; f < num_features; ++f)
    if (concrete[f]) out.push_back(f);
  return out;
}

namespace {

bool fail(std::string &err, const std::string &msg) {
  err = msg;
  return false;
}

// Sorts, deduplicates, reports tautology (both polarities of a feature).
bool normalize_clause(Clause &c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (feature_of(c[i - 1]) == feature_of(c[i])) return false;
  return true;
}

}  // namespace

bool parse_dimacs(std::istream &in, FeatureModel &out, std::string &err) {
  out = FeatureModel{};
  bool header_seen = false;
  std::int64_t declared_clauses = 0;
  std::int64_t terminated_clauses = 0;
  std::vector<std::int64_t> concrete_ids;
  bool concrete_declared = false;
  Clause current;
  bool in_clause = false;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (first == "c") {
      std::string tag;
      if (ls >> tag && tag == "concrete") {
        concrete_declared = true;
        std::int64_t id;
        while (ls >> id) concrete_ids.push_back(id);
        if (!ls.eof())
          return fail(err, "line " + std::to_string(lineno) +
                               ": malformed concrete id");
      }
      continue;
    }
    if (first[0] == 'c') continue;  // comment without separating space
    if (first == "p") {
      std::string fmt;
      std::int64_t nvars = -1, nclauses = -1;
      if (header_seen)
        return fail(err, "line " + std::to_string(lineno) +
                             ": duplicate problem header");
      if (!(ls >> fmt >> nvars >> nclauses) || fmt != "cnf" || nvars < 0 ||
          nclauses < 0)
        return fail(err, "line " + std::to_string(lineno) +
                             ": malformed problem header");
      std::string extra;
      if (ls >> extra)
        return fail(err, "line " + std::to_string(lineno) +
                             ": trailing tokens in problem header");
      if (nvars == 0)
        return fail(err, "line " + std::to_string(lineno) +
                             ": model declares zero features");
      header_seen = true;
      out.num_features = std::uint32_t(nvars);
      declared_clauses = nclauses;
      continue;
    }
    if (!header_seen)
      return fail(err, "line " + std::to_string(lineno) +
                           ": clause data before problem header");
    // Clause tokens; clauses may span lines, 0 terminates.
    ls.clear();
    ls.str(line);
    std::int64_t v;
    while (ls >> v) {
      if (v == 0) {
        ++terminated_clauses;
        if (normalize_clause(current)) out.clauses.push_back(current);
        current.clear();
        in_clause = false;
        continue;
      }
      std::int64_t a = v < 0 ? -v : v;
      if (a > std::int64_t(out.num_features))
        return fail(err, "line " + std::to_string(lineno) + ": literal " +
                             std::to_string(v) + " out of range");
      current.push_back(make_lit(Feature(a - 1), v > 0));
      in_clause = true;
    }
    if (!ls.eof())
      return fail(err,
                  "line " + std::to_string(lineno) + ": malformed literal");
  }

  if (!header_seen) return fail(err, "missing problem header");
  if (in_clause) return fail(err, "unterminated clause at end of input");
  // Dropped tautologies still count against the header total.
  if (terminated_clauses != declared_clauses)
    return fail(err, "header declares " + std::to_string(declared_clauses) +
                         " clauses, found " +
                         std::to_string(terminated_clauses));

  out.concrete.assign(out.num_features, concrete_declared ? 0 : 1);
  for (auto id : concrete_ids) {
    if (id < 1 || id > std::int64_t(out.num_features))
      return fail(err, "concrete id " + std::to_string(id) + " out of range");
    out.concrete[std::size_t(id - 1)] = 1;  // duplicates are harmless
  }
  return true;
}

bool parse_dimacs_file(const std::string &path, FeatureModel &out,
                       std::string &err) {
  std::ifstream in(path);
  if (!in) return fail(err, "cannot open " + path);
  return parse_dimacs(in, out, err);
}

bool load_concrete_sidecar(std::istream &in, FeatureModel &model,
                           std::string &err) {
  std::vector<std::uint8_t> fresh(model.num_features, 0);
  std::int64_t id;
  while (in >> id) {
    if (id < 1 || id > std::int64_t(model.num_features))
      return fail(err, "concrete id " + std::to_string(id) + " out of range");
    fresh[std::size_t(id - 1)] = 1;
  }
  if (!in.eof()) return fail(err, "malformed concrete id list");
  model.concrete = std::move(fresh);
  return true;
}

bool load_concrete_sidecar_file(const std::string &path, FeatureModel &model,
                                std::string &err) {
  std::ifstream in(path);
  if (!in) return fail(err, "cannot open " + path);
  return load_concrete_sidecar(in, model, err);
}

std::optional<std::vector<Lit>> unit_propagate(const FeatureModel &model,
                                               const std::vector<Lit> &seed) {
  // -1 unassigned, else 0/1 per feature.
  std::vector<std::int8_t> val(model.num_features, -1);
  auto assign = [&](Lit l) -> bool {
    std::int8_t want = is_positive(l) ? 1 : 0;
    std::int8_t &slot = val[feature_of(l)];
    if (slot == -1) {
      slot = want;
      return true;
    }
    return slot == want;
  };
  for (Lit l : seed)
    if (!assign(l)) return std::nullopt;

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause &c : model.clauses) {
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
      if (open == 0) return std::nullopt;  // clause falsified
      assign(unit);
      changed = true;
    }
  }

  std::vector<Lit> out;
  for (Feature f = 0; f < model.num_features; ++f)
    if (val[f] != -1) out.push_back(make_lit(f, val[f] == 1));
  return out;
}

std::vector<Interaction> enumerate_candidate_interactions(
    const FeatureModel &model) {
  std::vector<Feature> cf = model.concrete_features();
  std::vector<Interaction> out;
  out.reserve(cf.size() * (cf.size() ? cf.size() - 1 : 0) * 2);
  for (std::size_t i = 0; i < cf.size(); ++i)
    for (std::size_t j = i + 1; j < cf.size(); ++j)
      for (int pa = 0; pa < 2; ++pa)
        for (int pb = 0; pb < 2; ++pb)
          out.push_back(Interaction{make_lit(cf[i], pa == 0),
                                    make_lit(cf[j], pb == 0)});
  return out;
}

std::uint64_t candidate_universe_size(const FeatureModel &model) {
  std::uint64_t k = model.concrete_count();
  return k < 2 ? 0 : 2 * k * (k - 1);
}

bool covers(const Config &config, const Interaction &i) {
  return (config[feature_of(i.a)] == 1) == is_positive(i.a) &&
         (config[feature_of(i.b)] == 1) == is_positive(i.b);
}

bool satisfies(const Config &config, const FeatureModel &model) {
  for (const Clause &c : model.clauses) {
    bool sat = false;
    for (Lit l : c)
      if ((config[feature_of(l)] == 1) == is_positive(l)) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

}  // namespace pairsamp
