// Scratch utility: prints oracle values for the fixture models so expected
// constants in the test suite can be frozen (and later re-derived on demand).

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

#include "oracle.hpp"

using namespace pairsamp;

namespace {

FeatureModel from_text(const std::string &text) {
  FeatureModel m;
  std::string err;
  std::istringstream in(text);
  if (!parse_dimacs(in, m, err)) {
    std::fprintf(stderr, "parse error: %s\n", err.c_str());
    std::exit(1);
  }
  return m;
}

void report(const char *name, const FeatureModel &m) {
  auto valid = oracle::all_valid_configs(m);
  auto feas = oracle::feasible_interactions(m);
  int min_sample = oracle::min_sample_size(m);
  int up_clique = oracle::max_up_clique(m, feas);
  int true_excl = oracle::max_true_exclusive_set(m, feas);
  std::printf(
      "%-24s valid=%zu universe=%llu feasible=%zu min_sample=%d "
      "up_clique=%d true_exclusive=%d\n",
      name, valid.size(),
      (unsigned long long)candidate_universe_size(m), feas.size(), min_sample,
      up_clique, true_excl);
}

}  // namespace

int main() {
  FeatureModel xy = from_text("p cnf 3 1\n1 2 0\n");
  report("xy_or", xy);

  // The documented 5-config optimum for the xy model.
  std::vector<Config> sample{{1, 1, 1}, {1, 0, 0}, {1, 0, 1},
                             {0, 1, 0}, {0, 1, 1}};
  {
    auto feas = oracle::feasible_interactions(xy);
    std::size_t covered = 0;
    for (const Interaction &i : feas)
      for (const Config &c : sample)
        if (covers(c, i)) {
          ++covered;
          break;
        }
    bool all_valid = true;
    for (const Config &c : sample) all_valid &= satisfies(c, xy);
    std::printf("xy_or 5-config sample: valid=%d covered=%zu of %zu\n",
                all_valid, covered, feas.size());
  }

  report("free2", from_text("p cnf 2 0\n"));
  report("free5", from_text("p cnf 5 0\n"));
  report("chain3", from_text("p cnf 3 2\n-1 2 0\n-2 3 0\n"));
  report("atmost2of3", from_text("p cnf 3 1\n-1 -2 -3 0\n"));

  // Random corpus dry run matching the planned acceptance generator.
  std::mt19937_64 rng(20260822);
  auto t0 = std::chrono::steady_clock::now();
  int built = 0, sat_count = 0;
  long long sum_min = 0;
  int max_min = 0;
  int gap_instances = 0;
  while (sat_count < 40) {
    ++built;
    std::uniform_int_distribution<int> nf(3, 10);
    int n = nf(rng);
    std::uniform_int_distribution<int> nc(1, 15);
    int m = nc(rng);
    FeatureModel fm;
    fm.num_features = std::uint32_t(n);
    for (int c = 0; c < m; ++c) {
      std::uniform_int_distribution<int> len_d(1, 3);
      int len = len_d(rng);
      Clause cl;
      for (int k = 0; k < len; ++k) {
        std::uniform_int_distribution<int> fd(0, n - 1);
        std::uniform_int_distribution<int> pd(0, 1);
        cl.push_back(make_lit(Feature(fd(rng)), pd(rng) == 0));
      }
      fm.clauses.push_back(cl);
    }
    std::uniform_int_distribution<int> kd(2, n);
    int k = kd(rng);
    fm.concrete.assign(std::size_t(n), 0);
    std::vector<Feature> perm;
    for (int f = 0; f < n; ++f) perm.push_back(Feature(f));
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int f = 0; f < k; ++f) fm.concrete[perm[std::size_t(f)]] = 1;

    if (oracle::all_valid_configs(fm).empty()) continue;
    ++sat_count;
    int ms = oracle::min_sample_size(fm);
    auto feas = oracle::feasible_interactions(fm);
    int clique = oracle::max_up_clique(fm, feas);
    sum_min += ms;
    if (ms > max_min) max_min = ms;
    if (clique < ms) ++gap_instances;
  }
  auto t1 = std::chrono::steady_clock::now();
  std::printf(
      "random dry run: built=%d satisfiable=%d mean_min=%.2f max_min=%d "
      "clique_lt_opt=%d elapsed=%.2fs\n",
      built, sat_count, double(sum_min) / sat_count, max_min, gap_instances,
      std::chrono::duration<double>(t1 - t0).count());
  return 0;
}
