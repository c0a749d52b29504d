#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace pairsamp {

// Linear program in packing form:
//   maximize cᵀx  subject to  Ax ≤ b,  0 ≤ x ≤ u,
// with b ≥ 0 (so the slack basis is primal feasible) and per-variable upper
// bounds that may be +infinity.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;  // c, one entry per variable
  std::vector<double> upper;      // u, one entry per variable, inf allowed
  // One row per constraint, as sparse (column, coefficient) entries.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  std::vector<double> rhs;  // b, one entry per row, all >= 0
};

struct LpSolution {
  std::vector<double> x;     // primal values, one per variable
  std::vector<double> dual;  // row multipliers y >= 0 at optimality
  double objective = 0.0;
};

enum class LpStatus { Optimal, Unbounded, IterationLimit };

// Backend contract: on Optimal, the returned primal and dual satisfy strong
// duality within 1e-6 (cᵀx = bᵀy + Σ_j max(c_j − yᵀA_j, 0)·u_j over the
// finite upper bounds).
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpStatus solve(const LpProblem &problem, LpSolution &out) = 0;
};

// Self-contained dense bounded revised simplex: explicit basis inverse,
// Dantzig pricing with a Bland fallback against cycling, and periodic
// refactorization. Suitable for the desk-scale relaxations built here.
std::unique_ptr<LpBackend> make_dense_simplex();

}  // namespace pairsamp
