#include "pairsamp/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace pairsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEnterTol = 1e-9;  // reduced cost must beat this to enter
constexpr double kPivotTol = 1e-10; // smallest usable pivot magnitude
constexpr double kDegenTol = 1e-9;  // step lengths below this are degenerate

// Variables 0..n-1 are structural with bounds [0, u_j]; n..n+m-1 are the
// slacks of the ≤ rows, in [0, inf). States: 0 nonbasic at lower, 1 nonbasic
// at upper, 2 basic. The slack basis is feasible because b ≥ 0.
class DenseSimplex final : public LpBackend {
 public:
  LpStatus solve(const LpProblem &p, LpSolution &out) override {
    n_ = p.num_vars;
    m_ = p.rows.size();
    const std::size_t N = n_ + m_;
    assert(p.objective.size() == n_);
    assert(p.upper.size() == n_);
    assert(p.rhs.size() == m_);
    cols_.assign(n_, {});
    for (auto &c : cols_) c.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      assert(p.rhs[r] >= 0.0);
      for (const auto &[j, a] : p.rows[r]) cols_[j][r] += a;
    }
    p_ = &p;

    val_.assign(N, 0.0);
    state_.assign(N, 0);
    basic_.resize(m_);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      basic_[r] = std::uint32_t(n_ + r);
      state_[n_ + r] = 2;
      val_[n_ + r] = p.rhs[r];
      binv_[r * m_ + r] = 1.0;
    }

    std::vector<double> y(m_), w(m_);
    const std::size_t max_iters = 10000 + 50 * N;
    std::size_t pivots = 0;
    int degen_run = 0;
    bool bland = false;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      compute_duals(y);

      // Entering variable: at-lower with positive reduced cost, or at-upper
      // with negative. Dantzig by default, first-index under Bland.
      std::size_t e = N;
      double best_score = kEnterTol;
      int e_dir = 0;
      for (std::size_t j = 0; j < N; ++j) {
        if (state_[j] == 2) continue;
        const double d = reduced_cost(j, y);
        double score;
        int dir;
        if (state_[j] == 0 && d > kEnterTol) {
          score = d;
          dir = +1;
        } else if (state_[j] == 1 && d < -kEnterTol) {
          score = -d;
          dir = -1;
        } else {
          continue;
        }
        if (bland) {
          e = j;
          e_dir = dir;
          break;
        }
        if (score > best_score) {
          best_score = score;
          e = j;
          e_dir = dir;
        }
      }
      if (e == N) {
        extract(out, y);
        return LpStatus::Optimal;
      }

      column_times_binv(e, w);

      // Ratio test: the entering variable moves by t in direction e_dir.
      double t = upper(e) < kInf ? upper(e) : kInf;  // full bound flip
      std::ptrdiff_t leave = -1;
      bool leave_at_upper = false;
      double leave_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double delta = e_dir * w[i];  // basic i moves by -delta * t
        const std::uint32_t bi = basic_[i];
        double lim;
        bool at_upper;
        if (delta > kPivotTol) {
          lim = val_[bi] / delta;  // hits its lower bound 0
          at_upper = false;
        } else if (delta < -kPivotTol && upper(bi) < kInf) {
          lim = (upper(bi) - val_[bi]) / (-delta);
          at_upper = true;
        } else {
          continue;
        }
        if (lim < 0.0) lim = 0.0;  // numerical guard on degenerate bases
        bool take;
        if (lim < t - 1e-12) {
          take = true;
        } else if (lim < t + 1e-12 && leave >= 0) {
          // Tie: prefer the larger pivot for stability (lowest variable
          // index under Bland).
          take = bland ? bi < basic_[std::size_t(leave)]
                       : std::abs(w[i]) > std::abs(leave_pivot);
        } else {
          take = false;
        }
        if (take) {
          t = std::min(t, lim);
          leave = std::ptrdiff_t(i);
          leave_at_upper = at_upper;
          leave_pivot = w[i];
        }
      }
      if (t == kInf) return LpStatus::Unbounded;

      degen_run = t < kDegenTol ? degen_run + 1 : 0;
      if (degen_run > 200) bland = true;
      if (degen_run == 0) bland = false;

      for (std::size_t i = 0; i < m_; ++i) val_[basic_[i]] -= t * e_dir * w[i];
      if (leave < 0) {
        // Bound flip: e traverses its whole range, basis unchanged.
        val_[e] = state_[e] == 0 ? upper(e) : 0.0;
        state_[e] ^= 1;
        continue;
      }
      val_[e] = (state_[e] == 0 ? 0.0 : upper(e)) + e_dir * t;
      const std::uint32_t l = basic_[std::size_t(leave)];
      val_[l] = leave_at_upper ? upper(l) : 0.0;  // snap exactly
      state_[l] = leave_at_upper ? 1 : 0;
      state_[e] = 2;
      basic_[std::size_t(leave)] = std::uint32_t(e);

      // Pivot the explicit inverse on row `leave`.
      const std::size_t r = std::size_t(leave);
      const double piv = w[r];
      assert(std::abs(piv) > kPivotTol);
      double *rowr = &binv_[r * m_];
      for (std::size_t k = 0; k < m_; ++k) rowr[k] /= piv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == r) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double *rowi = &binv_[i * m_];
        for (std::size_t k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
      }
      if (++pivots % 128 == 0) refactor();
    }
    return LpStatus::IterationLimit;
  }

 private:
  double upper(std::size_t j) const {
    return j < n_ ? p_->upper[j] : kInf;
  }
  double cost(std::size_t j) const {
    return j < n_ ? p_->objective[j] : 0.0;
  }

  void compute_duals(std::vector<double> &y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double cb = cost(basic_[k]);
      if (cb == 0.0) continue;
      const double *rowk = &binv_[k * m_];
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * rowk[i];
    }
  }

  double reduced_cost(std::size_t j, const std::vector<double> &y) const {
    if (j >= n_) return -y[j - n_];
    double dot = 0.0;
    const std::vector<double> &aj = cols_[j];
    for (std::size_t i = 0; i < m_; ++i) dot += y[i] * aj[i];
    return p_->objective[j] - dot;
  }

  void column_times_binv(std::size_t j, std::vector<double> &w) const {
    if (j >= n_) {
      const std::size_t s = j - n_;
      for (std::size_t i = 0; i < m_; ++i) w[i] = binv_[i * m_ + s];
      return;
    }
    const std::vector<double> &aj = cols_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double *rowi = &binv_[i * m_];
      double dot = 0.0;
      for (std::size_t k = 0; k < m_; ++k) dot += rowi[k] * aj[k];
      w[i] = dot;
    }
  }

  // Rebuilds the inverse from the basis columns by Gauss-Jordan with partial
  // pivoting, then recomputes the basic values from the nonbasic ones to
  // shed accumulated drift.
  void refactor() {
    std::vector<double> mat(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      const std::uint32_t j = basic_[c];
      if (j >= n_) {
        mat[(j - n_) * m_ + c] = 1.0;
      } else {
        for (std::size_t r = 0; r < m_; ++r) mat[r * m_ + c] = cols_[j][r];
      }
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(mat[r * m_ + c]) > std::abs(mat[piv * m_ + c])) piv = r;
      if (piv != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(mat[piv * m_ + k], mat[c * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
        }
      }
      const double d = mat[c * m_ + c];
      assert(std::abs(d) > 1e-12);
      for (std::size_t k = 0; k < m_; ++k) {
        mat[c * m_ + k] /= d;
        inv[c * m_ + k] /= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = mat[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          mat[r * m_ + k] -= f * mat[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);

    std::vector<double> rhs = p_->rhs;
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == 2 || val_[j] == 0.0) continue;
      for (std::size_t r = 0; r < m_; ++r) rhs[r] -= cols_[j][r] * val_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const double *rowi = &binv_[i * m_];
      double dot = 0.0;
      for (std::size_t k = 0; k < m_; ++k) dot += rowi[k] * rhs[k];
      val_[basic_[i]] = dot;
    }
  }

  void extract(LpSolution &out, std::vector<double> &y) const {
    out.x.assign(val_.begin(), val_.begin() + std::ptrdiff_t(n_));
    out.dual.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.dual[i] = std::max(y[i], 0.0);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += p_->objective[j] * out.x[j];
    out.objective = obj;
  }

  const LpProblem *p_ = nullptr;
  std::size_t n_ = 0, m_ = 0;
  std::vector<std::vector<double>> cols_;  // dense structural columns
  std::vector<double> val_;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint32_t> basic_;
  std::vector<double> binv_;  // row-major m x m
};

}  // namespace

std::unique_ptr<LpBackend> make_dense_simplex() {
  return std::make_unique<DenseSimplex>();
}

}  // namespace pairsamp
