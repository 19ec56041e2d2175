#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "elicit/scalar.hpp"

namespace elicit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Scalar value{0};
  Vector<Scalar> x;
};

/// Dense two-phase simplex for  max c^T x  s.t.  A x <= b, x >= 0.
///
/// Tableau layout follows the usual dictionary form: rows 0..m-1 are
/// constraints, row m the objective, row m+1 the phase-one objective; column
/// n is the artificial variable and column n+1 the right-hand side. Entering
/// and leaving variables follow Bland's rule, so the method terminates in
/// exact arithmetic.
template <typename Scalar>
class Simplex {
 public:
  Simplex(const Matrix<Scalar>& A, const Vector<Scalar>& b, const Vector<Scalar>& c)
      : m_(A.rows()), n_(A.cols()), N_(n_ + 1), B_(m_), D_(Matrix<Scalar>::Zero(m_ + 2, n_ + 2)) {
    if (b.size() != m_ || c.size() != n_) throw std::invalid_argument("simplex: dimension mismatch");
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < n_; ++j) D_(i, j) = A(i, j);
      B_[i] = n_ + i;
      D_(i, n_) = Scalar(-1);
      D_(i, n_ + 1) = b(i);
    }
    for (Index j = 0; j < n_; ++j) {
      N_[j] = j;
      D_(m_, j) = -c(j);
    }
    N_[n_] = -1;
    D_(m_ + 1, n_) = Scalar(1);
  }

  LpResult<Scalar> solve() {
    LpResult<Scalar> out;
    out.x = Vector<Scalar>::Zero(n_);
    if (m_ > 0) {
      Index r = 0;
      for (Index i = 1; i < m_; ++i) {
        if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
      }
      if (D_(r, n_ + 1) < -eps()) {
        pivot(r, n_);
        if (!run(2) || D_(m_ + 1, n_ + 1) < -eps()) {
          out.status = LpStatus::Infeasible;
          return out;
        }
        for (Index i = 0; i < m_; ++i) {
          if (B_[i] != -1) continue;
          // Drive the artificial variable out with any nonzero pivot.
          Index s = -1;
          for (Index j = 0; j <= n_; ++j) {
            if (abs_value<Scalar>(D_(i, j)) > eps() && (s == -1 || N_[j] < N_[s])) s = j;
          }
          if (s != -1) pivot(i, s);
        }
      }
    }
    const bool bounded = run(1);
    for (Index i = 0; i < m_; ++i) {
      if (B_[i] >= 0 && B_[i] < n_) out.x(B_[i]) = D_(i, n_ + 1);
    }
    out.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
    out.value = D_(m_, n_ + 1);
    return out;
  }

  /// Pivot count so far (diagnostics).
  long pivots() const { return pivots_; }

 private:
  static Scalar eps() {
    if constexpr (ScalarTraits<Scalar>::exact) {
      return Scalar(0);
    } else {
      return 1e-9;
    }
  }

  void pivot(Index r, Index s) {
    ++pivots_;
    const Scalar inv = Scalar(1) / D_(r, s);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      if (abs_value<Scalar>(D_(i, s)) <= eps()) {
        D_(i, s) = -D_(i, s) * inv;
        continue;
      }
      const Scalar inv2 = D_(i, s) * inv;
      for (Index j = 0; j < n_ + 2; ++j) {
        if (j != s && D_(r, j) != Scalar(0)) D_(i, j) -= D_(r, j) * inv2;
      }
      D_(i, s) = -inv2;
    }
    for (Index j = 0; j < n_ + 2; ++j) {
      if (j != s) D_(r, j) *= inv;
    }
    D_(r, s) = inv;
    std::swap(B_[r], N_[s]);
  }

  // Phase 1 optimizes row m (the real objective), phase 2 row m+1.
  bool run(int phase) {
    const Index x = m_ + phase - 1;
    for (;;) {
      if (pivots_ > kMaxPivots) throw std::runtime_error("simplex pivot limit exceeded");
      Index s = -1;
      for (Index j = 0; j <= n_; ++j) {
        if (N_[j] == -phase) continue;
        if (D_(x, j) < -eps() && (s == -1 || N_[j] < N_[s])) s = j;
      }
      if (s == -1) return true;
      Index r = -1;
      Scalar best{0};
      for (Index i = 0; i < m_; ++i) {
        if (D_(i, s) <= eps()) continue;
        const Scalar ratio_i = D_(i, n_ + 1) / D_(i, s);
        if (r == -1 || ratio_i < best || (ratio_i == best && B_[i] < B_[r])) {
          r = i;
          best = ratio_i;
        }
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  static constexpr long kMaxPivots = 1'000'000;

  Index m_;
  Index n_;
  std::vector<Index> N_;
  std::vector<Index> B_;
  Matrix<Scalar> D_;
  long pivots_ = 0;
};

template <typename Scalar>
LpResult<Scalar> maximize(const Matrix<Scalar>& A, const Vector<Scalar>& b, const Vector<Scalar>& c) {
  return Simplex<Scalar>(A, b, c).solve();
}

}  // namespace elicit
