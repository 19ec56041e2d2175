#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elicit/errors.hpp"
#include "elicit/instance.hpp"
#include "elicit/oracle.hpp"
#include "elicit/query.hpp"
#include "elicit/simplex.hpp"

namespace elicit {

/// Gap vectors in [0, 1]^n consistent with recorded oracle responses:
/// c . g >= 0 when r = 1 and c . g < 0 when r = 0. LP forms use the closure
/// (c . g <= 0); the true gaps satisfy the strict system, so the set is
/// nonempty and every supremum over it equals the maximum over the closure.
template <typename Scalar>
class ConsistentPolytope {
 public:
  ConsistentPolytope() = default;
  ConsistentPolytope(Index dim, std::vector<Labeling> coeffs, std::vector<int> responses)
      : dim_(dim), coeffs_(std::move(coeffs)), responses_(std::move(responses)) {
    if (coeffs_.size() != responses_.size()) throw std::invalid_argument("constraint/response mismatch");
    for (const auto& c : coeffs_) {
      if (c.size() != dim_) throw std::invalid_argument("constraint dimension mismatch");
    }
  }

  Index dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<Labeling>& coefficients() const { return coeffs_; }
  const std::vector<int>& responses() const { return responses_; }
  /// Membership in the closure.
  bool contains(const Vector<Scalar>& g) const {
    if (g.size() != dim_) return false;
    for (Index i = 0; i < dim_; ++i) {
      if (g(i) < Scalar(0) || g(i) > Scalar(1)) return false;
    }
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      const Scalar s = dot(coeffs_[j], g);
      if (responses_[j] == 1 ? s < Scalar(0) : s > Scalar(0)) return false;
    }
    return true;
  }

  /// Membership under the exact response semantics I[c . g >= 0] = r.
  bool consistent(const Vector<Scalar>& g) const {
    if (g.size() != dim_) return false;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if ((dot(coeffs_[j], g) >= Scalar(0) ? 1 : 0) != responses_[j]) return false;
    }
    return true;
  }

  /// Rows (A, b) of A g <= b for the LP form: one row per distinct primitive
  /// constraint direction, then the box rows g_i <= 1.
  std::pair<Matrix<Scalar>, Vector<Scalar>> lp_rows() const {
    const auto rows = primitive_rows();
    const Index m = static_cast<Index>(rows.size()) + dim_;
    Matrix<Scalar> A = Matrix<Scalar>::Zero(m, dim_);
    Vector<Scalar> b = Vector<Scalar>::Zero(m);
    Index r = 0;
    for (const auto& [c, resp] : rows) {
      for (Index i = 0; i < dim_; ++i) A(r, i) = Scalar(resp == 1 ? -c(i) : c(i));
      ++r;
    }
    for (Index i = 0; i < dim_; ++i, ++r) {
      A(r, i) = Scalar(1);
      b(r) = Scalar(1);
    }
    return {std::move(A), std::move(b)};
  }

  /// Aligned with lp_rows(): true for rows that are strict in the original
  /// system (response 0).
  std::vector<bool> strict_rows() const {
    const auto rows = primitive_rows();
    std::vector<bool> out;
    for (const auto& row : rows) out.push_back(row.second == 0);
    out.resize(rows.size() + static_cast<std::size_t>(dim_), false);
    return out;
  }

  template <typename To>
  ConsistentPolytope<To> cast() const {
    return ConsistentPolytope<To>(dim_, coeffs_, responses_);
  }

 private:
  std::vector<std::pair<Labeling, int>> primitive_rows() const {
    std::vector<std::pair<Labeling, int>> rows;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      Labeling c = coeffs_[j];
      int d = 0;
      for (Index i = 0; i < c.size(); ++i) d = std::gcd(d, std::abs(c(i)));
      if (d > 1) c /= d;
      std::pair<Labeling, int> row{c, responses_[j]};
      if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(std::move(row));
    }
    return rows;
  }

  static Scalar dot(const Labeling& c, const Vector<Scalar>& g) {
    Scalar s(0);
    for (Index i = 0; i < c.size(); ++i) {
      if (c(i) != 0) s += Scalar(c(i)) * g(i);
    }
    return s;
  }

  Index dim_ = 0;
  std::vector<Labeling> coeffs_;
  std::vector<int> responses_;
};

/// Asks every canonical reduced query of order <= k through a noiseless
/// oracle (charged to robust-enumeration) and records the responses.
template <typename Scalar>
ConsistentPolytope<Scalar> build_polytope(ComparisonOracle<Scalar>& oracle,
                                          std::size_t cap = kDefaultEnumerationCap) {
  const auto& inst = oracle.instance();
  if (oracle.noise_bound() > 0.0) throw std::invalid_argument("polytope construction needs a noiseless oracle");
  for (Index i = 0; i < inst.size(); ++i) {
    if (inst.gaps()(i) == Scalar(0)) {
      throw std::invalid_argument("point " + std::to_string(i) +
                                  " has zero gap; its label is not pinned by comparisons");
    }
  }
  auto coeffs = enumerate_reduced_queries(inst.size(), oracle.k(), cap);
  std::vector<int> responses;
  responses.reserve(coeffs.size());
  for (const Labeling& c : coeffs) {
    responses.push_back(oracle.answer(Query::from_coefficients(c, inst.labels()), Phase::RobustEnumeration));
  }
  return ConsistentPolytope<Scalar>(inst.size(), std::move(coeffs), std::move(responses));
}

/// Convenience overload with a private noiseless oracle of order k.
template <typename Scalar>
ConsistentPolytope<Scalar> build_polytope(const TabularInstance<Scalar>& inst, int k,
                                          QueryLedger* ledger = nullptr,
                                          std::size_t cap = kDefaultEnumerationCap) {
  ComparisonOracle<Scalar> oracle(inst, OracleConfig{k, Noiseless{}, 0});
  auto poly = build_polytope(oracle, cap);
  if (ledger != nullptr) *ledger += oracle.ledger();
  return poly;
}

/// Keeps the constraints supported on `sample` (support indices) and
/// projects them onto those coordinates, in sorted index order.
template <typename Scalar>
ConsistentPolytope<Scalar> sample_polytope(const ConsistentPolytope<Scalar>& poly,
                                           std::vector<Index> sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  sample.erase(std::unique(sample.begin(), sample.end()), sample.end());
  for (const Index s : sample) {
    if (s < 0 || s >= poly.dim()) throw std::invalid_argument("sample index outside the support");
  }
  std::vector<bool> keep(static_cast<std::size_t>(poly.dim()), false);
  for (const Index s : sample) keep[static_cast<std::size_t>(s)] = true;
  std::vector<Labeling> coeffs;
  std::vector<int> responses;
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const Labeling& c = poly.coefficients()[j];
    bool inside = true;
    for (Index i = 0; i < c.size() && inside; ++i) inside = c(i) == 0 || keep[static_cast<std::size_t>(i)];
    if (!inside) continue;
    Labeling proj(static_cast<Index>(sample.size()));
    for (std::size_t t = 0; t < sample.size(); ++t) proj(static_cast<Index>(t)) = c(sample[t]);
    coeffs.push_back(std::move(proj));
    responses.push_back(poly.responses()[j]);
  }
  return ConsistentPolytope<Scalar>(static_cast<Index>(sample.size()), std::move(coeffs), std::move(responses));
}

/// Linear gap-form game data: U_hat(f; g) = (M g)_f with
/// M(f, i) = w_i I[f_i = y_i].
template <typename Scalar>
class GapGame {
 public:
  GapGame(const Vector<Scalar>& weights, const Labeling& labels, const HypothesisClass& cls)
      : M_(cls.size(), weights.size()) {
    if (labels.size() != weights.size() || cls.support_size() != weights.size()) {
      throw std::invalid_argument("game: weight, label and class lengths disagree");
    }
    for (Index f = 0; f < cls.size(); ++f) {
      for (Index i = 0; i < weights.size(); ++i) M_(f, i) = cls[f](i) == labels(i) ? weights(i) : Scalar(0);
    }
  }

  Index hypotheses() const { return M_.rows(); }
  Index dim() const { return M_.cols(); }
  const Matrix<Scalar>& matrix() const { return M_; }

  Vector<Scalar> utilities(const Vector<Scalar>& g) const { return M_ * g; }

  /// Lowest-index maximizer of U_hat(.; g).
  Index selector(const Vector<Scalar>& g) const {
    const Vector<Scalar> u = utilities(g);
    const Scalar top = u.maxCoeff();
    for (Index f = 0; f < u.size(); ++f) {
      if (approx_equal(u(f), top)) return f;
    }
    return 0;
  }

  /// max_f' U_hat(f'; g) - U_hat(f; g).
  Scalar payoff(Index f, const Vector<Scalar>& g) const {
    const Vector<Scalar> u = utilities(g);
    return u.maxCoeff() - u(f);
  }

 private:
  Matrix<Scalar> M_;
};

template <typename Scalar>
Scalar payoff(const Labeling& f, const Vector<Scalar>& g, const Vector<Scalar>& weights,
              const Labeling& labels, const HypothesisClass& cls) {
  Scalar best = gap_utility(weights, labels, g, cls[0]);
  for (Index j = 1; j < cls.size(); ++j) best = std::max(best, gap_utility(weights, labels, g, cls[j]));
  return best - gap_utility(weights, labels, g, f);
}

template <typename Scalar>
struct RobustColumn {
  Vector<Scalar> g;
  Index best_response = 0;
};

template <typename Scalar>
struct RobustPolicy {
  Vector<Scalar> probabilities;
  /// Value of the restricted game at termination.
  Scalar game_value{0};
  /// sup over the polytope of the expected excess risk of `probabilities`.
  Scalar worst_case{0};
  /// worst_case - game_value.
  Scalar convergence_gap{0};
  std::vector<RobustColumn<Scalar>> support;
  int iterations = 0;
};

struct RobustOptions {
  double tolerance = 1e-6;
  int max_iterations = 500;
};

/// Solution of  min_p max_j sum_f p_f A(f, j)  for a nonnegative loss
/// matrix A (rows are the minimizing player's strategies).
template <typename Scalar>
std::pair<Vector<Scalar>, Scalar> solve_matrix_game(const Matrix<Scalar>& A) {
  const Index F = A.rows();
  const Index J = A.cols();
  // Shift to strictly positive losses, then  max 1^T x  s.t.  B^T x <= 1.
  Matrix<Scalar> Bt(J, F);
  for (Index j = 0; j < J; ++j) {
    for (Index f = 0; f < F; ++f) Bt(j, f) = A(f, j) + Scalar(1);
  }
  const auto lp = maximize<Scalar>(Bt, Vector<Scalar>::Ones(J), Vector<Scalar>::Ones(F));
  if (lp.status != LpStatus::Optimal || !(lp.value > Scalar(0))) {
    throw SolverError("restricted matrix game LP failed");
  }
  const Scalar shifted = Scalar(1) / lp.value;
  Vector<Scalar> p = lp.x * shifted;
  if constexpr (!ScalarTraits<Scalar>::exact) {
    p = p.cwiseMax(0.0);
    p /= p.sum();
  }
  return {p, shifted - Scalar(1)};
}

namespace detail {

/// max obj . g over the polytope rows; throws on infeasibility.
template <typename Scalar>
LpResult<Scalar> maximize_over(const Matrix<Scalar>& A, const Vector<Scalar>& b, const Vector<Scalar>& obj) {
  auto lp = maximize<Scalar>(A, b, obj);
  if (lp.status == LpStatus::Infeasible) throw SolverError("consistent polytope is empty");
  if (lp.status == LpStatus::Unbounded) throw SolverError("bounded LP reported unbounded");
  return lp;
}

}  // namespace detail

/// Double-oracle solver for  min_p sup_{g in poly} E_{f~p}[payoff(f, g)].
/// `anchor` seeds the column set together with every feasible box corner.
template <typename Scalar>
RobustPolicy<Scalar> solve_probust(const Vector<Scalar>& weights, const Labeling& labels,
                                   const ConsistentPolytope<Scalar>& poly, const HypothesisClass& cls,
                                   const std::optional<Vector<Scalar>>& anchor,
                                   const RobustOptions& options = {}) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const GapGame<Scalar> game(weights, labels, cls);
  const Index n = game.dim();
  const Index F = game.hypotheses();
  if (poly.dim() != n) throw std::invalid_argument("polytope dimension does not match instance");
  const auto [A, b] = poly.lp_rows();

  std::vector<RobustColumn<Scalar>> columns;
  auto add_column = [&](const Vector<Scalar>& g) {
    for (const auto& col : columns) {
      if (col.g == g) return false;
    }
    columns.push_back({g, game.selector(g)});
    return true;
  };
  if (anchor) {
    if (!poly.contains(*anchor)) throw SolverError("anchor gap vector violates the polytope");
    add_column(*anchor);
  }
  if (n <= 16) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Vector<Scalar> corner(n);
      for (Index i = 0; i < n; ++i) corner(i) = Scalar(static_cast<int>((mask >> i) & 1u));
      if (poly.contains(corner)) add_column(corner);
    }
  }
  if (columns.empty()) {
    // Any feasible point will do.
    const auto lp = detail::maximize_over<Scalar>(A, b, Vector<Scalar>::Zero(n));
    add_column(lp.x);
  }

  const Scalar tol = from_double<Scalar>(options.tolerance);
  RobustPolicy<Scalar> out;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Matrix<Scalar> loss(F, static_cast<Index>(columns.size()));
    for (Index j = 0; j < loss.cols(); ++j) {
      const Vector<Scalar> u = game.utilities(columns[static_cast<std::size_t>(j)].g);
      const Scalar top = u.maxCoeff();
      for (Index f = 0; f < F; ++f) loss(f, j) = top - u(f);
    }
    auto [p, value] = solve_matrix_game<Scalar>(loss);

    // Best response: for each f', maximize (M_f' - p^T M) . g over the polytope.
    const Vector<Scalar> mixed = game.matrix().transpose() * p;
    Scalar br_value{0};
    Vector<Scalar> br_g;
    bool have_br = false;
    for (Index f = 0; f < F; ++f) {
      const Vector<Scalar> obj = game.matrix().row(f).transpose() - mixed;
      const auto lp = detail::maximize_over<Scalar>(A, b, obj);
      if (!have_br || lp.value > br_value) {
        br_value = lp.value;
        br_g = lp.x;
        have_br = true;
      }
    }

    out.probabilities = p;
    out.game_value = value;
    out.worst_case = br_value;
    out.convergence_gap = br_value - value;
    out.iterations = it;
    if (out.convergence_gap <= tol) {
      out.support = columns;
      return out;
    }
    if (!add_column(br_g)) {
      throw SolverError("double oracle stalled with gap " + to_string(out.convergence_gap));
    }
  }
  throw SolverError("double oracle did not converge within " + std::to_string(options.max_iterations) +
                    " iterations");
}

/// Population form: anchored at the instance's true gaps.
template <typename Scalar>
RobustPolicy<Scalar> solve_probust(const TabularInstance<Scalar>& inst, const ConsistentPolytope<Scalar>& poly,
                                   const HypothesisClass& cls, const RobustOptions& options = {}) {
  return solve_probust<Scalar>(inst.weights(), inst.labels(), poly, cls, inst.gaps(), options);
}

/// sup over the polytope of E_{f~p} payoff(f, g), solved exactly by LP.
template <typename Scalar>
Scalar worst_case_risk(const Vector<Scalar>& weights, const Labeling& labels,
                       const ConsistentPolytope<Scalar>& poly, const HypothesisClass& cls,
                       const Vector<Scalar>& p) {
  const GapGame<Scalar> game(weights, labels, cls);
  const auto [A, b] = poly.lp_rows();
  const Vector<Scalar> mixed = game.matrix().transpose() * p;
  Scalar best{0};
  for (Index f = 0; f < game.hypotheses(); ++f) {
    const Vector<Scalar> obj = game.matrix().row(f).transpose() - mixed;
    const auto lp = detail::maximize_over<Scalar>(A, b, obj);
    if (f == 0 || lp.value > best) best = lp.value;
  }
  return best;
}

enum class ModulusMode { Lower, Upper };

struct Moduli {
  double lower = 0.0;
  double upper = 0.0;
};

template <typename Scalar>
struct ExactModuli {
  /// sup_{g1,g2} U(f_{g1}; g1) - U(f_{(g1+g2)/2}; g1); the local lower bound
  /// on the minimax risk is half of this.
  Scalar lower{0};
  /// sup_{g1,g2} U(f_{g1}; g1) - U(f_{g2}; g1).
  Scalar upper{0};
};

namespace detail {

/// Stacks [A 0; 0 A] for the pair (g1, g2).
template <typename Scalar>
std::pair<Matrix<Scalar>, Vector<Scalar>> pair_rows(const Matrix<Scalar>& A, const Vector<Scalar>& b) {
  const Index m = A.rows();
  const Index n = A.cols();
  Matrix<Scalar> A2 = Matrix<Scalar>::Zero(2 * m, 2 * n);
  Vector<Scalar> b2(2 * m);
  A2.block(0, 0, m, n) = A;
  A2.block(m, n, m, n) = A;
  b2.head(m) = b;
  b2.tail(m) = b;
  return {std::move(A2), std::move(b2)};
}

template <typename Scalar>
bool positive(const Scalar& s) {
  if constexpr (ScalarTraits<Scalar>::exact) {
    return s > Scalar(0);
  } else {
    return s > 1e-12;
  }
}

}  // namespace detail

/// Both local moduli by linear programming over the polytope. The selector
/// f_g (lowest-index maximizer) is handled by first testing, for each h,
/// whether some feasible point selects h strictly ahead of lower indices; the
/// supremum over that region then equals the maximum over its closure.
template <typename Scalar>
ExactModuli<Scalar> local_modulus_exact(const Vector<Scalar>& weights, const Labeling& labels,
                                        const ConsistentPolytope<Scalar>& poly, const HypothesisClass& cls) {
  const GapGame<Scalar> game(weights, labels, cls);
  const Index n = game.dim();
  const Index F = game.hypotheses();
  const Matrix<Scalar>& M = game.matrix();
  const auto [A, b] = poly.lp_rows();
  const Index m = A.rows();

  // Worst-case risk of each deterministic h over the polytope.
  Vector<Scalar> worst(F);
  for (Index h = 0; h < F; ++h) {
    Scalar best{0};
    for (Index f = 0; f < F; ++f) {
      if (f == h) continue;
      const Vector<Scalar> obj = (M.row(f) - M.row(h)).transpose();
      best = std::max(best, detail::maximize_over<Scalar>(A, b, obj).value);
    }
    worst(h) = best;
  }

  // Selection region of h for a point z: (M_f - M_h) z + s <= 0 for f < h,
  // (M_f - M_h) z <= 0 for f > h, s added to the strict polytope rows, plus
  // s <= 1. Returns the optimal s; s > 0 iff the region meets the strict set.
  const std::vector<bool> strict = poly.strict_rows();
  auto selectable = [&](Index h, const Matrix<Scalar>& base, const Vector<Scalar>& rhs, Index zdim,
                        Index zoff, Index copies) {
    const Index rows = base.rows() + (F - 1) + 1;
    const Index cols = base.cols() + 1;
    Matrix<Scalar> S = Matrix<Scalar>::Zero(rows, cols);
    Vector<Scalar> sb = Vector<Scalar>::Zero(rows);
    S.block(0, 0, base.rows(), base.cols()) = base;
    sb.head(base.rows()) = rhs;
    for (Index q = 0; q < base.rows(); ++q) {
      if (strict[static_cast<std::size_t>(q % m)]) S(q, cols - 1) = Scalar(1);
    }
    Index r = base.rows();
    for (Index f = 0; f < F; ++f) {
      if (f == h) continue;
      for (Index c = 0; c < copies; ++c) {
        for (Index i = 0; i < zdim; ++i) S(r, zoff + c * zdim + i) = M(f, i) - M(h, i);
      }
      if (f < h) S(r, cols - 1) = Scalar(1);
      ++r;
    }
    S(r, cols - 1) = Scalar(1);
    sb(r) = Scalar(1);
    Vector<Scalar> obj = Vector<Scalar>::Zero(cols);
    obj(cols - 1) = Scalar(1);
    const auto lp = maximize<Scalar>(S, sb, obj);
    if (lp.status != LpStatus::Optimal) return Scalar(-1);
    return lp.value;
  };

  ExactModuli<Scalar> out;
  for (Index h = 0; h < F; ++h) {
    if (!detail::positive(selectable(h, A, b, n, 0, 1))) continue;
    out.upper = std::max(out.upper, worst(h));
  }

  const auto [A2, b2] = detail::pair_rows<Scalar>(A, b);
  for (Index h = 0; h < F; ++h) {
    if (!detail::positive(selectable(h, A2, b2, n, 0, 2))) continue;
    // Closure of the selection region at g1 + g2, objective on g1.
    Matrix<Scalar> C = Matrix<Scalar>::Zero(2 * m + F - 1, 2 * n);
    Vector<Scalar> cb = Vector<Scalar>::Zero(2 * m + F - 1);
    C.topRows(2 * m) = A2;
    cb.head(2 * m) = b2;
    Index r = 2 * m;
    for (Index f = 0; f < F; ++f) {
      if (f == h) continue;
      for (Index i = 0; i < n; ++i) C(r, i) = C(r, n + i) = M(f, i) - M(h, i);
      ++r;
    }
    for (Index f = 0; f < F; ++f) {
      if (f == h) continue;
      Vector<Scalar> obj = Vector<Scalar>::Zero(2 * n);
      obj.head(n) = (M.row(f) - M.row(h)).transpose();
      out.lower = std::max(out.lower, detail::maximize_over<Scalar>(C, cb, obj).value);
    }
  }
  return out;
}

struct GridOptions {
  /// Grid spacing per coordinate.
  double step = 1.0 / 64.0;
  /// Cap on (g1, g2) pairs for the lower modulus; beyond it the g2 set is
  /// thinned by a uniform stride.
  std::size_t pair_budget = 4'000'000;
  /// Cap on grid points visited.
  std::size_t grid_cap = 5'000'000;
};

/// Vertices of the (relaxed) polytope, computed in double precision by
/// redundancy removal followed by enumeration of n-subsets of facets.
std::vector<Eigen::VectorXd> polytope_vertices(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                               std::size_t cap = 200'000);

/// Moduli by search over polytope vertices plus the grid points inside the
/// polytope. Both values are lower bounds on the true suprema.
Moduli local_modulus_grid(const Eigen::VectorXd& weights, const Labeling& labels,
                          const ConsistentPolytope<double>& poly, const HypothesisClass& cls,
                          const GridOptions& options = {});

template <typename Scalar>
Moduli local_modulus_grid(const Vector<Scalar>& weights, const Labeling& labels,
                          const ConsistentPolytope<Scalar>& poly, const HypothesisClass& cls,
                          const GridOptions& options = {}) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return local_modulus_grid(static_cast<const Eigen::VectorXd&>(weights), labels, poly, cls, options);
  } else {
    return local_modulus_grid(cast_vector<double>(weights), labels, poly.template cast<double>(), cls, options);
  }
}

/// Single-mode entry point; lower reports the raw modulus (not halved).
template <typename Scalar>
Scalar local_modulus(const Vector<Scalar>& weights, const Labeling& labels, const ConsistentPolytope<Scalar>& poly,
                     const HypothesisClass& cls, ModulusMode mode) {
  const auto mod = local_modulus_exact<Scalar>(weights, labels, poly, cls);
  return mode == ModulusMode::Lower ? mod.lower : mod.upper;
}

}  // namespace elicit
