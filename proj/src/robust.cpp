#include "elicit/robust.hpp"

#include <Eigen/LU>

#include <functional>
#include <numeric>

namespace elicit {

namespace {

constexpr double kFeasTol = 1e-9;

bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  if ((x.array() < -kFeasTol).any()) return false;
  return ((A * x - b).array() <= kFeasTol).all();
}

// Rows of A whose removal changes the polytope (x >= 0 stays implicit).
std::vector<Index> irredundant_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  std::vector<Index> kept(static_cast<std::size_t>(A.rows()));
  std::iota(kept.begin(), kept.end(), Index{0});
  for (Index j = 0; j < A.rows(); ++j) {
    std::vector<Index> others;
    for (const Index r : kept) {
      if (r != j) others.push_back(r);
    }
    if (others.size() == kept.size()) continue;
    // Row j relaxed by one unit keeps the LP bounded even when j is a box row.
    Eigen::MatrixXd S(static_cast<Index>(others.size()) + 1, A.cols());
    Eigen::VectorXd sb(S.rows());
    for (std::size_t t = 0; t < others.size(); ++t) {
      S.row(static_cast<Index>(t)) = A.row(others[t]);
      sb(static_cast<Index>(t)) = b(others[t]);
    }
    S.row(S.rows() - 1) = A.row(j);
    sb(S.rows() - 1) = b(j) + 1.0;
    const auto lp = maximize<double>(S, sb, A.row(j).transpose());
    if (lp.status == LpStatus::Infeasible) return {};
    if (lp.status == LpStatus::Optimal && lp.value <= b(j) + kFeasTol) kept = std::move(others);
  }
  return kept;
}

}  // namespace

std::vector<Eigen::VectorXd> polytope_vertices(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                               std::size_t cap) {
  const Index n = A.cols();
  const auto kept = irredundant_rows(A, b);
  if (kept.empty()) return {};

  // Candidate hyperplanes: irredundant rows plus the coordinate planes.
  const Index K = static_cast<Index>(kept.size()) + n;
  Eigen::MatrixXd H(K, n);
  Eigen::VectorXd hb(K);
  for (std::size_t t = 0; t < kept.size(); ++t) {
    H.row(static_cast<Index>(t)) = A.row(kept[t]);
    hb(static_cast<Index>(t)) = b(kept[t]);
  }
  for (Index i = 0; i < n; ++i) {
    H.row(static_cast<Index>(kept.size()) + i) = -Eigen::RowVectorXd::Unit(n, i);
    hb(static_cast<Index>(kept.size()) + i) = 0.0;
  }

  std::vector<Eigen::VectorXd> out;
  std::vector<Index> pick(static_cast<std::size_t>(n));
  std::size_t visited = 0;
  // Lexicographic n-subsets of [0, K).
  std::function<void(Index, Index)> rec = [&](Index depth, Index start) {
    if (depth == n) {
      if (++visited > cap) throw CapacityError("vertex enumeration exceeded its subset cap");
      Eigen::MatrixXd S(n, n);
      Eigen::VectorXd sb(n);
      for (Index r = 0; r < n; ++r) {
        S.row(r) = H.row(pick[static_cast<std::size_t>(r)]);
        sb(r) = hb(pick[static_cast<std::size_t>(r)]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (lu.rank() < n) return;
      Eigen::VectorXd x = lu.solve(sb);
      if (!feasible(A, b, x)) return;
      x = x.cwiseMax(0.0).cwiseMin(1.0);
      for (const auto& v : out) {
        if ((v - x).cwiseAbs().maxCoeff() <= kFeasTol) return;
      }
      out.push_back(x);
      return;
    }
    for (Index j = start; j <= K - (n - depth); ++j) {
      pick[static_cast<std::size_t>(depth)] = j;
      rec(depth + 1, j + 1);
    }
  };
  rec(0, 0);
  return out;
}

namespace {

constexpr double kTieTol = 1e-12;

Index select(const Eigen::VectorXd& u) {
  const double top = u.maxCoeff();
  for (Index f = 0; f < u.size(); ++f) {
    if (u(f) >= top - kTieTol) return f;
  }
  return 0;
}

}  // namespace

Moduli local_modulus_grid(const Eigen::VectorXd& weights, const Labeling& labels,
                          const ConsistentPolytope<double>& poly, const HypothesisClass& cls,
                          const GridOptions& options) {
  if (!(options.step > 0.0 && options.step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
  const GapGame<double> game(weights, labels, cls);
  const Index n = game.dim();
  const auto [A, b] = poly.lp_rows();

  std::vector<Eigen::VectorXd> cand = polytope_vertices(A, b);
  const auto steps = static_cast<long>(std::floor(1.0 / options.step + 1e-9));
  double total = 1.0;
  for (Index i = 0; i < n; ++i) total *= static_cast<double>(steps + 1);
  if (total > static_cast<double>(options.grid_cap)) {
    throw CapacityError("grid of " + std::to_string(static_cast<long long>(total)) + " points exceeds the cap");
  }
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd g(n);
  while (true) {
    for (Index i = 0; i < n; ++i) g(i) = std::min(1.0, static_cast<double>(idx[static_cast<std::size_t>(i)]) * options.step);
    if (feasible(A, b, g)) cand.push_back(g);
    Index pos = 0;
    while (pos < n && ++idx[static_cast<std::size_t>(pos)] > steps) idx[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }

  Moduli out;
  if (cand.empty()) return out;
  const Index N = static_cast<Index>(cand.size());
  Eigen::MatrixXd U(game.hypotheses(), N);
  for (Index j = 0; j < N; ++j) U.col(j) = game.utilities(cand[static_cast<std::size_t>(j)]);
  Eigen::VectorXd top(N);
  // f_g is defined on the consistent set itself; closure points only serve
  // as evaluation points for the suprema.
  std::vector<bool> strict(static_cast<std::size_t>(N), false);
  std::vector<bool> selected(static_cast<std::size_t>(game.hypotheses()), false);
  for (Index j = 0; j < N; ++j) {
    top(j) = U.col(j).maxCoeff();
    strict[static_cast<std::size_t>(j)] = poly.consistent(cand[static_cast<std::size_t>(j)]);
    if (strict[static_cast<std::size_t>(j)]) selected[static_cast<std::size_t>(select(U.col(j)))] = true;
  }

  for (Index j = 0; j < N; ++j) {
    for (Index h = 0; h < game.hypotheses(); ++h) {
      if (selected[static_cast<std::size_t>(h)]) out.upper = std::max(out.upper, top(j) - U(h, j));
    }
  }

  Index stride = 1;
  while (static_cast<double>(N) * static_cast<double>((N + stride - 1) / stride) >
         static_cast<double>(options.pair_budget)) {
    ++stride;
  }
  Eigen::VectorXd mid(game.hypotheses());
  for (Index a = 0; a < N; ++a) {
    for (Index c = 0; c < N; c += stride) {
      if (!strict[static_cast<std::size_t>(c)]) continue;
      mid = 0.5 * (U.col(a) + U.col(c));
      const Index h = select(mid);
      out.lower = std::max(out.lower, top(a) - U(h, a));
    }
  }
  return out;
}

}  // namespace elicit
