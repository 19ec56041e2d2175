#include "elicit/query.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "elicit/errors.hpp"

namespace elicit {

Query& Query::add(Index point, int first, int second, int copies) {
  if (copies < 0) throw std::invalid_argument("negative copy count");
  for (int j = 0; j < copies; ++j) entries.push_back({point, first, second});
  return *this;
}

Query Query::label_probe(Index point) {
  Query q;
  q.add(point, 1, 0);
  return q;
}

Query Query::gap_duel(Index a, int label_a, Index b, int label_b) {
  Query q;
  q.add(a, label_a, 1 - label_a);
  q.add(b, 1 - label_b, label_b);
  return q;
}

Query Query::from_coefficients(const Labeling& c, const Labeling& labels) {
  if (c.size() != labels.size()) throw std::invalid_argument("coefficient/label length mismatch");
  Query q;
  for (Index i = 0; i < c.size(); ++i) {
    const int y = labels(i);
    if (c(i) > 0) q.add(i, y, 1 - y, c(i));
    if (c(i) < 0) q.add(i, 1 - y, y, -c(i));
  }
  return q;
}

Labeling reduce_query(const Query& query, const Labeling& labels) {
  Labeling c = Labeling::Zero(labels.size());
  for (const auto& e : query.entries) {
    if (e.point < 0 || e.point >= labels.size()) {
      throw std::invalid_argument("query references point outside the support");
    }
    const int y = labels(e.point);
    c(e.point) += (e.first == y ? 1 : 0) - (e.second == y ? 1 : 0);
  }
  return c;
}

namespace {

// Lattice points of the L1 ball of radius k in Z^n, via
// sum_j 2^j C(n, j) C(k, j).
double l1_ball_points(Index n, int k) {
  double total = 0.0;
  double binom_n = 1.0;
  double binom_k = 1.0;
  double pow2 = 1.0;
  for (Index j = 0; j <= std::min<Index>(n, k); ++j) {
    total += pow2 * binom_n * binom_k;
    binom_n = binom_n * static_cast<double>(n - j) / static_cast<double>(j + 1);
    binom_k = binom_k * static_cast<double>(k - j) / static_cast<double>(j + 1);
    pow2 *= 2.0;
  }
  return total;
}

void extend(Labeling& current, Index pos, int budget, bool seen_nonzero,
            std::vector<Labeling>& out) {
  const Index n = current.size();
  if (pos == n) {
    if (seen_nonzero) out.push_back(current);
    return;
  }
  const int lo = seen_nonzero ? -budget : 0;
  for (int v = lo; v <= budget; ++v) {
    current(pos) = v;
    extend(current, pos + 1, budget - std::abs(v), seen_nonzero || v != 0, out);
  }
  current(pos) = 0;
}

}  // namespace

std::size_t count_canonical_queries(Index n, int k) {
  if (n < 1 || k < 1) return 0;
  const double half = (l1_ball_points(n, k) - 1.0) / 2.0;
  if (half >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max() / 2;
  }
  return static_cast<std::size_t>(half + 0.5);
}

std::vector<Labeling> enumerate_reduced_queries(Index n, int k, std::size_t cap) {
  if (n < 1 || k < 1) throw std::invalid_argument("enumeration needs n >= 1 and k >= 1");
  const std::size_t expected = count_canonical_queries(n, k);
  if (expected > cap) {
    throw CapacityError("enumerating reduced queries for n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + " needs " + std::to_string(expected) +
                        " vectors, above the cap of " + std::to_string(cap));
  }
  std::vector<Labeling> out;
  out.reserve(expected);
  Labeling current = Labeling::Zero(n);
  extend(current, 0, k, false, out);
  // The recursion emits in lexicographic order already; keep the contract
  // explicit.
  std::sort(out.begin(), out.end(), lexicographic_less);
  return out;
}

bool lexicographic_less(const Labeling& a, const Labeling& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace elicit
