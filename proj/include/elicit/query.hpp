#pragma once

#include <cstddef>
#include <vector>

#include "elicit/scalar.hpp"

namespace elicit {

/// One slot of a k-comparison query: a support point together with the
/// decision it receives in each of the two compared decision vectors.
struct QueryEntry {
  Index point = 0;
  int first = 0;
  int second = 0;

  bool operator==(const QueryEntry&) const = default;
};

/// A k-comparison query (x, y1, y2). The oracle answers
/// I[sum_j u(x_j, y1_j) >= sum_j u(x_j, y2_j)].
struct Query {
  std::vector<QueryEntry> entries;

  std::size_t length() const { return entries.size(); }

  /// Appends `copies` slots (point, first, second).
  Query& add(Index point, int first, int second, int copies = 1);

  /// Single 1-comparison ((x_i, 1, 0)).
  static Query label_probe(Index point);

  /// ((x_a, y_a, 1 - y_a), (x_b, 1 - y_b, y_b)); its truth bit is I[g_a >= g_b].
  static Query gap_duel(Index a, int label_a, Index b, int label_b);

  /// A query realizing the reduced coefficient vector c: c_i > 0 gives c_i
  /// copies of (x_i, y_i, 1 - y_i), c_i < 0 gives |c_i| copies of
  /// (x_i, 1 - y_i, y_i).
  static Query from_coefficients(const Labeling& c, const Labeling& labels);
};

/// c_i = sum over entries at point i of (I[y1 = y_i] - I[y2 = y_i]), so that
/// the response equals I[c . g >= 0] for any gap vector g with these labels.
Labeling reduce_query(const Query& query, const Labeling& labels);

/// Number of nonzero vectors in Z^n with L1 norm <= k, halved (one
/// representative per {c, -c} pair). Saturates instead of overflowing.
std::size_t count_canonical_queries(Index n, int k);

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// All nonzero c in Z^n with sum |c_i| <= k whose first nonzero entry is
/// positive, in lexicographic order. Throws CapacityError above `cap`.
std::vector<Labeling> enumerate_reduced_queries(Index n, int k,
                                                std::size_t cap = kDefaultEnumerationCap);

/// Lexicographic order on integer vectors of equal length.
bool lexicographic_less(const Labeling& a, const Labeling& b);

}  // namespace elicit
