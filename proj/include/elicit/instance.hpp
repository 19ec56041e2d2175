#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elicit/scalar.hpp"

namespace elicit {

struct Point {
  std::string id;
  /// Real coordinate, needed only for threshold-class induction.
  std::optional<double> coord;
};

/// Finite-support problem instance: support points, a distribution over them,
/// and the utility table u(x_i, y) for y in {0, 1}.
///
/// Labels are y_i = argmax_y u(x_i, y) with ties going to 1, and the gap is
/// g_i = u(x_i, y_i) - u(x_i, 1 - y_i) >= 0. Immutable after construction.
template <typename Scalar>
class TabularInstance {
 public:
  /// Validates and derives labels and gaps. Throws std::invalid_argument on
  /// dimension mismatch, negative weights, weights not summing to one, or
  /// utilities outside [0, 1].
  static TabularInstance build(std::vector<Point> points, Vector<Scalar> weights,
                               UtilityTable<Scalar> utility);

  Index size() const { return static_cast<Index>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }
  const Vector<Scalar>& weights() const { return weights_; }
  const UtilityTable<Scalar>& utility() const { return utility_; }
  const Labeling& labels() const { return labels_; }
  const Vector<Scalar>& gaps() const { return gaps_; }

  Scalar utility_at(Index i, int decision) const { return utility_(i, decision); }

  /// u(x_i, 1 - y_i) per point.
  Vector<Scalar> wrong_utility() const;

  /// max_i g_i over the support.
  Scalar max_gap() const { return gaps_.maxCoeff(); }

  bool has_coordinates() const;

  /// Same support and utilities, different distribution.
  TabularInstance with_weights(Vector<Scalar> weights) const;

  /// Sub-instance on the listed support indices (repeats allowed), with
  /// uniform weights.
  TabularInstance restrict_to(const std::vector<Index>& indices) const;

  template <typename To>
  TabularInstance<To> cast() const;

 private:
  std::vector<Point> points_;
  Vector<Scalar> weights_;
  UtilityTable<Scalar> utility_;
  Labeling labels_;
  Vector<Scalar> gaps_;
};

template <typename Scalar>
TabularInstance<Scalar> build_instance(std::vector<Point> points, Vector<Scalar> weights,
                                       UtilityTable<Scalar> utility) {
  return TabularInstance<Scalar>::build(std::move(points), std::move(weights), std::move(utility));
}

template <typename Scalar>
TabularInstance<Scalar> TabularInstance<Scalar>::build(std::vector<Point> points,
                                                       Vector<Scalar> weights,
                                                       UtilityTable<Scalar> utility) {
  const Index n = static_cast<Index>(points.size());
  if (n == 0) throw std::invalid_argument("instance needs at least one point");
  if (weights.size() != n || utility.rows() != n) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(n) + " points, " +
                                std::to_string(weights.size()) + " weights, " +
                                std::to_string(utility.rows()) + " utility rows");
  }
  for (Index i = 0; i < n; ++i) {
    if (weights(i) < Scalar(0)) throw std::invalid_argument("negative weight");
    for (int y = 0; y < 2; ++y) {
      if (utility(i, y) < Scalar(0) || utility(i, y) > Scalar(1)) {
        throw std::invalid_argument("utility out of [0,1] at point " + std::to_string(i));
      }
    }
  }
  const Scalar total = weights.sum();
  if constexpr (ScalarTraits<Scalar>::exact) {
    if (total != Scalar(1)) throw std::invalid_argument("weights do not sum to 1");
  } else {
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("weights do not sum to 1");
  }

  TabularInstance inst;
  inst.points_ = std::move(points);
  inst.weights_ = std::move(weights);
  inst.utility_ = std::move(utility);
  inst.labels_.resize(n);
  inst.gaps_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int y = inst.utility_(i, 1) >= inst.utility_(i, 0) ? 1 : 0;
    inst.labels_(i) = y;
    inst.gaps_(i) = inst.utility_(i, y) - inst.utility_(i, 1 - y);
  }
  return inst;
}

template <typename Scalar>
Vector<Scalar> TabularInstance<Scalar>::wrong_utility() const {
  Vector<Scalar> out(size());
  for (Index i = 0; i < size(); ++i) out(i) = utility_(i, 1 - labels_(i));
  return out;
}

template <typename Scalar>
bool TabularInstance<Scalar>::has_coordinates() const {
  return std::all_of(points_.begin(), points_.end(),
                     [](const Point& p) { return p.coord.has_value(); });
}

template <typename Scalar>
TabularInstance<Scalar> TabularInstance<Scalar>::with_weights(Vector<Scalar> weights) const {
  return build(points_, std::move(weights), utility_);
}

template <typename Scalar>
TabularInstance<Scalar> TabularInstance<Scalar>::restrict_to(
    const std::vector<Index>& indices) const {
  if (indices.empty()) throw std::invalid_argument("empty restriction");
  const Index m = static_cast<Index>(indices.size());
  std::vector<Point> pts;
  UtilityTable<Scalar> util(m, 2);
  Vector<Scalar> w(m);
  for (Index j = 0; j < m; ++j) {
    const Index i = indices[static_cast<std::size_t>(j)];
    if (i < 0 || i >= size()) throw std::invalid_argument("restriction index out of range");
    pts.push_back(points_[static_cast<std::size_t>(i)]);
    util.row(j) = utility_.row(i);
    w(j) = ratio<Scalar>(1, m);
  }
  if constexpr (!ScalarTraits<Scalar>::exact) w(m - 1) = 1.0 - w.head(m - 1).sum();
  return build(std::move(pts), std::move(w), std::move(util));
}

template <typename Scalar>
template <typename To>
TabularInstance<To> TabularInstance<Scalar>::cast() const {
  UtilityTable<To> util(size(), 2);
  for (Index i = 0; i < size(); ++i) {
    for (int y = 0; y < 2; ++y) {
      if constexpr (std::is_same_v<To, double>) {
        util(i, y) = to_double(utility_(i, y));
      } else {
        util(i, y) = To(utility_(i, y));
      }
    }
  }
  Vector<To> w = cast_vector<To>(weights_);
  if constexpr (ScalarTraits<To>::exact) {
    // Double weights sum to one only within rounding; renormalize exactly.
    w /= w.sum();
  }
  return TabularInstance<To>::build(points_, std::move(w), std::move(util));
}

/// Finite set of binary labelings of the support, deduplicated on
/// construction (first occurrence wins).
class HypothesisClass {
 public:
  explicit HypothesisClass(std::vector<Labeling> hypotheses);

  Index size() const { return static_cast<Index>(hypotheses_.size()); }
  Index support_size() const { return hypotheses_.front().size(); }
  const Labeling& operator[](Index i) const { return hypotheses_[static_cast<std::size_t>(i)]; }
  const std::vector<Labeling>& hypotheses() const { return hypotheses_; }

  /// Index of an identical labeling, if present.
  std::optional<Index> find(const Labeling& f) const;

  /// All 2^n labelings (n <= 20).
  static HypothesisClass all_dichotomies(Index n);

 private:
  std::vector<Labeling> hypotheses_;
};

inline HypothesisClass::HypothesisClass(std::vector<Labeling> hypotheses) {
  if (hypotheses.empty()) throw std::invalid_argument("hypothesis class is empty");
  const Index n = hypotheses.front().size();
  for (auto& h : hypotheses) {
    if (h.size() != n) throw std::invalid_argument("hypotheses differ in length");
    if ((h.array() != 0 && h.array() != 1).any()) {
      throw std::invalid_argument("hypothesis entries must be 0 or 1");
    }
    const bool seen = std::any_of(hypotheses_.begin(), hypotheses_.end(),
                                  [&](const Labeling& g) { return g == h; });
    if (!seen) hypotheses_.push_back(std::move(h));
  }
}

inline std::optional<Index> HypothesisClass::find(const Labeling& f) const {
  for (Index i = 0; i < size(); ++i) {
    if ((*this)[i] == f) return i;
  }
  return std::nullopt;
}

inline HypothesisClass HypothesisClass::all_dichotomies(Index n) {
  if (n < 1 || n > 20) throw std::invalid_argument("all_dichotomies supports 1 <= n <= 20");
  std::vector<Labeling> hs;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Labeling h(n);
    for (Index i = 0; i < n; ++i) h(i) = static_cast<int>((mask >> i) & 1u);
    hs.push_back(std::move(h));
  }
  return HypothesisClass(std::move(hs));
}

/// Dichotomies of the 1-D sign class {x -> I[a x > 0] : a in {-1, +1}}.
/// sign(0) maps to label 0.
template <typename Scalar>
HypothesisClass induce_threshold_class(const TabularInstance<Scalar>& inst) {
  if (!inst.has_coordinates()) {
    throw std::invalid_argument("threshold class needs a coordinate on every point");
  }
  std::vector<Labeling> hs;
  for (const double a : {1.0, -1.0}) {
    Labeling h(inst.size());
    for (Index i = 0; i < inst.size(); ++i) {
      h(i) = a * *inst.points()[static_cast<std::size_t>(i)].coord > 0.0 ? 1 : 0;
    }
    hs.push_back(std::move(h));
  }
  return HypothesisClass(std::move(hs));
}

/// sum_i w_i u(x_i, f(x_i)).
template <typename Scalar>
Scalar population_utility(const Vector<Scalar>& weights, const UtilityTable<Scalar>& utility,
                          const Labeling& f) {
  if (f.size() != weights.size() || utility.rows() != weights.size()) {
    throw std::invalid_argument("hypothesis length does not match support");
  }
  Scalar total(0);
  for (Index i = 0; i < f.size(); ++i) total += weights(i) * utility(i, f(i));
  return total;
}

template <typename Scalar>
Scalar population_utility(const TabularInstance<Scalar>& inst, const Labeling& f) {
  return population_utility(inst.weights(), inst.utility(), f);
}

/// Gap-normalized utility sum_i w_i g_i I[f(x_i) = y_i]. Differs from the full
/// form by sum_i w_i u(x_i, 1 - y_i), which does not depend on f.
template <typename Scalar>
Scalar gap_utility(const Vector<Scalar>& weights, const Labeling& labels,
                   const Vector<Scalar>& gaps, const Labeling& f) {
  if (f.size() != weights.size() || labels.size() != weights.size() ||
      gaps.size() != weights.size()) {
    throw std::invalid_argument("hypothesis length does not match support");
  }
  Scalar total(0);
  for (Index i = 0; i < f.size(); ++i) {
    if (f(i) == labels(i)) total += weights(i) * gaps(i);
  }
  return total;
}

template <typename Scalar>
Scalar gap_utility(const TabularInstance<Scalar>& inst, const Labeling& f) {
  return gap_utility(inst.weights(), inst.labels(), inst.gaps(), f);
}

/// Values of every hypothesis, the lowest-index argmax, and the tie set.
template <typename Scalar>
struct Argmax {
  Vector<Scalar> values;
  Index best = 0;
  std::vector<Index> ties;
};

template <typename Scalar, typename ValueFn>
Argmax<Scalar> argmax_over(const HypothesisClass& cls, ValueFn&& value) {
  Argmax<Scalar> out;
  out.values.resize(cls.size());
  for (Index j = 0; j < cls.size(); ++j) out.values(j) = value(cls[j]);
  const Scalar top = out.values.maxCoeff();
  for (Index j = 0; j < cls.size(); ++j) {
    if (approx_equal(out.values(j), top)) out.ties.push_back(j);
  }
  out.best = out.ties.front();
  return out;
}

/// max_{f' in class} U(f'; u) - U(f; u).
template <typename Scalar>
Scalar excess_risk(const TabularInstance<Scalar>& inst, const Labeling& f,
                   const HypothesisClass& cls) {
  Scalar best = population_utility(inst, cls[0]);
  for (Index j = 1; j < cls.size(); ++j) best = std::max(best, population_utility(inst, cls[j]));
  return best - population_utility(inst, f);
}

template <typename Scalar>
struct EvaluationReport {
  Vector<Scalar> utilities;
  Vector<Scalar> excess_risks;
  Index maximizer = 0;
};

template <typename Scalar>
EvaluationReport<Scalar> evaluate(const TabularInstance<Scalar>& inst, const HypothesisClass& cls) {
  auto am = argmax_over<Scalar>(cls, [&](const Labeling& f) { return population_utility(inst, f); });
  EvaluationReport<Scalar> rep;
  rep.utilities = am.values;
  rep.maximizer = am.best;
  const Scalar top = am.values.maxCoeff();
  rep.excess_risks = Vector<Scalar>::Constant(cls.size(), top) - am.values;
  return rep;
}

}  // namespace elicit
