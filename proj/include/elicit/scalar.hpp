#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

namespace elicit {

/// Exact rational scalar. Expression templates are off so the type behaves as
/// a plain value inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Utility table: row i holds (u(x_i, 0), u(x_i, 1)).
template <typename Scalar>
using UtilityTable = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

/// Binary labels / decisions / reduced query coefficients.
using Labeling = Eigen::VectorXi;

inline Labeling labeling(std::initializer_list<int> values) {
  Labeling out(static_cast<Index>(values.size()));
  Index i = 0;
  for (const int v : values) out(i++) = v;
  return out;
}

template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  /// Absolute tolerance for equality of reals.
  static double tolerance() { return 1e-9; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
};

template <typename Scalar>
inline double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

/// Exact for Rational (a double is a dyadic rational).
template <typename Scalar>
inline Scalar from_double(double x) {
  return Scalar(x);
}

template <typename Scalar>
inline Scalar ratio(std::int64_t num, std::int64_t den) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return static_cast<double>(num) / static_cast<double>(den);
  } else {
    return Rational(num, den);
  }
}

template <typename Scalar>
inline Scalar abs_value(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}

template <typename Scalar>
inline bool approx_equal(const Scalar& a, const Scalar& b) {
  return abs_value<Scalar>(a - b) <= ScalarTraits<Scalar>::tolerance();
}

/// a >= b up to the scalar's equality tolerance.
template <typename Scalar>
inline bool approx_geq(const Scalar& a, const Scalar& b) {
  return a >= b - ScalarTraits<Scalar>::tolerance();
}

template <typename Scalar>
inline std::string to_string(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::to_string(x);
  } else {
    return x.str();
  }
}

template <typename To, typename From>
inline Vector<To> cast_vector(const Vector<From>& v) {
  Vector<To> out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<To, From>) {
      out(i) = v(i);
    } else if constexpr (std::is_same_v<To, double>) {
      out(i) = to_double(v(i));
    } else {
      out(i) = To(v(i));
    }
  }
  return out;
}

}  // namespace elicit
