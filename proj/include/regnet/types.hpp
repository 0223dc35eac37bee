#pragma once

#include <cstdint>
#include <type_traits>

#include <Eigen/Dense>

namespace regnet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CountMatrix = Matrix<std::int64_t>;
using BoolMatrix = Matrix<bool>;

// Floating type used when evaluating a measure on an Eigen expression.
// Integer count matrices are promoted to double; floating inputs keep
// their own precision (long double instantiations serve as oracles).
template <typename Scalar>
using real_for_t =
    std::conditional_t<std::is_floating_point_v<Scalar>, Scalar, double>;

template <typename Derived>
using real_of_t = real_for_t<typename Derived::Scalar>;

}  // namespace regnet
