#pragma once

#include <Eigen/Core>

namespace gloc::nn {

// Vectors are columns; batches and token sequences are matrices with one
// sample/token per column (column-major friendly).
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Matf = Mat<float>;
using Vecf = Vec<float>;
using Matd = Mat<double>;
using Vecd = Vec<double>;

template <typename T>
bool all_finite(const Mat<T>& m) {
  return m.allFinite();
}

}  // namespace gloc::nn
