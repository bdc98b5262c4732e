#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sttpp {

using Vec = std::vector<double>;

// minimal dense row-major matrix
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline void check_dim(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace sttpp
