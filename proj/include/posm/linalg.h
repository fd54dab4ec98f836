// include/posm/linalg.h

// Copyright 2026  The posm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef POSM_LINALG_H_
#define POSM_LINALG_H_

#include <cstddef>
#include <vector>

#include "posm/types.h"

namespace posm {

/// Small dense complex matrix (row-major). Sized for per-frequency N x N
/// demixing work, N in 1..4.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<Complex> &data() const { return data_; }

  ComplexMatrix transpose() const;
  ComplexMatrix operator*(const ComplexMatrix &rhs) const;
  ComplexMatrix &operator*=(Complex s);

  double max_abs() const;
  Complex trace() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// NumericalError when a pivot falls below 1e-14 of the largest entry of A.
std::vector<Complex> solve(const ComplexMatrix &a, const std::vector<Complex> &b);

/// As solve(), but on a singular system retries once with A + loading * I.
/// `what` names the caller in the error message.
std::vector<Complex> solve_with_loading(const ComplexMatrix &a,
                                        const std::vector<Complex> &b,
                                        double loading, const char *what);

/// Determinant via LU with partial pivoting. Exact zero for singular input.
Complex determinant(const ComplexMatrix &a);

}  // namespace posm

#endif  // POSM_LINALG_H_
