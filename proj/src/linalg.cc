// src/linalg.cc

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

#include "posm/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace posm {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix &rhs) const {
  if (cols_ != rhs.rows_) throw InvalidArgument("matrix product: shape mismatch");
  ComplexMatrix out(rows_, rhs.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = (*this)(r, k);
      for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
    }
  return out;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex s) {
  for (auto &v : data_) v *= s;
  return *this;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto &v : data_) m = std::max(m, std::abs(v));
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t k = 0; k < std::min(rows_, cols_); ++k) t += (*this)(k, k);
  return t;
}

bool ComplexMatrix::all_finite() const {
  for (const auto &v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

namespace {

// In-place LU with partial pivoting; returns false when a pivot is at or
// below rel_tol times the largest entry. `perm_sign` tracks row swaps.
bool lu_decompose(ComplexMatrix &a, std::vector<std::size_t> &perm, int &perm_sign,
                  double rel_tol) {
  const std::size_t n = a.rows();
  const double scale = a.max_abs();
  perm.resize(n);
  for (std::size_t k = 0; k < n; ++k) perm[k] = k;
  perm_sign = 1;
  if (!(scale > 0.0) || !std::isfinite(scale)) return false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(a(r, k));
      if (v > best) {
        best = v;
        p = r;
      }
    }
    if (best <= rel_tol * scale) return false;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(p, c));
      std::swap(perm[k], perm[p]);
      perm_sign = -perm_sign;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const Complex f = a(r, k) / a(k, k);
      a(r, k) = f;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return true;
}

}  // namespace

std::vector<Complex> solve(const ComplexMatrix &a, const std::vector<Complex> &b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidArgument("solve: shape mismatch");
  // Row equilibration, so the singularity test is relative to each row's
  // own scale rather than the largest entry of the matrix.
  ComplexMatrix lu = a;
  std::vector<Complex> rhs = b;
  for (std::size_t r = 0; r < n; ++r) {
    double m = 0.0;
    for (std::size_t c = 0; c < n; ++c) m = std::max(m, std::abs(lu(r, c)));
    if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("solve: singular matrix");
    for (std::size_t c = 0; c < n; ++c) lu(r, c) /= m;
    rhs[r] /= m;
  }
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(lu, perm, sign, 1e-14)) throw NumericalError("solve: singular matrix");
  std::vector<Complex> x(n);
  for (std::size_t r = 0; r < n; ++r) {
    Complex s = rhs[perm[r]];
    for (std::size_t c = 0; c < r; ++c) s -= lu(r, c) * x[c];
    x[r] = s;
  }
  for (std::size_t r = n; r-- > 0;) {
    Complex s = x[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= lu(r, c) * x[c];
    x[r] = s / lu(r, r);
  }
  return x;
}

std::vector<Complex> solve_with_loading(const ComplexMatrix &a,
                                        const std::vector<Complex> &b,
                                        double loading, const char *what) {
  try {
    return solve(a, b);
  } catch (const NumericalError &) {
  }
  ComplexMatrix loaded = a;
  for (std::size_t k = 0; k < loaded.rows(); ++k) loaded(k, k) += loading;
  try {
    return solve(loaded, b);
  } catch (const NumericalError &) {
    throw NumericalError(std::string(what) + ": singular system after diagonal loading");
  }
}

Complex determinant(const ComplexMatrix &a) {
  if (a.rows() != a.cols()) throw InvalidArgument("determinant: matrix not square");
  ComplexMatrix lu = a;
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(lu, perm, sign, 0.0)) return 0.0;
  Complex det = static_cast<double>(sign);
  for (std::size_t k = 0; k < lu.rows(); ++k) det *= lu(k, k);
  return det;
}

}  // namespace posm
