#pragma once

#include "pagets/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

namespace testing {

template <class F>
std::optional<pagets::ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const pagets::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define CHECK_CODE(expr, c) CHECK(::testing::code_of([&] { (void)(expr); }) == std::optional(c))

// Cyclic Jacobi eigenvalues of a symmetric matrix, descending. Independent of
// any library decomposition; used as the SVD oracle via m^T m.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Upper bound (Frobenius) on the sine of the largest principal angle between
// the column spans of orthonormal A and B.
inline double subspace_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return (B - A * (A.transpose() * B)).norm();
}

// Random matrix of exact rank k from a fixed seed.
inline Eigen::MatrixXd rank_k(Eigen::Index rows, Eigen::Index cols, Eigen::Index k, unsigned seed) {
  std::srand(seed);
  return Eigen::MatrixXd::Random(rows, k) * Eigen::MatrixXd::Random(k, cols);
}

}  // namespace testing
