#pragma once

// Independent reference constructions for the tests. Nothing here uses the
// library's sign masks or embeddings; signs are accumulated explicitly on
// basis vectors and matrix units.

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "gradedrm/graded.hpp"

namespace oracle {

using gradedrm::cplx;
using gradedrm::GradedDim;
using gradedrm::Matrix;
using gradedrm::Vector;

inline const double kPi = std::acos(-1.0);

using Units = std::vector<std::pair<int, int>>;  // (row, col) per leg, 0-based

inline int unit_parity(const GradedDim& d, std::pair<int, int> u) {
  return (d.parity(u.first) + d.parity(u.second)) % 2;
}

/// (A_1 (x) ... (x) A_k)(B_1 (x) ... (x) B_k) for matrix units, moving every
/// B_m to the left past A_{m+1} .. A_k one at a time. Empty when some
/// A_m B_m vanishes.
inline std::optional<std::pair<int, Units>> monomial_product(const GradedDim& d, const Units& a,
                                                             const Units& b) {
  int sign = 1;
  Units out;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m].second != b[m].first) return std::nullopt;
    out.emplace_back(a[m].first, b[m].second);
    for (std::size_t later = m + 1; later < a.size(); ++later)
      if (unit_parity(d, a[later]) * unit_parity(d, b[m])) sign = -sign;
  }
  return std::make_pair(sign, out);
}

inline Units random_units(const GradedDim& d, int legs, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, d.size() - 1);
  Units u;
  for (int m = 0; m < legs; ++m) u.emplace_back(pick(rng), pick(rng));
  return u;
}

/// Basis label (s_1, ..., s_L) of index `idx`, site 1 slowest.
inline std::vector<int> digits(long long idx, int n, int length) {
  std::vector<int> s(length);
  for (int k = length - 1; k >= 0; --k) {
    s[k] = static_cast<int>(idx % n);
    idx /= n;
  }
  return s;
}

inline long long index_of(const std::vector<int>& s, int n) {
  long long idx = 0;
  for (int v : s) idx = idx * n + v;
  return idx;
}

/// Graded swap of sites i < j (1-based) on the L-site chain:
/// v_a at i and v_b at j trade places, picking up
/// (-1)^{p_a p_b + (p_a + p_b) * (parities strictly between)}.
inline Matrix graded_swap(const GradedDim& d, int i, int j, int length) {
  if (i > j) std::swap(i, j);
  const int n = d.size();
  const long long dim = gradedrm::ipow(n, length);
  Matrix m = Matrix::Zero(dim, dim);
  for (long long c = 0; c < dim; ++c) {
    auto s = digits(c, n, length);
    const int pa = d.parity(s[i - 1]), pb = d.parity(s[j - 1]);
    int between = 0;
    for (int k = i; k < j - 1; ++k) between += d.parity(s[k]);
    const int e = pa * pb + (pa + pb) * between;
    std::swap(s[i - 1], s[j - 1]);
    m(index_of(s, n), c) = (e % 2) ? -1.0 : 1.0;
  }
  return m;
}

/// pi^2 sum_{k<i} (1 - P_ki) / sin^2(pi (i - k) / L) from explicit swaps.
inline Matrix haldane_shastry(const GradedDim& d, int length) {
  const long long dim = gradedrm::ipow(d.size(), length);
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const double s = std::sin(kPi * (i - k) / length);
      h += kPi * kPi / (s * s) * (Matrix::Identity(dim, dim) - graded_swap(d, k, i, length));
    }
  return h;
}

/// gl(1|1) target of the ZnGraded limit, from matrix units acting on basis
/// states: an odd unit at site m passes the input parities of sites < m.
inline Matrix anisotropic_xxz(int length) {
  const GradedDim d(1, 1);
  const long long dim = gradedrm::ipow(2, length);
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const double x = kPi * (i - k) / length;
      const double w = kPi * kPi / (std::sin(x) * std::sin(x));
      for (long long c = 0; c < dim; ++c) {
        auto s = digits(c, 2, length);
        const int a = s[k - 1], b = s[i - 1];
        h(c, c) += w * ((a == 0 && b == 1) + (a == 1 && b == 0) + 2 * (a == 1 && b == 1));
        if (a == b) continue;
        // e12 (x) e21 takes (1, 0) to (0, 1); e21 (x) e12 takes (0, 1) to (1, 0).
        int before = 0;
        for (int j = k; j < i - 1; ++j) before += s[j];
        // Both units are odd, so the parities of sites < k enter twice and
        // cancel; what is left is sites k..i-1.
        const int e = a + before;
        const double sign = (e % 2) ? -1.0 : 1.0;
        const double coeff = a == 1 ? 1.0 : -1.0;
        std::swap(s[k - 1], s[i - 1]);
        h(index_of(s, 2), c) += w * std::cos(x) * coeff * sign;
      }
    }
  return h;
}

inline Vector random_vector(long long size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(size);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

inline cplx random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(0.05, 0.95), y(0.1, 0.5);
  return {x(rng), y(rng)};
}

inline double relative(const Matrix& a, const Matrix& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace oracle
