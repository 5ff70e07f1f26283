#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gradedrm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised when a trigonometric kernel is evaluated on (or too close to) a pole.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Z2-graded dimension N|M of the single-site space. Basis vectors 0..N-1 are
/// even, N..N+M-1 are odd.
class GradedDim {
 public:
  GradedDim(int n_even, int n_odd);

  int n_even() const { return n_even_; }
  int n_odd() const { return n_odd_; }
  int size() const { return n_even_ + n_odd_; }

  /// Parity of basis vector `a` (0-based).
  int parity(int a) const { return a < n_even_ ? 0 : 1; }
  bool purely_even() const { return n_odd_ == 0; }

  friend bool operator==(const GradedDim&, const GradedDim&) = default;

 private:
  int n_even_;
  int n_odd_;
};

/// Parity p_i of the i-th basis vector with the 1-based labelling used for
/// matrix units e_ij. Throws std::out_of_range unless 1 <= index <= N+M.
int parity(const GradedDim& dim, int index);

/// Integer power n^k for basis-size bookkeeping.
long long ipow(long long n, int k);

/// Dense operator on `legs` tensor factors of C^{N|M}.
///
/// The matrix stores coefficients of formal tensor monomials
/// e_{r1 c1} (x) ... (x) e_{rk ck}; row index is (r1..rk) and column index is
/// (c1..ck), leg 1 slowest. This is the form in which the R-matrices are
/// written. The Koszul-signed matrix that actually acts on the graded tensor
/// product is obtained with action().
class LocalOperator {
 public:
  LocalOperator(GradedDim dim, int legs, Matrix coeffs);

  static LocalOperator zero(GradedDim dim, int legs);
  static LocalOperator identity(GradedDim dim, int legs);
  /// e_{r1 c1} (x) ... (x) e_{rk ck}; units are 0-based (row, col) pairs.
  static LocalOperator monomial(GradedDim dim, const std::vector<std::pair<int, int>>& units,
                                cplx coeff = 1.0);
  /// Inverse of action(): recovers monomial coefficients from an acting matrix.
  static LocalOperator from_action(GradedDim dim, int legs, const Matrix& action);

  const GradedDim& dim() const { return dim_; }
  int legs() const { return legs_; }
  const Matrix& coeffs() const { return coeffs_; }
  cplx coeff(Eigen::Index row, Eigen::Index col) const { return coeffs_(row, col); }

  Matrix action() const;

  /// Total parity (mod 2) of the monomial sitting at (row, col).
  int entry_parity(Eigen::Index row, Eigen::Index col) const;
  LocalOperator even_part() const;
  LocalOperator odd_part() const;

  /// Two legs only: P X P with P the graded permutation, i.e. X_{21} from X_{12}.
  LocalOperator leg_swapped() const;

  LocalOperator& operator+=(const LocalOperator& other);
  LocalOperator& operator-=(const LocalOperator& other);
  LocalOperator& operator*=(cplx s);
  friend LocalOperator operator+(LocalOperator a, const LocalOperator& b) { return a += b; }
  friend LocalOperator operator-(LocalOperator a, const LocalOperator& b) { return a -= b; }
  friend LocalOperator operator*(LocalOperator a, cplx s) { return a *= s; }
  friend LocalOperator operator*(cplx s, LocalOperator a) { return a *= s; }

  double norm() const { return coeffs_.norm(); }

 private:
  void require_compatible(const LocalOperator& other, const char* what) const;

  GradedDim dim_;
  int legs_;
  Matrix coeffs_;
};

/// Sign mask s with action = s .* coeffs (entry-wise). Leg m with operator
/// parity d_m picks up (-1)^{d_m * (sum of input parities on legs < m)}.
Eigen::MatrixXd koszul_mask(const GradedDim& dim, int legs);

/// Product in the super tensor algebra:
/// (A (x) B)(C (x) D) = (-1)^{|B||C|} AC (x) BD, iterated across legs.
LocalOperator super_multiply(const LocalOperator& a, const LocalOperator& b);

/// P_12 = sum_{i,j} (-1)^{p_j} e_ij (x) e_ji.
LocalOperator graded_permutation(const GradedDim& dim);

}  // namespace gradedrm
