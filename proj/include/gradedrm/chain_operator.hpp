#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "gradedrm/graded.hpp"

namespace gradedrm {

/// A state in (C^{N|M})^{(x)L}; site 1 is the slowest index.
struct ChainState {
  GradedDim dim;
  int length;
  Vector amplitudes;

  ChainState(GradedDim d, int l, Vector amps);
};

/// Two-leg operator placed on sites of an L-site chain and prepared for
/// matrix-free application.
///
/// The Koszul sign of an embedded monomial depends on the input parities of
/// the sites left of the lower site and between the two sites. The four
/// possible sign patterns are precomputed, so application is a plain gather,
/// small matrix-vector product and scatter per environment configuration.
class SiteFactor {
 public:
  /// Places `op` with its first leg on `first_site` and second leg on
  /// `second_site` (1-based, distinct).
  SiteFactor(const LocalOperator& op, int first_site, int second_site, int length);

  const GradedDim& dim() const { return dim_; }
  int length() const { return length_; }
  /// 1-based sites, lower first.
  int lower_site() const { return lo_ + 1; }
  int upper_site() const { return hi_ + 1; }

  void apply_inplace(cplx* amplitudes) const;

  /// this * right; both must sit on the same pair of sites.
  SiteFactor fused_with(const SiteFactor& right) const;

  /// Same sites and identical entries.
  bool operator==(const SiteFactor& other) const;

 private:
  SiteFactor(GradedDim dim, int length, int lo, int hi, std::array<Matrix, 4> variants);
  void build_sparse();
  // NN = n * n fixed at compile time, or 0.
  template <int NN>
  void apply_blocks(cplx* amplitudes) const;

  struct Entry {
    int row;
    int col;
    cplx value;
  };

  GradedDim dim_;
  int length_;
  int lo_;
  int hi_;
  // Indexed by 2 * (prefix parity) + (middle parity).
  std::array<Matrix, 4> variants_;
  std::array<std::vector<Entry>, 4> sparse_;
};

/// Ordered product f[0] f[1] ... f[m-1] applied to a vector (f[m-1] acts first).
void apply_product_inplace(std::span<const SiteFactor> factors, Vector& v);

/// Operator on the full chain: either a dense matrix of side n^L, or a sum of
/// coefficient-weighted ordered products of embedded two-site factors.
class ChainOperator {
 public:
  struct Term {
    cplx coeff = 1.0;
    std::vector<SiteFactor> factors;
  };

  /// Largest n^L for which dense matrices are materialized.
  static constexpr long long kDenseCap = 4096;

  static ChainOperator from_dense(GradedDim dim, int length, Matrix m);
  static ChainOperator from_terms(GradedDim dim, int length, std::vector<Term> terms);
  static ChainOperator identity(GradedDim dim, int length);

  const GradedDim& dim() const { return dim_; }
  int length() const { return length_; }
  long long dimension() const { return ipow(dim_.size(), length_); }

  bool is_dense() const { return std::holds_alternative<Matrix>(rep_); }
  const Matrix& matrix() const;
  const std::vector<Term>& terms() const;

  /// Dense matrix; throws std::length_error above kDenseCap.
  Matrix to_dense() const;
  ChainOperator materialized() const { return from_dense(dim_, length_, to_dense()); }

  /// Terms sharing their rightmost factors share the work of applying them.
  Vector apply(const Vector& v) const;
  ChainState apply(const ChainState& state) const;

  friend ChainOperator operator*(const ChainOperator& a, const ChainOperator& b);
  friend ChainOperator operator+(const ChainOperator& a, const ChainOperator& b);
  friend ChainOperator operator-(const ChainOperator& a, const ChainOperator& b);
  friend ChainOperator operator*(cplx s, const ChainOperator& a);

 private:
  ChainOperator(GradedDim dim, int length, std::variant<Matrix, std::vector<Term>> rep);
  void require_same_shape(const ChainOperator& other, const char* what) const;

  GradedDim dim_;
  int length_;
  std::variant<Matrix, std::vector<Term>> rep_;
};

/// The L-site operator X_ij acting on sites i and j (1-based, i != j) with the
/// first leg of `op` on site i. For i > j this is P_ij X_ji P_ij.
ChainOperator embed(const LocalOperator& op, int i, int j, int length);

/// Dense matrix of embed(op, i, j, length).
Matrix embed_dense(const LocalOperator& op, int i, int j, int length);

/// Dense matrix of an ordered factor product.
Matrix product_dense(std::span<const SiteFactor> factors, const GradedDim& dim, int length);

/// ||ab - ba||_F / (||a||_F ||b||_F + floor); zero for commuting operators.
double commutator_norm(const ChainOperator& a, const ChainOperator& b);

}  // namespace gradedrm
