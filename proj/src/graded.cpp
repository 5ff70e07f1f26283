#include "gradedrm/graded.hpp"

#include <string>

namespace gradedrm {

GradedDim::GradedDim(int n_even, int n_odd) : n_even_(n_even), n_odd_(n_odd) {
  if (n_even < 0 || n_odd < 0)
    throw std::invalid_argument("graded dimension components must be nonnegative");
  if (n_even + n_odd < 1) throw std::invalid_argument("graded dimension N+M must be at least 1");
}

int parity(const GradedDim& dim, int index) {
  if (index < 1 || index > dim.size())
    throw std::out_of_range("basis index " + std::to_string(index) + " outside 1.." +
                            std::to_string(dim.size()));
  return dim.parity(index - 1);
}

long long ipow(long long n, int k) {
  long long r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

namespace {

// Digits of a multi-index, leg 0 slowest.
void decode(long long idx, int n, int legs, int* out) {
  for (int m = legs - 1; m >= 0; --m) {
    out[m] = static_cast<int>(idx % n);
    idx /= n;
  }
}

}  // namespace

LocalOperator::LocalOperator(GradedDim dim, int legs, Matrix coeffs)
    : dim_(dim), legs_(legs), coeffs_(std::move(coeffs)) {
  if (legs < 1) throw std::invalid_argument("operator needs at least one leg");
  const auto side = ipow(dim.size(), legs);
  if (coeffs_.rows() != side || coeffs_.cols() != side)
    throw std::invalid_argument("coefficient matrix must be square with side n^legs");
}

LocalOperator LocalOperator::zero(GradedDim dim, int legs) {
  const auto side = ipow(dim.size(), legs);
  return {dim, legs, Matrix::Zero(side, side)};
}

LocalOperator LocalOperator::identity(GradedDim dim, int legs) {
  const auto side = ipow(dim.size(), legs);
  return {dim, legs, Matrix::Identity(side, side)};
}

LocalOperator LocalOperator::monomial(GradedDim dim, const std::vector<std::pair<int, int>>& units,
                                      cplx coeff) {
  const int n = dim.size();
  long long row = 0, col = 0;
  for (auto [r, c] : units) {
    if (r < 0 || r >= n || c < 0 || c >= n) throw std::out_of_range("matrix unit index");
    row = row * n + r;
    col = col * n + c;
  }
  auto op = zero(dim, static_cast<int>(units.size()));
  op.coeffs_(row, col) = coeff;
  return op;
}

Eigen::MatrixXd koszul_mask(const GradedDim& dim, int legs) {
  const int n = dim.size();
  const auto side = ipow(n, legs);
  Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(side, side);
  if (dim.purely_even()) return mask;
  std::vector<int> rd(legs), cd(legs);
  for (long long c = 0; c < side; ++c) {
    decode(c, n, legs, cd.data());
    for (long long r = 0; r < side; ++r) {
      decode(r, n, legs, rd.data());
      int exponent = 0, passed = 0;
      for (int m = 0; m < legs; ++m) {
        const int d = dim.parity(rd[m]) ^ dim.parity(cd[m]);
        exponent ^= d & passed;
        passed ^= dim.parity(cd[m]);
      }
      if (exponent) mask(r, c) = -1.0;
    }
  }
  return mask;
}

Matrix LocalOperator::action() const {
  if (dim_.purely_even()) return coeffs_;
  return coeffs_.cwiseProduct(koszul_mask(dim_, legs_).cast<cplx>());
}

LocalOperator LocalOperator::from_action(GradedDim dim, int legs, const Matrix& action) {
  if (dim.purely_even()) return {dim, legs, action};
  // The mask is an entry-wise involution.
  return {dim, legs, action.cwiseProduct(koszul_mask(dim, legs).cast<cplx>())};
}

int LocalOperator::entry_parity(Eigen::Index row, Eigen::Index col) const {
  const int n = dim_.size();
  int p = 0;
  for (int m = 0; m < legs_; ++m) {
    p ^= dim_.parity(static_cast<int>(row % n)) ^ dim_.parity(static_cast<int>(col % n));
    row /= n;
    col /= n;
  }
  return p;
}

LocalOperator LocalOperator::even_part() const {
  Matrix m = coeffs_;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (entry_parity(r, c)) m(r, c) = 0.0;
  return {dim_, legs_, std::move(m)};
}

LocalOperator LocalOperator::odd_part() const {
  Matrix m = coeffs_;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (!entry_parity(r, c)) m(r, c) = 0.0;
  return {dim_, legs_, std::move(m)};
}

LocalOperator LocalOperator::leg_swapped() const {
  if (legs_ != 2) throw std::invalid_argument("leg_swapped needs a two-leg operator");
  const int n = dim_.size();
  Matrix out = Matrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const cplx v = coeffs_(a * n + b, c * n + d);
          if (v == cplx{}) continue;
          const int da = dim_.parity(a) ^ dim_.parity(c);
          const int db = dim_.parity(b) ^ dim_.parity(d);
          out(b * n + a, d * n + c) += (da & db) ? -v : v;
        }
  return {dim_, 2, std::move(out)};
}

void LocalOperator::require_compatible(const LocalOperator& other, const char* what) const {
  if (!(dim_ == other.dim_) || legs_ != other.legs_)
    throw std::invalid_argument(std::string(what) + ": dimension or leg mismatch");
}

LocalOperator& LocalOperator::operator+=(const LocalOperator& other) {
  require_compatible(other, "operator+");
  coeffs_ += other.coeffs_;
  return *this;
}

LocalOperator& LocalOperator::operator-=(const LocalOperator& other) {
  require_compatible(other, "operator-");
  coeffs_ -= other.coeffs_;
  return *this;
}

LocalOperator& LocalOperator::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

LocalOperator super_multiply(const LocalOperator& a, const LocalOperator& b) {
  if (!(a.dim() == b.dim()) || a.legs() != b.legs())
    throw std::invalid_argument("super_multiply: dimension or leg mismatch");
  if (a.dim().purely_even()) return {a.dim(), a.legs(), a.coeffs() * b.coeffs()};
  const Eigen::MatrixXd mask = koszul_mask(a.dim(), a.legs());
  const Matrix sa = a.coeffs().cwiseProduct(mask.cast<cplx>());
  const Matrix sb = b.coeffs().cwiseProduct(mask.cast<cplx>());
  Matrix prod = sa * sb;
  return {a.dim(), a.legs(), prod.cwiseProduct(mask.cast<cplx>())};
}

LocalOperator graded_permutation(const GradedDim& dim) {
  const int n = dim.size();
  Matrix p = Matrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i * n + j, j * n + i) = dim.parity(j) ? -1.0 : 1.0;
  return {dim, 2, std::move(p)};
}

}  // namespace gradedrm
