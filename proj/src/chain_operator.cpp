#include "gradedrm/chain_operator.hpp"

#include <algorithm>
#include <string>

namespace gradedrm {

ChainState::ChainState(GradedDim d, int l, Vector amps)
    : dim(d), length(l), amplitudes(std::move(amps)) {
  if (amplitudes.size() != ipow(dim.size(), length))
    throw std::invalid_argument("state amplitude vector must have length n^L");
}

namespace {

std::vector<unsigned char> parity_table(const GradedDim& dim, long long count) {
  const int n = dim.size();
  std::vector<unsigned char> table(static_cast<size_t>(count), 0);
  if (dim.purely_even()) return table;
  for (long long i = 1; i < count; ++i)
    table[i] = static_cast<unsigned char>(table[i / n] ^ dim.parity(static_cast<int>(i % n)));
  return table;
}

}  // namespace

SiteFactor::SiteFactor(const LocalOperator& op, int first_site, int second_site, int length)
    : dim_(op.dim()), length_(length) {
  if (op.legs() != 2) throw std::invalid_argument("site factor needs a two-leg operator");
  if (first_site < 1 || first_site > length || second_site < 1 || second_site > length)
    throw std::out_of_range("site index outside 1..L");
  if (first_site == second_site) throw std::invalid_argument("site indices must differ");

  const LocalOperator oriented = first_site < second_site ? op : op.leg_swapped();
  lo_ = std::min(first_site, second_site) - 1;
  hi_ = std::max(first_site, second_site) - 1;

  const int n = dim_.size();
  const Matrix& c = oriented.coeffs();
  for (int sp = 0; sp < 2; ++sp)
    for (int sm = 0; sm < 2; ++sm) {
      Matrix v = c;
      if (!dim_.purely_even()) {
        for (int ra = 0; ra < n; ++ra)
          for (int rb = 0; rb < n; ++rb)
            for (int ca = 0; ca < n; ++ca)
              for (int cb = 0; cb < n; ++cb) {
                const int da = dim_.parity(ra) ^ dim_.parity(ca);
                const int db = dim_.parity(rb) ^ dim_.parity(cb);
                const int e = (da & sp) ^ (db & (sp ^ dim_.parity(ca) ^ sm));
                if (e) v(ra * n + rb, ca * n + cb) = -v(ra * n + rb, ca * n + cb);
              }
      }
      variants_[2 * sp + sm] = std::move(v);
    }
  build_sparse();
}

SiteFactor::SiteFactor(GradedDim dim, int length, int lo, int hi, std::array<Matrix, 4> variants)
    : dim_(dim), length_(length), lo_(lo), hi_(hi), variants_(std::move(variants)) {
  build_sparse();
}

void SiteFactor::build_sparse() {
  for (int v = 0; v < 4; ++v) {
    sparse_[v].clear();
    const Matrix& m = variants_[v];
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        if (m(r, c) != cplx{}) sparse_[v].push_back({r, c, m(r, c)});
  }
}

bool SiteFactor::operator==(const SiteFactor& other) const {
  if (!(dim_ == other.dim_) || length_ != other.length_ || lo_ != other.lo_ || hi_ != other.hi_)
    return false;
  for (int v = 0; v < 4; ++v)
    if (variants_[v] != other.variants_[v]) return false;
  return true;
}

SiteFactor SiteFactor::fused_with(const SiteFactor& right) const {
  if (right.lo_ != lo_ || right.hi_ != hi_ || right.length_ != length_ || !(right.dim_ == dim_))
    throw std::invalid_argument("fused factors must act on the same pair of sites");
  std::array<Matrix, 4> prod;
  for (int v = 0; v < 4; ++v) prod[v] = variants_[v] * right.variants_[v];
  return {dim_, length_, lo_, hi_, std::move(prod)};
}

template <int NN>
void SiteFactor::apply_blocks(cplx* amp) const {
  const int n = dim_.size();
  const int nn = NN > 0 ? NN : n * n;
  const long long stride_lo = ipow(n, length_ - 1 - lo_);
  const long long stride_hi = ipow(n, length_ - 1 - hi_);
  const long long prefix_count = ipow(n, lo_);
  const long long prefix_block = stride_lo * n;
  const long long mid_count = ipow(n, hi_ - lo_ - 1);
  const long long mid_block = stride_hi * n;

  const auto pre_par = parity_table(dim_, prefix_count);
  const auto mid_par = parity_table(dim_, mid_count);

  std::vector<long long> offset(nn);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) offset[a * n + b] = a * stride_lo + b * stride_hi;

  constexpr int kStack = NN > 0 ? NN : 1;
  std::array<cplx, kStack> in_fixed{}, out_fixed{};
  std::vector<cplx> in_dyn(NN > 0 ? 0 : nn), out_dyn(NN > 0 ? 0 : nn);
  cplx* in = NN > 0 ? in_fixed.data() : in_dyn.data();
  cplx* out = NN > 0 ? out_fixed.data() : out_dyn.data();

  for (long long p = 0; p < prefix_count; ++p) {
    const long long base_p = p * prefix_block;
    for (long long q = 0; q < mid_count; ++q) {
      const auto& entries = sparse_[2 * pre_par[p] + mid_par[q]];
      cplx* base = amp + base_p + q * mid_block;
      for (long long s = 0; s < stride_hi; ++s) {
        cplx* blk = base + s;
        for (int k = 0; k < nn; ++k) {
          in[k] = blk[offset[k]];
          out[k] = 0.0;
        }
        for (const Entry& e : entries) {
          // Written out: std::complex multiplication carries inf/nan recovery.
          const double ar = e.value.real(), ai = e.value.imag();
          const double br = in[e.col].real(), bi = in[e.col].imag();
          out[e.row] += cplx{ar * br - ai * bi, ar * bi + ai * br};
        }
        for (int k = 0; k < nn; ++k) blk[offset[k]] = out[k];
      }
    }
  }
}

void SiteFactor::apply_inplace(cplx* amp) const {
  switch (dim_.size()) {
    case 1: apply_blocks<1>(amp); break;
    case 2: apply_blocks<4>(amp); break;
    case 3: apply_blocks<9>(amp); break;
    case 4: apply_blocks<16>(amp); break;
    default: apply_blocks<0>(amp); break;
  }
}

void apply_product_inplace(std::span<const SiteFactor> factors, Vector& v) {
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) it->apply_inplace(v.data());
}

Matrix product_dense(std::span<const SiteFactor> factors, const GradedDim& dim, int length) {
  const long long d = ipow(dim.size(), length);
  if (d > ChainOperator::kDenseCap)
    throw std::length_error("dense chain operator above cap n^L <= 4096");
  Matrix x = Matrix::Identity(d, d);
  for (auto it = factors.rbegin(); it != factors.rend(); ++it)
    for (Eigen::Index c = 0; c < x.cols(); ++c) it->apply_inplace(x.col(c).data());
  return x;
}

ChainOperator::ChainOperator(GradedDim dim, int length, std::variant<Matrix, std::vector<Term>> rep)
    : dim_(dim), length_(length), rep_(std::move(rep)) {
  if (length < 1) throw std::invalid_argument("chain length must be positive");
}

ChainOperator ChainOperator::from_dense(GradedDim dim, int length, Matrix m) {
  const long long d = ipow(dim.size(), length);
  if (m.rows() != d || m.cols() != d)
    throw std::invalid_argument("dense chain operator must have side n^L");
  return {dim, length, std::move(m)};
}

ChainOperator ChainOperator::from_terms(GradedDim dim, int length, std::vector<Term> terms) {
  for (const auto& t : terms)
    for (const auto& f : t.factors)
      if (!(f.dim() == dim) || f.length() != length)
        throw std::invalid_argument("factor shape does not match chain operator");
  return {dim, length, std::move(terms)};
}

ChainOperator ChainOperator::identity(GradedDim dim, int length) {
  return from_terms(dim, length, {Term{1.0, {}}});
}

const Matrix& ChainOperator::matrix() const {
  if (!is_dense()) throw std::logic_error("chain operator is not in dense form");
  return std::get<Matrix>(rep_);
}

const std::vector<ChainOperator::Term>& ChainOperator::terms() const {
  if (is_dense()) throw std::logic_error("chain operator is in dense form");
  return std::get<std::vector<Term>>(rep_);
}

Matrix ChainOperator::to_dense() const {
  if (is_dense()) return matrix();
  const long long d = dimension();
  if (d > kDenseCap) throw std::length_error("dense chain operator above cap n^L <= 4096");
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& t : terms()) acc += t.coeff * product_dense(t.factors, dim_, length_);
  return acc;
}

namespace {

// Trie over the factor lists read from the right.
struct SuffixNode {
  const SiteFactor* factor = nullptr;
  cplx coeff = 0.0;
  bool ends = false;
  std::vector<int> children;
};

std::vector<SuffixNode> suffix_trie(const std::vector<ChainOperator::Term>& terms) {
  std::vector<SuffixNode> nodes(1);
  for (const auto& t : terms) {
    int at = 0;
    for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) {
      int next = -1;
      for (int c : nodes[at].children)
        if (*nodes[c].factor == *it) {
          next = c;
          break;
        }
      if (next < 0) {
        next = static_cast<int>(nodes.size());
        nodes.push_back({&*it, 0.0, false, {}});
        nodes[at].children.push_back(next);
      }
      at = next;
    }
    nodes[at].coeff += t.coeff;
    nodes[at].ends = true;
  }
  return nodes;
}

void accumulate(const std::vector<SuffixNode>& nodes, int at, Vector work, Vector& acc) {
  const auto& node = nodes[at];
  if (node.factor) node.factor->apply_inplace(work.data());
  if (node.ends) acc += node.coeff * work;
  const auto& ch = node.children;
  for (std::size_t c = 0; c < ch.size(); ++c) {
    if (c + 1 == ch.size())
      accumulate(nodes, ch[c], std::move(work), acc);
    else
      accumulate(nodes, ch[c], work, acc);
  }
}

}  // namespace

Vector ChainOperator::apply(const Vector& v) const {
  if (v.size() != dimension()) throw std::invalid_argument("state length does not match operator");
  if (is_dense()) return matrix() * v;
  Vector acc = Vector::Zero(v.size());
  accumulate(suffix_trie(terms()), 0, v, acc);
  return acc;
}

ChainState ChainOperator::apply(const ChainState& state) const {
  if (!(state.dim == dim_) || state.length != length_)
    throw std::invalid_argument("state shape does not match operator");
  return {dim_, length_, apply(state.amplitudes)};
}

void ChainOperator::require_same_shape(const ChainOperator& other, const char* what) const {
  if (!(dim_ == other.dim_) || length_ != other.length_)
    throw std::invalid_argument(std::string(what) + ": chain operator shape mismatch");
}

ChainOperator operator*(const ChainOperator& a, const ChainOperator& b) {
  a.require_same_shape(b, "operator*");
  if (!a.is_dense() && !b.is_dense()) {
    std::vector<ChainOperator::Term> out;
    out.reserve(a.terms().size() * b.terms().size());
    for (const auto& ta : a.terms())
      for (const auto& tb : b.terms()) {
        ChainOperator::Term t{ta.coeff * tb.coeff, ta.factors};
        t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
        out.push_back(std::move(t));
      }
    return ChainOperator::from_terms(a.dim_, a.length_, std::move(out));
  }
  return ChainOperator::from_dense(a.dim_, a.length_, a.to_dense() * b.to_dense());
}

ChainOperator operator+(const ChainOperator& a, const ChainOperator& b) {
  a.require_same_shape(b, "operator+");
  if (!a.is_dense() && !b.is_dense()) {
    auto out = a.terms();
    out.insert(out.end(), b.terms().begin(), b.terms().end());
    return ChainOperator::from_terms(a.dim_, a.length_, std::move(out));
  }
  return ChainOperator::from_dense(a.dim_, a.length_, a.to_dense() + b.to_dense());
}

ChainOperator operator-(const ChainOperator& a, const ChainOperator& b) { return a + (-1.0) * b; }

ChainOperator operator*(cplx s, const ChainOperator& a) {
  if (a.is_dense()) return ChainOperator::from_dense(a.dim_, a.length_, s * a.matrix());
  auto out = a.terms();
  for (auto& t : out) t.coeff *= s;
  return ChainOperator::from_terms(a.dim_, a.length_, std::move(out));
}

ChainOperator embed(const LocalOperator& op, int i, int j, int length) {
  ChainOperator::Term t{1.0, {SiteFactor(op, i, j, length)}};
  return ChainOperator::from_terms(op.dim(), length, {std::move(t)});
}

Matrix embed_dense(const LocalOperator& op, int i, int j, int length) {
  const SiteFactor f(op, i, j, length);
  return product_dense(std::span<const SiteFactor>(&f, 1), op.dim(), length);
}

double commutator_norm(const ChainOperator& a, const ChainOperator& b) {
  if (!(a.dim() == b.dim()) || a.length() != b.length())
    throw std::invalid_argument("commutator_norm: shape mismatch");
  const Matrix ma = a.to_dense();
  const Matrix mb = b.to_dense();
  const double scale = ma.norm() * mb.norm() + 1e-300;
  return (ma * mb - mb * ma).norm() / scale;
}

}  // namespace gradedrm
