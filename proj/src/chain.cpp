#include "gradedrm/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gradedrm/qmr_ops.hpp"

namespace gradedrm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;

using Terms = std::vector<ChainOperator::Term>;

ChainOperator finish(const GradedDim& dim, int length, Terms terms, Representation rep) {
  auto op = ChainOperator::from_terms(dim, length, std::move(terms));
  const bool dense = rep == Representation::Dense ||
                     (rep == Representation::Auto && op.dimension() <= ChainOperator::kDenseCap);
  return dense ? op.materialized() : op;
}

// Embedded Rbar_ij and Fbar_ij at the equilibrium points, built once per pair.
class FrozenFactors {
 public:
  FrozenFactors(const RMatrixSpec& spec, int length)
      : spec_(spec), length_(length), x_(equilibrium_points(length)) {
    if (length < 2) throw std::invalid_argument("a chain needs at least two sites");
  }

  const SiteFactor& r(int i, int j) { return get(r_, i, j, [&](cplx z) { return build_r_normalized(spec_, z); }); }
  const SiteFactor& f(int i, int j) { return get(f_, i, j, [&](cplx z) { return build_f_derivative(spec_, z); }); }
  const std::vector<cplx>& x() const { return x_; }

 private:
  template <class Build>
  const SiteFactor& get(std::map<std::pair<int, int>, SiteFactor>& cache, int i, int j, Build build) {
    auto it = cache.find({i, j});
    if (it == cache.end())
      it = cache.emplace(std::make_pair(i, j), SiteFactor(build(x_[i - 1] - x_[j - 1]), i, j, length_)).first;
    return it->second;
  }

  RMatrixSpec spec_;
  int length_;
  std::vector<cplx> x_;
  std::map<std::pair<int, int>, SiteFactor> r_, f_;
};

// Rbar_{i-1,i} .. Rbar_{k+1,i} [middle] Rbar_{i,k+1} .. Rbar_{i,i-1}
std::vector<SiteFactor> dressed(FrozenFactors& ff, int i, int k, std::vector<SiteFactor> middle) {
  std::vector<SiteFactor> out;
  for (int j = i - 1; j > k; --j) out.push_back(ff.r(j, i));
  for (auto& m : middle) out.push_back(std::move(m));
  for (int j = k + 1; j < i; ++j) out.push_back(ff.r(i, j));
  return out;
}

Terms h1_terms(const RMatrixSpec& spec, int length) {
  FrozenFactors ff(spec, length);
  Terms terms;
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) terms.push_back({1.0, dressed(ff, i, k, {ff.r(k, i).fused_with(ff.f(i, k))})});
  return terms;
}

}  // namespace

std::vector<cplx> equilibrium_points(int length) {
  if (length < 1) throw std::invalid_argument("chain length must be positive");
  std::vector<cplx> x(length);
  for (int k = 1; k <= length; ++k) x[k - 1] = double(k) / double(length);
  return x;
}

bool degenerate_chain_hbar(cplx hbar, int length) {
  return lattice_distance(hbar * static_cast<double>(length)) < 1e-9;
}

namespace {

struct PhiSums {
  std::vector<cplx> sum;     // S_l, index l-1
  std::vector<double> size;  // sum of |term| entering S_l
};

PhiSums phi_sums(int length, int k, cplx hbar) {
  if (k < 1 || k > length) throw std::invalid_argument("phi_sum_identity: k outside 1..L");
  const DifferenceOperator d({Family::UqGlNM, GradedDim(1, 0), hbar}, length, k, false);
  const auto x = equilibrium_points(length);
  PhiSums s{std::vector<cplx>(length, 0.0), std::vector<double>(length, 0.0)};
  for (const auto& t : d.terms()) {
    const cplx c = d.coefficient(t, x);
    for (int i : t.subset) {
      s.sum[i - 1] += c;
      s.size[i - 1] += std::abs(c);
    }
  }
  return s;
}

double phi_residual(const PhiSums& s, int l, int m) {
  return std::abs(s.sum[l - 1] - s.sum[m - 1]) /
         (std::max(s.size[l - 1], s.size[m - 1]) + kFloor);
}

}  // namespace

double phi_sum_identity(int length, int k, int l, int m, cplx hbar) {
  if (l < 1 || l > length || m < 1 || m > length)
    throw std::invalid_argument("phi_sum_identity: indices outside 1..L");
  return phi_residual(phi_sums(length, k, hbar), l, m);
}

double phi_sum_max_residual(int length, int k, cplx hbar) {
  const PhiSums s = phi_sums(length, k, hbar);
  double worst = 0.0;
  for (int l = 2; l <= length; ++l) worst = std::max(worst, phi_residual(s, 1, l));
  return worst;
}

ChainOperator hamiltonian_h1(const RMatrixSpec& spec, int length, Representation rep) {
  return finish(spec.dim, length, h1_terms(spec, length), rep);
}

ChainOperator hamiltonian_h2(const RMatrixSpec& spec, int length, Representation rep) {
  FrozenFactors ff(spec, length);
  const auto& x = ff.x();
  Terms terms;
  for (int m = 1; m <= length; ++m)
    for (int l = m + 1; l <= length; ++l) {
      cplx c = 1.0;
      for (int j = 1; j <= length; ++j)
        if (j != m && j != l) c *= phi(spec.hbar, x[j - 1] - x[m - 1]) * phi(spec.hbar, x[j - 1] - x[l - 1]);

      for (int i = 1; i < m; ++i) {
        std::vector<SiteFactor> a;
        for (int j = m - 1; j >= i; --j) a.push_back(ff.r(j, m));
        a.push_back(ff.f(m, i));
        for (int j = i + 1; j < m; ++j) a.push_back(ff.r(m, j));
        terms.push_back({c, std::move(a)});

        std::vector<SiteFactor> b;
        for (int j = m - 1; j >= 1; --j) b.push_back(ff.r(j, m));
        for (int j = l - 1; j > m; --j) b.push_back(ff.r(j, l));
        for (int j = m - 1; j >= i; --j) b.push_back(ff.r(j, l));
        b.push_back(ff.f(l, i));
        for (int j = i + 1; j < m; ++j) b.push_back(ff.r(l, j));
        for (int j = m + 1; j < l; ++j) b.push_back(ff.r(l, j));
        for (int j = 1; j < m; ++j) b.push_back(ff.r(m, j));
        terms.push_back({c, std::move(b)});
      }
      for (int i = m + 1; i < l; ++i) {
        std::vector<SiteFactor> a;
        for (int j = l - 1; j >= i; --j) a.push_back(ff.r(j, l));
        a.push_back(ff.f(l, i));
        for (int j = i + 1; j < l; ++j) a.push_back(ff.r(l, j));
        terms.push_back({c, std::move(a)});
      }
    }
  return finish(spec.dim, length, std::move(terms), rep);
}

ChainOperator htilde_k(const RMatrixSpec& spec, int length, int k, Representation rep) {
  const DifferenceOperator d(spec, length, k, true);
  FrozenFactors ff(spec, length);
  const auto& x = ff.x();
  Terms terms;
  for (const auto& t : d.terms()) {
    const cplx c = d.coefficient(t, x);
    std::vector<SiteFactor> left;
    for (auto [i, j] : t.left) left.push_back(ff.r(i, j));
    for (size_t pos = 0; pos < t.right.size(); ++pos) {
      std::vector<SiteFactor> f = left;
      for (size_t q = 0; q < t.right.size(); ++q) {
        const auto [i, j] = t.right[q];
        f.push_back(q == pos ? ff.f(i, j) : ff.r(i, j));
      }
      terms.push_back({c, std::move(f)});
    }
  }
  return finish(spec.dim, length, std::move(terms), rep);
}

cplx h1_constant(const RMatrixSpec& spec, int length) {
  const auto x = equilibrium_points(length);
  cplx c = 1.0;
  for (int j = 2; j <= length; ++j) c *= phi(spec.hbar, x[j - 1] - x[0]);
  return c;
}

ChainOperator h1_from_c_matrix(const RMatrixSpec& spec, int length, Representation rep) {
  if (spec.family != Family::UqGlNM || spec.dim.size() != 2)
    throw std::invalid_argument("C-matrix form of H1 needs UqGlNM with N+M = 2");
  const LocalOperator c = c_matrix_closed_form(spec);
  FrozenFactors ff(spec, length);
  const auto& x = ff.x();
  const cplx h = spec.hbar;
  Terms terms;
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const cplx d = x[i - 1] - x[k - 1];
      const cplx s = -kPi * std::sin(kPi * h) / (std::sin(kPi * (h + d)) * std::sin(kPi * (h - d)));
      terms.push_back({s, dressed(ff, i, k, {SiteFactor(c, k, i, length)})});
    }
  return finish(spec.dim, length, std::move(terms), rep);
}

LocalOperator c_matrix_at_zero(const RMatrixSpec& spec) {
  std::vector<Matrix> c;
  for (double h : {1e-3, 5e-4, 2.5e-4}) {
    RMatrixSpec s = spec;
    s.hbar = h;
    c.push_back(c_matrix(s).coeffs());
  }
  const Matrix b1 = 2.0 * c[1] - c[0];
  const Matrix b2 = 2.0 * c[2] - c[1];
  return {spec.dim, 2, (4.0 * b2 - b1) / 3.0};
}

Vector site_gauge(const GradedDim& dim, int length) {
  const auto x = equilibrium_points(length);
  const int n = dim.size();
  Vector g = Vector::Ones(1);
  for (int k = 0; k < length; ++k) {
    const Matrix gk = twist_data(dim, 0.0, x[k]).gauge;
    Vector next(g.size() * n);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      for (int a = 0; a < n; ++a) next(i * n + a) = g(i) * gk(a, a);
    g = std::move(next);
  }
  return g;
}

double gauge_relation_residual(const GradedDim& dim, int length, cplx hbar) {
  if (dim.size() != 2) throw std::invalid_argument("the gauge relation holds for N+M = 2");
  const RMatrixSpec zn{Family::ZnGraded, dim, hbar};
  const RMatrixSpec uq{Family::UqGlNM, dim, hbar};
  const Matrix hz = hamiltonian_h1(zn, length, Representation::Dense).matrix();
  const Matrix hu = hamiltonian_h1(uq, length, Representation::Dense).matrix();

  const int n = dim.size();
  Eigen::VectorXcd d1(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) d1(a * n + b) = 2.0 * kPi * cplx{0.0, 1.0} * double(a) / double(n);

  FrozenFactors ff(uq, length);
  const auto x = equilibrium_points(length);
  Terms corr;
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const Matrix r = build_r_normalized(uq, x[i - 1] - x[k - 1]).coeffs();
      const Matrix comm = d1.asDiagonal() * r - r * d1.asDiagonal();
      corr.push_back({1.0, dressed(ff, i, k, {ff.r(k, i), SiteFactor(LocalOperator(dim, 2, comm), i, k, length)})});
    }
  const Matrix hc = ChainOperator::from_terms(dim, length, std::move(corr)).to_dense();
  const Vector g = site_gauge(dim, length);
  const Matrix rhs = g.asDiagonal() * (hu + hc) * g.cwiseInverse().asDiagonal();
  return (hz - rhs).norm() / (hz.norm() + kFloor);
}

LimitResult nonrelativistic_limit_h1(const RMatrixSpec& spec, int length) {
  const double hs[] = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
  std::vector<Matrix> a;
  for (double h : hs) {
    RMatrixSpec s = spec;
    s.hbar = h;
    a.push_back(hamiltonian_h1(s, length, Representation::Dense).matrix() / h);
  }
  auto richardson = [&](int first) -> Matrix {
    const Matrix b1 = 2.0 * a[first + 1] - a[first];
    const Matrix b2 = 2.0 * a[first + 2] - a[first + 1];
    return (4.0 * b2 - b1) / 3.0;
  };
  Matrix limit = richardson(0);
  // The same scheme one halving further down estimates the error of `limit`.
  const double err = (limit - richardson(1)).cwiseAbs().maxCoeff();
  if (err > 1e-5) throw std::runtime_error("Richardson extrapolation of H1/hbar did not settle");
  return {std::move(limit), err};
}

Matrix haldane_shastry_target(const GradedDim& dim, int length) {
  const auto x = equilibrium_points(length);
  const long long d = ipow(dim.size(), length);
  const LocalOperator p = graded_permutation(dim);
  Matrix t = Matrix::Zero(d, d);
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const cplx s = std::sin(kPi * (x[i - 1] - x[k - 1]));
      t += kPi * kPi / (s * s) * (Matrix::Identity(d, d) - embed_dense(p, k, i, length));
    }
  return t;
}

Matrix anisotropic_target(int length) {
  const GradedDim dim(1, 1);
  const auto x = equilibrium_points(length);
  const long long d = ipow(2, length);
  auto diag = LocalOperator::monomial(dim, {{0, 0}, {1, 1}});
  diag += LocalOperator::monomial(dim, {{1, 1}, {0, 0}});
  diag += LocalOperator::monomial(dim, {{1, 1}, {1, 1}}, 2.0);
  auto hop = LocalOperator::monomial(dim, {{0, 1}, {1, 0}});
  hop -= LocalOperator::monomial(dim, {{1, 0}, {0, 1}});
  Matrix t = Matrix::Zero(d, d);
  for (int i = 2; i <= length; ++i)
    for (int k = 1; k < i; ++k) {
      const cplx a = kPi * (x[i - 1] - x[k - 1]);
      const cplx s2 = std::sin(a) * std::sin(a);
      t += kPi * kPi / s2 * embed_dense(diag, k, i, length) +
           kPi * kPi * std::cos(a) / s2 * embed_dense(hop, k, i, length);
    }
  return t;
}

SpectrumResult spectrum(const ChainOperator& op, double cluster_tolerance) {
  return spectrum(op.to_dense(), cluster_tolerance);
}

SpectrumResult spectrum(const Matrix& m, double cluster_tolerance) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<size_t> parent(ev.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (size_t i = 0; i < ev.size(); ++i)
    for (size_t j = i + 1; j < ev.size() && ev[j].real() - ev[i].real() <= cluster_tolerance; ++j)
      if (std::abs(ev[j] - ev[i]) <= cluster_tolerance) parent[root(j)] = root(i);

  SpectrumResult out{ev, {}, cluster_tolerance, 0.0};
  std::map<size_t, size_t> level_of;
  std::vector<cplx> sums;
  for (size_t i = 0; i < ev.size(); ++i) {
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(ev[i].imag()));
    const size_t r = root(i);
    auto [it, fresh] = level_of.emplace(r, out.levels.size());
    if (fresh) {
      out.levels.push_back({0.0, 0});
      sums.push_back(0.0);
    }
    sums[it->second] += ev[i];
    ++out.levels[it->second].multiplicity;
  }
  for (size_t l = 0; l < out.levels.size(); ++l)
    out.levels[l].value = sums[l] / double(out.levels[l].multiplicity);
  return out;
}

}  // namespace gradedrm
