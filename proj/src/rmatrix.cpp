#include "gradedrm/rmatrix.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gradedrm {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

cplx cot(cplx x) { return std::cos(x) / std::sin(x); }

void require_regular(cplx z, const char* what) {
  if (lattice_distance(z) < kPoleGuard) {
    std::ostringstream os;
    os << what << " at a pole: " << z;
    throw SingularPointError(os.str());
  }
}

// Per-entry ingredients of either family, after any injected mutation.
struct Layout {
  int n;
  std::vector<double> diag_sign;      // (-1)^{p_a}
  std::vector<double> hbar_cot_sign;  // +1
  Eigen::MatrixXd off_sign;           // (-1)^{p_c} at (a, c)
  Matrix z_exponent;                  // e^{alpha z} phase of e_ac (x) e_ca
  Matrix w_exponent;                  // e^{beta hbar} phase of e_aa (x) e_cc
};

Layout make_layout(const RMatrixSpec& spec) {
  const GradedDim& d = spec.dim;
  const int n = d.size();
  Layout l{n, std::vector<double>(n), std::vector<double>(n, 1.0), Eigen::MatrixXd::Zero(n, n),
           Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int a = 0; a < n; ++a) l.diag_sign[a] = d.parity(a) ? -1.0 : 1.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (a == c) continue;
      l.off_sign(a, c) = d.parity(c) ? -1.0 : 1.0;
      if (spec.family == Family::ZnGraded) {
        const cplx alpha = kI * kPi / double(n) * double(2 * (a - c) - n * sign(a - c));
        l.z_exponent(a, c) = alpha;
        l.w_exponent(a, c) = alpha;
      } else {
        l.z_exponent(a, c) = kI * kPi * double(sign(c - a));
      }
    }
  if (spec.mutation) {
    const auto& m = *spec.mutation;
    if (m.a < 0 || m.a >= n || m.c < 0 || m.c >= n)
      throw std::out_of_range("mutation index outside basis");
    using K = RMatrixMutation::Kind;
    switch (m.kind) {
      case K::DiagonalParitySign: l.diag_sign[m.a] = -l.diag_sign[m.a]; break;
      case K::OffDiagonalParitySign: l.off_sign(m.a, m.c) = -l.off_sign(m.a, m.c); break;
      case K::SpectralExponentSign: l.z_exponent(m.a, m.c) = -l.z_exponent(m.a, m.c); break;
      case K::WeightExponentSign: l.w_exponent(m.a, m.c) = -l.w_exponent(m.a, m.c); break;
      case K::HbarCotSign: l.hbar_cot_sign[m.a] = -l.hbar_cot_sign[m.a]; break;
    }
  }
  return l;
}

}  // namespace

std::string_view family_tag(Family f) { return f == Family::UqGlNM ? "uq" : "zn"; }

Family parse_family(std::string_view tag) {
  if (tag == "uq") return Family::UqGlNM;
  if (tag == "zn") return Family::ZnGraded;
  throw std::invalid_argument("unknown R-matrix family '" + std::string(tag) + "'");
}

RMatrixSpec make_spec(Family family, int n_even, int n_odd, cplx hbar) {
  if (lattice_distance(hbar) < kPoleGuard)
    throw std::invalid_argument("hbar must not be an integer");
  return RMatrixSpec{family, GradedDim(n_even, n_odd), hbar};
}

std::string describe(const RMatrixSpec& spec) {
  std::ostringstream os;
  os << family_tag(spec.family) << "(" << spec.dim.n_even() << "|" << spec.dim.n_odd() << ")";
  return os.str();
}

double lattice_distance(cplx z) { return std::abs(z - std::round(z.real())); }

cplx phi(cplx hbar, cplx z) {
  require_regular(hbar, "phi: hbar");
  require_regular(z, "phi: z");
  return kPi * (cot(kPi * hbar) + cot(kPi * z));
}

cplx phi_dz(cplx z) {
  require_regular(z, "phi_dz: z");
  const cplx s = std::sin(kPi * z);
  return -kPi * kPi / (s * s);
}

LocalOperator build_r(const RMatrixSpec& spec, cplx z) {
  require_regular(spec.hbar, "R-matrix: hbar");
  require_regular(z, "R-matrix: z");
  const Layout l = make_layout(spec);
  const int n = l.n;
  const cplx ch = cot(kPi * spec.hbar), cz = cot(kPi * z);
  const cplx sh = std::sin(kPi * spec.hbar), sz = std::sin(kPi * z);
  Matrix r = Matrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a) {
    r(a * n + a, a * n + a) = kPi * (l.diag_sign[a] * cz + l.hbar_cot_sign[a] * ch);
    for (int c = 0; c < n; ++c) {
      if (c == a) continue;
      r(a * n + c, a * n + c) = kPi * std::exp(l.w_exponent(a, c) * spec.hbar) / sh;
      r(a * n + c, c * n + a) = l.off_sign(a, c) * kPi * std::exp(l.z_exponent(a, c) * z) / sz;
    }
  }
  return {spec.dim, 2, std::move(r)};
}

LocalOperator build_r_dz(const RMatrixSpec& spec, cplx z) {
  require_regular(spec.hbar, "R-matrix: hbar");
  require_regular(z, "R-matrix: z");
  const Layout l = make_layout(spec);
  const int n = l.n;
  const cplx sz = std::sin(kPi * z), cz = cot(kPi * z);
  Matrix r = Matrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a) {
    r(a * n + a, a * n + a) = -kPi * kPi * l.diag_sign[a] / (sz * sz);
    for (int c = 0; c < n; ++c) {
      if (c == a) continue;
      const cplx alpha = l.z_exponent(a, c);
      r(a * n + c, c * n + a) = l.off_sign(a, c) * kPi * std::exp(alpha * z) * (alpha - kPi * cz) / sz;
    }
  }
  return {spec.dim, 2, std::move(r)};
}

LocalOperator build_r_normalized(const RMatrixSpec& spec, cplx z) {
  if (lattice_distance(z + spec.hbar) < kPoleGuard)
    throw SingularPointError("normalized R-matrix: phi(hbar, z) vanishes");
  LocalOperator r = build_r(spec, z);
  r *= 1.0 / phi(spec.hbar, z);
  return r;
}

LocalOperator build_f_derivative(const RMatrixSpec& spec, cplx z) {
  if (lattice_distance(z + spec.hbar) < kPoleGuard)
    throw SingularPointError("normalized R-matrix: phi(hbar, z) vanishes");
  const cplx p = phi(spec.hbar, z);
  const cplx dp = phi_dz(z);
  const Matrix m = (build_r_dz(spec, z).coeffs() * p - build_r(spec, z).coeffs() * dp) / (p * p);
  return {spec.dim, 2, m};
}

LocalOperator residue_at_zero(const RMatrixSpec& spec) {
  const Layout l = make_layout(spec);
  const int n = l.n;
  // pi cot(pi z) ~ 1/z and pi e^{alpha z}/sin(pi z) ~ 1/z.
  Matrix r = Matrix::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a) {
    r(a * n + a, a * n + a) = l.diag_sign[a];
    for (int c = 0; c < n; ++c)
      if (c != a) r(a * n + c, c * n + a) = l.off_sign(a, c);
  }
  return {spec.dim, 2, std::move(r)};
}

CMatrixFit fit_c_matrix(const RMatrixSpec& spec, std::span<const std::pair<cplx, cplx>> points) {
  if (points.empty()) throw std::invalid_argument("fit_c_matrix needs sample points");
  const cplx h = spec.hbar;
  std::vector<Matrix> samples;
  for (auto [u, v] : points) {
    const LocalOperator x = super_multiply(build_r_normalized(spec, v - u),
                                           build_f_derivative(spec, u - v).leg_swapped());
    const cplx scale =
        -kPi * std::sin(kPi * h) / (std::sin(kPi * (h + u - v)) * std::sin(kPi * (h - u + v)));
    samples.push_back(x.coeffs() / scale);
  }
  Matrix mean = Matrix::Zero(samples[0].rows(), samples[0].cols());
  for (const auto& s : samples) mean += s;
  mean /= double(samples.size());
  double spread = 0.0;
  const double ref = mean.norm() + 1e-300;
  for (const auto& s : samples) spread = std::max(spread, (s - mean).norm() / ref);
  return {LocalOperator(spec.dim, 2, mean), spread};
}

LocalOperator c_matrix(const RMatrixSpec& spec) {
  if (spec.dim.size() != 2) throw std::invalid_argument("C-matrix is defined for N+M = 2");
  static const std::array<std::pair<cplx, cplx>, 5> kPoints{{
      {{0.137, 0.213}, {0.712, 0.341}},
      {{0.405, 0.118}, {0.066, 0.452}},
      {{0.853, 0.376}, {0.291, 0.157}},
      {{0.528, 0.289}, {0.947, 0.104}},
      {{0.219, 0.437}, {0.633, 0.262}},
  }};
  auto fit = fit_c_matrix(spec, kPoints);
  if (fit.spread > 1e-10) {
    std::ostringstream os;
    os << "C-matrix factorization fails for " << describe(spec) << " (spread " << fit.spread << ")";
    throw std::runtime_error(os.str());
  }
  return std::move(fit.c);
}

LocalOperator c_matrix_closed_form(const RMatrixSpec& spec) {
  const GradedDim& d = spec.dim;
  if (d.size() != 2 || d.n_even() == 0)
    throw std::invalid_argument("closed-form C-matrix is known for gl(2|0) and gl(1|1)");
  const cplx q = std::exp(kI * kPi * spec.hbar);
  auto c = LocalOperator::monomial(d, {{0, 0}, {1, 1}}, 1.0 / q);
  c += LocalOperator::monomial(d, {{1, 1}, {0, 0}}, q);
  c += LocalOperator::monomial(d, {{1, 0}, {0, 1}}, -1.0);
  if (d.n_odd() == 0) {
    c += LocalOperator::monomial(d, {{0, 1}, {1, 0}}, -1.0);
  } else {
    c += LocalOperator::monomial(d, {{0, 1}, {1, 0}}, 1.0);
    c += LocalOperator::monomial(d, {{1, 1}, {1, 1}}, 2.0 * std::cos(kPi * spec.hbar));
  }
  return c;
}

TwistData twist_data(const GradedDim& dim, cplx hbar, cplx u) {
  const int n = dim.size();
  Matrix g = Matrix::Zero(n, n), q = Matrix::Zero(n, n);
  Matrix f12 = Matrix::Zero(n * n, n * n), f21 = Matrix::Zero(n * n, n * n);
  for (int j = 0; j < n; ++j) {
    g(j, j) = std::exp(2.0 * kPi * kI * double(j) * u / double(n));
    q(j, j) = std::exp(2.0 * kPi * kI * double(j + 1) / double(n));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto phase = [&](int a, int b) {
        return std::exp(kPi * kI * hbar * double(2 * (a - b) - n * sign(a - b)) / double(2 * n));
      };
      f12(i * n + j, i * n + j) = phase(i, j);
      f21(i * n + j, i * n + j) = phase(j, i);
    }
  return {g, LocalOperator(dim, 2, f12), LocalOperator(dim, 2, f21), q};
}

cplx ScalarKernels::f(int a, cplx z, cplx hbar) const {
  const double s = spec_.dim.parity(a) ? -1.0 : 1.0;
  return kPi * (s * cot(kPi * z) + cot(kPi * hbar));
}

cplx ScalarKernels::g(int a, int c, cplx z) const {
  const int n = spec_.dim.size();
  const double k = double(2 * (a - c) - n * sign(a - c)) / double(n);
  return kPi / std::sin(kPi * z) * std::exp(kPi * kI * z * k);
}

cplx ScalarKernels::gtilde(cplx hbar) const { return kPi / std::sin(kPi * hbar); }

cplx ScalarKernels::gtilde_ac(int a, int c, cplx z) const {
  return kPi * std::exp(kPi * kI * z * double(sign(c - a))) / std::sin(kPi * z);
}

cplx ScalarKernels::off_diagonal(int a, int c, cplx z) const {
  return spec_.family == Family::ZnGraded ? g(a, c, z) : gtilde_ac(a, c, z);
}

cplx ScalarKernels::weight(int a, int c, cplx hbar) const {
  return spec_.family == Family::ZnGraded ? g(a, c, hbar) : gtilde(hbar);
}

LocalOperator ScalarKernels::rebuild_r(cplx z) const {
  const GradedDim& d = spec_.dim;
  const int n = d.size();
  auto r = LocalOperator::zero(d, 2);
  for (int a = 0; a < n; ++a) {
    r += LocalOperator::monomial(d, {{a, a}, {a, a}}, f(a, z, spec_.hbar));
    for (int c = 0; c < n; ++c) {
      if (c == a) continue;
      r += LocalOperator::monomial(d, {{a, a}, {c, c}}, weight(a, c, spec_.hbar));
      const double s = d.parity(c) ? -1.0 : 1.0;
      r += LocalOperator::monomial(d, {{a, c}, {c, a}}, s * off_diagonal(a, c, z));
    }
  }
  return r;
}

}  // namespace gradedrm
