#include <doctest.h>

#include "gradedrm/chain.hpp"
#include "oracles.hpp"

using namespace gradedrm;

namespace {

cplx phi_oracle(cplx h, cplx z) {
  return oracle::kPi / std::tan(oracle::kPi * h) + oracle::kPi / std::tan(oracle::kPi * z);
}

// S_l by brute force over bit masks, and the sum of |terms|.
std::pair<cplx, double> phi_sum_oracle(int length, int k, int l, cplx h) {
  cplx s = 0.0;
  double a = 0.0;
  for (int mask = 0; mask < (1 << length); ++mask) {
    if (__builtin_popcount(mask) != k || !(mask >> (l - 1) & 1)) continue;
    cplx t = 1.0;
    for (int i = 0; i < length; ++i)
      for (int j = 0; j < length; ++j)
        if ((mask >> i & 1) && !(mask >> j & 1))
          t *= phi_oracle(h, static_cast<double>(j - i) / length);
    s += t;
    a += std::abs(t);
  }
  return {s, a};
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("equilibrium points") {
  const auto x = equilibrium_points(4);
  REQUIRE(x.size() == 4);
  CHECK(x[0] == cplx(0.25));
  CHECK(x[3] == cplx(1.0));
  CHECK(degenerate_chain_hbar(0.3, 10));
  CHECK(degenerate_chain_hbar(0.25, 4));
  CHECK(!degenerate_chain_hbar(0.3, 4));
  CHECK(!degenerate_chain_hbar(cplx(0.3, 0.1), 10));
}

TEST_CASE("phi sums do not depend on the marked site") {
  for (cplx h : {cplx(0.3), cplx(0.21, 0.07)})
    for (int length = 2; length <= 6; ++length)
      for (int k = 1; k < length; ++k) {
        CHECK(phi_sum_max_residual(length, k, h) < 1e-11);
        for (int l = 1; l <= length; ++l) {
          const auto [s1, a1] = phi_sum_oracle(length, k, 1, h);
          const auto [sl, al] = phi_sum_oracle(length, k, l, h);
          const double want = std::abs(s1 - sl) / std::max(a1, al);
          CHECK(std::abs(phi_sum_identity(length, k, 1, l, h) - want) < 1e-14);
          CHECK(want < 1e-11);
        }
      }
}

TEST_CASE("H1 representations agree") {
  const auto spec = make_spec(Family::UqGlNM, 1, 1, 0.3);
  const auto dense = hamiltonian_h1(spec, 4, Representation::Dense);
  const auto factors = hamiltonian_h1(spec, 4, Representation::Factors);
  CHECK(dense.is_dense());
  CHECK(!factors.is_dense());
  const Matrix d = dense.to_dense();
  CHECK(oracle::relative(factors.to_dense(), d) < 1e-13);
  std::mt19937_64 rng(1);
  const Vector v = oracle::random_vector(16, rng);
  CHECK((factors.apply(v) - d * v).norm() < 1e-12 * (d * v).norm());
  CHECK((dense.apply(v) - d * v).norm() < 1e-12 * (d * v).norm());
}

TEST_CASE("H1 for two sites") {
  // Only k = 1, i = 2: H1 = Rbar_12(x_1 - x_2) Fbar_21(x_2 - x_1).
  for (Family f : {Family::UqGlNM, Family::ZnGraded}) {
    const auto spec = make_spec(f, 1, 1, 0.3);
    const Matrix h = hamiltonian_h1(spec, 2).to_dense();
    const Matrix want = build_r_normalized(spec, -0.5).action() *
                        build_f_derivative(spec, 0.5).leg_swapped().action();
    CHECK(oracle::relative(h, want) < 1e-13);
  }
}

TEST_CASE("Hamiltonians commute") {
  for (Family f : {Family::UqGlNM, Family::ZnGraded})
    for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}, std::pair{2, 1}})
      for (int length = 3; length <= 4; ++length) {
        const auto spec = make_spec(f, n, m, 0.3);
        const Matrix h1 = hamiltonian_h1(spec, length).to_dense();
        const Matrix h2 = hamiltonian_h2(spec, length).to_dense();
        const double c = commutator(h1, h2).norm() / (h1.norm() * h2.norm());
        CHECK_MESSAGE(c < 1e-10, describe(spec) << " L=" << length);
        CHECK(h1.norm() > 0.0);
        CHECK(h2.norm() > 0.0);
      }
}

TEST_CASE("htilde operators") {
  const auto spec = make_spec(Family::ZnGraded, 1, 1, 0.3);
  const int length = 4;
  const Matrix h1 = hamiltonian_h1(spec, length).to_dense();
  const Matrix t1 = htilde_k(spec, length, 1).to_dense();

  cplx c = 1.0;
  for (int j = 2; j <= length; ++j) c *= phi_oracle(0.3, static_cast<double>(j - 1) / length);
  CHECK(std::abs(h1_constant(spec, length) - c) < 1e-12 * std::abs(c));
  CHECK(oracle::relative(t1, c * h1) < 1e-11);

  const Matrix t2 = htilde_k(spec, length, 2).to_dense();
  const Matrix t3 = htilde_k(spec, length, 3).to_dense();
  CHECK(commutator(t1, t2).norm() < 1e-10 * t1.norm() * t2.norm());
  CHECK(commutator(t1, t3).norm() < 1e-10 * t1.norm() * t3.norm());
  CHECK(commutator(t2, t3).norm() < 1e-10 * t2.norm() * t3.norm());
  CHECK_THROWS(htilde_k(spec, length, 0));
}

TEST_CASE("H1 from the C-matrix") {
  for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}}) {
    const auto spec = make_spec(Family::UqGlNM, n, m, 0.3);
    for (int length = 2; length <= 4; ++length) {
      const Matrix a = hamiltonian_h1(spec, length).to_dense();
      const Matrix b = h1_from_c_matrix(spec, length).to_dense();
      CHECK(oracle::relative(a, b) < 1e-11);
    }
  }
  CHECK_THROWS(h1_from_c_matrix(make_spec(Family::UqGlNM, 2, 1, 0.3), 3));
  CHECK_THROWS(h1_from_c_matrix(make_spec(Family::ZnGraded, 1, 1, 0.3), 3));
}

TEST_CASE("C-matrix at hbar = 0") {
  for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}}) {
    const auto spec = make_spec(Family::UqGlNM, n, m, 0.3);
    const Matrix c = c_matrix_at_zero(spec).action();
    const Matrix want = Matrix::Identity(4, 4) - graded_permutation(spec.dim).action();
    CHECK((c - want).norm() < 1e-5);
  }
}

TEST_CASE("gauge relation for two states") {
  for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}})
    for (int length = 2; length <= 4; ++length)
      CHECK(gauge_relation_residual(GradedDim(n, m), length) < 1e-10);
  const Vector g = site_gauge(GradedDim(1, 1), 3);
  CHECK(g.size() == 8);
  for (auto x : g) CHECK(std::abs(std::abs(x) - 1.0) < 1e-14);
}

TEST_CASE("nonrelativistic limits") {
  for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
    const GradedDim d(n, m);
    for (int length = 2; length <= 3; ++length) {
      const Matrix hs = oracle::haldane_shastry(d, length);
      CHECK(oracle::relative(haldane_shastry_target(d, length), hs) < 1e-14);
      const auto r = nonrelativistic_limit_h1(make_spec(Family::UqGlNM, n, m, 0.3), length);
      CHECK((r.limit - hs).cwiseAbs().maxCoeff() < 1e-5);
      CHECK(r.extrapolation_error < 1e-5);
    }
  }
  const auto r = nonrelativistic_limit_h1(make_spec(Family::ZnGraded, 1, 1, 0.3), 4);
  CHECK((r.limit - oracle::anisotropic_xxz(4)).cwiseAbs().maxCoeff() < 1e-5);
  for (int length = 2; length <= 5; ++length)
    CHECK(oracle::relative(anisotropic_target(length), oracle::anisotropic_xxz(length)) < 1e-14);
}

TEST_CASE("spectrum clustering") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0 + 1e-10;
  m(3, 3) = cplx(-1.0, 0.5);
  const auto s = spectrum(m);
  REQUIRE(s.eigenvalues.size() == 4);
  REQUIRE(s.levels.size() == 3);
  CHECK(s.levels[0].value.real() == doctest::Approx(-1.0));
  CHECK(s.levels[1].multiplicity == 2);
  CHECK(s.levels[2].value.real() == doctest::Approx(2.0));
  CHECK(s.max_abs_imag == doctest::Approx(0.5));
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i)
    CHECK(s.eigenvalues[i - 1].real() <= s.eigenvalues[i].real());

  const auto spec = make_spec(Family::UqGlNM, 1, 1, 0.3);
  const auto h = spectrum(hamiltonian_h1(spec, 3));
  int total = 0;
  for (const auto& l : h.levels) total += l.multiplicity;
  CHECK(total == 8);
}
