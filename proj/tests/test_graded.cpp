#include <doctest.h>

#include <random>

#include "gradedrm/chain_operator.hpp"
#include "gradedrm/graded.hpp"
#include "gradedrm/rmatrix.hpp"
#include "oracles.hpp"

using namespace gradedrm;

namespace {

std::vector<GradedDim> dims_up_to(int n_max) {
  std::vector<GradedDim> out;
  for (int n = 1; n <= n_max; ++n)
    for (int m = 0; m <= n; ++m) out.emplace_back(n - m, m);
  return out;
}

LocalOperator from_units(const GradedDim& d, const oracle::Units& u, cplx c = 1.0) {
  return LocalOperator::monomial(d, u, c);
}

LocalOperator random_operator(const GradedDim& d, int legs, std::mt19937_64& rng) {
  const long long side = ipow(d.size(), legs);
  Matrix m(side, side);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) m(r, c) = {u(rng), u(rng)};
  return {d, legs, m};
}

LocalOperator id_tensor(const GradedDim& d, int a, int b, bool unit_first) {
  LocalOperator out = LocalOperator::zero(d, 2);
  for (int k = 0; k < d.size(); ++k)
    out += unit_first ? LocalOperator::monomial(d, {{a, b}, {k, k}})
                      : LocalOperator::monomial(d, {{k, k}, {a, b}});
  return out;
}

}  // namespace

TEST_CASE("parity follows the grading") {
  const GradedDim d11(1, 1), d20(2, 0);
  CHECK(parity(d11, 1) == 0);
  CHECK(parity(d11, 2) == 1);
  CHECK(parity(d20, 2) == 0);
  CHECK_THROWS_AS(parity(d11, 0), std::out_of_range);
  CHECK_THROWS_AS(parity(d11, 3), std::out_of_range);
  CHECK_THROWS(GradedDim(0, 0));
  CHECK_THROWS(GradedDim(-1, 2));
}

TEST_CASE("super multiplication of the displayed generators") {
  const GradedDim d(1, 1);
  // (1 (x) e12)(e12 (x) 1) = -(e12 (x) e12)
  const auto lhs = super_multiply(id_tensor(d, 0, 1, false), id_tensor(d, 0, 1, true));
  CHECK((lhs.coeffs() - LocalOperator::monomial(d, {{0, 1}, {0, 1}}, -1.0).coeffs()).norm() == 0.0);
  // (1 (x) e11)(e11 (x) 1) = e11 (x) e11
  const auto even = super_multiply(id_tensor(d, 0, 0, false), id_tensor(d, 0, 0, true));
  CHECK((even.coeffs() - LocalOperator::monomial(d, {{0, 0}, {0, 0}}).coeffs()).norm() == 0.0);
}

TEST_CASE("super multiplication agrees with the basis-level sign oracle") {
  std::mt19937_64 rng(11);
  for (const auto& d : dims_up_to(4))
    for (int legs : {2, 3}) {
      int nonzero = 0;
      for (int trial = 0; trial < 200; ++trial) {
        auto ua = oracle::random_units(d, legs, rng);
        auto ub = oracle::random_units(d, legs, rng);
        // Force about half of the products to be nonzero.
        if (trial % 2 == 0)
          for (int m = 0; m < legs; ++m) ub[m].first = ua[m].second;
        const auto got = super_multiply(from_units(d, ua), from_units(d, ub));
        const auto want = oracle::monomial_product(d, ua, ub);
        if (!want) {
          CHECK(got.coeffs().norm() == 0.0);
          continue;
        }
        ++nonzero;
        const auto expect = from_units(d, want->second, double(want->first));
        CHECK((got.coeffs() - expect.coeffs()).norm() == 0.0);
      }
      CHECK(nonzero >= 100);
    }
}

TEST_CASE("super multiplication is associative on homogeneous operators") {
  std::mt19937_64 rng(5);
  for (const auto& d : dims_up_to(4))
    for (int trial = 0; trial < 100; ++trial) {
      auto pick = [&](int t) {
        auto op = random_operator(d, 2, rng);
        return (t % 2) ? op.odd_part() : op.even_part();
      };
      const auto a = pick(trial), b = pick(trial / 2), c = pick(trial / 4);
      const auto left = super_multiply(super_multiply(a, b), c);
      const auto right = super_multiply(a, super_multiply(b, c));
      CHECK((left - right).norm() <= 1e-12 * a.norm() * b.norm() * c.norm());
    }
}

TEST_CASE("homogeneous parts decompose exactly") {
  std::mt19937_64 rng(2);
  const GradedDim d(2, 1);
  const auto op = random_operator(d, 2, rng);
  CHECK(((op.even_part() + op.odd_part()).coeffs() - op.coeffs()).norm() == 0.0);
  const auto odd = op.odd_part();
  for (Eigen::Index r = 0; r < odd.coeffs().rows(); ++r)
    for (Eigen::Index c = 0; c < odd.coeffs().cols(); ++c)
      if (odd.coeff(r, c) != cplx(0.0)) CHECK(op.entry_parity(r, c) == 1);
}

TEST_CASE("purely even spaces use ordinary matrix products") {
  std::mt19937_64 rng(8);
  for (int n = 1; n <= 4; ++n) {
    const GradedDim d(n, 0);
    const auto a = random_operator(d, 2, rng), b = random_operator(d, 2, rng);
    const Matrix plain = a.coeffs() * b.coeffs();
    CHECK((super_multiply(a, b).coeffs() - plain).cwiseAbs().maxCoeff() <= 1e-15 * plain.norm());
    CHECK((a.action() - a.coeffs()).norm() == 0.0);
  }
}

TEST_CASE("graded permutation") {
  SUBCASE("ordinary swap for (2,0)") {
    const auto p = graded_permutation(GradedDim(2, 0));
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
    CHECK((p.coeffs() - swap).norm() == 0.0);
  }
  SUBCASE("explicit expansion for (1,1)") {
    const GradedDim d(1, 1);
    auto want = LocalOperator::monomial(d, {{0, 0}, {0, 0}});
    want -= LocalOperator::monomial(d, {{0, 1}, {1, 0}});
    want += LocalOperator::monomial(d, {{1, 0}, {0, 1}});
    want -= LocalOperator::monomial(d, {{1, 1}, {1, 1}});
    CHECK((graded_permutation(d).coeffs() - want.coeffs()).norm() == 0.0);
  }
  SUBCASE("squares to the identity") {
    for (const auto& d : dims_up_to(5)) {
      const auto p = graded_permutation(d);
      CHECK((super_multiply(p, p).coeffs() - LocalOperator::identity(d, 2).coeffs()).norm() == 0.0);
    }
  }
  SUBCASE("acts as the graded swap") {
    for (const auto& d : dims_up_to(3))
      CHECK((graded_permutation(d).action() - oracle::graded_swap(d, 1, 2, 2)).norm() == 0.0);
  }
}

TEST_CASE("action and from_action are inverse") {
  std::mt19937_64 rng(3);
  const GradedDim d(1, 2);
  const auto op = random_operator(d, 3, rng);
  const auto back = LocalOperator::from_action(d, 3, op.action());
  CHECK((back.coeffs() - op.coeffs()).norm() == 0.0);
  CHECK(koszul_mask(d, 3).cwiseAbs().minCoeff() == 1.0);
}

TEST_CASE("leg swap is conjugation by the graded permutation") {
  std::mt19937_64 rng(4);
  for (const auto& d : dims_up_to(3)) {
    const auto op = random_operator(d, 2, rng);
    const auto p = graded_permutation(d);
    const auto want = super_multiply(super_multiply(p, op), p);
    CHECK((op.leg_swapped() - want).norm() <= 1e-14 * op.norm());
  }
}

TEST_CASE("embedding") {
  std::mt19937_64 rng(6);
  SUBCASE("adjacent sites of a two-site chain give the operator itself") {
    const GradedDim d(1, 1);
    const auto op = random_operator(d, 2, rng);
    CHECK((embed_dense(op, 1, 2, 2) - op.action()).norm() == 0.0);
  }
  SUBCASE("graded permutation on sites 1 and 3 is the Koszul-signed swap") {
    for (const auto& d : dims_up_to(3)) {
      const auto p = graded_permutation(d);
      CHECK((embed_dense(p, 1, 3, 3) - oracle::graded_swap(d, 1, 3, 3)).norm() == 0.0);
      CHECK((embed_dense(p, 3, 1, 3) - oracle::graded_swap(d, 1, 3, 3)).norm() == 0.0);
    }
  }
  SUBCASE("R21 is P R12 P") {
    for (const auto& d : dims_up_to(3)) {
      const auto op = random_operator(d, 2, rng);
      const Matrix p = embed_dense(graded_permutation(d), 1, 2, 2);
      CHECK((embed_dense(op, 2, 1, 2) - p * embed_dense(op, 1, 2, 2) * p).norm() <=
            1e-14 * op.norm());
    }
  }
  SUBCASE("far sites are transported by graded permutations") {
    const GradedDim d(1, 2);
    const auto op = random_operator(d, 2, rng);
    const Matrix p23 = oracle::graded_swap(d, 2, 3, 4);
    const Matrix p34 = oracle::graded_swap(d, 3, 4, 4);
    // Move the second leg from site 2 to site 4.
    const Matrix want = p34 * p23 * embed_dense(op, 1, 2, 4) * p23 * p34;
    CHECK((embed_dense(op, 1, 4, 4) - want).norm() <= 1e-13 * op.norm());
  }
  SUBCASE("embedded even operators on disjoint pairs commute") {
    const GradedDim d(1, 1);
    const auto a = random_operator(d, 2, rng).even_part();
    const auto b = random_operator(d, 2, rng).even_part();
    CHECK(commutator_norm(embed(a, 1, 2, 4), embed(b, 3, 4, 4)) < 1e-14);
    CHECK(commutator_norm(embed(a, 1, 3, 4), embed(b, 4, 2, 4)) < 1e-14);
  }
  SUBCASE("embedding respects composition") {
    for (const auto& d : {GradedDim(2, 0), GradedDim(1, 1), GradedDim(1, 2)})
      for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 2}, {2, 1}, {1, 3}, {3, 2}}) {
        const auto a = random_operator(d, 2, rng), b = random_operator(d, 2, rng);
        const Matrix lhs = embed_dense(a, i, j, 3) * embed_dense(b, i, j, 3);
        const Matrix rhs = embed_dense(super_multiply(a, b), i, j, 3);
        CHECK((lhs - rhs).norm() <= 1e-13 * lhs.norm());
      }
  }
  SUBCASE("bad sites are rejected") {
    const auto op = LocalOperator::identity(GradedDim(2, 0), 2);
    CHECK_THROWS(embed(op, 1, 1, 3));
    CHECK_THROWS(embed(op, 0, 2, 3));
    CHECK_THROWS(embed(op, 1, 4, 3));
  }
}

TEST_CASE("matrix-free application") {
  std::mt19937_64 rng(9);
  SUBCASE("identity leaves the state unchanged") {
    const GradedDim d(1, 1);
    const auto id = ChainOperator::identity(d, 3);
    const Vector v = oracle::random_vector(8, rng);
    CHECK((id.apply(v) - v).norm() == 0.0);
  }
  SUBCASE("embedded permutation on a random state") {
    const GradedDim d(1, 1);
    const Vector v = oracle::random_vector(8, rng);
    const Vector got = embed(graded_permutation(d), 1, 3, 3).apply(v);
    CHECK((got - oracle::graded_swap(d, 1, 3, 3) * v).norm() <= 1e-15 * v.norm());
  }
  SUBCASE("sums of products match dense application") {
    for (const auto& d : {GradedDim(2, 0), GradedDim(1, 1), GradedDim(2, 1)}) {
      const int length = 4;
      const auto a = random_operator(d, 2, rng), b = random_operator(d, 2, rng);
      const auto c = random_operator(d, 2, rng);
      const ChainOperator x = embed(a, 1, 3, length) * embed(b, 4, 2, length) +
                              cplx(0.5, 1.0) * embed(c, 2, 3, length) * embed(b, 4, 2, length) +
                              embed(a, 3, 1, length);
      CHECK(!x.is_dense());
      const Matrix dense = embed_dense(a, 1, 3, length) * embed_dense(b, 4, 2, length) +
                           cplx(0.5, 1.0) * embed_dense(c, 2, 3, length) *
                               embed_dense(b, 4, 2, length) +
                           embed_dense(a, 3, 1, length);
      CHECK(oracle::relative(x.to_dense(), dense) < 1e-12);
      const Vector v = oracle::random_vector(x.dimension(), rng);
      const Vector w = dense * v;
      CHECK((x.apply(v) - w).norm() / w.norm() < 1e-12);
      CHECK((x.materialized().apply(v) - w).norm() / w.norm() < 1e-12);
    }
  }
  SUBCASE("fused factors equal the product") {
    const GradedDim d(1, 2);
    const auto a = random_operator(d, 2, rng), b = random_operator(d, 2, rng);
    const SiteFactor fa(a, 3, 1, 4), fb(b, 1, 3, 4);
    const SiteFactor both = fa.fused_with(fb);
    const std::vector<SiteFactor> pair{fa, fb};
    const Matrix want = product_dense(pair, d, 4);
    CHECK(oracle::relative(product_dense(std::span(&both, 1), d, 4), want) < 1e-14);
    CHECK(fa == SiteFactor(a, 3, 1, 4));
    CHECK(!(fa == fb));
  }
  SUBCASE("shape mismatches are rejected") {
    const auto id = ChainOperator::identity(GradedDim(2, 0), 3);
    CHECK_THROWS(id.apply(Vector::Zero(4)));
    CHECK_THROWS(id + ChainOperator::identity(GradedDim(1, 1), 3));
    CHECK_THROWS(ChainOperator::from_dense(GradedDim(2, 0), 3, Matrix::Zero(4, 4)));
  }
  SUBCASE("dense cap") {
    const auto id = ChainOperator::identity(GradedDim(2, 0), 13);
    CHECK_THROWS_AS(id.to_dense(), std::length_error);
  }
}

TEST_CASE("commutator norm") {
  std::mt19937_64 rng(10);
  const GradedDim d(2, 0);
  const auto a = embed(random_operator(d, 2, rng), 1, 2, 3);
  CHECK(commutator_norm(a, a) == 0.0);
  const auto p = graded_permutation(d);
  CHECK(commutator_norm(embed(p, 1, 2, 4), embed(p, 3, 4, 4)) == 0.0);
  CHECK(commutator_norm(embed(p, 1, 2, 3), embed(p, 2, 3, 3)) > 0.1);
  CHECK_THROWS(commutator_norm(a, embed(p, 1, 2, 4)));
}
