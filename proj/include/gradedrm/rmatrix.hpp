#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "gradedrm/graded.hpp"

namespace gradedrm {

/// The two trigonometric graded R-matrix families.
///   UqGlNM   - the R-matrix of the affine quantized algebra U_q(gl(N|M)).
///   ZnGraded - the graded extension of the Z_n-invariant A_{n-1} R-matrix.
enum class Family { UqGlNM, ZnGraded };

std::string_view family_tag(Family f);  // "uq" / "zn"
Family parse_family(std::string_view tag);

/// Deliberate single-sign corruption of an R-matrix, used to check that the
/// verification battery notices broken conventions. Indices are 0-based.
struct RMatrixMutation {
  enum class Kind {
    DiagonalParitySign,     // (-1)^{p_a} in front of cot(pi z) on e_aa (x) e_aa
    OffDiagonalParitySign,  // (-1)^{p_c} on e_ac (x) e_ca
    SpectralExponentSign,   // exponent of the z-dependent phase on e_ac (x) e_ca
    WeightExponentSign,     // exponent of the hbar-dependent phase on e_aa (x) e_cc
    HbarCotSign,            // sign of cot(pi hbar) on e_aa (x) e_aa
  };
  Kind kind;
  int a = 0;
  int c = 1;
};

struct RMatrixSpec {
  Family family;
  GradedDim dim;
  cplx hbar;
  std::optional<RMatrixMutation> mutation{};
};

/// Validating constructor: hbar must stay off the integer lattice.
RMatrixSpec make_spec(Family family, int n_even, int n_odd, cplx hbar);

std::string describe(const RMatrixSpec& spec);

/// Distance from z to the nearest integer.
double lattice_distance(cplx z);

/// Exact-pole guard used by the closed-form evaluators.
inline constexpr double kPoleGuard = 1e-13;

/// phi(hbar, z) = pi cot(pi hbar) + pi cot(pi z).
cplx phi(cplx hbar, cplx z);
/// d/dz phi(hbar, z) = -pi^2 / sin^2(pi z).
cplx phi_dz(cplx z);

/// Unnormalized R_12^hbar(z) in monomial-coefficient form.
LocalOperator build_r(const RMatrixSpec& spec, cplx z);
/// d/dz R_12^hbar(z), closed form.
LocalOperator build_r_dz(const RMatrixSpec& spec, cplx z);
/// Rbar = R / phi(hbar, z).
LocalOperator build_r_normalized(const RMatrixSpec& spec, cplx z);
/// Fbar = d/dz Rbar, closed form.
LocalOperator build_f_derivative(const RMatrixSpec& spec, cplx z);

/// Coefficient of the simple pole of R at z = 0, read off the cot and 1/sin
/// kernels without evaluating R.
LocalOperator residue_at_zero(const RMatrixSpec& spec);

/// Result of factoring Rbar_12(v-u) Fbar_21(u-v) through the scalar
/// -pi sin(pi hbar) / (sin pi(hbar+u-v) sin pi(hbar-u+v)).
struct CMatrixFit {
  LocalOperator c;
  double spread;  // max relative deviation between sample points
};
CMatrixFit fit_c_matrix(const RMatrixSpec& spec, std::span<const std::pair<cplx, cplx>> points);

/// Constant C-matrix for n = 2; throws std::invalid_argument for other n and
/// std::runtime_error when the factorization does not hold to 1e-10.
LocalOperator c_matrix(const RMatrixSpec& spec);

/// The displayed closed forms: C for gl(2|0) and C^susy for gl(1|1).
LocalOperator c_matrix_closed_form(const RMatrixSpec& spec);

/// sign(k) in {-1, 0, 1}.
constexpr int sign(int k) { return (k > 0) - (k < 0); }

/// Diagonal matrices of the twist relation between the two families and of
/// the quasi-periodicity of the ZnGraded family.
struct TwistData {
  Matrix gauge;          // G(u), n x n
  LocalOperator twist;   // F_12(hbar)
  LocalOperator twist_swapped;  // F_21(hbar)
  Matrix periodicity;    // Q, n x n
};
TwistData twist_data(const GradedDim& dim, cplx hbar, cplx u);

/// Scalar kernels of the decomposition
///   R = sum f^a e_aa(x)e_aa + sum w^{ac} e_aa(x)e_cc + sum (-1)^{p_c} k^{ac}(z) e_ac(x)e_ca
/// where (w, k) = (g(hbar), g(z)) for ZnGraded and (gtilde, gtilde^{ac}) for UqGlNM.
class ScalarKernels {
 public:
  explicit ScalarKernels(RMatrixSpec spec) : spec_(std::move(spec)) {}

  const RMatrixSpec& spec() const { return spec_; }

  cplx f(int a, cplx z, cplx hbar) const;
  /// ZnGraded g^{ac}(z).
  cplx g(int a, int c, cplx z) const;
  /// UqGlNM gtilde(hbar) = pi / sin(pi hbar).
  cplx gtilde(cplx hbar) const;
  /// UqGlNM gtilde^{ac}(z) = pi e^{i pi z sign(c-a)} / sin(pi z).
  cplx gtilde_ac(int a, int c, cplx z) const;

  /// Off-diagonal z-kernel of the spec's family.
  cplx off_diagonal(int a, int c, cplx z) const;
  /// e_aa (x) e_cc weight of the spec's family.
  cplx weight(int a, int c, cplx hbar) const;

  /// R rebuilt from the kernels.
  LocalOperator rebuild_r(cplx z) const;

 private:
  RMatrixSpec spec_;
};

}  // namespace gradedrm
