#pragma once

#include <vector>

#include "gradedrm/chain_operator.hpp"
#include "gradedrm/rmatrix.hpp"

namespace gradedrm {

inline const cplx kDefaultChainHbar{0.3, 0.0};

/// x_k = k / L for k = 1..L.
std::vector<cplx> equilibrium_points(int length);

/// True when hbar * L is within 1e-9 of an integer. Then phi(hbar, x_j - x_i)
/// vanishes for some pairs of equilibrium points and the phi-weighted
/// constructions degenerate.
bool degenerate_chain_hbar(cplx hbar, int length);

/// |S_l - S_m| with S_l = sum over |I| = k containing l of
/// prod_{i in I, j not in I} phi(hbar, x_j - x_i) at the equilibrium points,
/// relative to the larger sum of absolute values of the terms. The sums
/// themselves can vanish (e.g. real hbar = 0.3 at L = 11), so they are not
/// used as the scale.
double phi_sum_identity(int length, int k, int l, int m, cplx hbar = kDefaultChainHbar);

/// Largest phi_sum_identity over l, m for one k, from a single pass over subsets.
double phi_sum_max_residual(int length, int k, cplx hbar = kDefaultChainHbar);

enum class Representation { Auto, Dense, Factors };

/// H1 = sum_{k<i} Rbar_{i-1,i} .. Rbar_{k+1,i} Rbar_{k,i} Fbar_{i,k} Rbar_{i,k+1} .. Rbar_{i,i-1}
/// with Rbar_ij = Rbar(x_i - x_j), Fbar_ij = Fbar(x_i - x_j). Auto gives a dense
/// operator up to the dense cap and a factor list above it.
ChainOperator hamiltonian_h1(const RMatrixSpec& spec, int length,
                             Representation rep = Representation::Auto);

/// Second Hamiltonian: for every m < l the prefactor
/// prod_{j != m,l} phi(x_j - x_m) phi(x_j - x_l) times three R-product blocks.
ChainOperator hamiltonian_h2(const RMatrixSpec& spec, int length,
                             Representation rep = Representation::Auto);

/// Minus the eta-derivative at eta = 0 of the spin operator D_k applied to
/// constant functions, at the equilibrium points.
ChainOperator htilde_k(const RMatrixSpec& spec, int length, int k,
                       Representation rep = Representation::Auto);

/// prod_{j != i} phi(hbar, x_j - x_i), which does not depend on i; htilde_k(.., 1)
/// equals this constant times H1.
cplx h1_constant(const RMatrixSpec& spec, int length);

/// H1 rebuilt from the constant C-matrix (N+M = 2, UqGlNM):
/// -pi sum_{k<i} sin(pi hbar) / (sin pi(hbar + x_i - x_k) sin pi(hbar - x_i + x_k))
///   Rbar_{i-1,i} .. Rbar_{k+1,i} C_{k,i} Rbar_{i,k+1} .. Rbar_{i,i-1}.
ChainOperator h1_from_c_matrix(const RMatrixSpec& spec, int length,
                               Representation rep = Representation::Auto);

/// hbar -> 0 value of c_matrix(spec) by Richardson extrapolation over
/// hbar in {1e-3, 5e-4, 2.5e-4}.
LocalOperator c_matrix_at_zero(const RMatrixSpec& spec);

/// Diagonal of the site gauge  G(x_1) (x) ... (x) G(x_L).
Vector site_gauge(const GradedDim& dim, int length);

/// For N+M = 2 the ZnGraded chain is the gauge transform of the UqGlNM chain
/// plus the term produced by the z-dependence of G:
///   H1^Zn = Gauge (H1^Uq + H1^corr) Gauge^{-1},
/// where H1^corr is H1^Uq with Fbar_{i,k} replaced by [D (x) 1, Rbar_{i,k}] and
/// D = diag(2 pi i j / n). Returns the relative residual.
double gauge_relation_residual(const GradedDim& dim, int length, cplx hbar = kDefaultChainHbar);

struct LimitResult {
  Matrix limit;
  double extrapolation_error;  // max entry of the difference to the shifted ladder
};
/// lim_{hbar -> 0} H1 / hbar by Richardson extrapolation over
/// hbar in {1e-3, 5e-4, 2.5e-4}. The same extrapolation over
/// {5e-4, 2.5e-4, 1.25e-4} serves as error estimate; throws above 1e-5.
LimitResult nonrelativistic_limit_h1(const RMatrixSpec& spec, int length);

/// pi^2 sum_{k<i} (1 - P_ki) / sin^2(pi (x_i - x_k)) with the graded P.
Matrix haldane_shastry_target(const GradedDim& dim, int length);
/// ZnGraded gl(1|1) limit:
/// pi^2 sum_{k<i} [ (e11(x)e22 + e22(x)e11 + 2 e22(x)e22)_{ki}
///                  + cos(pi (x_i - x_k)) (e12(x)e21 - e21(x)e12)_{ki} ] / sin^2(pi (x_i - x_k)).
Matrix anisotropic_target(int length);

struct SpectrumLevel {
  cplx value;
  int multiplicity;
};

struct SpectrumResult {
  std::vector<cplx> eigenvalues;     // sorted by real part, then imaginary part
  std::vector<SpectrumLevel> levels;  // clusters in the same order
  double cluster_tolerance;
  double max_abs_imag;
};

/// All eigenvalues of a dense-realizable operator, clustered by single linkage.
SpectrumResult spectrum(const ChainOperator& op, double cluster_tolerance = 1e-8);
SpectrumResult spectrum(const Matrix& m, double cluster_tolerance = 1e-8);

}  // namespace gradedrm
