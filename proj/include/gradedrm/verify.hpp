#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gradedrm/rmatrix.hpp"

namespace gradedrm {

inline constexpr double kThreeLegTolerance = 1e-10;
inline constexpr double kTwoLegTolerance = 1e-12;
inline constexpr double kResidueLimitTolerance = 1e-4;

/// Acting matrix of a two-leg operator placed on legs (i, j) of three.
Matrix on_three_legs(const LocalOperator& op, int i, int j);

/// R12(u) R13(u+v) R23(v) - R23(v) R13(u+v) R12(u), relative to the product
/// of the operand norms.
double check_qybe(const RMatrixSpec& spec, cplx u, cplx v);

struct AybeResult {
  double residual;       // distance of the defect from its expected value, relative
  double scale;          // norm used for the relative residual
  LocalOperator defect;  // LHS minus the two right-hand terms, three legs
};

/// AYBE  R12^x(z12) R23^y(z23) = R13^y(z13) R12^{x-y}(z12) + R23^{y-x}(z23) R13^x(z13).
/// The family's hbar is ignored; x and y play its role.
AybeResult check_aybe(const RMatrixSpec& spec, cplx x, cplx y, cplx z1, cplx z2, cplx z3);

/// Expected AYBE defect: zero for ZnGraded, and for UqGlNM
/// pi^2 / (2 cos(pi x/2) cos(pi y/2) cos(pi (x-y)/2)) sum over pairwise
/// distinct (a,b,c) of e_aa (x) e_bb (x) e_cc.
LocalOperator aybe_expected_defect(const RMatrixSpec& spec, cplx x, cplx y);

/// 1 / (2 cos(pi x/2) cos(pi y/2) cos(pi (x-y)/2)), the printed constant.
cplx aybe_printed_constant(cplx x, cplx y);

/// Largest pairwise difference of AYBE defects over the given z-triples at
/// fixed (x, y), relative to the largest defect scale.
double aybe_z_spread(const RMatrixSpec& spec, cplx x, cplx y,
                     const std::vector<std::array<cplx, 3>>& triples);

/// R12(z) R21(-z) - phi(hbar,z) phi(hbar,-z) Id.
double check_unitarity(const RMatrixSpec& spec, cplx z);
/// Rbar12(z) Rbar21(-z) - Id.
double check_normalized_unitarity(const RMatrixSpec& spec, cplx z);
/// R^{-hbar}(-z) + P R^{hbar}(z) P.
double check_skew(const RMatrixSpec& spec, cplx z);

/// R^Zn(u-v) against G1(u) G2(v) F12 R^Uq(u-v) F21^{-1} G1(u)^{-1} G2(v)^{-1},
/// with R^Zn built from `zn` (which must be a ZnGraded spec).
double check_twist(const RMatrixSpec& zn, cplx u, cplx v);

/// ZnGraded: R(z+1) - (Q(x)1) R(z) (Q^{-1}(x)1); UqGlNM: R(z+1) - R(z).
double check_periodicity(const RMatrixSpec& spec, cplx z);

struct ResidueResult {
  double analytic;  // closed-form residue minus P
  double numeric;   // eps R(eps) minus P at eps = 1e-6 (1+i)
};
ResidueResult check_residue(const RMatrixSpec& spec);

/// Three-term and product relations of the scalar kernels at one point.
/// off_diagonal_three_term is empty for n < 3 and gtilde_defect for ZnGraded.
struct ScalarResiduals {
  double diagonal_three_term;
  std::optional<double> off_diagonal_three_term;
  double weight_product;
  double off_diagonal_product;
  std::optional<double> gtilde_defect;
};
ScalarResiduals check_scalar_relations(const RMatrixSpec& spec, cplx x, cplx y, cplx z, cplx w);

struct CheckSummary {
  std::string check;
  Family family;
  int n_even;
  int n_odd;
  int samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance;
  bool pass = false;
  std::vector<std::pair<std::string, cplx>> worst_point;
  int resamples = 0;
  std::string error;
};

struct BatteryOptions {
  /// Family, dimension and optional mutation are taken from each spec.
  std::vector<RMatrixSpec> specs;
  std::uint64_t seed = 7;
  int samples = 100;
  /// Overrides every per-check tolerance when set.
  std::optional<double> tolerance;
  /// Fixed hbar for all samples; drawn per sample when empty.
  std::optional<cplx> hbar;
};

struct VerificationReport {
  std::uint64_t seed;
  int samples;
  std::vector<CheckSummary> checks;

  bool all_pass() const;
  const CheckSummary* find(const std::string& check, Family family, int n_even, int n_odd) const;
  nlohmann::ordered_json to_json() const;
};

/// Both families over (N,M) in {(1,0),(2,0),(0,2),(1,1),(2,1),(1,2),(2,2)}.
std::vector<RMatrixSpec> default_battery_specs();

/// Runs every check on every spec. Failures, including exceptions inside a
/// check, are recorded and never stop the battery.
VerificationReport run_battery(const BatteryOptions& options);

}  // namespace gradedrm
