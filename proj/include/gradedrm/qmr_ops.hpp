#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gradedrm/chain_operator.hpp"
#include "gradedrm/rmatrix.hpp"
#include "gradedrm/sampling.hpp"

namespace gradedrm {

/// Positions z_1..z_L, shift eta and deformation hbar.
struct SiteConfig {
  std::vector<cplx> z;
  cplx eta;
  cplx hbar;

  int length() const { return static_cast<int>(z.size()); }
};

/// True when every z_i - z_j + s*eta and z_i - z_j + s*eta + hbar with
/// |s| <= max_shift (i != j) is farther than `margin` from the integers.
bool site_config_regular(const SiteConfig& cfg, int max_shift = 1, double margin = 1e-3);

/// Draws a regular configuration. When `hbar` is empty it is drawn as well.
SiteConfig random_site_config(int length, Sampler& sampler, std::optional<cplx> hbar = {},
                              int max_shift = 2);

/// Sum of vector-valued plane waves  sum_t c_t exp(2 pi i m_t . z).
class TestFunction {
 public:
  struct Term {
    Vector coeff;
    std::vector<int> frequency;
  };

  TestFunction(GradedDim dim, int length, std::vector<Term> terms);

  /// `count` terms, coefficients uniform in the unit square, frequencies in [-2, 2].
  static TestFunction random(GradedDim dim, int length, int count, Sampler& sampler);

  const GradedDim& dim() const { return dim_; }
  int length() const { return length_; }
  const std::vector<Term>& terms() const { return terms_; }

  Vector operator()(std::span<const cplx> z) const;

  /// The function z -> f(z_1, ..., z_site - eta, ..., z_L) (site is 1-based).
  TestFunction shifted(int site, cplx eta) const;

 private:
  GradedDim dim_;
  int length_;
  std::vector<Term> terms_;
};

/// A vector-valued function of the L positions.
using VectorField = std::function<Vector(std::span<const cplx>)>;

VectorField as_field(const TestFunction& f);

/// k-th Ruijsenaars-Macdonald operator, scalar (N+M = 1 or Id-valued) or spin.
///
///   (D_k f)(z) = sum_{|I|=k} prod_{i in I, j not in I} phi(hbar, z_j - z_i)
///                  Left_I(z) Right_I(z - eta e_I) f(z - eta e_I)
///
/// Left_I  = ->prod_{t=1..k} <-prod_{j < i_t, j not in {i_1..i_{t-1}}} Rbar_{j i_t}
/// Right_I = <-prod_{t=k..1} ->prod_{j < i_t, j not in {i_1..i_{t-1}}} Rbar_{i_t j}
/// where ->prod runs with increasing j and <-prod with decreasing j.
class DifferenceOperator {
 public:
  struct SubsetTerm {
    std::vector<int> subset;                 // 1-based, increasing
    std::vector<std::pair<int, int>> left;   // (i, j) for Rbar_ij, product order
    std::vector<std::pair<int, int>> right;  // likewise
  };

  DifferenceOperator(RMatrixSpec spec, int length, int order, bool spin = true);

  const RMatrixSpec& spec() const { return spec_; }
  int length() const { return length_; }
  int order() const { return order_; }
  bool spin() const { return spin_; }
  /// Subsets in lexicographic order.
  const std::vector<SubsetTerm>& terms() const { return terms_; }

  /// prod_{i in I, j not in I} phi(hbar, z_j - z_i).
  cplx coefficient(const SubsetTerm& t, std::span<const cplx> z) const;

  /// Value of (D f)(z); subset contributions are reduced pairwise.
  Vector evaluate(const VectorField& f, std::span<const cplx> z, cplx eta) const;
  /// D f as a field, for composition.
  VectorField apply(VectorField f, cplx eta) const;

 private:
  RMatrixSpec spec_;
  int length_;
  int order_;
  bool spin_;
  std::vector<SubsetTerm> terms_;
};

/// Scalar operator acting componentwise: R-factors omitted.
Vector scalar_d(int k, const SiteConfig& cfg, const VectorField& f, const GradedDim& dim);
/// Spin operator with the spec's normalized R-matrix at cfg.hbar.
Vector spin_d(int k, const SiteConfig& cfg, const VectorField& f, const RMatrixSpec& spec);

/// Dense L-site caps for the F-identity: L <= 5 for n <= 3 and L <= 4 for n = 4.
bool f_identity_within_caps(const GradedDim& dim, int length);

struct FIdentityResult {
  LocalOperator total;  // sum over subsets of F^- - F^+, L legs
  double scale;         // sum over subsets of ||F^-|| + ||F^+||
  double residual;      // ||total|| / scale
};

/// sum_{|I|=k} (F^-_I - F^+_I) built from unnormalized R_ij = R(z_i - z_j) and
/// R^-_ij = R(z_i - z_j - eta).
FIdentityResult f_identity(int k, const SiteConfig& cfg, const RMatrixSpec& spec);

/// Largest pairwise difference of F-identity totals over several eta values,
/// relative to the largest scale.
double f_identity_eta_spread(int k, const SiteConfig& cfg, const RMatrixSpec& spec,
                             std::span<const cplx> etas);

struct PoleProbe {
  double max_residual;  // largest relative residual on the circle
  double max_total;     // largest ||total|| on the circle
  double term_growth;   // largest scale on the circle over the scale at cfg.eta
};
/// Evaluates the F-identity with eta on a circle of radius `radius` around
/// z_i - z_j + m, where R^-_ij has a pole.
PoleProbe f_identity_near_pole(int k, const SiteConfig& cfg, const RMatrixSpec& spec, int i, int j,
                               int m, double radius = 1e-2, int points = 8);

/// ||(D_k D_l - D_l D_k) f|| / (||D_k D_l f|| + ||D_l D_k f||) at cfg.z.
double commutator_eval(int k, int l, const SiteConfig& cfg, const TestFunction& f,
                       const RMatrixSpec& spec, bool spin = true);

}  // namespace gradedrm
