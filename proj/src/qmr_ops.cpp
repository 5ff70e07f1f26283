#include "gradedrm/qmr_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace gradedrm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;

std::vector<std::vector<int>> subsets(int length, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  for (int t = 0; t < k; ++t) cur[t] = t + 1;
  if (k < 1 || k > length) return out;
  while (true) {
    out.push_back(cur);
    int t = k - 1;
    while (t >= 0 && cur[t] == length - (k - 1 - t)) --t;
    if (t < 0) break;
    ++cur[t];
    for (int u = t + 1; u < k; ++u) cur[u] = cur[u - 1] + 1;
  }
  return out;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

Vector pairwise_sum(std::vector<Vector> parts, Eigen::Index size) {
  if (parts.empty()) return Vector::Zero(size);
  while (parts.size() > 1) {
    std::vector<Vector> next;
    for (size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

RMatrixSpec at_hbar(RMatrixSpec spec, cplx hbar) {
  spec.hbar = hbar;
  return spec;
}

}  // namespace

bool site_config_regular(const SiteConfig& cfg, int max_shift, double margin) {
  if (lattice_distance(cfg.hbar) <= margin) return false;
  const int l = cfg.length();
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      if (i == j) continue;
      for (int s = -max_shift; s <= max_shift; ++s) {
        const cplx d = cfg.z[i] - cfg.z[j] + double(s) * cfg.eta;
        if (lattice_distance(d) <= margin || lattice_distance(d + cfg.hbar) <= margin) return false;
      }
    }
  return true;
}

SiteConfig random_site_config(int length, Sampler& sampler, std::optional<cplx> hbar, int max_shift) {
  if (length < 1) throw std::invalid_argument("chain length must be positive");
  const auto values = sampler.draw(length + 2, [&](std::span<const cplx> v) -> std::vector<cplx> {
    SiteConfig c{std::vector<cplx>(v.begin(), v.begin() + length), v[length],
                 hbar.value_or(v[length + 1])};
    // A single offending value is enough to reject the draw.
    return {site_config_regular(c, max_shift) ? cplx{0.5, 0.5} : cplx{0.0, 0.0}};
  });
  return {std::vector<cplx>(values.begin(), values.begin() + length), values[length],
          hbar.value_or(values[length + 1])};
}

TestFunction::TestFunction(GradedDim dim, int length, std::vector<Term> terms)
    : dim_(dim), length_(length), terms_(std::move(terms)) {
  const auto d = ipow(dim.size(), length);
  for (const auto& t : terms_)
    if (t.coeff.size() != d || static_cast<int>(t.frequency.size()) != length)
      throw std::invalid_argument("test function term has the wrong shape");
}

TestFunction TestFunction::random(GradedDim dim, int length, int count, Sampler& sampler) {
  const auto d = ipow(dim.size(), length);
  std::vector<Term> terms;
  for (int t = 0; t < count; ++t) {
    Term term{Vector(d), std::vector<int>(length)};
    for (Eigen::Index i = 0; i < d; ++i)
      term.coeff(i) = {2.0 * sampler.uniform() - 1.0, 2.0 * sampler.uniform() - 1.0};
    for (int& m : term.frequency) m = static_cast<int>(std::floor(5.0 * sampler.uniform())) - 2;
    terms.push_back(std::move(term));
  }
  return {dim, length, std::move(terms)};
}

Vector TestFunction::operator()(std::span<const cplx> z) const {
  if (static_cast<int>(z.size()) != length_) throw std::invalid_argument("wrong number of positions");
  Vector out = Vector::Zero(ipow(dim_.size(), length_));
  for (const auto& t : terms_) {
    cplx phase = 0.0;
    for (int i = 0; i < length_; ++i) phase += double(t.frequency[i]) * z[i];
    out += std::exp(2.0 * kPi * cplx{0.0, 1.0} * phase) * t.coeff;
  }
  return out;
}

TestFunction TestFunction::shifted(int site, cplx eta) const {
  if (site < 1 || site > length_) throw std::out_of_range("site index outside 1..L");
  auto terms = terms_;
  for (auto& t : terms)
    t.coeff *= std::exp(-2.0 * kPi * cplx{0.0, 1.0} * double(t.frequency[site - 1]) * eta);
  return {dim_, length_, std::move(terms)};
}

VectorField as_field(const TestFunction& f) {
  return [f](std::span<const cplx> z) { return f(z); };
}

DifferenceOperator::DifferenceOperator(RMatrixSpec spec, int length, int order, bool spin)
    : spec_(std::move(spec)), length_(length), order_(order), spin_(spin) {
  if (length < 1) throw std::invalid_argument("chain length must be positive");
  if (order < 1 || order > length) throw std::invalid_argument("operator order must lie in 1..L");
  for (auto& subset : subsets(length, order)) {
    SubsetTerm t{subset, {}, {}};
    for (int s = 0; s < order; ++s)
      for (int j = subset[s] - 1; j >= 1; --j)
        if (!contains(subset, j)) t.left.emplace_back(j, subset[s]);
    for (int s = order - 1; s >= 0; --s)
      for (int j = 1; j < subset[s]; ++j)
        if (!contains(subset, j)) t.right.emplace_back(subset[s], j);
    terms_.push_back(std::move(t));
  }
}

cplx DifferenceOperator::coefficient(const SubsetTerm& t, std::span<const cplx> z) const {
  cplx c = 1.0;
  for (int i : t.subset)
    for (int j = 1; j <= length_; ++j)
      if (!contains(t.subset, j)) c *= phi(spec_.hbar, z[j - 1] - z[i - 1]);
  return c;
}

Vector DifferenceOperator::evaluate(const VectorField& f, std::span<const cplx> z, cplx eta) const {
  if (static_cast<int>(z.size()) != length_) throw std::invalid_argument("wrong number of positions");
  const auto d = ipow(spec_.dim.size(), length_);
  std::vector<Vector> parts;
  parts.reserve(terms_.size());
  for (const auto& t : terms_) {
    std::vector<cplx> zs(z.begin(), z.end());
    for (int i : t.subset) zs[i - 1] -= eta;
    Vector v = f(zs);
    if (v.size() != d) throw std::invalid_argument("field value has the wrong length");
    if (spin_) {
      std::vector<SiteFactor> factors;
      for (auto [i, j] : t.left)
        factors.emplace_back(build_r_normalized(spec_, z[i - 1] - z[j - 1]), i, j, length_);
      for (auto [i, j] : t.right)
        factors.emplace_back(build_r_normalized(spec_, zs[i - 1] - zs[j - 1]), i, j, length_);
      apply_product_inplace(factors, v);
    }
    parts.push_back(coefficient(t, z) * v);
  }
  return pairwise_sum(std::move(parts), d);
}

VectorField DifferenceOperator::apply(VectorField f, cplx eta) const {
  DifferenceOperator self = *this;
  return [self, f = std::move(f), eta](std::span<const cplx> z) { return self.evaluate(f, z, eta); };
}

Vector scalar_d(int k, const SiteConfig& cfg, const VectorField& f, const GradedDim& dim) {
  const DifferenceOperator d({Family::UqGlNM, dim, cfg.hbar}, cfg.length(), k, false);
  return d.evaluate(f, cfg.z, cfg.eta);
}

Vector spin_d(int k, const SiteConfig& cfg, const VectorField& f, const RMatrixSpec& spec) {
  const DifferenceOperator d(at_hbar(spec, cfg.hbar), cfg.length(), k, true);
  return d.evaluate(f, cfg.z, cfg.eta);
}

bool f_identity_within_caps(const GradedDim& dim, int length) {
  const int n = dim.size();
  if (n <= 3) return length <= 5;
  if (n == 4) return length <= 4;
  return false;
}

FIdentityResult f_identity(int k, const SiteConfig& cfg, const RMatrixSpec& base) {
  const int length = cfg.length();
  if (!f_identity_within_caps(base.dim, length))
    throw std::length_error("F-identity is evaluated densely only for L <= 5 (n <= 3) or L <= 4 (n = 4)");
  if (k < 1 || k > length) throw std::invalid_argument("operator order must lie in 1..L");
  const RMatrixSpec spec = at_hbar(base, cfg.hbar);
  const auto& z = cfg.z;

  std::map<std::tuple<int, int, bool>, SiteFactor> cache;
  auto factor = [&](int i, int j, bool minus) -> const SiteFactor& {
    const auto key = std::make_tuple(i, j, minus);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const cplx arg = z[i - 1] - z[j - 1] - (minus ? cfg.eta : cplx{});
      it = cache.emplace(key, SiteFactor(build_r(spec, arg), i, j, length)).first;
    }
    return it->second;
  };

  const auto d = ipow(base.dim.size(), length);
  Matrix total = Matrix::Zero(d, d);
  double scale = 0.0;
  for (const auto& subset : subsets(length, k)) {
    std::vector<int> rest;
    for (int j = 1; j <= length; ++j)
      if (!contains(subset, j)) rest.push_back(j);
    auto before = [&](int t) { return std::vector<int>(subset.begin(), subset.begin() + t); };
    auto after = [&](int t) { return std::vector<int>(subset.begin() + t + 1, subset.end()); };

    std::vector<SiteFactor> plus, minus;
    for (int t = k - 1; t >= 0; --t)
      for (int l = subset[t] + 1; l <= length; ++l)
        if (!contains(after(t), l)) plus.push_back(factor(subset[t], l, false));
    for (int t = 0; t < k; ++t)
      for (auto it = rest.rbegin(); it != rest.rend(); ++it) plus.push_back(factor(*it, subset[t], true));
    for (int t = k - 1; t >= 0; --t)
      for (int m = 1; m < subset[t]; ++m)
        if (!contains(before(t), m)) plus.push_back(factor(subset[t], m, false));

    for (int t = 0; t < k; ++t)
      for (int m = subset[t] - 1; m >= 1; --m)
        if (!contains(before(t), m)) minus.push_back(factor(m, subset[t], false));
    for (int t = k - 1; t >= 0; --t)
      for (int j : rest) minus.push_back(factor(subset[t], j, true));
    for (int t = 0; t < k; ++t)
      for (int l = length; l > subset[t]; --l)
        if (!contains(after(t), l)) minus.push_back(factor(l, subset[t], false));

    const Matrix fp = product_dense(plus, base.dim, length);
    const Matrix fm = product_dense(minus, base.dim, length);
    total += fm - fp;
    scale += fm.norm() + fp.norm();
  }
  const double residual = total.norm() / (scale + kFloor);
  return {LocalOperator::from_action(base.dim, length, total), scale, residual};
}

double f_identity_eta_spread(int k, const SiteConfig& cfg, const RMatrixSpec& spec,
                             std::span<const cplx> etas) {
  std::vector<FIdentityResult> results;
  double scale = 0.0;
  for (cplx eta : etas) {
    SiteConfig c = cfg;
    c.eta = eta;
    results.push_back(f_identity(k, c, spec));
    scale = std::max(scale, results.back().scale);
  }
  double spread = 0.0;
  for (size_t i = 0; i < results.size(); ++i)
    for (size_t j = i + 1; j < results.size(); ++j)
      spread = std::max(spread, (results[i].total.coeffs() - results[j].total.coeffs()).norm());
  return spread / (scale + kFloor);
}

PoleProbe f_identity_near_pole(int k, const SiteConfig& cfg, const RMatrixSpec& spec, int i, int j,
                               int m, double radius, int points) {
  const double base_scale = f_identity(k, cfg, spec).scale;
  const cplx centre = cfg.z[i - 1] - cfg.z[j - 1] + double(m);
  PoleProbe probe{0.0, 0.0, 0.0};
  for (int p = 0; p < points; ++p) {
    SiteConfig c = cfg;
    c.eta = centre + radius * std::exp(cplx{0.0, 2.0 * kPi * (p + 0.5) / points});
    const auto r = f_identity(k, c, spec);
    probe.max_residual = std::max(probe.max_residual, r.residual);
    probe.max_total = std::max(probe.max_total, r.total.norm());
    probe.term_growth = std::max(probe.term_growth, r.scale / (base_scale + kFloor));
  }
  return probe;
}

double commutator_eval(int k, int l, const SiteConfig& cfg, const TestFunction& f,
                       const RMatrixSpec& spec, bool spin) {
  const RMatrixSpec s = at_hbar(spec, cfg.hbar);
  const DifferenceOperator dk(s, cfg.length(), k, spin);
  const DifferenceOperator dl(s, cfg.length(), l, spin);
  const VectorField g = as_field(f);
  const Vector a = dk.evaluate(dl.apply(g, cfg.eta), cfg.z, cfg.eta);
  const Vector b = dl.evaluate(dk.apply(g, cfg.eta), cfg.z, cfg.eta);
  return (a - b).norm() / (a.norm() + b.norm() + kFloor);
}

}  // namespace gradedrm
