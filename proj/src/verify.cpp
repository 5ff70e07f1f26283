#include "gradedrm/verify.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "gradedrm/chain_operator.hpp"
#include "gradedrm/sampling.hpp"

namespace gradedrm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;

RMatrixSpec with_hbar(const RMatrixSpec& spec, cplx hbar) {
  RMatrixSpec s = spec;
  s.hbar = hbar;
  return s;
}

// |sum terms| / sum |terms|
double relative_sum(std::initializer_list<cplx> terms) {
  cplx total = 0.0;
  double scale = 0.0;
  for (cplx t : terms) {
    total += t;
    scale += std::abs(t);
  }
  return std::abs(total) / (scale + kFloor);
}

Eigen::VectorXcd kron_diag(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

Matrix on_three_legs(const LocalOperator& op, int i, int j) { return embed_dense(op, i, j, 3); }

double check_qybe(const RMatrixSpec& spec, cplx u, cplx v) {
  const Matrix r12 = on_three_legs(build_r(spec, u), 1, 2);
  const Matrix r13 = on_three_legs(build_r(spec, u + v), 1, 3);
  const Matrix r23 = on_three_legs(build_r(spec, v), 2, 3);
  const Matrix d = r12 * r13 * r23 - r23 * r13 * r12;
  return d.norm() / (r12.norm() * r13.norm() * r23.norm() + kFloor);
}

cplx aybe_printed_constant(cplx x, cplx y) {
  return 1.0 / (2.0 * std::cos(kPi * x / 2.0) * std::cos(kPi * y / 2.0) *
                std::cos(kPi * (x - y) / 2.0));
}

LocalOperator aybe_expected_defect(const RMatrixSpec& spec, cplx x, cplx y) {
  const GradedDim& d = spec.dim;
  auto out = LocalOperator::zero(d, 3);
  if (spec.family == Family::ZnGraded) return out;
  const cplx c = kPi * kPi * aybe_printed_constant(x, y);
  const int n = d.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e)
        if (a != b && b != e && a != e) out += LocalOperator::monomial(d, {{a, a}, {b, b}, {e, e}}, c);
  return out;
}

AybeResult check_aybe(const RMatrixSpec& spec, cplx x, cplx y, cplx z1, cplx z2, cplx z3) {
  const cplx z12 = z1 - z2, z23 = z2 - z3, z13 = z1 - z3;
  const Matrix a1 = on_three_legs(build_r(with_hbar(spec, x), z12), 1, 2);
  const Matrix a2 = on_three_legs(build_r(with_hbar(spec, y), z23), 2, 3);
  const Matrix b1 = on_three_legs(build_r(with_hbar(spec, y), z13), 1, 3);
  const Matrix b2 = on_three_legs(build_r(with_hbar(spec, x - y), z12), 1, 2);
  const Matrix c1 = on_three_legs(build_r(with_hbar(spec, y - x), z23), 2, 3);
  const Matrix c2 = on_three_legs(build_r(with_hbar(spec, x), z13), 1, 3);
  const Matrix defect = a1 * a2 - b1 * b2 - c1 * c2;
  const double scale =
      a1.norm() * a2.norm() + b1.norm() * b2.norm() + c1.norm() * c2.norm() + kFloor;
  const LocalOperator expected = aybe_expected_defect(spec, x, y);
  const double residual = (defect - expected.action()).norm() / scale;
  return {residual, scale, LocalOperator::from_action(spec.dim, 3, defect)};
}

double aybe_z_spread(const RMatrixSpec& spec, cplx x, cplx y,
                     const std::vector<std::array<cplx, 3>>& triples) {
  std::vector<AybeResult> results;
  double scale = 0.0;
  for (const auto& t : triples) {
    results.push_back(check_aybe(spec, x, y, t[0], t[1], t[2]));
    scale = std::max(scale, results.back().scale);
  }
  double spread = 0.0;
  for (size_t i = 0; i < results.size(); ++i)
    for (size_t j = i + 1; j < results.size(); ++j)
      spread = std::max(spread, (results[i].defect.coeffs() - results[j].defect.coeffs()).norm());
  return spread / (scale + kFloor);
}

double check_unitarity(const RMatrixSpec& spec, cplx z) {
  const Matrix a = build_r(spec, z).action();
  const Matrix b = build_r(spec, -z).leg_swapped().action();
  const cplx s = phi(spec.hbar, z) * phi(spec.hbar, -z);
  const Matrix d = a * b - s * Matrix::Identity(a.rows(), a.cols());
  return d.norm() / (a.norm() * b.norm() + kFloor);
}

double check_normalized_unitarity(const RMatrixSpec& spec, cplx z) {
  const Matrix a = build_r_normalized(spec, z).action();
  const Matrix b = build_r_normalized(spec, -z).leg_swapped().action();
  const Matrix d = a * b - Matrix::Identity(a.rows(), a.cols());
  return d.norm() / (a.norm() * b.norm() + kFloor);
}

double check_skew(const RMatrixSpec& spec, cplx z) {
  const Matrix p = graded_permutation(spec.dim).action();
  const Matrix r = build_r(spec, z).action();
  const Matrix m = build_r(with_hbar(spec, -spec.hbar), -z).action();
  return (m + p * r * p).norm() / (r.norm() + kFloor);
}

double check_twist(const RMatrixSpec& zn, cplx u, cplx v) {
  if (zn.family != Family::ZnGraded) throw std::invalid_argument("twist check takes the ZnGraded spec");
  const GradedDim& dim = zn.dim;
  const cplx hbar = zn.hbar;
  const RMatrixSpec uq{Family::UqGlNM, dim, hbar};
  const TwistData tu = twist_data(dim, hbar, u);
  const TwistData tv = twist_data(dim, hbar, v);
  // All conjugating matrices are even and diagonal, so ordinary products of
  // coefficient matrices suffice.
  const Eigen::VectorXcd g = kron_diag(tu.gauge.diagonal(), tv.gauge.diagonal());
  const Eigen::VectorXcd left = g.cwiseProduct(tu.twist.coeffs().diagonal());
  const Eigen::VectorXcd right =
      tu.twist_swapped.coeffs().diagonal().cwiseInverse().cwiseProduct(g.cwiseInverse());
  const Matrix lhs = build_r(zn, u - v).coeffs();
  const Matrix rhs = left.asDiagonal() * build_r(uq, u - v).coeffs() * right.asDiagonal();
  return (lhs - rhs).norm() / (lhs.norm() + kFloor);
}

double check_periodicity(const RMatrixSpec& spec, cplx z) {
  const Matrix r = build_r(spec, z).coeffs();
  const Matrix r1 = build_r(spec, z + 1.0).coeffs();
  if (spec.family == Family::UqGlNM) return (r1 - r).norm() / (r.norm() + kFloor);
  const int n = spec.dim.size();
  const Matrix q = twist_data(spec.dim, spec.hbar, 0.0).periodicity;
  const Matrix qq = kron_diag(q.diagonal(), Eigen::VectorXcd::Ones(n)).asDiagonal();
  const Matrix qi = qq.diagonal().cwiseInverse().asDiagonal();
  return (r1 - qq * r * qi).norm() / (r.norm() + kFloor);
}

ResidueResult check_residue(const RMatrixSpec& spec) {
  const Matrix p = graded_permutation(spec.dim).coeffs();
  const double pn = p.norm();
  const double analytic = (residue_at_zero(spec).coeffs() - p).norm() / pn;
  const cplx eps{1e-6, 1e-6};
  const double numeric = (eps * build_r(spec, eps).coeffs() - p).norm() / pn;
  return {analytic, numeric};
}

ScalarResiduals check_scalar_relations(const RMatrixSpec& spec, cplx x, cplx y, cplx z, cplx w) {
  const ScalarKernels k(spec);
  const int n = spec.dim.size();
  ScalarResiduals out{};

  for (int a = 0; a < n; ++a)
    out.diagonal_three_term = std::max(out.diagonal_three_term, relative_sum({k.f(a, z, x) * k.f(a, w, y),
                                              -k.f(a, z + w, y) * k.f(a, z, x - y),
                                              -k.f(a, w, y - x) * k.f(a, z + w, x)}));

  if (n >= 3) {
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (a == b || b == c || a == c) continue;
          worst = std::max(worst, relative_sum({k.off_diagonal(a, b, x) * k.off_diagonal(b, c, y),
                                                -k.off_diagonal(a, c, y) * k.off_diagonal(a, b, x - y),
                                                -k.off_diagonal(b, c, y - x) * k.off_diagonal(a, c, x)}));
        }
    out.off_diagonal_three_term = worst;
  }

  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (a == c) continue;
      const double sc = spec.dim.parity(c) ? -1.0 : 1.0;
      const cplx lhs_weight = k.weight(a, c, x + y) * (k.f(a, z, x) - k.f(a, z, -y));
      out.weight_product = std::max(
          out.weight_product, relative_sum({lhs_weight, -k.weight(a, c, x) * k.weight(a, c, y)}));
      const cplx lhs_product = k.off_diagonal(a, c, z + w) * (k.f(c, z, x) + k.f(c, w, -x));
      out.off_diagonal_product = std::max(
          out.off_diagonal_product,
          relative_sum({lhs_product, -sc * k.off_diagonal(a, c, z) * k.off_diagonal(a, c, w)}));
    }

  if (spec.family == Family::UqGlNM)
    out.gtilde_defect =
        relative_sum({k.gtilde(x) * k.gtilde(y), -k.gtilde(y) * k.gtilde(x - y),
                      -k.gtilde(y - x) * k.gtilde(x), -kPi * kPi * aybe_printed_constant(x, y)});
  return out;
}


std::vector<RMatrixSpec> default_battery_specs() {
  static const std::pair<int, int> kDims[] = {{1, 0}, {2, 0}, {0, 2}, {1, 1},
                                              {2, 1}, {1, 2}, {2, 2}};
  std::vector<RMatrixSpec> out;
  for (Family f : {Family::UqGlNM, Family::ZnGraded})
    for (auto [nn, mm] : kDims) out.push_back({f, GradedDim(nn, mm), cplx{0.3, 0.0}});
  return out;
}

namespace {

using Values = std::vector<cplx>;
using Critical = std::function<Values(const Values&)>;

class BatteryRun {
 public:
  BatteryRun(const BatteryOptions& o) : opt_(o) {}

  // One check over opt_.samples draws. values[0] is always hbar.
  void sampled(const std::string& name, const RMatrixSpec& spec, double tolerance,
               std::vector<std::string> names, const Critical& critical,
               const std::function<double(const Values&)>& residual, int samples = -1) {
    CheckSummary s = start(name, spec, tolerance);
    names.insert(names.begin(), "hbar");
    Sampler sampler(derive_seed(opt_.seed, name + "/" + describe(spec)));
    const int count = samples < 0 ? opt_.samples : samples;
    try {
      double total = 0.0;
      for (int k = 0; k < count; ++k) {
        Values v = sampler.draw(int(names.size()), [&](std::span<const cplx> raw) {
          Values w(raw.begin(), raw.end());
          if (opt_.hbar) w[0] = *opt_.hbar;
          return critical(w);
        });
        if (opt_.hbar) v[0] = *opt_.hbar;
        const double r = residual(v);
        record(s, r, names, v);
        total += std::isfinite(r) ? r : 0.0;
      }
      s.mean_residual = s.samples ? total / s.samples : 0.0;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    s.resamples = sampler.resamples();
    finish(std::move(s));
  }

  // A check without random inputs.
  void fixed(const std::string& name, const RMatrixSpec& spec, double tolerance,
             const std::function<double()>& residual) {
    CheckSummary s = start(name, spec, tolerance);
    try {
      record(s, residual(), {}, {});
      s.mean_residual = s.max_residual;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    finish(std::move(s));
  }

  VerificationReport report() && { return {opt_.seed, opt_.samples, std::move(checks_)}; }

 private:
  CheckSummary start(const std::string& name, const RMatrixSpec& spec, double tolerance) const {
    CheckSummary s;
    s.check = name;
    s.family = spec.family;
    s.n_even = spec.dim.n_even();
    s.n_odd = spec.dim.n_odd();
    s.tolerance = opt_.tolerance.value_or(tolerance);
    return s;
  }

  static void record(CheckSummary& s, double r, const std::vector<std::string>& names,
                     const Values& v) {
    const bool worse = !std::isfinite(r) || s.samples == 0 || r > s.max_residual;
    ++s.samples;
    if (!worse || !std::isfinite(s.max_residual)) return;
    s.max_residual = std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
    s.worst_point.clear();
    for (size_t i = 0; i < v.size(); ++i) s.worst_point.emplace_back(names[i], v[i]);
  }

  void finish(CheckSummary s) {
    s.pass = s.error.empty() && s.samples > 0 && std::isfinite(s.max_residual) &&
             s.max_residual <= s.tolerance;
    checks_.push_back(std::move(s));
  }

  const BatteryOptions& opt_;
  std::vector<CheckSummary> checks_;
};

}  // namespace

VerificationReport run_battery(const BatteryOptions& options) {
  BatteryRun run(options);
  const double t3 = kThreeLegTolerance, t2 = kTwoLegTolerance;

  for (const RMatrixSpec& base : options.specs) {
    auto at = [&](const Values& v) { return with_hbar(base, v[0]); };
    const int n = base.dim.size();

    run.sampled("qybe", base, t3, {"u", "v"},
                [](const Values& v) { return Values{v[0], v[1], v[2], v[1] + v[2]}; },
                [&](const Values& v) { return check_qybe(at(v), v[1], v[2]); });

    // hbar plays no role in AYBE; x and y take its place.
    run.sampled("aybe", base, t3, {"x", "y", "z1", "z2", "z3"},
                [](const Values& v) {
                  return Values{v[1], v[2], v[1] - v[2], v[3] - v[4], v[4] - v[5], v[3] - v[5]};
                },
                [&](const Values& v) { return check_aybe(base, v[1], v[2], v[3], v[4], v[5]).residual; });

    if (base.family == Family::UqGlNM) {
      Sampler xy(derive_seed(options.seed, "aybe_z_independence/xy/" + describe(base)));
      Values pair;
      try {
        pair = xy.draw(2, [](std::span<const cplx> w) { return Values{w[0], w[1], w[0] - w[1]}; });
      } catch (const std::exception&) {
      }
      std::vector<std::array<cplx, 3>> triples;
      run.sampled("aybe_z_independence", base, t2, {"x", "y", "z1", "z2", "z3"},
                  [&](const Values& v) {
                    return Values{pair.at(0), pair.at(1), pair.at(0) - pair.at(1), v[1] - v[2],
                                  v[2] - v[3], v[1] - v[3]};
                  },
                  [&](const Values& v) {
                    triples.push_back({v[1], v[2], v[3]});
                    return aybe_z_spread(base, pair.at(0), pair.at(1), triples);
                  },
                  20);
    }

    run.sampled("unitarity", base, t2, {"z"},
                [](const Values& v) { return Values{v[0], v[1]}; },
                [&](const Values& v) { return check_unitarity(at(v), v[1]); });
    run.sampled("normalized_unitarity", base, t2, {"z"},
                [](const Values& v) { return Values{v[0], v[1], v[0] + v[1], v[0] - v[1]}; },
                [&](const Values& v) { return check_normalized_unitarity(at(v), v[1]); });
    run.sampled("skew_symmetry", base, t2, {"z"},
                [](const Values& v) { return Values{v[0], v[1]}; },
                [&](const Values& v) { return check_skew(at(v), v[1]); });
    run.sampled("periodicity", base, t2, {"z"},
                [](const Values& v) { return Values{v[0], v[1]}; },
                [&](const Values& v) { return check_periodicity(at(v), v[1]); });

    run.sampled("residue", base, t2, {}, [](const Values& v) { return Values{v[0]}; },
                [&](const Values& v) { return check_residue(at(v)).analytic; });
    run.fixed("residue_limit", base, kResidueLimitTolerance,
              [&] { return check_residue(base).numeric; });

    if (base.family == Family::ZnGraded) {
      // The twist ties both families together; a mutation of the ZnGraded
      // matrix must show up here as well.
      run.sampled("twist", base, t2, {"u", "v"},
                  [](const Values& v) { return Values{v[0], v[1], v[2], v[1] - v[2]}; },
                  [&](const Values& v) { return check_twist(at(v), v[1], v[2]); });
    }

    const Critical scalar_poles = [](const Values& v) {
      return Values{v[1], v[2], v[1] - v[2], v[1] + v[2], v[3], v[4], v[3] + v[4]};
    };
    const std::vector<std::string> scalar_names{"x", "y", "z", "w"};
    auto scalar = [&](auto pick) {
      return [&, pick](const Values& v) {
        return pick(check_scalar_relations(base, v[1], v[2], v[3], v[4]));
      };
    };
    run.sampled("diagonal_three_term", base, t2, scalar_names, scalar_poles,
                scalar([](const ScalarResiduals& r) { return r.diagonal_three_term; }));
    if (n >= 3)
      run.sampled("off_diagonal_three_term", base, t2, scalar_names, scalar_poles,
                  scalar([](const ScalarResiduals& r) { return *r.off_diagonal_three_term; }));
    run.sampled("weight_product", base, t2, scalar_names, scalar_poles,
                scalar([](const ScalarResiduals& r) { return r.weight_product; }));
    run.sampled("off_diagonal_product", base, t2, scalar_names, scalar_poles,
                scalar([](const ScalarResiduals& r) { return r.off_diagonal_product; }));
    if (base.family == Family::UqGlNM)
      run.sampled("gtilde_defect", base, t2, scalar_names, scalar_poles,
                  scalar([](const ScalarResiduals& r) { return *r.gtilde_defect; }));
  }
  return std::move(run).report();
}

bool VerificationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const CheckSummary* VerificationReport::find(const std::string& check, Family family, int n_even,
                                             int n_odd) const {
  for (const auto& c : checks)
    if (c.check == check && c.family == family && c.n_even == n_even && c.n_odd == n_odd) return &c;
  return nullptr;
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  doc["samples"] = samples;
  doc["all_pass"] = all_pass();
  auto& arr = doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["check"] = c.check;
    j["family"] = std::string(family_tag(c.family));
    j["N"] = c.n_even;
    j["M"] = c.n_odd;
    j["samples"] = c.samples;
    j["max_residual"] = c.max_residual;
    j["mean_residual"] = c.mean_residual;
    j["tolerance"] = c.tolerance;
    j["verdict"] = c.pass ? "pass" : "fail";
    nlohmann::ordered_json wp = nlohmann::ordered_json::object();
    for (const auto& [name, z] : c.worst_point) wp[name] = {z.real(), z.imag()};
    j["worst_point"] = std::move(wp);
    j["resamples"] = c.resamples;
    if (!c.error.empty()) j["error"] = c.error;
    arr.push_back(std::move(j));
  }
  return doc;
}

}  // namespace gradedrm
