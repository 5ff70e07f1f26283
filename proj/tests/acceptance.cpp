// Acceptance run: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "gradedrm/chain.hpp"
#include "gradedrm/qmr_ops.hpp"
#include "gradedrm/verify.hpp"
#include "oracles.hpp"

using namespace gradedrm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::pair<int, int>> kBatteryDims{{1, 0}, {2, 0}, {0, 2}, {1, 1},
                                                    {2, 1}, {1, 2}, {2, 2}};

std::vector<GradedDim> dims_up_to(int n_max) {
  std::vector<GradedDim> out;
  for (int n = 1; n <= n_max; ++n)
    for (int m = 0; m <= n; ++m) out.emplace_back(n - m, m);
  return out;
}

// Tracks the worst value of one quantity against a pinned bound.
struct Worst {
  std::string name;
  double bound;
  double value = 0.0;
  bool missing = false;

  void see(double v) { value = std::max(value, std::isnan(v) ? INFINITY : v); }
  bool ok() const { return !missing && value < bound; }
  std::string text() const {
    std::ostringstream s;
    s << name << "=" << (missing ? std::string("missing") : fmt(value)) << "<" << fmt(bound);
    return s.str();
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
  }
};

struct Criterion {
  int number;
  std::vector<Worst> worst;
  std::vector<std::pair<std::string, bool>> flags;
  std::string note;

  bool pass() const {
    for (const auto& w : worst)
      if (!w.ok()) return false;
    for (const auto& f : flags)
      if (!f.second) return false;
    return true;
  }
  void print() const {
    std::printf("criterion %2d [%s]", number, pass() ? "PASS" : "FAIL");
    for (const auto& w : worst) std::printf(" %s", w.text().c_str());
    for (const auto& [name, ok] : flags) std::printf(" %s=%s", name.c_str(), ok ? "yes" : "NO");
    if (!note.empty()) std::printf(" %s", note.c_str());
    std::printf("\n");
    std::fflush(stdout);
  }
};

// Worst residual of a battery check over the given families and dimensions.
Worst from_battery(const VerificationReport& r, const std::string& check, double bound,
                   std::vector<Family> families, const std::vector<std::pair<int, int>>& dims,
                   int min_samples) {
  Worst w{check, bound};
  for (Family f : families)
    for (auto [n, m] : dims) {
      const auto* c = r.find(check, f, n, m);
      if (!c || c->samples < min_samples) {
        w.missing = true;
        continue;
      }
      w.see(c->max_residual);
    }
  return w;
}

const std::vector<Family> kBoth{Family::UqGlNM, Family::ZnGraded};

}  // namespace

int main() {
  std::vector<Criterion> results;
  auto done = [&](Criterion c) {
    c.print();
    results.push_back(std::move(c));
  };

  BatteryOptions battery;
  battery.specs = default_battery_specs();
  battery.seed = 7;
  battery.samples = 100;
  const auto t_battery = Clock::now();
  const VerificationReport report = run_battery(battery);
  const double battery_seconds = seconds_since(t_battery);

  {
    Criterion c{1};
    c.worst.push_back(from_battery(report, "qybe", 1e-10, kBoth, kBatteryDims, 100));
    c.flags.push_back({"battery_under_30s", battery_seconds < 30.0});
    c.note = "battery_s=" + Worst::fmt(battery_seconds);
    done(c);
  }
  {
    Criterion c{2};
    c.worst.push_back(from_battery(report, "aybe", 1e-10, kBoth, kBatteryDims, 100));
    c.worst.push_back(
        from_battery(report, "aybe_z_independence", 1e-12, {Family::UqGlNM}, kBatteryDims, 20));
    Worst small{"defect_n_le_2", 1e-300};
    for (const auto& d : dims_up_to(2))
      small.see(aybe_expected_defect(make_spec(Family::UqGlNM, d.n_even(), d.n_odd(), 0.3),
                                     {0.31, 0.12}, {0.64, 0.27})
                    .norm());
    c.flags.push_back({"defect_vanishes_n_le_2", small.value == 0.0});
    done(c);
  }
  {
    Criterion c{3};
    for (const char* check :
         {"unitarity", "normalized_unitarity", "skew_symmetry", "residue", "periodicity"})
      c.worst.push_back(from_battery(report, check, 1e-12, kBoth, kBatteryDims, 50));
    done(c);
  }
  {
    Criterion c{4};
    std::vector<std::pair<int, int>> dims;
    for (const auto& d : dims_up_to(4)) dims.emplace_back(d.n_even(), d.n_odd());
    BatteryOptions twist;
    twist.seed = 7;
    twist.samples = 50;
    for (auto [n, m] : dims) twist.specs.push_back(make_spec(Family::ZnGraded, n, m, 0.3));
    const auto r = run_battery(twist);
    c.worst.push_back(from_battery(r, "twist", 1e-12, {Family::ZnGraded}, dims, 50));
    bool identity = true;
    for (const auto& d : dims_up_to(2)) {
      if (d.size() != 2) continue;
      const auto t = twist_data(d, {0.37, 0.11}, {0.2, 0.3});
      const Matrix id = LocalOperator::identity(d, 2).coeffs();
      identity = identity && t.twist.coeffs() == id && t.twist_swapped.coeffs() == id;
    }
    c.flags.push_back({"F_is_identity_n2", identity});
    done(c);
  }
  {
    Criterion c{5};
    c.worst.push_back(from_battery(report, "diagonal_three_term", 1e-12, kBoth, kBatteryDims, 100));
    c.worst.push_back(
        from_battery(report, "off_diagonal_three_term", 1e-12, kBoth, {{2, 1}, {1, 2}, {2, 2}}, 100));
    c.worst.push_back(from_battery(report, "weight_product", 1e-12, kBoth, kBatteryDims, 100));
    c.worst.push_back(from_battery(report, "off_diagonal_product", 1e-12, kBoth, kBatteryDims, 100));
    c.worst.push_back(
        from_battery(report, "gtilde_defect", 1e-12, {Family::UqGlNM}, kBatteryDims, 100));
    done(c);
  }
  {
    Criterion c{6};
    Worst f{"f_identity", 1e-10}, eta{"eta_spread", 1e-10}, pole{"near_pole", 1e-10};
    Sampler s(derive_seed(7, "acceptance-f-identity"));
    double growth = 0.0;
    for (Family fam : kBoth)
      for (const auto& d : dims_up_to(3))
        for (int length = 2; length <= 4; ++length) {
          const auto cfg = random_site_config(length, s);
          const auto spec = make_spec(fam, d.n_even(), d.n_odd(), cfg.hbar);
          for (int k = 1; k < length; ++k) {
            f.see(f_identity(k, cfg, spec).residual);
            std::vector<cplx> etas;
            for (int e = 0; e < 5; ++e) etas.push_back(s.spectral());
            eta.see(f_identity_eta_spread(k, cfg, spec, etas));
          }
          if (length == 3) {
            const auto probe = f_identity_near_pole(1, cfg, spec, 1, 2, 0);
            pole.see(probe.max_residual);
            growth = std::max(growth, probe.term_growth);
          }
        }
    c.worst = {f, eta, pole};
    c.note = "pole_term_growth=" + Worst::fmt(growth);
    done(c);
  }
  {
    Criterion c{7};
    Worst comm{"commutator", 1e-9}, scalar{"scalar_reduction", 1e-12};
    Sampler s(derive_seed(7, "acceptance-commute"));
    for (Family fam : kBoth)
      for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}})
        for (int t = 0; t < 10; ++t) {
          const auto cfg = random_site_config(3, s);
          const auto spec = make_spec(fam, n, m, cfg.hbar);
          const auto f = TestFunction::random(spec.dim, 3, 3, s);
          for (auto [k, l] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}})
            comm.see(commutator_eval(k, l, cfg, f, spec));
        }
    const GradedDim one(1, 0);
    for (int t = 0; t < 10; ++t) {
      const auto cfg = random_site_config(3, s);
      const auto f = TestFunction::random(one, 3, 3, s);
      const auto spec = make_spec(Family::UqGlNM, 1, 0, cfg.hbar);
      for (int k = 1; k <= 3; ++k) {
        const Vector a = scalar_d(k, cfg, as_field(f), one);
        const Vector b = spin_d(k, cfg, as_field(f), spec);
        scalar.see((a - b).norm() / a.norm());
      }
    }
    c.worst = {comm, scalar};
    done(c);
  }
  {
    Criterion c{8};
    Worst phi{"phi_sum", 1e-11}, comm{"h1_h2_commutator", 1e-10}, norm{"htilde1_normalization", 1e-11};
    for (int length = 2; length <= 6; ++length)
      for (int k = 1; k <= length; ++k) phi.see(phi_sum_max_residual(length, k));
    for (Family fam : kBoth)
      for (auto [n, m] : {std::pair{2, 0}, std::pair{1, 1}, std::pair{2, 1}})
        for (int length = 3; length <= 5; ++length) {
          const auto spec = make_spec(fam, n, m, kDefaultChainHbar);
          const Matrix h1 = hamiltonian_h1(spec, length).to_dense();
          const Matrix h2 = hamiltonian_h2(spec, length).to_dense();
          comm.see((h1 * h2 - h2 * h1).norm() / (h1.norm() * h2.norm()));
          if (length <= 4) {
            const Matrix t1 = htilde_k(spec, length, 1).to_dense();
            norm.see(oracle::relative(t1, h1_constant(spec, length) * h1));
          }
        }
    c.worst = {phi, comm, norm};
    done(c);
  }
  {
    Criterion c{9};
    Worst hs{"limit_hs", 1e-5}, xxz{"limit_xxz", 1e-5}, cm{"c_matrix_h1", 1e-11}, c0{"c_to_1_minus_P", 1e-5};
    for (auto [n, m] : {std::pair{1, 1}, std::pair{2, 0}})
      for (int length = 2; length <= 4; ++length) {
        const GradedDim d(n, m);
        const auto spec = make_spec(Family::UqGlNM, n, m, kDefaultChainHbar);
        const auto lim = nonrelativistic_limit_h1(spec, length);
        hs.see((lim.limit - oracle::haldane_shastry(d, length)).cwiseAbs().maxCoeff());
        const Matrix a = hamiltonian_h1(spec, length).to_dense();
        const Matrix b = h1_from_c_matrix(spec, length).to_dense();
        cm.see((a - b).cwiseAbs().maxCoeff());
      }
    for (int length = 2; length <= 4; ++length) {
      const auto lim = nonrelativistic_limit_h1(make_spec(Family::ZnGraded, 1, 1, kDefaultChainHbar), length);
      xxz.see((lim.limit - oracle::anisotropic_xxz(length)).cwiseAbs().maxCoeff());
    }
    const GradedDim susy(1, 1);
    const Matrix want = Matrix::Identity(4, 4) - graded_permutation(susy).action();
    c0.see((c_matrix_at_zero(make_spec(Family::UqGlNM, 1, 1, kDefaultChainHbar)).action() - want)
               .cwiseAbs()
               .maxCoeff());
    c.worst = {hs, xxz, cm, c0};
    done(c);
  }
  {
    Criterion c{10};
    std::mt19937_64 rng(derive_seed(7, "acceptance-oracle"));
    long long mismatches = 0, products = 0;
    for (const auto& d : dims_up_to(4))
      for (int trial = 0; trial < 200; ++trial) {
        auto ua = oracle::random_units(d, 2, rng);
        auto ub = oracle::random_units(d, 2, rng);
        if (trial % 2 == 0)
          for (int m = 0; m < 2; ++m) ub[m].first = ua[m].second;
        const auto got = super_multiply(LocalOperator::monomial(d, ua), LocalOperator::monomial(d, ub));
        const auto want = oracle::monomial_product(d, ua, ub);
        const Matrix expect = want ? LocalOperator::monomial(d, want->second, double(want->first)).coeffs()
                                   : LocalOperator::zero(d, 2).coeffs();
        ++products;
        if (got.coeffs() != expect) ++mismatches;
      }
    Worst apply{"matrix_free_vs_dense", 1e-12};
    for (Family fam : kBoth)
      for (auto [n, m] : {std::pair{1, 1}, std::pair{2, 1}})
        for (int length = 3; length <= 5; ++length) {
          const auto spec = make_spec(fam, n, m, kDefaultChainHbar);
          const auto op = hamiltonian_h1(spec, length, Representation::Factors);
          const Matrix dense = op.to_dense();
          const Vector v = oracle::random_vector(dense.cols(), rng);
          const Vector want = dense * v;
          apply.see((op.apply(v) - want).norm() / want.norm());
        }
    c.worst = {apply};
    c.flags.push_back({"super_multiply_exact", mismatches == 0});
    c.note = "products=" + std::to_string(products);
    done(c);
  }
  {
    Criterion c{11};
    const auto spec = make_spec(Family::UqGlNM, 1, 1, kDefaultChainHbar);
    const auto op = hamiltonian_h1(spec, 16, Representation::Factors);
    std::mt19937_64 rng(derive_seed(7, "acceptance-apply"));
    const Vector v = oracle::random_vector(op.dimension(), rng);
    const auto t0 = Clock::now();
    const Vector w = op.apply(v);
    const double apply_seconds = seconds_since(t0);
    Worst a{"apply_L16_s", 1.0}, b{"battery_s", 300.0};
    a.see(apply_seconds);
    b.see(battery_seconds);
    c.worst = {a, b};
    c.flags.push_back({"finite", std::isfinite(w.norm()) && w.norm() > 0.0});
    c.note = "dimension=" + std::to_string(op.dimension());
    done(c);
  }
  {
    Criterion c{12};
    using K = RMatrixMutation::Kind;
    struct Injected {
      Family family;
      K kind;
      int a, c;
    };
    const Injected injected[] = {
        {Family::UqGlNM, K::DiagonalParitySign, 2, 0},     {Family::UqGlNM, K::OffDiagonalParitySign, 0, 2},
        {Family::ZnGraded, K::SpectralExponentSign, 0, 1}, {Family::ZnGraded, K::WeightExponentSign, 1, 2},
        {Family::UqGlNM, K::HbarCotSign, 1, 0},
    };
    int caught = 0;
    std::string counts;
    for (const auto& m : injected) {
      auto spec = make_spec(m.family, 2, 1, kDefaultChainHbar);
      spec.mutation = RMatrixMutation{m.kind, m.a, m.c};
      BatteryOptions opt;
      opt.specs = {spec};
      opt.seed = 7;
      opt.samples = 20;
      const auto r = run_battery(opt);
      int failed = 0;
      for (const auto& chk : r.checks) failed += !chk.pass;
      caught += failed > 0;
      counts += (counts.empty() ? "" : ",") + std::to_string(failed);
    }
    c.flags.push_back({"all_5_detected", caught == 5});
    c.note = "failing_checks_per_mutation=" + counts;
    done(c);
  }

  bool all = true;
  for (const auto& c : results) all = all && c.pass();
  std::printf("acceptance %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
