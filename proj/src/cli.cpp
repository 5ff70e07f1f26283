#include "gradedrm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gradedrm/chain.hpp"
#include "gradedrm/io.hpp"
#include "gradedrm/qmr_ops.hpp"
#include "gradedrm/verify.hpp"

#ifndef GRADEDRM_VERSION
#define GRADEDRM_VERSION "unknown"
#endif

namespace gradedrm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands{"verify", "ops", "chain", "spectrum", "limits"};

constexpr double kFIdentityTolerance = 1e-10;
constexpr double kCommuteTolerance = 1e-9;
constexpr double kScalarTolerance = 1e-12;
constexpr double kPhiSumTolerance = 1e-11;
constexpr double kHamiltonianCommuteTolerance = 1e-10;
constexpr double kNormalizationTolerance = 1e-11;
constexpr double kLimitTolerance = 1e-5;
constexpr double kCMatrixTolerance = 1e-11;
constexpr int kMaxSiteDim = 6;
constexpr int kMaxLength = 24;
constexpr int kCommuteMaxLength = 4;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

std::vector<int> parse_int_list(const std::vector<std::string>& raw, const char* what) {
  std::vector<int> out;
  for (const auto& r : raw)
    for (const auto& item : split(r, ',')) out.push_back(parse_int(item, what));
  return out;
}

std::pair<int, int> parse_nm(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("--nm expects N,M but got '" + s + "'");
  return {parse_int(parts[0], "N"), parse_int(parts[1], "M")};
}

cplx parse_cplx(const std::string& s, const char* what) {
  const auto parts = split(s, ',');
  if (parts.empty() || parts.size() > 2)
    throw ConfigError(std::string(what) + " expects RE or RE,IM but got '" + s + "'");
  return {parse_double(parts[0], what), parts.size() == 2 ? parse_double(parts[1], what) : 0.0};
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("complex values are [re, im] arrays");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<std::pair<int, int>> nm_or(const RunConfig& cfg, std::vector<std::pair<int, int>> dflt) {
  return cfg.nm.empty() ? dflt : cfg.nm;
}

std::vector<int> lengths_or(const RunConfig& cfg, std::vector<int> dflt) {
  return cfg.lengths.empty() ? dflt : cfg.lengths;
}

const std::vector<std::pair<int, int>> kBatteryDims{{1, 0}, {2, 0}, {0, 2}, {1, 1},
                                                    {2, 1}, {1, 2}, {2, 2}};

std::string verdict(bool pass) { return pass ? "pass" : "fail"; }

// One result line of ops / chain / spectrum / limits.
struct Row {
  ordered_json j;
  bool pass = true;
};

Row make_row(const std::string& check, const RMatrixSpec& spec, int length) {
  Row r;
  r.j["check"] = check;
  r.j["family"] = std::string(family_tag(spec.family));
  r.j["N"] = spec.dim.n_even();
  r.j["M"] = spec.dim.n_odd();
  r.j["L"] = length;
  return r;
}

void finish_row(Row& r, double residual, double tolerance, int samples = 1) {
  r.j["samples"] = samples;
  r.j["max_residual"] = residual;
  r.j["tolerance"] = tolerance;
  r.pass = std::isfinite(residual) && residual <= tolerance;
  r.j["verdict"] = verdict(r.pass);
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(17) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

std::string rows_csv(const std::vector<ordered_json>& rows) {
  std::vector<std::string> columns;
  for (const auto& r : rows)
    for (const auto& [key, value] : r.items())
      if (!value.is_structured() && !contains(columns, key)) columns.push_back(key);
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      if (r.contains(columns[c])) out << csv_cell(r[columns[c]]);
    }
    out << '\n';
  }
  return out.str();
}

std::string spec_slug(const RMatrixSpec& spec, int length) {
  return std::string(family_tag(spec.family)) + "_" + std::to_string(spec.dim.n_even()) + "_" +
         std::to_string(spec.dim.n_odd()) + "_L" + std::to_string(length);
}

// Files are collected while computing and written together at the end.
class Outputs {
 public:
  void add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }
  void write(const std::filesystem::path& dir, std::ostream& log) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const auto path = dir / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw std::runtime_error("cannot write " + path.string());
      log << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::filesystem::path output_dir(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

ordered_json report_header(const RunConfig& cfg) {
  ordered_json j;
  j["tool"] = "gradedrm";
  j["version"] = GRADEDRM_VERSION;
  j["versions"] = {
      {"gradedrm", GRADEDRM_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"compiler", __VERSION__}};
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  ordered_json c = to_json(cfg);
  c.erase("out");
  j["config"] = c;
  j["config_hash"] = config_hash(cfg);
  return j;
}

RMatrixSpec spec_for(Family f, std::pair<int, int> nm, const RunConfig& cfg,
                     cplx dflt = kDefaultChainHbar) {
  return make_spec(f, nm.first, nm.second, cfg.hbar.value_or(dflt));
}

void require_regular_chain(const RMatrixSpec& spec, int length) {
  if (degenerate_chain_hbar(spec.hbar, length))
    throw ConfigError("hbar * L is an integer, so phi(hbar, x_j - x_i) vanishes at the "
                      "equilibrium points; choose another --hbar");
}

void require_dense(const RMatrixSpec& spec, int length, const char* what) {
  if (ipow(spec.dim.size(), length) > ChainOperator::kDenseCap)
    throw ConfigError(std::string(what) + " needs a dense matrix but n^L = " +
                      std::to_string(ipow(spec.dim.size(), length)) + " exceeds the cap " +
                      std::to_string(ChainOperator::kDenseCap));
}

double relative_difference(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, ordered_json& doc, Outputs& files, std::ostream& log) {
  BatteryOptions opt;
  opt.seed = cfg.seed;
  opt.samples = cfg.samples.value_or(100);
  opt.tolerance = cfg.tolerance;
  opt.hbar = cfg.hbar;
  for (Family f : cfg.families())
    for (auto nm : nm_or(cfg, kBatteryDims)) opt.specs.push_back(spec_for(f, nm, cfg));
  const VerificationReport report = run_battery(opt);
  const auto body = report.to_json();
  for (const auto& [key, value] : body.items()) doc[key] = value;
  int failed = 0;
  for (const auto& c : report.checks)
    if (!c.pass) {
      ++failed;
      log << "FAIL " << c.check << ' ' << family_tag(c.family) << ' ' << c.n_even << '|'
          << c.n_odd << " max_residual=" << c.max_residual << " tolerance=" << c.tolerance
          << (c.error.empty() ? "" : " error=" + c.error) << '\n';
    }
  log << "verify: " << report.checks.size() - failed << "/" << report.checks.size()
      << " checks pass\n";
  if (cfg.format == "csv") {
    std::vector<ordered_json> rows;
    for (const auto& c : body["checks"]) rows.push_back(c);
    files.add("verify_report.csv", rows_csv(rows));
  }
  return report.all_pass() ? kExitPass : kExitFailure;
}

// ---- ops --------------------------------------------------------------------

std::vector<Row> ops_rows(const RunConfig& cfg) {
  std::vector<Row> rows;
  const std::vector<std::string> checks =
      cfg.checks.empty() ? std::vector<std::string>{"f-identity", "commute"} : cfg.checks;
  for (Family f : cfg.families())
    for (auto nm : nm_or(cfg, {{2, 0}, {1, 1}}))
      for (int length : lengths_or(cfg, {3})) {
        const RMatrixSpec spec = spec_for(f, nm, cfg, {0.3, 0.1});
        const std::string tag = "ops/" + describe(spec) + "/L" + std::to_string(length);
        if (length < 2) throw ConfigError("ops needs L >= 2");

        if (contains(checks, "f-identity")) {
          if (!f_identity_within_caps(spec.dim, length))
            throw ConfigError("f-identity is capped at L <= 5 for n <= 3 and L <= 4 for n = 4");
          std::vector<int> ks = cfg.orders;
          if (ks.empty())
            for (int k = 1; k < length; ++k) ks.push_back(k);
          for (int k : ks) {
            if (k < 1 || k >= length) throw ConfigError("--k must lie in 1..L-1");
            Sampler sampler(derive_seed(cfg.seed, tag + "/f/" + std::to_string(k)));
            const int configs = cfg.samples.value_or(3);
            double worst = 0.0, worst_spread = 0.0, worst_pole = 0.0, growth = 0.0;
            for (int s = 0; s < configs; ++s) {
              SiteConfig site = random_site_config(length, sampler, cfg.hbar);
              if (cfg.eta) site.eta = *cfg.eta;
              worst = std::max(worst, f_identity(k, site, spec).residual);
              std::vector<cplx> etas;
              for (int e = 0; e < 5; ++e) etas.push_back(sampler.spectral());
              worst_spread = std::max(worst_spread, f_identity_eta_spread(k, site, spec, etas));
              const PoleProbe probe = f_identity_near_pole(k, site, spec, 1, 2, 0);
              worst_pole = std::max(worst_pole, probe.max_residual);
              growth = std::max(growth, probe.term_growth);
            }
            const double tol = cfg.tolerance.value_or(kFIdentityTolerance);
            Row r = make_row("f-identity", spec, length);
            r.j["k"] = k;
            finish_row(r, worst, tol, configs);
            rows.push_back(r);
            Row e = make_row("f-identity-eta", spec, length);
            e.j["k"] = k;
            finish_row(e, worst_spread, tol, configs);
            rows.push_back(e);
            Row p = make_row("f-identity-pole", spec, length);
            p.j["k"] = k;
            finish_row(p, worst_pole, tol, configs);
            p.j["term_growth"] = growth;
            rows.push_back(p);
          }
        }

        if (contains(checks, "commute")) {
          if (length > kCommuteMaxLength) throw ConfigError("commute is capped at L <= 4");
          const int functions = cfg.samples.value_or(10);
          for (bool spin : {true, false})
            for (int k = 1; k <= length; ++k)
              for (int l = k + 1; l <= length; ++l) {
                Sampler sampler(derive_seed(cfg.seed, tag + "/c/" + std::to_string(spin) +
                                                          std::to_string(k) + std::to_string(l)));
                double worst = 0.0;
                for (int s = 0; s < functions; ++s) {
                  SiteConfig site = random_site_config(length, sampler, cfg.hbar);
                  if (cfg.eta) site.eta = *cfg.eta;
                  const auto fn = TestFunction::random(spec.dim, length, 3, sampler);
                  worst = std::max(worst, commutator_eval(k, l, site, fn, spec, spin));
                }
                Row r = make_row(spin ? "commute" : "commute-scalar", spec, length);
                r.j["k"] = k;
                r.j["l"] = l;
                finish_row(r, worst, cfg.tolerance.value_or(kCommuteTolerance), functions);
                rows.push_back(r);
              }
          if (spec.dim.size() == 1) {
            Sampler sampler(derive_seed(cfg.seed, tag + "/scalar"));
            double worst = 0.0;
            for (int s = 0; s < functions; ++s) {
              SiteConfig site = random_site_config(length, sampler, cfg.hbar);
              if (cfg.eta) site.eta = *cfg.eta;
              const auto field = as_field(TestFunction::random(spec.dim, length, 3, sampler));
              for (int k = 1; k <= length; ++k) {
                const Vector a = spin_d(k, site, field, spec);
                const Vector b = scalar_d(k, site, field, spec.dim);
                const double scale = std::max(a.norm(), b.norm());
                worst = std::max(worst, scale == 0.0 ? 0.0 : (a - b).norm() / scale);
              }
            }
            Row r = make_row("scalar-reduction", spec, length);
            finish_row(r, worst, cfg.tolerance.value_or(kScalarTolerance), functions);
            rows.push_back(r);
          }
        }
      }
  return rows;
}

// ---- chain / spectrum / limits ----------------------------------------------

Row limit_row(const RMatrixSpec& spec, int length, const std::string& target, const RunConfig& cfg) {
  require_dense(spec, length, "the limit");
  const LimitResult lim = nonrelativistic_limit_h1(spec, length);
  const Matrix t =
      target == "hs" ? haldane_shastry_target(spec.dim, length) : anisotropic_target(length);
  Row r = make_row("limit-" + target, spec, length);
  finish_row(r, (lim.limit - t).cwiseAbs().maxCoeff(), cfg.tolerance.value_or(kLimitTolerance));
  r.j["extrapolation_error"] = lim.extrapolation_error;
  return r;
}

std::string limit_target_for(const RMatrixSpec& spec, const std::string& requested) {
  if (requested == "hs" && spec.family == Family::UqGlNM) return "hs";
  if (requested == "xxz" && spec.family == Family::ZnGraded && spec.dim == GradedDim(1, 1))
    return "xxz";
  return "";
}

ordered_json spectrum_json(const SpectrumResult& s) {
  ordered_json j;
  j["levels"] = s.levels.size();
  j["eigenvalues"] = s.eigenvalues.size();
  j["max_abs_imag"] = s.max_abs_imag;
  j["cluster_tolerance"] = s.cluster_tolerance;
  return j;
}

std::string spectrum_csv(const SpectrumResult& s) {
  std::ostringstream out;
  write_spectrum_csv(out, s);
  return out.str();
}

std::string dump_bytes(const RMatrixSpec& spec, int length, const Matrix& m) {
  std::ostringstream out(std::ios::binary);
  write_matrix_dump(out, MatrixDump{spec, length, m});
  return out.str();
}

std::vector<Row> chain_rows(const RunConfig& cfg, Outputs& files, std::ostream& log) {
  std::vector<Row> rows;
  for (Family f : cfg.families())
    for (auto nm : nm_or(cfg, {{1, 1}}))
      for (int length : lengths_or(cfg, {4})) {
        if (length < 2) throw ConfigError("chain needs L >= 2");
        const RMatrixSpec spec = spec_for(f, nm, cfg);
        require_regular_chain(spec, length);
        const std::string slug = spec_slug(spec, length);
        const bool dense_ok = ipow(spec.dim.size(), length) <= ChainOperator::kDenseCap;
        if (cfg.spectrum) require_dense(spec, length, "--spectrum");
        if (cfg.dump_binary) require_dense(spec, length, "--dump-binary");

        double phi = 0.0;
        for (int k = 1; k < length; ++k)
          phi = std::max(phi, phi_sum_max_residual(length, k, spec.hbar));
        Row p = make_row("phi-sum", spec, length);
        finish_row(p, phi, cfg.tolerance.value_or(kPhiSumTolerance));
        rows.push_back(p);

        if (!dense_ok) {
          const ChainOperator h1 = hamiltonian_h1(spec, length, Representation::Factors);
          Sampler sampler(derive_seed(cfg.seed, "chain/" + slug));
          Vector v(h1.dimension());
          for (auto& a : v) a = {sampler.uniform() - 0.5, sampler.uniform() - 0.5};
          const auto t0 = std::chrono::steady_clock::now();
          const Vector w = h1.apply(v);
          const double dt =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          Row a = make_row("h1-apply", spec, length);
          a.j["dimension"] = h1.dimension();
          a.j["output_norm"] = w.norm() / v.norm();
          if (cfg.timing) a.j["apply_seconds"] = dt;
          a.j["verdict"] = verdict(std::isfinite(w.norm()));
          a.pass = std::isfinite(w.norm());
          rows.push_back(a);
          continue;
        }

        const Matrix h1 = hamiltonian_h1(spec, length, Representation::Dense).matrix();
        const Matrix h2 = hamiltonian_h2(spec, length, Representation::Dense).matrix();
        Row c = make_row("h1-h2-commutator", spec, length);
        finish_row(c, commutator_norm(ChainOperator::from_dense(spec.dim, length, h1),
                                      ChainOperator::from_dense(spec.dim, length, h2)),
                   cfg.tolerance.value_or(kHamiltonianCommuteTolerance));
        rows.push_back(c);

        const Matrix ht1 = htilde_k(spec, length, 1, Representation::Dense).matrix();
        Row n = make_row("htilde1-normalization", spec, length);
        finish_row(n, relative_difference(ht1, h1_constant(spec, length) * h1),
                   cfg.tolerance.value_or(kNormalizationTolerance));
        rows.push_back(n);

        if (spec.dim.size() == 2 && f == Family::ZnGraded) {
          Row g = make_row("gauge-relation", spec, length);
          finish_row(g, gauge_relation_residual(spec.dim, length, spec.hbar),
                     cfg.tolerance.value_or(kNormalizationTolerance));
          rows.push_back(g);
        }

        if (cfg.spectrum) {
          const auto s1 = spectrum(h1);
          const auto s2 = spectrum(h2);
          files.add(slug + "_h1_spectrum.csv", spectrum_csv(s1));
          files.add(slug + "_h2_spectrum.csv", spectrum_csv(s2));
          Row s = make_row("spectrum", spec, length);
          s.j["h1"] = spectrum_json(s1);
          s.j["h2"] = spectrum_json(s2);
          rows.push_back(s);
        }
        if (cfg.dump_binary) {
          files.add(slug + "_h1.bin", dump_bytes(spec, length, h1));
          files.add(slug + "_h2.bin", dump_bytes(spec, length, h2));
        }
        if (cfg.limit) {
          const std::string target = limit_target_for(spec, *cfg.limit);
          if (!target.empty())
            rows.push_back(limit_row(spec, length, target, cfg));
          else
            log << "no " << *cfg.limit << " limit target for " << describe(spec) << '\n';
        }
      }
  return rows;
}

std::vector<Row> spectrum_rows(const RunConfig& cfg, Outputs& files) {
  std::vector<Row> rows;
  const std::vector<int> orders = cfg.orders.empty() ? std::vector<int>{1} : cfg.orders;
  for (Family f : cfg.families())
    for (auto nm : nm_or(cfg, {{1, 1}}))
      for (int length : lengths_or(cfg, {4})) {
        if (length < 2) throw ConfigError("spectrum needs L >= 2");
        const RMatrixSpec spec = spec_for(f, nm, cfg);
        require_regular_chain(spec, length);
        require_dense(spec, length, "spectrum");
        for (int k : orders) {
          if (k < 1 || k >= length) throw ConfigError("--k must lie in 1..L-1");
          const ChainOperator h = k == 1   ? hamiltonian_h1(spec, length, Representation::Dense)
                                  : k == 2 ? hamiltonian_h2(spec, length, Representation::Dense)
                                           : htilde_k(spec, length, k, Representation::Dense);
          const auto s = spectrum(h);
          const std::string name = spec_slug(spec, length) + "_h" + std::to_string(k);
          files.add(name + "_spectrum.csv", spectrum_csv(s));
          if (cfg.dump_binary) files.add(name + ".bin", dump_bytes(spec, length, h.matrix()));
          Row r = make_row("spectrum", spec, length);
          r.j["k"] = k;
          const ordered_json summary = spectrum_json(s);
          for (const auto& [key, value] : summary.items()) r.j[key] = value;
          rows.push_back(r);
        }
      }
  return rows;
}

std::vector<Row> limits_rows(const RunConfig& cfg) {
  std::vector<Row> rows;
  std::vector<RMatrixSpec> specs;
  if (cfg.nm.empty() && cfg.family == "all") {
    specs = {make_spec(Family::UqGlNM, 1, 1, kDefaultChainHbar),
             make_spec(Family::UqGlNM, 2, 0, kDefaultChainHbar),
             make_spec(Family::ZnGraded, 1, 1, kDefaultChainHbar)};
  } else {
    for (Family f : cfg.families())
      for (auto nm : nm_or(cfg, {{1, 1}, {2, 0}})) specs.push_back(spec_for(f, nm, cfg));
  }
  for (const auto& spec : specs)
    for (int length : lengths_or(cfg, {4})) {
      const std::string target =
          limit_target_for(spec, spec.family == Family::UqGlNM ? "hs" : "xxz");
      if (!target.empty()) rows.push_back(limit_row(spec, length, target, cfg));
      if (spec.family != Family::UqGlNM || spec.dim.size() != 2) continue;
      require_dense(spec, length, "the C-matrix check");
      const Matrix h1 = hamiltonian_h1(spec, length, Representation::Dense).matrix();
      const Matrix hc = h1_from_c_matrix(spec, length, Representation::Dense).matrix();
      Row c = make_row("c-matrix-h1", spec, length);
      finish_row(c, (h1 - hc).cwiseAbs().maxCoeff(), cfg.tolerance.value_or(kCMatrixTolerance));
      rows.push_back(c);
    }
  for (const auto& spec : specs) {
    if (spec.family != Family::UqGlNM || spec.dim.size() != 2) continue;
    const LocalOperator c0 = c_matrix_at_zero(spec);
    const LocalOperator target =
        LocalOperator::identity(spec.dim, 2) - graded_permutation(spec.dim);
    Row r = make_row("c-matrix-limit", spec, 2);
    finish_row(r, (c0.coeffs() - target.coeffs()).cwiseAbs().maxCoeff(),
               cfg.tolerance.value_or(kLimitTolerance));
    rows.push_back(r);
  }
  return rows;
}

int emit_rows(const std::vector<Row>& rows, const RunConfig& cfg, ordered_json& doc,
              Outputs& files, std::ostream& log) {
  std::vector<ordered_json> results;
  int failed = 0;
  for (const auto& r : rows) {
    results.push_back(r.j);
    if (!r.pass) {
      ++failed;
      log << "FAIL " << r.j.dump() << '\n';
    }
  }
  doc["results"] = results;
  if (cfg.format == "csv") files.add(cfg.command + "_report.csv", rows_csv(results));
  log << cfg.command << ": " << rows.size() - failed << "/" << rows.size() << " results pass\n";
  return failed ? kExitFailure : kExitPass;
}

}  // namespace

std::vector<Family> RunConfig::families() const {
  if (family == "uq") return {Family::UqGlNM};
  if (family == "zn") return {Family::ZnGraded};
  return {Family::UqGlNM, Family::ZnGraded};
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["family"] = cfg.family;
  json nm = json::array();
  for (auto [n, m] : cfg.nm) nm.push_back({n, m});
  j["nm"] = nm;
  j["L"] = cfg.lengths;
  j["hbar"] = cfg.hbar ? cplx_json(*cfg.hbar) : json(nullptr);
  j["eta"] = cfg.eta ? cplx_json(*cfg.eta) : json(nullptr);
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples ? json(*cfg.samples) : json(nullptr);
  j["tolerance"] = cfg.tolerance ? json(*cfg.tolerance) : json(nullptr);
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  j["check"] = cfg.checks;
  j["k"] = cfg.orders;
  j["spectrum"] = cfg.spectrum;
  j["limit"] = cfg.limit ? json(*cfg.limit) : json(nullptr);
  j["dump_binary"] = cfg.dump_binary;
  j["timing"] = cfg.timing;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.command = j.at("command").get<std::string>();
    cfg.family = j.at("family").get<std::string>();
    for (const auto& p : j.at("nm")) cfg.nm.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    cfg.lengths = j.at("L").get<std::vector<int>>();
    if (!j.at("hbar").is_null()) cfg.hbar = cplx_from_json(j["hbar"]);
    if (!j.at("eta").is_null()) cfg.eta = cplx_from_json(j["eta"]);
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("samples").is_null()) cfg.samples = j["samples"].get<int>();
    if (!j.at("tolerance").is_null()) cfg.tolerance = j["tolerance"].get<double>();
    cfg.out = j.at("out").get<std::string>();
    cfg.format = j.at("format").get<std::string>();
    cfg.checks = j.at("check").get<std::vector<std::string>>();
    cfg.orders = j.at("k").get<std::vector<int>>();
    cfg.spectrum = j.at("spectrum").get<bool>();
    if (!j.at("limit").is_null()) cfg.limit = j["limit"].get<std::string>();
    cfg.dump_binary = j.at("dump_binary").get<bool>();
    cfg.timing = j.at("timing").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (!contains(kCommands, cfg.command)) throw ConfigError("unknown command '" + cfg.command + "'");
  if (cfg.family != "uq" && cfg.family != "zn" && cfg.family != "all")
    throw ConfigError("--family must be uq, zn or all");
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("--format must be json or csv");
  for (auto [n, m] : cfg.nm) {
    if (n < 0 || m < 0) throw ConfigError("N and M must be nonnegative");
    if (n + m < 1) throw ConfigError("graded dimension N+M must be at least 1");
    if (n + m > kMaxSiteDim) throw ConfigError("N+M above " + std::to_string(kMaxSiteDim));
  }
  for (int l : cfg.lengths)
    if (l < 1 || l > kMaxLength) throw ConfigError("--L must lie in 1.." + std::to_string(kMaxLength));
  if (cfg.samples && *cfg.samples < 1) throw ConfigError("--samples must be positive");
  if (cfg.tolerance && !(*cfg.tolerance > 0.0)) throw ConfigError("--tol must be positive");
  for (const auto& c : cfg.checks)
    if (c != "f-identity" && c != "commute") throw ConfigError("--check must be f-identity or commute");
  for (int k : cfg.orders)
    if (k < 1) throw ConfigError("--k values must be positive");
  if (cfg.limit) {
    if (*cfg.limit != "hs" && *cfg.limit != "xxz") throw ConfigError("--limit must be hs or xxz");
    if (*cfg.limit == "hs" && cfg.family == "zn")
      throw ConfigError("the hs limit is defined for the uq family");
    if (*cfg.limit == "xxz") {
      if (cfg.family == "uq") throw ConfigError("the xxz limit is defined for the zn family");
      for (auto nm : cfg.nm)
        if (nm != std::pair<int, int>{1, 1})
          throw ConfigError("the xxz limit is defined for N,M = 1,1");
    }
  }
  const cplx hbar = cfg.hbar.value_or(kDefaultChainHbar);
  for (Family f : cfg.families())
    for (auto [n, m] : cfg.nm) {
      try {
        make_spec(f, n, m, hbar);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  if (cfg.hbar && lattice_distance(*cfg.hbar) < kPoleGuard)
    throw ConfigError("--hbar must stay off the integers");
}

std::string config_hash(const RunConfig& cfg) {
  ordered_json j = to_json(cfg);
  j.erase("out");
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Graded trigonometric R-matrices, difference operators and spin chains"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> nm_raw, l_raw, k_raw, check_raw;
  std::string hbar_raw, eta_raw, limit_raw;
  std::optional<int> samples;
  std::optional<double> tol;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "uq, zn or all")
        ->check(CLI::IsMember({"uq", "zn", "all"}));
    sub->add_option("--nm", nm_raw, "graded dimension N,M (repeatable)");
    sub->add_option("--L", l_raw, "chain lengths, comma separated");
    sub->add_option("--hbar", hbar_raw, "deformation parameter RE or RE,IM");
    sub->add_option("--seed", cfg.seed, "run seed");
    sub->add_option("--samples", samples, "samples per check");
    sub->add_option("--tol", tol, "override every tolerance");
    sub->add_option("--out", cfg.out, std::string("output directory (default $") + kOutputDirEnv +
                                          " or .)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", cfg.timing, "record wall time in the report");
  };

  auto* verify = app.add_subcommand("verify", "identity battery for the R-matrix families");
  add_common(verify);
  auto* ops = app.add_subcommand("ops", "F-identities and difference-operator commutators");
  add_common(ops);
  ops->add_option("--eta", eta_raw, "shift RE or RE,IM");
  ops->add_option("--check", check_raw, "f-identity or commute (repeatable)");
  ops->add_option("--k", k_raw, "orders k, comma separated");
  auto* chain = app.add_subcommand("chain", "spin-chain Hamiltonians and their checks");
  add_common(chain);
  chain->add_flag("--spectrum", cfg.spectrum, "write H1 and H2 spectra");
  chain->add_option("--limit", limit_raw, "hs or xxz")->check(CLI::IsMember({"hs", "xxz"}));
  chain->add_flag("--dump-binary", cfg.dump_binary, "write H1 and H2 as binary matrices");
  auto* spec = app.add_subcommand("spectrum", "spectra of H1, H2 or higher Hamiltonians");
  add_common(spec);
  spec->add_option("--k", k_raw, "Hamiltonian orders, comma separated");
  spec->add_flag("--dump-binary", cfg.dump_binary, "write the matrices in binary form");
  auto* limits = app.add_subcommand("limits", "hbar -> 0 limits and C-matrix factorization");
  add_common(limits);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, out);
      return std::nullopt;
    }
    throw ConfigError(e.what());
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  for (const auto& s : nm_raw) cfg.nm.push_back(parse_nm(s));
  cfg.lengths = parse_int_list(l_raw, "--L");
  cfg.orders = parse_int_list(k_raw, "--k");
  for (const auto& c : check_raw)
    for (const auto& item : split(c, ',')) cfg.checks.push_back(item);
  if (!hbar_raw.empty()) cfg.hbar = parse_cplx(hbar_raw, "--hbar");
  if (!eta_raw.empty()) cfg.eta = parse_cplx(eta_raw, "--eta");
  if (!limit_raw.empty()) cfg.limit = limit_raw;
  cfg.samples = samples;
  cfg.tolerance = tol;
  validate(cfg);
  return cfg;
}

int execute(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  ordered_json doc = report_header(cfg);
  Outputs files;
  int code = kExitPass;
  if (cfg.command == "verify") {
    code = cmd_verify(cfg, doc, files, log);
  } else {
    std::vector<Row> rows;
    if (cfg.command == "ops") rows = ops_rows(cfg);
    if (cfg.command == "chain") rows = chain_rows(cfg, files, log);
    if (cfg.command == "spectrum") rows = spectrum_rows(cfg, files);
    if (cfg.command == "limits") rows = limits_rows(cfg);
    code = emit_rows(rows, cfg, doc, files, log);
  }
  doc["pass"] = code == kExitPass;
  if (cfg.timing)
    doc["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cfg.format == "json" || cfg.command == "chain" || cfg.command == "spectrum" ||
      cfg.command == "limits")
    files.add(cfg.command + "_report.json", doc.dump(2) + "\n");
  files.write(output_dir(cfg), log);
  return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_command_line(argc, argv, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!cfg) return kExitPass;
  try {
    return execute(*cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gradedrm
