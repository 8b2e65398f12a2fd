// Scenario runners: one function per scenario kind. Each reads and validates
// its parameters first, then computes checks, tables, curves and patterns.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlitho/absorption.hpp"
#include "qlitho/amplitude.hpp"
#include "qlitho/dangelo.hpp"
#include "qlitho/errors.hpp"
#include "qlitho/gaussian.hpp"
#include "qlitho/parallel.hpp"
#include "qlitho/propagate.hpp"
#include "qlitho/random.hpp"
#include "scenario_internal.hpp"

namespace qlitho::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double as_double(std::size_t n) { return static_cast<double>(n); }

std::string tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string tag(std::size_t v) { return std::to_string(v); }

struct Span {
  double lo;
  double hi;
  std::size_t points;
};

Span read_span(ParamReader& r, const std::string& key, const std::string& lo_key,
               const std::string& hi_key, Span def, Dim dim, std::size_t min_points = 3) {
  auto c = r.child(key);
  Span s{c.number(lo_key, def.lo, {}, dim), c.number(hi_key, def.hi, {}, dim),
         c.count("points", def.points, min_points, 10000000)};
  c.require(s.hi > s.lo, "parameters." + key + "." + hi_key + " must exceed " + lo_key);
  r.adopt(key, std::move(c));
  return s;
}

double spacing(const Span& s) { return (s.hi - s.lo) / as_double(s.points - 1); }

// Mode construction with the same preconditions make_noon/make_classical
// enforce, reported as violations.
std::optional<ModeSpectrum> checked_mode(ParamReader& r, const std::string& shape, double kappa0,
                                         double delta_kappa, Regime regime,
                                         const OpticalContext& ctx) {
  if (!(kappa0 > 0.0) || !(delta_kappa > 0.0)) return std::nullopt;
  try {
    auto mode = shape == "rect" ? ModeSpectrum::rect(kappa0, delta_kappa)
                                : ModeSpectrum::gaussian(kappa0, delta_kappa);
    const double overlap = mode.overlap();
    if (overlap > kOverlapErrorThreshold) {
      r.require(false, "beam modes overlap (overlap " + tag(overlap) +
                           " > 1e-4): increase kappa0 / delta_kappa");
      return std::nullopt;
    }
    const double reach = kappa0 + mode.support_halfwidth_q() * delta_kappa;
    if (regime == Regime::nonparaxial && reach >= ctx.kappa_max()) {
      r.require(false, "mode support reaches kappa0 + h*delta_kappa = " + tag(reach) +
                           ", outside the light cone omega/c = " + tag(ctx.kappa_max()));
      return std::nullopt;
    }
    return mode;
  } catch (const Error& e) {
    r.require(false, e.what());
    return std::nullopt;
  }
}

void collect_warnings(ReportBundle& b, const std::string& who, const std::vector<std::string>& w) {
  for (const auto& s : w) b.warnings.push_back(who + ": " + s);
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Second moment width sqrt(int x^2 I / int I) of a pattern centred at zero,
// integrated over +-half_range.
double second_moment_width(const std::function<double(double)>& pattern, double half_range) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 0.0;
  const Interval iv{-half_range, half_range};
  const auto m0 = integrate_1d(RealIntegrand(pattern), iv, spec);
  const auto m2 = integrate_1d(RealIntegrand([&](double x) { return x * x * pattern(x); }), iv,
                               spec);
  return std::sqrt(m2.value / m0.value);
}

double integral_of(const std::function<double(double)>& f, double half_range) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 0.0;
  return integrate_1d(RealIntegrand(f), Interval{-half_range, half_range}, spec).value;
}

void add_normalization_check(ReportBundle& b, const RunEnv& env, const std::string& name,
                             const NormalizationCheck& nc, double tol_tensor, double sigmas) {
  if (nc.method == NormalizationMethod::monte_carlo)
    add_check(b, env, name, nc.value, 1.0, sigmas * nc.error, CheckMode::abs,
              "monte carlo, " + tag(sigmas) + " standard errors");
  else
    add_check(b, env, name, nc.value, 1.0, tol_tensor, CheckMode::abs, to_string(nc.method));
}

}  // namespace

// ---------------------------------------------------------------------------

void run_noon_compare(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const auto ns = r.counts("n_photons", {1, 2, 3, 4, 5}, 1, 12);
  const double k0 = r.number("kappa0", 1.0, positive(), Dim::momentum);
  const double dk = r.number("delta_kappa", 0.05, positive(), Dim::momentum);
  const auto shape = r.choice("envelope", "gaussian", {"gaussian", "rect"});
  const auto regime = regime_from_string(r.choice("regime", "paraxial", {"paraxial", "nonparaxial"}));
  const Span grid = read_span(r, "grid", "x_min", "x_max", {-4.0 * kPi, 4.0 * kPi, 512}, Dim::length);
  const auto quad_max = r.count("quadrature_max_n", 3, 0, 3);
  const double floor = r.number("envelope_fringe_floor", 1e-6, open_range(0.0, 1.0));
  auto t = r.child("tolerances");
  const double t_peak = t.number("peak_ratio", 1e-6, positive());
  const double t_quad = t.number("peak_ratio_quadrature", 1e-3, positive());
  const double t_period = t.number("period", 0.01, positive());
  const double t_env = t.number("envelope", 1e-6, positive());
  const double t_bound = t.number("bound", 1e-9, non_negative());
  r.adopt("tolerances", std::move(t));

  r.require(k0 < ctx.kappa_max(), "parameters.kappa0 must lie inside the light cone (< omega/c = " +
                                      tag(ctx.kappa_max()) + ")");
  const auto mode = checked_mode(r, shape, k0, dk, regime, ctx);
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  if (grid.hi > grid.lo && k0 > 0.0) {
    const double per_fringe = kPi / (as_double(n_max) * k0) / spacing(grid);
    r.require(per_fringe >= kMinPointsPerFringe,
              "parameters.grid gives " + tag(per_fringe) + " points per fringe period for N = " +
                  tag(n_max) + "; at least 8 are required");
  }
  finish_validation(r);
  if (env.validate_only) return;

  const QuadratureSpec quad;
  const auto xs = uniform_grid(grid.lo, grid.hi, grid.points);
  Table table{"noon_compare",
              {"n_photons", "noon_peak", "classical_peak", "peak_ratio", "expected_ratio",
               "noon_period", "classical_period", "envelope_max_rel_dev"},
              {}};
  for (std::size_t n : ns) {
    const std::string sfx = "_N" + tag(n);
    const auto noon = make_noon(*mode, n);
    const auto cl = make_classical(*mode, n);
    collect_warnings(b, "noon" + sfx, noon.warnings());
    collect_warnings(b, "classical" + sfx, cl.warnings());

    auto sn = absorption_pattern(noon, xs, regime, ctx, quad, env.workers);
    auto sc = absorption_pattern(cl, xs, regime, ctx, quad, env.workers);

    const double expected = std::pow(2.0, as_double(n) - 1.0);
    const double pn = absorption_rate_at(noon, 0.0, regime, ctx, quad);
    const double pc = absorption_rate_at(cl, 0.0, regime, ctx, quad);
    add_check(b, env, "peak_ratio" + sfx, pc / pn, expected, t_peak, CheckMode::rel,
              "classical / NOON at x = 0, envelope path");
    if (n <= quad_max) {
      const std::vector<double> zeros(n, 0.0);
      const auto tn = spatial_amplitude(noon, zeros, regime, ctx, SpatialMethod::tensor, quad);
      const auto tc = spatial_amplitude(cl, zeros, regime, ctx, SpatialMethod::tensor, quad);
      add_check(b, env, "peak_ratio_quadrature" + sfx, std::norm(tc) / std::norm(tn), expected,
                t_quad, CheckMode::rel, "full tensor quadrature");
    }

    const auto fn = fringe_metrics(sn);
    const auto fc = fringe_metrics(sc);
    const double noon_period = fn.period.value_or(kNaN);
    const double cl_period = fc.period.value_or(kNaN);
    add_check(b, env, "noon_period" + sfx, noon_period, kPi / (as_double(n) * k0), t_period,
              CheckMode::rel, fn.period ? "" : "fewer than three maxima in the scan");
    add_check(b, env, "classical_period" + sfx, cl_period, kPi / k0, t_period, CheckMode::rel,
              fc.period ? "" : "fewer than three maxima in the scan");

    // NOON = 2 E cos^2(N k0 x), classical = 2^N E cos^(2N)(k0 x) with the same
    // envelope E = N! eta^N |F|^(2N) (symmetric real F, paraxial regime).
    double env_dev = kNaN;
    if (regime == Regime::paraxial) {
      env_dev = 0.0;
      double env_peak = 0.0;
      std::vector<double> en(xs.size(), kNaN), ec(xs.size(), kNaN);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c1 = std::cos(k0 * xs[i]);
        const double fnoon = std::pow(std::cos(as_double(n) * k0 * xs[i]), 2);
        const double fcl = std::pow(c1 * c1, as_double(n));
        if (fnoon < floor || fcl < floor) continue;
        en[i] = sn.values[i] / (2.0 * fnoon);
        ec[i] = sc.values[i] / (std::pow(2.0, as_double(n)) * fcl);
        env_peak = std::max({env_peak, en[i], ec[i]});
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::isnan(en[i])) continue;
        const double scale = std::max(en[i], ec[i]);
        if (scale < 1e-12 * env_peak) continue;
        env_dev = std::max(env_dev, std::abs(en[i] - ec[i]) / scale);
      }
      add_check(b, env, "envelope_equality" + sfx, env_dev, 0.0, t_env, CheckMode::max,
                "max relative deviation where both fringe factors >= " + tag(floor));
    }

    const double bound = schwarz_bound_density(ctx, n);
    add_check(b, env, "schwarz_bound_noon" + sfx, max_of(sn.values) / bound, 1.0, t_bound,
              CheckMode::max);
    add_check(b, env, "schwarz_bound_classical" + sfx, max_of(sc.values) / bound, 1.0, t_bound,
              CheckMode::max);

    table.rows.push_back({as_double(n), pn, pc, pc / pn, expected, noon_period, cl_period, env_dev});
    b.results["N" + tag(n)] = {{"noon_peak", pn},
                               {"classical_peak", pc},
                               {"peak_ratio", pc / pn},
                               {"noon_visibility", fn.visibility.value_or(kNaN)},
                               {"classical_visibility", fc.visibility.value_or(kNaN)}};
    b.patterns.push_back({"noon_N" + tag(n), std::move(sn)});
    b.patterns.push_back({"classical_N" + tag(n), std::move(sc)});
  }
  b.tables.push_back(std::move(table));
}

// ---------------------------------------------------------------------------

void run_gaussian_tradeoff(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const auto ns = r.counts("n_values", {2, 3, 5, 10}, 2, 100000);
  const auto r_points = r.count("r_points", 200, 3, 1000000);
  const double k2 = r.number("kappa2", 1.0, positive(), Dim::momentum2);
  const auto identity_points = r.count("identity_points", 9, 1, 10000);
  const auto limit_n = r.count("limit_n", 100, 2, 10000000);
  const double limit_r = r.number("limit_r", 1e-6, open_range(0.0, 1.0));
  const double limit_expected = r.number("limit_expected", 1.6445, positive());
  const double edge_offset = r.number("edge_offset", 1e-9, open_range(0.0, 0.5));
  const auto conv_n = r.counts("convergence_n", {10, 100, 1000}, 2, 100000000, 2);
  const auto conv_r = r.numbers("convergence_r", {0.5, 1.5, 2.0, 2.5}, positive());
  const auto pipe_n = r.count("pipeline_n", 2, 2, 8);
  const double pipe_r = r.number("pipeline_r", 0.8, positive());
  auto t = r.child("tolerances");
  const double t_ref = t.number("reference_point", 1e-12, positive());
  const double t_edge = t.number("edge", 1e-3, positive());
  const double t_ident = t.number("identity", 1e-8, positive());
  const double t_limit = t.number("limit", 5e-4, positive());
  const double t_sqrt_e = t.number("limit_vs_sqrt_e", 0.003, positive());
  const double t_pipe = t.number("pipeline", 1e-6, positive());
  r.adopt("tolerances", std::move(t));

  const std::size_t conv_min = *std::min_element(conv_n.begin(), conv_n.end());
  for (double rv : conv_r) {
    r.require(rv < std::sqrt(as_double(conv_min)),
              "parameters.convergence_r value " + tag(rv) + " must be below sqrt(" +
                  tag(conv_min) + ")");
    r.require(std::abs(rv - 1.0) > 1e-6,
              "parameters.convergence_r must avoid r = 1, where every curve equals the limit");
  }
  r.require(std::is_sorted(conv_n.begin(), conv_n.end()) &&
                std::adjacent_find(conv_n.begin(), conv_n.end()) == conv_n.end(),
            "parameters.convergence_n must be strictly increasing");
  r.require(pipe_r < std::sqrt(as_double(pipe_n)),
            "parameters.pipeline_r must be below sqrt(pipeline_n)");
  finish_validation(r);
  if (env.validate_only) return;

  std::size_t n_top = 0;
  for (std::size_t n : ns) {
    n_top = std::max(n_top, n);
    const std::string sfx = "_N" + tag(n);
    const double sq = std::sqrt(as_double(n));
    std::vector<double> rs(r_points);
    for (std::size_t i = 0; i < r_points; ++i) rs[i] = sq * as_double(i + 1) / as_double(r_points + 1);
    const auto pts = tradeoff_curves(n, rs);

    Table tab{"tradeoff" + sfx, {"r", "R", "R_tot"}, {}};
    Curve fig4{"fig4_R" + sfx, "r", "R", {}, {}};
    Curve fig5{"fig5_Rtot" + sfx, "r", "R_tot", {}, {}};
    double rise = -std::numeric_limits<double>::infinity();
    std::size_t arg_max = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      tab.rows.push_back({pts[i].r, pts[i].peak_ratio, pts[i].total_ratio});
      fig4.x.push_back(pts[i].r);
      fig4.y.push_back(pts[i].peak_ratio);
      fig5.x.push_back(pts[i].r);
      fig5.y.push_back(pts[i].total_ratio);
      if (i > 0) rise = std::max(rise, pts[i].total_ratio - pts[i - 1].total_ratio);
      if (pts[i].peak_ratio > pts[arg_max].peak_ratio) arg_max = i;
    }
    b.tables.push_back(std::move(tab));
    b.curves.push_back(std::move(fig4));
    b.curves.push_back(std::move(fig5));

    const std::vector<double> one{1.0};
    add_check(b, env, "R_at_r1" + sfx, tradeoff_curves(n, one)[0].peak_ratio, 1.0, t_ref,
              CheckMode::abs);
    const std::vector<double> edge{sq * (1.0 - edge_offset)};
    add_check(b, env, "R_near_sqrtN" + sfx, tradeoff_curves(n, edge)[0].peak_ratio, 0.0, t_edge,
              CheckMode::max, "r = sqrt(N)(1 - " + tag(edge_offset) + ")");
    add_check(b, env, "Rtot_decreasing" + sfx, rise, 0.0, 0.0, CheckMode::max,
              "largest increase of R_tot between neighbouring r");
    add_check(b, env, "R_max_at_r1" + sfx, pts[arg_max].r, 1.0, sq / as_double(r_points + 1),
              CheckMode::abs, "tolerance is the r-grid spacing");

    // R and R_tot measured from the patterns themselves: peak ratio at x = 0
    // and ratio of integrated rates against the uncorrelated reference.
    double ident_dev = 0.0;
    double formula_dev = 0.0;
    for (std::size_t j = 0; j < identity_points; ++j) {
      const double rv = sq * (as_double(j) + 0.5) / as_double(identity_points);
      const auto p = GaussianParams::from_budget(n, k2, rv);
      const auto c = classical_reference(p);
      const double peak = analytic_pattern(p, 0.0, ctx) / analytic_pattern(c, 0.0, ctx);
      const double wp = 12.0 / (2.0 * as_double(n) * p.b_param);
      const double wc = 12.0 / (2.0 * as_double(n) * c.b_param);
      const double total = integral_of([&](double x) { return analytic_pattern(p, x, ctx); }, wp) /
                           integral_of([&](double x) { return analytic_pattern(c, x, ctx); }, wc);
      const std::vector<double> rr{rv};
      const double formula = tradeoff_curves(n, rr)[0].peak_ratio;
      ident_dev = std::max(ident_dev, std::abs(peak - rv * total) / peak);
      formula_dev = std::max(formula_dev, std::abs(peak - formula) / formula);
    }
    add_check(b, env, "R_equals_r_Rtot" + sfx, ident_dev, 0.0, t_ident, CheckMode::max,
              "from pattern peaks and integrated rates");
    add_check(b, env, "R_formula_vs_pattern" + sfx, formula_dev, 0.0, t_ident, CheckMode::max);
    b.results["limit_Rtot_N" + tag(n)] = tradeoff_total_limit(n);
  }

  Curve limit{"fig4_R_limit", "r", "R", {}, {}};
  const double r_top = std::sqrt(as_double(n_top));
  for (std::size_t i = 0; i <= r_points; ++i) {
    const double rv = r_top * as_double(i) / as_double(r_points);
    limit.x.push_back(rv);
    limit.y.push_back(rv * std::exp(0.5 * (1.0 - rv * rv)));
  }
  b.curves.push_back(std::move(limit));

  const std::vector<double> small{limit_r};
  const double rtot = tradeoff_curves(limit_n, small)[0].total_ratio;
  const double sqrt_e = std::exp(0.5);
  add_check(b, env, "Rtot_small_r_N" + tag(limit_n), rtot, limit_expected, t_limit, CheckMode::abs,
            "r = " + tag(limit_r));
  add_check(b, env, "Rtot_small_r_vs_sqrt_e_N" + tag(limit_n), std::abs(rtot - sqrt_e) / sqrt_e,
            0.0, t_sqrt_e, CheckMode::max);
  b.results["Rtot_small_r"] = rtot;

  Table conv{"tradeoff_convergence", {"r"}, {}};
  for (std::size_t n : conv_n) conv.columns.push_back("abs_dev_N" + tag(n));
  for (double rv : conv_r) {
    const double lim = rv * std::exp(0.5 * (1.0 - rv * rv));
    std::vector<double> row{rv};
    double worst = 0.0;
    double prev = kNaN;
    for (std::size_t n : conv_n) {
      const std::vector<double> rr{rv};
      const double dev = std::abs(tradeoff_curves(n, rr)[0].peak_ratio - lim);
      row.push_back(dev);
      if (!std::isnan(prev)) worst = std::max(worst, dev / prev);
      prev = dev;
    }
    conv.rows.push_back(std::move(row));
    add_check(b, env, "convergence_to_limit_r" + tag(rv), worst, 1.0, 0.0, CheckMode::max,
              "largest ratio of successive |R_N - r exp((1 - r^2)/2)|");
  }
  b.tables.push_back(std::move(conv));

  const auto p = GaussianParams::from_budget(pipe_n, k2, pipe_r);
  const auto c = classical_reference(p);
  const double ratio =
      absorption_rate_at(make_jointly_gaussian(p), 0.0, Regime::paraxial, ctx) /
      absorption_rate_at(make_jointly_gaussian(c), 0.0, Regime::paraxial, ctx);
  const std::vector<double> rr{pipe_r};
  add_check(b, env, "R_pipeline_N" + tag(pipe_n), ratio, tradeoff_curves(pipe_n, rr)[0].peak_ratio,
            t_pipe, CheckMode::rel, "states -> propagate -> absorption at x = 0");
}

// ---------------------------------------------------------------------------

namespace {

struct GaussianOracle {
  double max_rel = 0.0;
  std::vector<double> xs;
};

GaussianOracle gaussian_oracle(const GaussianParams& p, std::size_t points, double span,
                               const OpticalContext& ctx, std::size_t workers) {
  const double sigma = 1.0 / (2.0 * as_double(p.n_photons) * p.b_param);
  GaussianOracle o;
  o.xs = uniform_grid(-span * sigma, span * sigma, points);
  const auto amp = make_jointly_gaussian(p);
  const auto scan = absorption_pattern(amp, o.xs, Regime::paraxial, ctx, {}, workers);
  for (std::size_t i = 0; i < o.xs.size(); ++i) {
    const double an = analytic_pattern(p, o.xs[i], ctx);
    o.max_rel = std::max(o.max_rel, std::abs(scan.values[i] - an) / an);
  }
  return o;
}

}  // namespace

void run_gaussian_pattern(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const auto n = r.count("n_photons", 2, 1, 8);
  const double bp = r.number("B", 0.5, positive(), Dim::momentum);
  const double beta = r.number("beta", 1.0, positive(), Dim::momentum);
  const Span grid = read_span(r, "grid", "x_min", "x_max", {-2.0, 2.0, 201}, Dim::length);
  const auto oracle_points = r.count("oracle_points", 21, 2, 100000);
  const double oracle_span = r.number("oracle_span", 3.0, positive());
  const auto draws = r.count("oracle_draws", 0, 0, 100000);
  const auto draw_n_max = r.count("draw_n_max", 3, 1, 8);
  const auto b_range = r.numbers("draw_b_range", {0.2, 1.5}, positive(), Dim::momentum, 2);
  const auto beta_range = r.numbers("draw_beta_range", {0.2, 1.5}, positive(), Dim::momentum, 2);
  const auto mc_samples = r.count("mc_samples", 1000000, 2, 1000000000);
  std::vector<std::vector<double>> cov_default;
  if (n >= 2) cov_default.push_back({as_double(n), bp, beta});
  const auto cov_sets = r.rows("covariance_sets", cov_default, 3);
  const auto seed = r.seed("seed", 1, env.seed_override);
  const bool tensor_check = r.flag("tensor_check", true);
  auto t = r.child("tolerances");
  const double t_oracle = t.number("oracle", 1e-6, positive());
  const double t_norm = t.number("normalization", 1e-6, positive());
  const double sigmas = t.number("sigma", 3.0, positive());
  const double t_width = t.number("width", 1e-8, positive());
  const double t_ratio = t.number("width_ratio", 1e-12, positive());
  const double t_tensor = t.number("tensor", 1e-6, positive());
  r.adopt("tolerances", std::move(t));

  GaussianParams p{n, bp, beta, std::nullopt};
  try {
    p.validate();
  } catch (const Error& e) {
    r.require(false, e.what());
  }
  r.require(b_range.size() == 2 && b_range[0] < b_range[1],
            "parameters.draw_b_range must be [low, high] with low < high");
  r.require(beta_range.size() == 2 && beta_range[0] < beta_range[1],
            "parameters.draw_beta_range must be [low, high] with low < high");
  for (std::size_t i = 0; i < cov_sets.size(); ++i) {
    const auto& s = cov_sets[i];
    r.require(s[0] >= 2.0 && s[0] <= 8.0 && std::floor(s[0]) == s[0] && s[1] > 0.0 && s[2] > 0.0,
              "parameters.covariance_sets[" + tag(i) +
                  "] must be [N, B, beta] with integer 2 <= N <= 8 and B, beta > 0");
  }
  finish_validation(r);
  if (env.validate_only) return;

  const auto amp = make_jointly_gaussian(p);
  const double nd = as_double(n);
  const double sigma = 1.0 / (2.0 * nd * bp);

  // pattern over the requested grid
  const auto xs = uniform_grid(grid.lo, grid.hi, grid.points);
  auto scan = absorption_pattern(amp, xs, Regime::paraxial, ctx, {}, env.workers);
  Table pat{"gaussian_pattern", {"x", "pipeline", "analytic"}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i)
    pat.rows.push_back({xs[i], scan.values[i], analytic_pattern(p, xs[i], ctx)});
  b.tables.push_back(std::move(pat));
  b.patterns.push_back({"pattern", std::move(scan)});

  const auto oracle = gaussian_oracle(p, oracle_points, oracle_span, ctx, env.workers);
  add_check(b, env, "pipeline_vs_analytic", oracle.max_rel, 0.0, t_oracle, CheckMode::max,
            "max relative deviation over " + tag(oracle_points) + " points in +-" +
                tag(oracle_span) + " rms widths");
  add_normalization_check(b, env, "normalization",
                          verify_normalization(amp, {}, seed, mc_samples), t_norm, sigmas);

  if (tensor_check && n <= kMaxTensorDimension) {
    double worst = 0.0;
    for (double x : {0.0, sigma}) {
      const std::vector<double> pt(n, x);
      const auto psi = spatial_amplitude(amp, pt, Regime::paraxial, ctx, SpatialMethod::tensor);
      const double rate = factorial(n) * std::pow(ctx.eta(), nd) * std::norm(psi);
      const double an = analytic_pattern(p, x, ctx);
      worst = std::max(worst, std::abs(rate - an) / an);
    }
    add_check(b, env, "tensor_vs_analytic", worst, 0.0, t_tensor, CheckMode::max,
              "full tensor quadrature at x = 0 and one rms width");
  }

  // widths
  const double w_num = second_moment_width(
      [&](double x) { return absorption_rate_at(amp, x, Regime::paraxial, ctx); }, 12.0 * sigma);
  add_check(b, env, "W_vs_1_over_4NB", w_num, 1.0 / (4.0 * nd * bp), t_width, CheckMode::rel,
            "second-moment width of the computed pattern against 1/(4 N B)");
  add_check(b, env, "W_vs_1_over_2NB", w_num, 1.0 / (2.0 * nd * bp), t_width, CheckMode::rel,
            "second-moment width of the computed pattern against 1/(2 N B)");
  b.results["W_second_moment"] = w_num;
  if (n >= 2) {
    GaussianParams budget = p;
    budget.kappa2_budget = p.kappa2();
    const auto w = rms_width(budget);
    add_check(b, env, "WC_over_Wmin", *w.w_classical / *w.w_min, std::sqrt(nd), t_ratio,
              CheckMode::rel);
    const auto cref = classical_reference(budget);
    const auto camp = make_jointly_gaussian(cref);
    const double wc_num = second_moment_width(
        [&](double x) { return absorption_rate_at(camp, x, Regime::paraxial, ctx); },
        12.0 / (2.0 * nd * cref.b_param));
    add_check(b, env, "WC_second_moment", wc_num, *w.w_classical, t_width, CheckMode::rel,
              "uncorrelated state at the same momentum budget");
    b.results["W_classical"] = *w.w_classical;
    b.results["W_min"] = *w.w_min;
  }

  // covariances
  if (!cov_sets.empty()) {
    Table cov{"covariances", {"set", "n_photons", "B", "beta"}, {}};
    const std::vector<std::string> names{"K2", "rel2", "rel_cross", "kappa2", "kappa_cross",
                                         "x2", "x_cross"};
    for (const auto& q : names) {
      cov.columns.push_back(q + "_mc");
      cov.columns.push_back(q + "_std_error");
      cov.columns.push_back(q + "_exact");
    }
    bool seen_pos = false;
    bool seen_neg = false;
    bool both_pass = true;
    for (std::size_t i = 0; i < cov_sets.size(); ++i) {
      const GaussianParams q{static_cast<std::size_t>(cov_sets[i][0]), cov_sets[i][1],
                             cov_sets[i][2], std::nullopt};
      const std::size_t dim = q.n_photons;
      const auto mom = momentum_covariances(q);
      const auto pos = position_covariances(q);
      const DensitySampler draw_k = [q](SampleStream& s, std::span<double> out) {
        sample_momenta(q, s, out);
      };
      const DensitySampler draw_x = [q](SampleStream& s, std::span<double> out) {
        sample_positions(q, s, out);
      };
      auto mean_of = [dim](std::span<const double> k) {
        double m = 0.0;
        for (double v : k) m += v;
        return m / as_double(dim);
      };
      const std::vector<Observable> kobs{
          [=](std::span<const double> k) { return std::pow(mean_of(k), 2); },
          [=](std::span<const double> k) { return std::pow(k[0] - mean_of(k), 2); },
          [=](std::span<const double> k) { return (k[0] - mean_of(k)) * (k[1] - mean_of(k)); },
          [](std::span<const double> k) { return k[0] * k[0]; },
          [](std::span<const double> k) { return k[0] * k[1]; },
      };
      const std::vector<Observable> xobs{
          [](std::span<const double> x) { return x[0] * x[0]; },
          [](std::span<const double> x) { return x[0] * x[1]; },
      };
      const auto ek = mc_expectations(dim, draw_k, kobs,
                                      RandomPlan{seed, mc_samples, static_cast<std::uint32_t>(2 * i)},
                                      env.workers);
      const auto ex = mc_expectations(
          dim, draw_x, xobs, RandomPlan{seed, mc_samples, static_cast<std::uint32_t>(2 * i + 1)},
          env.workers);
      const std::vector<McEstimate> est{ek[0], ek[1], ek[2], ek[3], ek[4], ex[0], ex[1]};
      const std::vector<double> exact{mom.var_K,     mom.var_rel, mom.cov_rel, mom.var_kappa,
                                      mom.cov_kappa, pos.var_x,   pos.cov_x};
      std::vector<double> row{as_double(i), as_double(dim), q.b_param, q.beta_param};
      for (std::size_t k = 0; k < names.size(); ++k) {
        add_check(b, env, "cov_set" + tag(i) + "_" + names[k], est[k].mean, exact[k],
                  sigmas * est[k].std_error, CheckMode::abs,
                  tag(sigmas) + " standard errors, " + tag(mc_samples) + " samples");
        row.insert(row.end(), {est[k].mean, est[k].std_error, exact[k]});
      }
      cov.rows.push_back(std::move(row));

      // <x_n x_m> changes sign across B^2 = beta^2/N
      if (pos.cov_x != 0.0) {
        const double predicted = pos.cov_x > 0.0 ? 1.0 : -1.0;
        const double measured = est[6].mean > 0.0 ? 1.0 : -1.0;
        add_check(b, env, "cov_set" + tag(i) + "_x_cross_sign", measured, predicted, 0.0,
                  CheckMode::abs, "sign of <x_n x_m>; positive when B^2 < beta^2/N");
        (predicted > 0.0 ? seen_pos : seen_neg) = true;
        both_pass = both_pass && measured == predicted;
      }
    }
    if (seen_pos && seen_neg)
      add_check(b, env, "x_cross_sign_flip", both_pass ? 1.0 : 0.0, 1.0, 0.0, CheckMode::abs,
                "sets on both sides of B^2 = beta^2/N show the predicted signs");
    b.tables.push_back(std::move(cov));
  }

  // random parameter draws
  if (draws > 0) {
    Table tab{"oracle_draws",
              {"draw", "n_photons", "B", "beta", "max_rel_dev", "normalization", "norm_error"},
              {}};
    for (std::size_t d = 0; d < draws; ++d) {
      SampleStream s(seed, 1000, d);
      const std::size_t dn = 1 + std::min<std::size_t>(
                                     draw_n_max - 1,
                                     static_cast<std::size_t>(s.uniform() * as_double(draw_n_max)));
      const double db = b_range[0] + (b_range[1] - b_range[0]) * s.uniform();
      const double dbeta = beta_range[0] + (beta_range[1] - beta_range[0]) * s.uniform();
      const GaussianParams q{dn, db, dbeta, std::nullopt};
      const auto o = gaussian_oracle(q, oracle_points, oracle_span, ctx, env.workers);
      const auto nc = verify_normalization(make_jointly_gaussian(q), {}, seed + d, mc_samples);
      add_check(b, env, "draw" + tag(d) + "_pipeline_vs_analytic", o.max_rel, 0.0, t_oracle,
                CheckMode::max);
      add_normalization_check(b, env, "draw" + tag(d) + "_normalization", nc, t_norm, sigmas);
      tab.rows.push_back({as_double(d), as_double(dn), db, dbeta, o.max_rel, nc.value, nc.error});
    }
    b.tables.push_back(std::move(tab));
  }
  b.results["normalization_constant"] = normalization_constant(p);
}

// ---------------------------------------------------------------------------

namespace {

SlitExperiment read_experiment(ParamReader& r, const OpticalContext& ctx,
                               std::vector<std::string>& warnings, bool check) {
  SlitExperiment e;
  e.slit_width = r.number("a", 20.0, positive(), Dim::length);
  e.slit_spacing = r.number("b", 40.0, positive(), Dim::length);
  if (check) e.coherence_length = r.number("alpha", 1.0, positive(), Dim::length);
  e.epsilon = r.number("epsilon", 0.1, positive());
  e.corr_shape = correlation_shape_from_string(r.choice("g_shape", "gaussian", {"gaussian", "rect"}));
  e.ctx = ctx;
  if (check) {
    try {
      warnings = e.validate();
    } catch (const Error& err) {
      r.require(false, err.what());
    }
  }
  return e;
}

// Grid point with the smallest rate among thetas in (lo, hi).
double argmin_theta(const std::vector<double>& thetas, const std::vector<double>& rates, double lo,
                    double hi) {
  double best = kNaN;
  double best_rate = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (thetas[i] > lo && thetas[i] < hi && rates[i] < best_rate) {
      best_rate = rates[i];
      best = thetas[i];
    }
  }
  return best;
}

}  // namespace

void run_dangelo_angular(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  std::vector<std::string> warnings;
  const auto e = read_experiment(r, ctx, warnings, true);
  const Span th = read_span(r, "theta", "min", "max", {-0.025, 0.025, 1001}, Dim::none);
  const Span du = read_span(r, "duality", "k_min", "k_max", {-0.3, 0.3, 21}, Dim::momentum, 2);
  const bool doubling = r.flag("b_doubling", true);
  const bool pipeline = r.flag("pipeline_check", true);
  auto t = r.child("tolerances");
  const double t_dual = t.number("duality", 1e-6, positive());
  const double t_norm = t.number("normalization", 1e-6, positive());
  const double t_depth = t.number("null_depth", 1e-12, positive());
  const double t_even = t.number("evenness", 1e-12, positive());
  const double t_pipe = t.number("pipeline", 1e-6, positive());
  r.adopt("tolerances", std::move(t));

  const double lambda = ctx.wavelength();
  const double null = lambda / (4.0 * e.slit_spacing);
  r.require(th.hi > 2.0 * null,
            "parameters.theta.max must exceed lambda/(2b) = " + tag(2.0 * null) +
                " so the first null is bracketed");
  r.require(th.hi > th.lo && spacing(th) < 0.25 * null,
            "parameters.theta grid must resolve lambda/(4b) with at least four points");
  finish_validation(r);
  if (env.validate_only) return;
  collect_warnings(b, "experiment", warnings);

  const auto thetas = uniform_grid(th.lo, th.hi, th.points);
  std::vector<double> rates(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) rates[i] = angular_coincidence(e, thetas[i]);
  const double h = spacing(th);
  const double peak = angular_coincidence(e, 0.0);

  Table tab{"angular", {"theta", "rate"}, {}};
  Curve cur{"angular_rate", "theta", "rate", thetas, rates};
  for (std::size_t i = 0; i < thetas.size(); ++i) tab.rows.push_back({thetas[i], rates[i]});
  b.tables.push_back(std::move(tab));
  b.curves.push_back(std::move(cur));

  const double found = argmin_theta(thetas, rates, 0.0, 2.0 * null);
  add_check(b, env, "first_null_position", found, null, h, CheckMode::abs,
            "grid minimum in (0, lambda/(2b)); tolerance is the grid spacing");
  add_check(b, env, "first_null_depth", angular_coincidence(e, null) / peak, 0.0, t_depth,
            CheckMode::max, "rate at lambda/(4b) relative to theta = 0");
  double odd = 0.0;
  for (double th_i : thetas)
    odd = std::max(odd, std::abs(angular_coincidence(e, th_i) - angular_coincidence(e, -th_i)));
  add_check(b, env, "evenness", odd / peak, 0.0, t_even, CheckMode::max);

  if (doubling) {
    SlitExperiment e2 = e;
    e2.slit_spacing = 2.0 * e.slit_spacing;
    std::vector<double> rates2(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) rates2[i] = angular_coincidence(e2, thetas[i]);
    const double found2 = argmin_theta(thetas, rates2, 0.0, null);
    add_check(b, env, "first_null_position_doubled_b", found2, 0.5 * null, h, CheckMode::abs,
              "slit separation doubled");
  }

  add_check(b, env, "near_field_normalization", near_field_norm(e), 1.0, t_norm, CheckMode::abs);

  const auto ks = uniform_grid(du.lo, du.hi, du.points);
  std::vector<double> worst_row(ks.size(), 0.0), peak_row(ks.size(), 0.0);
  parallel_for(ks.size(), env.workers, [&](std::size_t i) {
    for (double k2 : ks) {
      const auto exact = momentum_phi(e, ks[i], k2);
      const auto numeric = momentum_phi_numeric(e, ks[i], k2);
      worst_row[i] = std::max(worst_row[i], std::abs(exact - numeric));
      peak_row[i] = std::max(peak_row[i], std::abs(exact));
    }
  });
  const double worst = max_of(worst_row);
  const double phi_peak = max_of(peak_row);
  add_check(b, env, "fourier_duality", worst / phi_peak, 0.0, t_dual, CheckMode::max,
            "max |phi closed form - transform of psi| / max |phi| on a " + tag(du.points) + "x" +
                tag(du.points) + " grid");

  if (pipeline) {
    double dev = 0.0;
    for (double th_i : {0.0, 0.5 * null}) {
      const double exact = angular_coincidence(e, th_i);
      dev = std::max(dev, std::abs(angular_coincidence_numeric(e, th_i) - exact) / exact);
    }
    add_check(b, env, "pipeline_vs_closed_form", dev, 0.0, t_pipe, CheckMode::max,
              "theta = 0 and lambda/(8b)");
  }
  b.results["first_null_expected"] = null;
  b.results["first_null_found"] = found;
  b.results["peak_rate"] = peak;
  b.results["duality_max_abs_dev"] = worst;
}

void run_dangelo_alpha_scan(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  std::vector<std::string> warnings;
  const auto e = read_experiment(r, ctx, warnings, false);
  const auto alphas = r.numbers("alphas", {0.25, 0.5, 1.0, 2.0}, positive(), Dim::length, 2);
  const double theta = r.number("theta", 0.0);
  const bool pipeline = r.flag("pipeline", true);
  auto t = r.child("tolerances");
  const double t_lin = t.number("linearity", 1e-10, positive());
  const double t_r2 = t.number("r_squared", 1e-3, positive());
  const double t_pipe = t.number("pipeline", 1e-6, positive());
  r.adopt("tolerances", std::move(t));

  for (double a : alphas) {
    try {
      for (auto& w : e.with_alpha(a).validate()) warnings.push_back(w);
    } catch (const Error& err) {
      r.require(false, "alpha = " + tag(a) + ": " + err.what());
    }
  }
  finish_validation(r);
  if (env.validate_only) return;
  collect_warnings(b, "experiment", warnings);

  const auto cf = alpha_scan(e, alphas, theta, RateMethod::closed_form);
  add_check(b, env, "closed_form_relative_residual", cf.relative_residual, 0.0, t_lin,
            CheckMode::max, "fit rate = slope * alpha");
  add_check(b, env, "closed_form_r_squared", cf.r_squared, 1.0, t_lin, CheckMode::min);
  b.results["closed_form"] = {{"slope", cf.slope},
                              {"r_squared", cf.r_squared},
                              {"relative_residual", cf.relative_residual}};
  for (std::size_t i = 1; i < cf.rows.size(); ++i) {
    const double ratio = (cf.rows[i].rate / cf.rows[0].rate) / (cf.rows[i].alpha / cf.rows[0].alpha);
    b.results["closed_form"]["rate_over_alpha_ratio_" + tag(i)] = ratio;
  }

  Table tab{"alpha_scan", {"alpha", "rate_closed_form"}, {}};
  Curve cur{"alpha_rate", "alpha", "rate", {}, {}};
  for (const auto& row : cf.rows) {
    tab.rows.push_back({row.alpha, row.rate});
    cur.x.push_back(row.alpha);
    cur.y.push_back(row.rate);
  }
  if (pipeline) {
    const auto pl = alpha_scan(e, alphas, theta, RateMethod::pipeline);
    add_check(b, env, "pipeline_r_squared", pl.r_squared, 1.0, t_r2, CheckMode::min,
              "linear fit through the origin of the numerically transformed rates");
    double dev = 0.0;
    tab.columns.push_back("rate_pipeline");
    for (std::size_t i = 0; i < pl.rows.size(); ++i) {
      dev = std::max(dev, std::abs(pl.rows[i].rate - cf.rows[i].rate) / cf.rows[i].rate);
      tab.rows[i].push_back(pl.rows[i].rate);
    }
    add_check(b, env, "pipeline_vs_closed_form", dev, 0.0, t_pipe, CheckMode::max);
    b.results["pipeline"] = {{"slope", pl.slope},
                             {"r_squared", pl.r_squared},
                             {"relative_residual", pl.relative_residual}};
  }
  b.tables.push_back(std::move(tab));
  b.curves.push_back(std::move(cur));
}

// ---------------------------------------------------------------------------

void run_bound_audit(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const std::vector<std::string> all{"noon", "classical", "jointly_gaussian", "biphoton_slit"};
  const auto states = r.choices("states", all, all);
  const auto draws = r.count("draws", 50, 1, 1000000);
  const auto seed = r.seed("seed", 7, env.seed_override);
  const auto n_max = r.count("n_max", 5, 1, 8);
  const auto regime =
      regime_from_string(r.choice("regime", "nonparaxial", {"paraxial", "nonparaxial"}));
  const auto ppf = r.count("points_per_fringe", 10, 8, 100000);
  auto t = r.child("tolerances");
  const double t_bound = t.number("bound", 1e-9, non_negative());
  r.adopt("tolerances", std::move(t));
  finish_validation(r);
  if (env.validate_only) return;

  const double kmax = ctx.kappa_max();
  const double lambda = ctx.wavelength();
  Table tab{"bound_audit", {"state", "draw", "n_photons", "max_rate", "bound", "ratio"}, {}};
  for (const auto& state : states) {
    const auto code = static_cast<std::size_t>(std::find(all.begin(), all.end(), state) - all.begin());
    double worst = 0.0;
    std::size_t worst_draw = 0;
    for (std::size_t d = 0; d < draws; ++d) {
      SampleStream s(seed, static_cast<std::uint32_t>(code), d);
      auto pick_n = [&](std::size_t hi) {
        return 1 + std::min<std::size_t>(hi - 1, static_cast<std::size_t>(s.uniform() * as_double(hi)));
      };
      std::optional<MomentumAmplitude> amp;
      std::vector<double> xs;
      Regime reg = Regime::paraxial;
      if (state == "noon" || state == "classical") {
        const std::size_t n = pick_n(n_max);
        const double k0 = kmax * (0.1 + 0.2 * s.uniform());
        const double dk = k0 / (6.0 + 6.0 * s.uniform());
        const bool rect = s.uniform() < 0.5;
        const auto mode = rect ? ModeSpectrum::rect(k0, dk) : ModeSpectrum::gaussian(k0, dk);
        amp = state == "noon" ? make_noon(mode, n) : make_classical(mode, n);
        reg = regime;
        const double half = 4.0 / (dk * std::sqrt(as_double(n)));
        const double h = kPi / (as_double(n) * k0) / as_double(ppf);
        const auto half_points = static_cast<std::size_t>(std::ceil(half / h));
        xs = uniform_grid(-h * as_double(half_points), h * as_double(half_points),
                          2 * half_points + 1);
      } else if (state == "jointly_gaussian") {
        const std::size_t n = pick_n(n_max);
        const double bp = kmax * (0.02 + 0.08 * s.uniform());
        const double beta = kmax * (0.02 + 0.08 * s.uniform());
        amp = make_jointly_gaussian(GaussianParams{n, bp, beta, std::nullopt});
        const double sigma = 1.0 / (2.0 * as_double(n) * bp);
        xs = uniform_grid(-4.0 * sigma, 4.0 * sigma, 201);
      } else {
        SlitExperiment e;
        e.slit_width = lambda * (5.0 + 25.0 * s.uniform());
        e.slit_spacing = e.slit_width * (1.0 + 2.0 * s.uniform());
        e.coherence_length = e.slit_width * 0.1 * (0.2 + 0.8 * s.uniform());
        e.corr_shape = s.uniform() < 0.5 ? CorrelationShape::gaussian : CorrelationShape::rect;
        e.ctx = ctx;
        amp = make_biphoton_slit(e);
        const double reach = 0.6 * (e.slit_spacing + e.slit_width);
        xs = uniform_grid(-reach, reach, 401);
      }
      const auto scan = absorption_pattern(*amp, xs, reg, ctx, {}, env.workers);
      const double peak = max_of(scan.values);
      const double bound = schwarz_bound_density(ctx, amp->n_photons());
      tab.rows.push_back({as_double(code), as_double(d), as_double(amp->n_photons()), peak, bound,
                          peak / bound});
      if (peak / bound > worst) {
        worst = peak / bound;
        worst_draw = d;
      }
    }
    add_check(b, env, "schwarz_bound_" + state, worst, 1.0, t_bound, CheckMode::max,
              "largest max-rate / N!(pi eta/lambda)^N over " + tag(draws) + " draws");
    b.results[state] = {{"max_ratio", worst}, {"worst_draw", worst_draw}};
  }
  b.results["state_codes"] = all;
  b.tables.push_back(std::move(tab));
}

// ---------------------------------------------------------------------------

void run_rotation_audit(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const auto trials = r.count("trials", 1000, 1, 100000000);
  const auto seed = r.seed("seed", 11, env.seed_override);
  const double na_max = r.number("na_max", 0.95, open_range(0.0, 1.0));
  const auto curve_points = r.count("curve_points", 96, 2, 10000000);
  const double curve_na_max = r.number("curve_na_max", 0.95, open_range(0.0, 1.0));
  const double gamma_na = r.number("gamma_check_na", 0.8, closed_range(0.0, 0.999));
  const double gamma_expected = r.number("gamma_expected", 1.2910, positive());
  auto t = r.child("tolerances");
  const double t_ident = t.number("identity", 1e-12, positive());
  const double t_disp = t.number("dispersion", 1e-12, positive());
  const double t_comp = t.number("composition", 1e-12, positive());
  const double t_gamma = t.number("gamma", 0.005, positive());
  const double t_schwarz = t.number("schwarz_constant", 1e-8, positive());
  r.adopt("tolerances", std::move(t));
  finish_validation(r);
  if (env.validate_only) return;

  const double kmax = ctx.kappa_max();
  const double band = na_max * kmax;
  double ident = 0.0;
  double disp = 0.0;
  double comp = 0.0;
  std::size_t rejected = 0;
  std::size_t composed = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    SampleStream s(seed, 0, i);
    double kappa = 0.0;
    double theta = 0.0;
    RotatedMode rm{};
    // admissible: both the mode and its rotation inside the NA band
    while (true) {
      kappa = band * (2.0 * s.uniform() - 1.0);
      theta = kPi * (s.uniform() - 0.5);
      const double kz = longitudinal_momentum(kappa, ctx);
      if (kappa * std::sin(theta) + kz * std::cos(theta) > 0.0) {
        rm = rotate_mode(kappa, theta, ctx);
        if (std::abs(rm.kappa) < band) break;
      }
      ++rejected;
    }
    const double ratio = geometric_factor(kappa, ctx) / geometric_factor(rm.kappa, ctx);
    ident = std::max(ident, std::abs(ratio - rm.scale));

    const double kz = longitudinal_momentum(kappa, ctx);
    const double kz_rot = kappa * std::sin(theta) + kz * std::cos(theta);
    disp = std::max(disp, std::abs(rm.kappa * rm.kappa + kz_rot * kz_rot - kmax * kmax) /
                              (kmax * kmax));

    const double theta2 = 0.5 * kPi * (s.uniform() - 0.5);
    const double kz2 = rm.kappa * std::sin(theta2) + longitudinal_momentum(rm.kappa, ctx) * std::cos(theta2);
    const double kz12 = kappa * std::sin(theta + theta2) + kz * std::cos(theta + theta2);
    if (kz2 > 0.0 && kz12 > 0.0) {
      const auto r2 = rotate_mode(rm.kappa, theta2, ctx);
      const auto r12 = rotate_mode(kappa, theta + theta2, ctx);
      comp = std::max({comp, std::abs(r2.kappa - r12.kappa) / kmax,
                       std::abs(rm.scale * r2.scale - r12.scale) / r12.scale});
      ++composed;
    }
  }
  add_check(b, env, "rotation_identity", ident, 0.0, t_ident, CheckMode::max,
            "max |gamma(k)/gamma(k') - sqrt(kz'/kz)| over " + tag(trials) + " pairs");
  add_check(b, env, "rotation_dispersion", disp, 0.0, t_disp, CheckMode::max,
            "max |k'^2 + kz'^2 - (omega/c)^2| / (omega/c)^2");
  add_check(b, env, "rotation_composition", comp, 0.0, t_comp, CheckMode::max,
            "two successive rotations against one by the summed angle");
  add_check(b, env, "gamma_at_na_" + tag(gamma_na), geometric_factor(gamma_na * kmax, ctx),
            gamma_expected, t_gamma, CheckMode::abs);

  QuadratureSpec spec;
  spec.edge_clustering = true;
  spec.rel_tol = 1e-12;
  const auto gamma2 = integrate_1d(
      RealIntegrand([&](double k) { return std::pow(geometric_factor(k, ctx), 2); }),
      Interval{-kmax, kmax}, spec);
  add_check(b, env, "schwarz_constant", gamma2.value / (2.0 * kPi), kPi / ctx.wavelength(),
            t_schwarz, CheckMode::rel, "(1/2pi) integral of gamma^2 over the light cone");

  Curve fig3{"fig3_gamma", "NA", "gamma", {}, {}};
  Table tab{"gamma_curve", {"NA", "gamma"}, {}};
  for (std::size_t i = 0; i < curve_points; ++i) {
    const double na = curve_na_max * as_double(i) / as_double(curve_points - 1);
    const double g = geometric_factor(na * kmax, ctx);
    fig3.x.push_back(na);
    fig3.y.push_back(g);
    tab.rows.push_back({na, g});
  }
  b.curves.push_back(std::move(fig3));
  b.tables.push_back(std::move(tab));
  b.results["rejected_draws"] = rejected;
  b.results["composition_pairs"] = composed;
}

// ---------------------------------------------------------------------------

void run_absorber_convergence(ParamReader& r, const RunEnv& env, ReportBundle& b) {
  const auto& ctx = env.ctx;
  const auto n = r.count("n_photons", 2, 1, 3);
  const double k0 = r.number("kappa0", 1.0, positive(), Dim::momentum);
  const double dk = r.number("delta_kappa", 0.1, positive(), Dim::momentum);
  const auto shape = r.choice("envelope", "gaussian", {"gaussian", "rect"});
  const auto divisions = r.counts("divisions", {10, 20, 40}, 2, 100000, 2);
  const auto grid_points = r.count("grid_points", 21, 3, 100000);
  const double span = r.number("span_periods", 1.0, positive());
  auto t = r.child("tolerances");
  const double t_ratio = t.number("ratio", 0.2, positive());
  r.adopt("tolerances", std::move(t));
  const auto mode = checked_mode(r, shape, k0, dk, Regime::paraxial, ctx);
  r.require(std::is_sorted(divisions.begin(), divisions.end()) &&
                std::adjacent_find(divisions.begin(), divisions.end()) == divisions.end(),
            "parameters.divisions must be strictly increasing");
  finish_validation(r);
  if (env.validate_only) return;

  const double nd = as_double(n);
  const double period = kPi / (nd * k0);
  const auto noon = make_noon(*mode, n);
  collect_warnings(b, "noon", noon.warnings());
  const auto xs = uniform_grid(-span * period, span * period, grid_points);
  std::vector<double> exact(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    exact[i] = std::norm(diagonal_amplitude(noon, xs[i], Regime::paraxial, ctx));

  Table tab{"absorber_convergence", {"division", "dxi", "max_error", "error_ratio"}, {}};
  std::vector<double> errors;
  for (std::size_t d : divisions) {
    const double dxi = period / as_double(d);
    auto scan = discrete_absorber_pattern(noon, dxi, xs, Regime::paraxial, ctx, {}, env.workers);
    const double rescale = std::pow(dxi, nd - 1.0);
    double err = 0.0;
    double null_ratio = 0.0;
    bool any_null = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      err = std::max(err, std::abs(scan.values[i] / rescale - exact[i]));
      if (i > 0 && i + 1 < xs.size() && std::abs(std::cos(nd * k0 * xs[i])) < 1e-9) {
        any_null = true;
        null_ratio = std::max(
            null_ratio, scan.values[i] / std::min(scan.values[i - 1], scan.values[i + 1]));
      }
    }
    if (any_null)
      add_check(b, env, "null_is_local_minimum_div" + tag(d), null_ratio, 1.0, 0.0, CheckMode::max,
                "P at a fringe null over its smaller neighbour");
    const double ratio = errors.empty() ? kNaN : errors.back() / err;
    tab.rows.push_back({as_double(d), dxi, err, ratio});
    errors.push_back(err);
    scan.metadata["division"] = d;
    b.patterns.push_back({"absorber_div" + tag(d), std::move(scan)});
  }
  double worst_step = 0.0;
  for (std::size_t k = 1; k < divisions.size(); ++k) {
    const double refine = as_double(divisions[k]) / as_double(divisions[k - 1]);
    add_check(b, env,
              "error_ratio_div" + tag(divisions[k - 1]) + "_to_" + tag(divisions[k]),
              errors[k - 1] / errors[k], refine * refine, t_ratio, CheckMode::abs,
              "second order: error ratio = (refinement)^2");
    worst_step = std::max(worst_step, errors[k] / errors[k - 1]);
  }
  add_check(b, env, "error_decreasing", worst_step, 1.0, 0.0, CheckMode::max);
  b.tables.push_back(std::move(tab));
  b.results["fringe_period"] = period;
  b.results["max_errors"] = errors;
}

}  // namespace qlitho::detail
