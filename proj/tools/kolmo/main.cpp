// kolmo: experiment runner. Each subcommand resolves its configuration
// (defaults, then --config file, then flags), runs, and writes
// summary.json plus CSV data under --out.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kolmo/cascade.hpp"
#include "kolmo/error.hpp"
#include "kolmo/io.hpp"
#include "kolmo/lab/config.hpp"
#include "kolmo/lab/experiments.hpp"
#include "kolmo/lab/report.hpp"
#include "kolmo/stable_core.hpp"
#include "kolmo/theory.hpp"
#include "kolmo/version.hpp"

namespace {

using namespace kolmo;
using lab::Config;
using lab::Json;
using lab::Report;
using lab::number;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Knob {
  std::string key;
  std::string value;
  std::string help;
};

using Runner = std::function<void(Report&)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<Knob> knobs;
  Runner run;
};

std::vector<Knob> common_knobs(double x, double y) {
  return {
      {"alpha", "2", "stability index in (0, 2]"},
      {"rho", "0.5", "positivity parameter P[L_1 >= 0]"},
      {"x", format_double(x), "start position"},
      {"y", format_double(y), "start velocity"},
      {"seed", "1", "base seed of all random streams"},
      {"workers", "1", "worker threads"},
      {"out", "kolmo-out", "output directory"},
      {"dt0", "0.01", "base Euler step"},
      {"dt_mode", "scaled", "step policy: fixed or scaled"},
      {"cap", "1e18", "horizon cap for a single return"},
      {"gzip", "false", "compress large CSV outputs"},
  };
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  for (char& c : f)
    if (c == '_') c = '-';
  return f;
}

StableLaw law_of(const Config& c) { return validate_params(c.real("alpha"), c.real("rho")); }
PlaneState start_of(const Config& c) { return {c.real("x"), c.real("y")}; }
unsigned workers_of(const Config& c) {
  const auto w = c.integer("workers");
  if (w < 1 || w > 4096) throw Error(Errc::kConfigError, "workers must be in [1, 4096]");
  return static_cast<unsigned>(w);
}
std::size_t count_of(const Config& c, const std::string& key) {
  const auto v = c.integer(key);
  if (v < 0) throw Error(Errc::kConfigError, "config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

DtPolicy policy_of(const Config& c) {
  DtPolicy p;
  p.dt0 = c.real("dt0");
  if (!(p.dt0 > 0.0)) throw Error(Errc::kConfigError, "dt0 must be positive");
  const auto& mode = c.text("dt_mode");
  if (mode == "fixed") {
    p.mode = DtPolicy::Mode::kFixed;
  } else if (mode == "scaled") {
    p.mode = DtPolicy::Mode::kScaled;
  } else {
    throw Error(Errc::kConfigError, "dt_mode must be 'fixed' or 'scaled'");
  }
  return p;
}

PoolOptions pool_options(const Config& c, std::size_t size) {
  PoolOptions o;
  o.size_per_sign = size;
  o.policy = policy_of(c);
  o.horizon_cap = c.real("cap");
  if (!(o.horizon_cap > 0.0)) throw Error(Errc::kConfigError, "cap must be positive");
  o.seed = c.unsigned_integer("seed");
  o.workers = workers_of(c);
  return o;
}

std::string data_name(const Config& c, const std::string& stem) {
  return stem + (c.boolean("gzip") ? ".csv.gz" : ".csv");
}

Json optional_number(std::optional<double> v) { return v ? number(*v) : Json(nullptr); }

Json tail_json(const TailClass& t) { return {{"exponent", number(t.exponent)}, {"logpow", t.logpow}}; }

Json fit_json(const TailFit& f) {
  Json j{{"method", std::string(to_string(f.method))},
         {"exponent_hat", number(f.exponent_hat)},
         {"std_error", number(f.std_error)},
         {"z_lo", number(f.window.lo)},
         {"z_hi", number(f.window.hi)},
         {"points", f.points}};
  if (f.logpow_hat) {
    j["logpow_hat"] = number(*f.logpow_hat);
    j["logpow_std_error"] = optional_number(f.logpow_std_error);
  }
  return j;
}

Json mellin_json(const MellinValue& m) {
  Json j{{"s", number(m.s)},
         {"value", number(m.value)},
         {"method", std::string(to_string(m.method))},
         {"error_bound", number(m.error_bound)}};
  if (m.method == MellinMethod::kMonteCarlo) {
    j["std_error"] = number(m.std_error);
    j["nonfinite_variance"] = m.nonfinite_variance;
  }
  return j;
}

Json constants_json(const StableLaw& law) {
  const DerivedConstants d = derived_constants(law);
  Json j{{"alpha", number(law.alpha)},   {"rho", number(law.rho)},
         {"gamma", number(d.gamma)},     {"gamma_bar", number(d.gamma_bar)},
         {"theta", number(d.theta)},     {"theta_bar", number(d.theta_bar)},
         {"c_scale", number(d.c_scale)}, {"s_scale", number(d.s_scale)},
         {"kappa", optional_number(d.kappa_if_defined())},
         {"velocity", optional_number(d.velocity_if_defined())}};
  if (!d.degenerate) {
    const DensityExponents e = density_tail_exponents(law);
    j["density_exponent_at_zero"] = number(e.at_zero);
    j["density_exponent_at_infinity"] = number(e.at_infinity);
    j["log_moment_minus"] = number(log_moment_ell(law, -1));
    j["log_moment_plus"] = number(log_moment_ell(law, 1));
  }
  return j;
}

// ---- constants --------------------------------------------------------------

void run_constants(Report& r) {
  const Config& c = r.config();
  const StableLaw law = law_of(c);
  const double tol = c.real("tol");
  r.results()["constants"] = constants_json(law);

  std::vector<PredictionRow> rows;
  const int n_max = static_cast<int>(c.integer("nmax"));
  if (!law.degenerate_winding()) {
    for (const Region region : {Region::kMinus, Region::kPlus})
      for (int n = 1; n <= n_max; ++n) rows.push_back({law, region, n, theorem_b_prediction(law, n, region)});
    write_predictions_csv(r.file("predictions.csv"), rows);

    const lab::Identities own = lab::identity_residuals(law);
    r.results()["identities"] = {{"velocity_times_kappa", number(own.velocity_times_kappa)},
                                 {"gamma_sum", number(own.gamma_sum)},
                                 {"kappa_from_log_moments", number(own.kappa_from_log_moments)},
                                 {"density_exponent", number(own.density_exponent)}};
  }

  const lab::IdentityAudit audit = lab::audit_identities(static_cast<int>(c.integer("grid")));
  const lab::Identities& m = audit.max_abs;
  r.results()["grid_audit"] = {{"laws", audit.laws},
                               {"velocity_times_kappa", number(m.velocity_times_kappa)},
                               {"gamma_sum", number(m.gamma_sum)},
                               {"kappa_from_log_moments", number(m.kappa_from_log_moments)},
                               {"density_exponent", number(m.density_exponent)}};
  const std::string over = "max over " + std::to_string(audit.laws) + " admissible laws";
  r.check_near("velocity * kappa = -pi", m.velocity_times_kappa, 0.0, tol, over);
  r.check_near("gamma + gamma_bar = alpha / (1 + alpha)", m.gamma_sum, 0.0, tol, over);
  r.check_near("kappa from log moments", m.kappa_from_log_moments, 0.0, tol, over);
  r.check_near("alpha theta / gamma = 1 / (1 - gamma)", m.density_exponent, 0.0, tol, over);
}

// ---- validate-sampler -------------------------------------------------------

void run_validate_sampler(Report& r) {
  const Config& c = r.config();
  lab::SamplerParams p;
  p.law = law_of(c);
  p.samples = count_of(c, "samples");
  p.lambdas = c.reals("lambdas");
  p.seed = c.unsigned_integer("seed");
  p.workers = workers_of(c);
  const double sigmas = c.real("sigmas");
  const lab::SamplerValidation v = lab::validate_sampler(p);

  CsvWriter ecf(r.file("ecf.csv"), {"lambda", "re_empirical", "im_empirical", "re_target", "im_target", "se_re", "se_im", "ok"});
  Json rows = Json::array();
  bool ecf_ok = true;
  for (const EcfRow& row : v.ecf.rows) {
    const bool ok = std::abs(row.empirical.real() - row.target.real()) <= sigmas * row.se_re &&
                    std::abs(row.empirical.imag() - row.target.imag()) <= sigmas * row.se_im;
    ecf_ok = ecf_ok && ok;
    ecf.row({format_double(row.lambda), format_double(row.empirical.real()), format_double(row.empirical.imag()),
             format_double(row.target.real()), format_double(row.target.imag()), format_double(row.se_re),
             format_double(row.se_im), ok ? "1" : "0"});
    rows.push_back({{"lambda", number(row.lambda)},
                    {"empirical", {number(row.empirical.real()), number(row.empirical.imag())}},
                    {"target", {number(row.target.real()), number(row.target.imag())}},
                    {"se", {number(row.se_re), number(row.se_im)}},
                    {"ok", ok}});
  }
  ecf.close();
  r.results()["samples"] = p.samples;
  r.results()["ecf"] = rows;
  r.results()["positive_fraction"] = {{"value", number(v.positive_fraction)}, {"std_error", number(v.positive_se)}};
  r.check({"empirical characteristic function", ecf_ok, 0, 0, sigmas, "every lambda within sigmas standard errors"});
  r.check_near("P[L_1 >= 0] = rho", v.positive_fraction, p.law.rho, sigmas * v.positive_se);
  if (v.variance) {
    r.results()["variance"] = {{"value", number(*v.variance)}, {"std_error", number(*v.variance_se)}};
    r.check_near("Var L_1 = 2", *v.variance, 2.0, sigmas * *v.variance_se);
  }
}

// ---- sample-returns ---------------------------------------------------------

Json sign_json(const lab::SignStudy& s) {
  Json mellin = Json::array();
  for (const lab::MellinCheck& m : s.mellin) mellin.push_back({{"mc", mellin_json(m.mc)}, {"closed", mellin_json(m.closed)}});
  return {{"sign", s.sign},
          {"kept", s.kept},
          {"censored", s.censored},
          {"censored_fraction", number(s.censored_fraction)},
          {"log_moment", {{"mean", number(s.log_moment.mean)}, {"std_error", number(s.log_moment.std_error)}}},
          {"log_moment_theory", number(s.log_moment_theory)},
          {"mellin", mellin}};
}

void check_sign(Report& r, const lab::SignStudy& s, double sigmas, double max_censored) {
  const std::string tag = s.sign < 0 ? "ell-" : "ell+";
  for (const lab::MellinCheck& m : s.mellin) {
    r.check_near("E[" + tag + "^(s-1)] at s = " + format_double(m.mc.s), m.mc.value, m.closed.value,
                 sigmas * m.mc.std_error, m.mc.nonfinite_variance ? "variance flagged infinite; jackknife error used" : "");
  }
  r.check_near("E[log " + tag + "]", s.log_moment.mean, s.log_moment_theory, sigmas * s.log_moment.std_error);
  r.check({tag + " censored fraction", s.censored_fraction <= max_censored, s.censored_fraction, 0, max_censored, ""});
}

void run_sample_returns(Report& r) {
  const Config& c = r.config();
  const StableLaw law = law_of(c);
  if (law.degenerate_winding()) throw Error(Errc::kDegenerate, "returns need rho in (0, 1)");
  const PoolBuild build = build_pools(law, pool_options(c, count_of(c, "pool")));
  write_returns_csv(r.file(data_name(c, "returns_minus")), build.minus_draws);
  write_returns_csv(r.file(data_name(c, "returns_plus")), build.plus_draws);
  const lab::ReturnStudy st = lab::study_returns(law, build.pools, c.reals("s"));
  r.results()["constants"] = constants_json(law);
  r.results()["minus"] = sign_json(st.minus);
  r.results()["plus"] = sign_json(st.plus);
  const double sigmas = c.real("sigmas");
  const double max_censored = c.real("max_censored");
  check_sign(r, st.minus, sigmas, max_censored);
  check_sign(r, st.plus, sigmas, max_censored);
}

// ---- theorem-a --------------------------------------------------------------

void run_theorem_a(Report& r) {
  const Config& c = r.config();
  const StableLaw law = law_of(c);
  if (law.degenerate_winding()) throw Error(Errc::kDegenerate, "winding needs rho in (0, 1)");
  const PoolOptions opts = pool_options(c, count_of(c, "pool"));
  const PoolBuild build = build_pools(law, opts);

  lab::TheoremAParams p;
  p.cascades = count_of(c, "cascades");
  p.n_max = c.integer("nmax");
  const auto& start = c.text("start");
  if (start == "pool") {
    p.start = lab::CascadeStart::kPool;
  } else if (start == "general") {
    p.start = lab::CascadeStart::kGeneral;
  } else {
    throw Error(Errc::kConfigError, "start must be 'pool' or 'general'");
  }
  p.start_point = start_of(c);
  p.start_options = opts;
  p.seed = c.unsigned_integer("seed");
  p.workers = opts.workers;
  const lab::TheoremAResult a = lab::theorem_a(law, build.pools, p);

  write_cascades_csv(r.file(data_name(c, "cascades")), a.cascades);
  CsvWriter growth(r.file("growth.csv"), {"n", "mean_logT_over_n", "std_error", "kappa"});
  for (std::int64_t n = 1; n <= p.n_max; ++n) {
    std::vector<double> v;
    v.reserve(a.cascades.size());
    for (const auto& cs : a.cascades) v.push_back(cs[static_cast<std::size_t>(n - 1)].log_t / static_cast<double>(n));
    const MeanEstimate m = mean_estimate(v);
    growth.row({std::to_string(n), format_double(m.mean), format_double(m.std_error), format_double(a.kappa_theory)});
  }
  growth.close();
  r.add_plot({{"name", "growth"},
              {"file", "growth.csv"},
              {"x", "n"},
              {"y", "mean_logT_over_n"},
              {"error", "std_error"},
              {"log_x", false},
              {"log_y", false},
              {"overlays", {{{"label", "kappa"}, {"column", "kappa"}}}}});

  r.results()["constants"] = constants_json(law);
  r.results()["kappa_hat"] = number(a.estimate.kappa_hat);
  r.results()["kappa_std_error"] = number(a.estimate.std_error);
  r.results()["velocity_hat"] = number(a.estimate.velocity_hat);
  r.results()["cascades"] = a.estimate.cascades;
  r.results()["n_max"] = a.estimate.n_max;
  r.results()["log_l_rate"] = {{"mean", number(a.log_l_rate.mean)}, {"std_error", number(a.log_l_rate.std_error)}};
  r.results()["log_l_rate_theory"] = number(a.log_l_rate_theory);
  r.results()["pool_censored"] = {build.pools.minus.censored_count(), build.pools.plus.censored_count()};

  const double tol = c.real("tol");
  r.check_near("velocity_hat", a.estimate.velocity_hat, a.velocity_theory, tol * std::abs(a.velocity_theory),
               "relative tolerance " + format_double(tol));
  r.check_near("kappa_hat", a.estimate.kappa_hat, a.kappa_theory, tol * a.kappa_theory,
               "relative tolerance " + format_double(tol));
}

// ---- theorem-b --------------------------------------------------------------

void run_theorem_b(Report& r) {
  const Config& c = r.config();
  const StableLaw law = law_of(c);
  if (law.degenerate_winding()) throw Error(Errc::kDegenerate, "winding needs rho in (0, 1)");
  const PoolOptions opts = pool_options(c, count_of(c, "pool"));

  lab::TheoremBParams p;
  p.start = start_of(c);
  p.ns = c.integers("n");
  p.paths = count_of(c, "paths");
  p.start_options = opts;
  p.cascade_seed = c.unsigned_integer("seed");
  const bool need_pools = std::any_of(p.ns.begin(), p.ns.end(), [](int n) { return n >= 2; });
  std::optional<PoolBuild> build;
  if (need_pools) build = build_pools(law, opts);
  const lab::TheoremBResult b = lab::theorem_b(law, build ? &build->pools : nullptr, p);

  write_returns_csv(r.file(data_name(c, "starts")), b.starts);
  std::vector<NamedFit> fits;
  std::vector<PredictionRow> preds;
  Json tails = Json::array();
  const double tol = c.real("tol");
  for (const lab::TailStudy& t : b.tails) {
    const std::string stem = "survival_n" + std::to_string(t.n);
    write_curve_csv(r.file(data_name(c, stem)), t.curve);
    r.add_plot({{"name", stem},
                {"file", data_name(c, stem)},
                {"x", "z"},
                {"y", "survival"},
                {"log_x", true},
                {"log_y", true},
                {"overlays",
                 {{{"label", "predicted"}, {"exponent", number(t.predicted.exponent)}, {"logpow", t.predicted.logpow}}}}});
    const std::string n = std::to_string(t.n);
    fits.push_back({"n" + n + "_free", t.free_fit});
    fits.push_back({"n" + n + "_exponent", t.exponent_fit});
    fits.push_back({"n" + n + "_logpow", t.logpow_fit});
    preds.push_back({law, p.start.region(), t.n, t.predicted});
    tails.push_back({{"n", t.n},
                     {"predicted", tail_json(t.predicted)},
                     {"samples", t.samples},
                     {"censored", t.censored},
                     {"free_fit", fit_json(t.free_fit)},
                     {"exponent_fit", fit_json(t.exponent_fit)},
                     {"logpow_fit", fit_json(t.logpow_fit)}});
    r.check_near("exponent of P[T0^(" + n + ") > t]", t.exponent_fit.exponent_hat, t.predicted.exponent,
                 tol * t.predicted.exponent,
                 "log power pinned to " + std::to_string(t.predicted.logpow) + "; relative tolerance " + format_double(tol));
  }
  write_fits_csv(r.file("fits.csv"), fits);
  write_predictions_csv(r.file("predictions.csv"), preds);
  r.results()["constants"] = constants_json(law);
  r.results()["region"] = std::string(to_string(p.start.region()));
  r.results()["tails"] = tails;

  // Log factors must grow with n.
  const lab::TailStudy* lo = nullptr;
  const lab::TailStudy* hi = nullptr;
  for (const lab::TailStudy& t : b.tails) {
    if (!lo || t.n < lo->n) lo = &t;
    if (!hi || t.n > hi->n) hi = &t;
  }
  if (lo && hi && hi->n > lo->n && hi->predicted.logpow > lo->predicted.logpow) {
    const double a = *lo->logpow_fit.logpow_hat;
    const double z = *hi->logpow_fit.logpow_hat;
    r.check({"log-power slope grows from n = " + std::to_string(lo->n) + " to n = " + std::to_string(hi->n), z > a,
             z - a, 0, 0, "difference of pinned-exponent log-power slopes must be positive"});
  }
}

// ---- harmonic ---------------------------------------------------------------

void run_harmonic(Report& r) {
  const Config& c = r.config();
  const StableLaw law = law_of(c);
  lab::HarmonicParams p;
  p.start = start_of(c);
  p.s_values = c.reals("s");
  p.mc_samples = count_of(c, "mc");
  p.start_options = pool_options(c, 0);
  p.quad.rel_tol = c.real("rel_tol");
  const lab::HarmonicResult h = lab::harmonic_study(law, p);
  const double sigmas = c.real("sigmas");
  const double abs_tol = c.real("abs_tol");

  CsvWriter out(r.file("harmonic.csv"), {"s", "closed", "quadrature", "quadrature_error", "mc", "mc_std_error"});
  Json rows = Json::array();
  for (const lab::HarmonicRow& row : h.rows) {
    const MellinValue& q = row.quadrature;
    out.row({format_double(row.s), row.closed ? format_double(row.closed->value) : "", format_double(q.value),
             format_double(q.error_bound), row.mc ? format_double(row.mc->value) : "",
             row.mc ? format_double(row.mc->std_error) : ""});
    Json j{{"s", number(row.s)}, {"quadrature", mellin_json(q)}};
    const std::string at = " at s = " + format_double(row.s);
    if (row.closed) {
      j["closed"] = mellin_json(*row.closed);
      const double gap = std::abs(q.value - row.closed->value);
      // Rounding in the closed form itself is a few ulps.
      const double bound = q.error_bound + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(row.closed->value);
      r.check({"quadrature within its error bound of the closed form" + at, gap <= bound, gap, 0, bound, ""});
      r.check_near("quadrature vs closed form" + at, q.value, row.closed->value, abs_tol);
    }
    if (row.mc) {
      j["mc"] = mellin_json(*row.mc);
      const double se = std::hypot(row.mc->std_error, q.error_bound);
      r.check_near("Monte Carlo vs quadrature" + at, row.mc->value, q.value, sigmas * se,
                   row.mc->nonfinite_variance ? "variance flagged infinite; jackknife error used" : "");
    }
    rows.push_back(j);
  }
  out.close();
  r.results()["start"] = {number(p.start.x), number(p.start.y)};
  r.results()["rows"] = rows;
  r.results()["mc_censored"] = h.mc_censored;
}

// ---- lemma-tails ------------------------------------------------------------

// "nu:n*nu:n" pairs separated by ';'.
std::vector<std::pair<TailClass, TailClass>> parse_pairs(const std::string& text) {
  auto tail = [&](const std::string& s) {
    const auto parts = lab::split_list(s, ':');
    if (parts.size() != 2) throw Error(Errc::kConfigError, "pairs: expected 'nu:n', got '" + s + "'");
    Config tmp;
    tmp.set("nu", parts[0]);
    tmp.set("n", parts[1]);
    return TailClass{tmp.real("nu"), static_cast<int>(tmp.integer("n"))};
  };
  std::vector<std::pair<TailClass, TailClass>> out;
  for (const auto& item : lab::split_list(text, ';')) {
    const auto xy = lab::split_list(item, '*');
    if (xy.size() != 2) throw Error(Errc::kConfigError, "pairs: expected 'nu:n*nu:n', got '" + item + "'");
    out.emplace_back(tail(xy[0]), tail(xy[1]));
  }
  if (out.empty()) throw Error(Errc::kConfigError, "pairs: empty list");
  return out;
}

void run_lemma_tails(Report& r) {
  const Config& c = r.config();
  const auto pairs = parse_pairs(c.text("pairs"));
  const double slope_tol = c.real("slope_tol");
  const double logslope_tol = c.real("logslope_tol");
  Json cases = Json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const lab::LemmaCase lc =
        lab::lemma_case(pairs[i].first, pairs[i].second, c.real("z_lo"), c.real("z_hi"), count_of(c, "points"));
    const std::string name = "lemma_" + std::to_string(i + 1) + ".csv";
    CsvWriter out(r.file(name), {"z", "survival", "error"});
    for (std::size_t k = 0; k < lc.z.size(); ++k)
      out.row({format_double(lc.z[k]), format_double(lc.tail.survival[k]), format_double(lc.tail.error[k])});
    out.close();
    r.add_plot({{"name", "lemma_" + std::to_string(i + 1)},
                {"file", name},
                {"x", "z"},
                {"y", "survival"},
                {"log_x", true},
                {"log_y", true},
                {"overlays",
                 {{{"label", "predicted"}, {"exponent", number(lc.predicted.exponent)}, {"logpow", lc.predicted.logpow}}}}});
    const std::string label = "(" + format_double(lc.x.exponent) + "," + std::to_string(lc.x.logpow) + ")x(" +
                              format_double(lc.y.exponent) + "," + std::to_string(lc.y.logpow) + ")";
    cases.push_back({{"x", tail_json(lc.x)},
                     {"y", tail_json(lc.y)},
                     {"predicted", tail_json(lc.predicted)},
                     {"loglog_slope", number(lc.loglog.slope)},
                     {"logfactor_slope", number(lc.logfactor.slope)},
                     {"file", name}});
    r.check_near("log-log slope " + label, lc.loglog.slope, -lc.predicted.exponent, slope_tol);
    r.check_near("log-factor slope " + label, lc.logfactor.slope, lc.predicted.logpow, logslope_tol);
  }
  r.results()["cases"] = cases;
}

std::vector<Command> commands() {
  auto with = [](std::vector<Knob> base, std::vector<Knob> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  const auto minus_x = common_knobs(-1.0, 0.0);
  const auto minus_y = common_knobs(0.0, -1.0);
  return {
      {"constants", "derived constants, tail predictions and identity audit", with(minus_x, {
           {"grid", "10", "alphas (and rhos per alpha) in the identity audit grid"},
           {"nmax", "3", "largest n in predictions.csv"},
           {"tol", "1e-12", "absolute tolerance of the identities"},
       }), run_constants},
      {"validate-sampler", "characteristic function, sign and variance checks of L_1", with(minus_x, {
           {"samples", "100000", "number of draws"},
           {"lambdas", "-1,0.5,1,2", "characteristic function arguments"},
           {"sigmas", "3", "tolerance in standard errors"},
       }), run_validate_sampler},
      {"sample-returns", "first-return pools from (0, -1) and (0, 1) with Mellin checks", with(minus_x, {
           {"pool", "10000", "uncensored returns per sign"},
           {"s", "0.5,1.25", "Mellin arguments"},
           {"sigmas", "3", "tolerance in standard errors"},
           {"max_censored", "0.05", "largest accepted censored fraction"},
       }), run_sample_returns},
      {"theorem-a", "winding velocity from half-winding cascades", with(minus_x, {
           {"pool", "10000", "uncensored returns per sign"},
           {"cascades", "500", "number of cascades"},
           {"nmax", "100", "hits per cascade"},
           {"start", "pool", "first hit from the pool or from (x, y): pool or general"},
           {"tol", "0.1", "relative tolerance"},
       }), run_theorem_a},
      {"theorem-b", "tails of the n-th half-winding time", with(minus_x, {
           {"n", "1", "hit indices, comma-separated"},
           {"paths", "20000", "first returns from (x, y)"},
           {"pool", "10000", "uncensored returns per sign (n >= 2)"},
           {"tol", "0.2", "relative tolerance on the exponent"},
       }), run_theorem_b},
      {"harmonic", "Mellin transform of the exit speed: closed form, quadrature, Monte Carlo", with(minus_y, {
           {"s", "0.25,0.5,0.75", "Mellin arguments in (0, 1)"},
           {"mc", "20000", "Monte Carlo first returns (0 to skip)"},
           {"rel_tol", "1e-9", "quadrature relative tolerance"},
           {"abs_tol", "1e-3", "closed form agreement"},
           {"sigmas", "3", "Monte Carlo tolerance in standard errors"},
       }), run_harmonic},
      {"lemma-tails", "product-tail oracle against predicted classes", with(minus_x, {
           {"pairs", "0.5:0*0.5:0;0.5:0*1:0", "tail classes nu:n*nu:n, ';'-separated"},
           {"z_lo", "1e6", "grid start"},
           {"z_hi", "1e12", "grid end"},
           {"points", "61", "log-spaced grid points"},
           {"slope_tol", "0.01", "tolerance on the log-log slope"},
           {"logslope_tol", "0.1", "tolerance on the log-factor slope"},
       }), run_lemma_tails},
  };
}

bool usage_error(Errc e) {
  switch (e) {
    case Errc::kConfigError:
    case Errc::kInvalidArgument:
    case Errc::kOutOfRange:
    case Errc::kInadmissible:
    case Errc::kOutsideStrip:
    case Errc::kDegenerate:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kolmo: winding experiments for the stable Kolmogorov process"};
  app.set_version_flag("--version", std::string(kolmo::kVersion) + " (" + kolmo::kRevision + ")");
  app.require_subcommand(1);

  struct Bound {
    CLI::App* sub;
    const Command* cmd;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_file;
  };
  const std::vector<Command> cmds = commands();
  std::vector<Bound> bound(cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    Bound& b = bound[i];
    b.cmd = &cmds[i];
    b.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    b.sub->add_option("--config", b.config_file, "key = value file; flags take precedence")->check(CLI::ExistingFile);
    for (const Knob& k : cmds[i].knobs) {
      b.values[k.key] = k.value;
      b.options[k.key] = b.sub->add_option(flag_name(k.key), b.values[k.key], k.help)->default_str(k.value);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  for (Bound& b : bound) {
    if (!b.sub->parsed()) continue;
    try {
      Config resolved;
      for (const Knob& k : b.cmd->knobs) resolved.set(k.key, k.value);
      if (!b.config_file.empty()) resolved.override_with(Config::load(b.config_file), b.config_file);
      for (const auto& [key, opt] : b.options)
        if (opt->count() > 0) resolved.set(key, b.values[key]);
      Report report(b.cmd->name, resolved, resolved.text("out"));
      b.cmd->run(report);
      report.write();
      for (const lab::Assertion& a : report.assertions())
        std::cout << (a.pass ? "PASS  " : "FAIL  ") << a.name << "  value=" << kolmo::format_double(a.value)
                  << " target=" << kolmo::format_double(a.target) << " tol=" << kolmo::format_double(a.tolerance)
                  << "\n";
      std::cout << "summary: " << resolved.text("out") << "/summary.json\n";
      return report.all_pass() ? kExitPass : kExitFail;
    } catch (const kolmo::Error& e) {
      std::cerr << b.cmd->name << ": " << e.what() << "\n";
      return usage_error(e.code()) ? kExitUsage : kExitFail;
    } catch (const std::exception& e) {
      std::cerr << b.cmd->name << ": " << e.what() << "\n";
      return kExitFail;
    }
  }
  return kExitUsage;
}
