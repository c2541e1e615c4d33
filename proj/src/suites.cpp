#include "hypercount/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercount/asymptotics.hpp"
#include "hypercount/errors.hpp"
#include "hypercount/exact_enum.hpp"
#include "hypercount/sampler.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/special_fn.hpp"
#include "hypercount/tpoisson.hpp"

namespace hypercount {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double log_big(const BigCount& v) {
  // ln of an exact count, through its decimal exponent when it overflows double
  std::string s = v.str();
  if (s.size() < 300) return std::log(v.convert_to<double>());
  double lead = std::stod(s.substr(0, 17)) ;
  return std::log(lead) + (static_cast<double>(s.size()) - 17) * std::log(10.0);
}

// ln C estimate error per vertex at N with R = ceil(N/6)
struct MainVsExact {
  int N, M;
  double ln_exact, ln_estimate, per_vertex;
};

MainVsExact main_vs_exact(int N) {
  int R = (N + 5) / 6;
  int M = N / 2 + R;
  MainVsExact out{N, M, log_big(count_connected_exact(N, M)), main_count_estimate(N, M).log_phi_form, 0};
  out.per_vertex = std::abs(out.ln_estimate - out.ln_exact) / N;
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "decomposition", "samplers", "asymptotics"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int jobs) {
  if (name == "identities") return suite_identities();
  if (name == "decomposition") return suite_decomposition(jobs);
  if (name == "samplers") return suite_samplers(seed, jobs);
  if (name == "asymptotics") return suite_asymptotics(seed);
  throw DomainError("unknown suite '" + name + "'");
}

SuiteReport suite_identities() {
  SuiteReport rep{"identities", {}};

  {
    // the two displayed forms of the global equation
    double worst = 0;
    for (double ratio : {0.501, 0.52, 0.55, 0.6, 0.75, 1.0, 1.5}) {
      double lam = solve_global_lambda_ratio(3 * ratio).lambda;
      worst = std::max(worst, std::abs(global_equation_alt_value(lam) - (6 * ratio - 3)));
    }
    rep.add({"global_equation_forms", {{"M_over_N", "0.501..1.5"}}, {{"max_abs_diff", worst}},
             {{"max", 1e-10}}, worst <= 1e-10});
  }
  {
    double worst = 0;
    for (int i = 1; i <= 10; ++i) {
      double ratio = 0.5 + 0.01 * i;
      double lam = solve_global_lambda_ratio(3 * ratio).lambda;
      double r = solve_bck_r(3, 3 * ratio).r;
      worst = std::max(worst, std::abs(r - std::exp(-lam)));
    }
    rep.add({"bck_r_equals_exp_minus_lambda", {{"M_over_N", "0.51..0.60"}}, {{"max_abs_diff", worst}},
             {{"max", 1e-10}}, worst <= 1e-10});
  }
  {
    double worst = 0;
    for (double lam = 0.01; lam <= 5; lam *= 1.7) {
      worst = std::max(worst, rel_err(f_k(1, lam) * g_k(1, lam), std::expm1(2 * lam)));
      worst = std::max(worst, rel_err(f_k(2, 2 * lam), std::expm1(2 * lam) - 2 * lam));
    }
    rep.add({"f1_g1_identities", {{"lambda", "0.01..5"}}, {{"max_rel_err", worst}}, {{"max", 1e-12}},
             worst <= 1e-12});
  }
  {
    Json obs = Json::object();
    double worst = 0;
    double n = 1e6;
    for (double r : {1e-3, 1e-2, 5e-2}) {
      double m = n / 2 + r * n;
      double fc = fcore(n, m, core_nu1_star(n, m));
      double fp = optimum(n, m).value;
      double e = rel_err(fp, fc);
      obs[std::to_string(r)] = e;
      worst = std::max(worst, e);
    }
    rep.add({"fcore_equals_fpre_at_optimum", {{"n", n}, {"r", {1e-3, 1e-2, 5e-2}}}, obs, {{"max_rel", 1e-9}},
             worst <= 1e-9});
  }
  {
    auto z = hessian_model().H0_times_z1();
    bool zero = std::all_of(z.begin(), z.end(), [](long v) { return v == 0; });
    rep.add({"H0_z1_zero", {{"z1", {1, 1, -3, 0}}}, {{"H0_z1_times_36", z}}, {{"exact", 0}}, zero});
  }
  {
    double worst = 0;
    for (double t : {1.51, 1.6, 2.0, 3.0}) {
      double n = 1000, m = t * n / 3;
      double lam = solve_core_lambda(3 * m / n).lambda;
      double nu1 = 3 * m / g_k(2, lam);
      double c2 = (3 * m - nu1) / (n - nu1);
      worst = std::max(worst, std::abs(solve_tpo_mean(2, c2).lambda - lam));
    }
    rep.add({"core_vs_tpo_mean_consistency", {{"three_m_over_n", {1.51, 1.6, 2.0, 3.0}}},
             {{"max_abs_diff", worst}}, {{"max", 1e-9}}, worst <= 1e-9});
  }
  {
    double worst = 0;
    for (auto [N, M] : std::vector<std::pair<double, double>>{{20, 14}, {40, 27}, {1000, 520}, {1e6, 501000}}) {
      auto e = main_count_estimate(N, M);
      worst = std::max(worst, std::abs(e.log_phi_form - e.log_t_form));
    }
    rep.add({"phi_form_equals_t_form", {{"cases", 4}}, {{"max_log_diff", worst}}, {{"max", 1e-9}},
             worst <= 1e-9});
  }
  {
    double worst = 0;
    double N = 1e4, R = 300;
    for (int i = 1; i <= 20; ++i) {
      double nu = 0.05 + 0.9 * (i - 1) / 19.0;
      auto t = t_of_nu(nu, N, R);
      worst = std::max(worst, rel_err(t.expanded, t.by_definition));
    }
    rep.add({"t_two_forms", {{"N", N}, {"R", R}, {"grid", 20}}, {{"max_rel_err", worst}}, {{"max", 1e-9}},
             worst <= 1e-9});
  }
  return rep;
}

SuiteReport suite_decomposition(int jobs) {
  SuiteReport rep{"decomposition", {}};
  bool with_all = true, without_all = true;
  for (auto [N, M] : std::vector<std::pair<int, int>>{{5, 4}, {6, 4}, {7, 5}}) {
    auto d = check_decomposition(N, M, jobs);
    with_all = with_all && d.lhs == d.rhs_with_binom;
    without_all = without_all && d.lhs == d.rhs_without_binom;
    rep.add({"decomposition_" + std::to_string(N) + "_" + std::to_string(M),
             {{"N", N}, {"M", M}},
             {{"C", dec(d.lhs)},
              {"with_binom", dec(d.rhs_with_binom)},
              {"without_binom", dec(d.rhs_without_binom)},
              {"holds", variant_name(d.holds)}},
             {{"exact", true}},
             d.holds == DecompositionVariant::WithBinom || d.holds == DecompositionVariant::Both});
  }
  {
    auto d = check_decomposition(4, 2, jobs);
    CheckReport c{"decomposition_4_2",
                  {{"N", 4}, {"M", 2}},
                  {{"C", dec(d.lhs)},
                   {"with_binom", dec(d.rhs_with_binom)},
                   {"without_binom", dec(d.rhs_without_binom)},
                   {"holds", variant_name(d.holds)}},
                  {{"note", "core is an isolated cycle, no pre-kernel term"}},
                  true,
                  true};
    rep.add(c);
  }
  std::string variant = with_all && !without_all ? "with_binom" : without_all && !with_all ? "without_binom"
                                                                                              : "ambiguous";
  // frozen regression fixture: the binom(N,n) variant is the one that holds
  rep.add({"decomposition_variant", {{"cases", "(5,4),(6,4),(7,5)"}}, {{"variant", variant}},
           {{"expected", "with_binom"}}, variant == "with_binom"});
  return rep;
}

SuiteReport suite_samplers(std::uint64_t seed, int jobs) {
  SuiteReport rep{"samplers", {}};
  Rng root(seed, 0x73616d70);

  {
    Rng rng = root.split(1);
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      auto s = sample_gcore(3, 2, 2, {4}, rng);
      std::vector<int> deg(3, 0);
      for (const auto& e : s.graph.phi)
        for (int v : e) ++deg[v];
      std::sort(deg.begin(), deg.end());
      ok = deg == std::vector<int>{1, 1, 4};
    }
    rep.add({"gcore_degree_audit", {{"n", 3}, {"m", 2}, {"nu1", 2}, {"d", {4}}}, {{"samples", 200}},
             {{"degrees", {1, 1, 4}}}, ok});
  }
  {
    Rng rng = root.split(2);
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
      auto k = sample_kernel({0}, 1, 0, 0, {3}, rng).kernel;
      ok = k.edges2.empty() && k.edges3.size() == 1 && k.edges3[0] == Triple{0, 0, 0};
    }
    rep.add({"kernel_triple_loop", {{"n3", 1}, {"d", {3}}, {"m3", 1}}, {{"samples", 50}},
             {{"kernel", "single triple loop"}}, ok});
  }
  for (auto [n, m] : std::vector<std::pair<int, int>>{{6, 4}, {7, 5}}) {
    auto census = census_prekernels_bruteforce(n, m, jobs);
    auto est = estimate_gpre(n, m, root.split(100 + n), 20000, jobs);
    double exact = census.total.convert_to<double>();
    double z = (est.value - exact) / est.stderr_;
    rep.add({"gpre_estimate_" + std::to_string(n) + "_" + std::to_string(m),
             {{"n", n}, {"m", m}, {"trials", est.trials}},
             {{"census", dec(census.total)}, {"estimate", est.value}, {"stderr", est.stderr_}, {"z", z}},
             {{"max_abs_z", 3}},
             std::abs(z) <= 3});
  }
  {
    Json obs = Json::object();
    std::vector<double> p;
    for (long K : {4L, 16L, 64L}) {
      auto c = bin_model_connectivity(bin_model_for_K(K), 10000, root.split(200 + K), jobs);
      p.push_back(static_cast<double>(c.successes) / c.trials);
      obs["K" + std::to_string(K)] = p.back();
    }
    bool ok = p[0] <= p[1] && p[1] <= p[2] && p[2] >= 0.99;
    rep.add({"binmodel_connectivity", {{"K", {4, 16, 64}}, {"bins", "N = K"}, {"trials", 10000}}, obs,
             {{"nondecreasing", true}, {"min_at_64", 0.99}}, ok});
  }
  {
    Json obs = Json::object();
    for (long K : {4L, 16L, 64L}) {
      auto c = bin_model_connectivity(bin_model_for_K(K, min_bins_for_K(K)), 10000, root.split(300 + K), jobs);
      obs["K" + std::to_string(K)] = static_cast<double>(c.successes) / c.trials;
    }
    CheckReport c{"binmodel_connectivity_min_bins", {{"K", {4, 16, 64}}, {"bins", "smallest N"}}, obs, {}, true,
                  true};
    rep.add(c);
  }
  {
    // kernel drawn at the pre-kernel optimum; about half the 2-edges meet a degree-2 vertex once
    int n = 2000, m = 1100;
    PreX x = lattice_optimum(n, m);
    PreDerived dv = pre_derived(n, m, x);
    Rng rng = root.split(3);
    double lam = solve_tpo_mean(3, static_cast<double>(dv.Q3) / dv.n3).lambda;
    SigmaEvent ev{dv.n3, dv.Q3, TruncatedPoisson(3, lam)};
    std::vector<long> dl = sample_conditioned(ev, rng);
    std::vector<int> d(dl.begin(), dl.end());
    int nv = static_cast<int>(dv.n3 + x.k1 + x.k2);
    std::vector<int> V(nv);
    for (int i = 0; i < nv; ++i) V[i] = i;
    double worst = 0, mean = 0;
    for (int i = 0; i < 20; ++i) {
      auto k = sample_kernel(V, static_cast<int>(dv.m3), static_cast<int>(x.k1), static_cast<int>(x.k2), d, rng);
      double f = fraction_two_edges_one_deg2(k.kernel);
      mean += f / 20;
      worst = std::max(worst, std::abs(f - 0.5));
    }
    rep.add({"kernel_m2prime_one_half", {{"n", n}, {"m", m}, {"m2prime", dv.m2p}, {"samples", 20}},
             {{"mean_fraction", mean}, {"max_dev_from_half", worst}}, {{"max_dev", 0.1}},
             dv.m2p >= 200 && worst <= 0.1});
  }
  {
    Json obs = Json::array();
    std::vector<TrendPoint> pts;
    std::uint64_t i = 0;
    for (auto [n, m] : trend_schedule()) {
      pts.push_back(prekernel_trend_point(n, m, 20000, root.split(400 + i++), jobs));
      obs.push_back({{"n", n}, {"m", m}, {"p_simple", pts.back().p_simple}, {"p_connected", pts.back().p_connected}});
    }
    bool ok = true;
    for (std::size_t j = 1; j < pts.size(); ++j)
      ok = ok && pts[j].p_simple >= pts[j - 1].p_simple && pts[j].p_connected >= pts[j - 1].p_connected;
    rep.add({"prekernel_trends", {{"schedule", "n in {50,100,200}, m = n/2 + ceil(n^0.8)"}, {"trials", 20000}}, obs,
             {{"nondecreasing", true}}, ok});
  }
  return rep;
}

SuiteReport suite_asymptotics(std::uint64_t seed) {
  SuiteReport rep{"asymptotics", {}};

  {
    double n = 1e7, r = 1e-3;
    double lam = solve_core_lambda(1.5 + 3 * r).lambda;
    rep.add({"lambda_hat_12r", {{"r", r}}, {{"lambda", lam}, {"rel_to_12r", rel_err(lam, 12 * r)}},
             {{"max_rel", 0.02}}, rel_err(lam, 12 * r) <= 0.02});
    bool ok = true;
    Json obs = Json::array();
    for (const auto& row : core_series_check(n, n / 2 + r * n)) {
      ok = ok && row.pass;
      obs.push_back({{"name", row.name}, {"residual", row.residual}, {"margin", row.margin}});
    }
    rep.add({"core_series", {{"r", r}}, obs, {{"per_row", "margin"}}, ok});
    ok = true;
    obs = Json::array();
    for (const auto& row : pre_series_check(optimum(n, n / 2 + r * n))) {
      ok = ok && row.pass;
      obs.push_back({{"name", row.name}, {"residual", row.residual}, {"margin", row.margin}});
    }
    rep.add({"pre_series", {{"r", r}}, obs, {{"per_row", "margin"}}, ok});
  }
  {
    Json obs = Json::array();
    std::vector<double> ratios;
    for (double r : {0.02, 0.01, 0.005}) {
      double n = 1e6;
      auto opt = optimum(n, n / 2 + r * n);
      double res = std::abs(opt.value - fpre_optimum_series(n, r, opt.lambda));
      ratios.push_back(res / std::pow(opt.lambda, 3));
      obs.push_back({{"r", r}, {"residual_over_lambda3", ratios.back()}});
    }
    bool ok = *std::max_element(ratios.begin(), ratios.end()) <= 1.0;
    rep.add({"fpre_optimum_series", {{"r", {0.02, 0.01, 0.005}}}, obs, {{"max_ratio", 1.0}}, ok});
  }
  {
    Json obs = Json::array();
    std::vector<double> e_rho, e_r;
    double n = 1e6;
    for (double r : {0.04, 0.02, 0.01}) {
      auto h = hessian_check(n, n / 2 + r * n);
      e_rho.push_back(h.err_rho / (h.rho * h.rho));
      e_r.push_back(h.err_r / (r * r));
      obs.push_back({{"r", r}, {"E_rho_over_rho2", e_rho.back()}, {"E_r_over_r2", e_r.back()}});
    }
    bool ok = true;
    for (std::size_t i = 1; i < e_rho.size(); ++i) ok = ok && e_rho[i] <= e_rho[i - 1];
    rep.add({"hessian_structure", {{"scale", "rho = lambda/12"}}, obs, {{"nonincreasing", true}}, ok});
    bool r_ok = true;
    for (std::size_t i = 1; i < e_r.size(); ++i) r_ok = r_ok && e_r[i] <= e_r[i - 1];
    CheckReport c{"hessian_structure_literal_r", {{"scale", "r"}}, {{"E_r_over_r2", e_r}}, {{"nonincreasing", true}},
                  r_ok, true};
    rep.add(c);
  }
  {
    double n = 1e6, m = n / 2 + 0.01 * n;
    auto res = maximize_fpre(n, m, 5, seed);
    double worst = 0;
    for (const auto& r : res) worst = std::max(worst, r.max_coord_error);
    rep.add({"maximizer_converges", {{"r", 0.01}, {"starts", 5}}, {{"max_coord_error", worst}}, {{"max", 1e-5}},
             worst <= 1e-5});
  }
  {
    Json obs = Json::array();
    bool ok = true;
    Rng rng(seed, 0x67726164);
    double n = 1e5, m = n / 2 + 0.02 * n;
    auto opt = optimum(n, m);
    double worst = 0;
    int tried = 0;
    while (tried < 10) {
      PreHat x = opt.x;
      x.nu1 *= 1 + 0.02 * (rng.uniform() - 0.5);
      x.k0 *= 1 + 0.02 * (rng.uniform() - 0.5);
      x.k1 *= 1 + 0.2 * (rng.uniform() - 0.5);
      x.k2 *= 1 + 0.4 * (rng.uniform() - 0.5);
      if (!in_region_interior(n, m, x)) continue;
      ++tried;
      Vec4 a = fpre_gradient(n, m, x), b = fpre_gradient_numeric(n, m, x);
      for (int i = 0; i < 4; ++i) worst = std::max(worst, rel_err(std::exp(b[i]), std::exp(a[i])));
    }
    ok = worst <= 1e-6;
    rep.add({"fpre_gradient_closed_form", {{"points", 10}}, {{"max_rel_err_of_exp", worst}}, {{"max", 1e-6}}, ok});
  }
  {
    double base = std::sqrt(2 * std::numbers::pi);
    struct Case {
      double a, b, z;
    };
    double worst = 0;
    Json obs = Json::array();
    for (Case c : {Case{0.5, 0, 0}, Case{0.5, 1, 0}, Case{2, -1, 0}, Case{0.5, 0, 0.37}}) {
      double v = laplace_lattice_sum(c.a, c.b, 0, 0, c.z, 1e3, 30);
      double want = std::exp(c.b * c.b / (4 * c.a)) * std::sqrt(std::numbers::pi / c.a);
      worst = std::max(worst, rel_err(v, want));
      obs.push_back({{"alpha", c.a}, {"beta", c.b}, {"z", c.z}, {"sum", v}, {"closed_form", want}});
    }
    (void)base;
    rep.add({"laplace_lattice_sum", {{"s", 1e3}, {"T", 30}}, obs, {{"max_rel", 0.005}}, worst <= 0.005});
  }
  {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    double d2 = difdeg_identity_check(2, [](double y) { return 1 + y; }, [](double y) { return 3 + 4 * y; }, grid);
    double d3 = difdeg_identity_check(3, [](double y) { return 1 + y; }, [](double y) { return 4 + 4 * y; }, grid);
    double dc = difdeg_identity_check(2, [](double) { return 1.0; }, [](double y) { return 3 + y; }, grid);
    double worst = std::max({d2, d3, dc});
    rep.add({"difdeg_identity", {{"grid", "[0,1] step 0.05"}}, {{"k2", d2}, {"k3", d3}, {"t_const", dc}},
             {{"max", 1e-6}}, worst <= 1e-6});
  }
  {
    auto [pre, ex] = bck_limits_at(3, 1 - 1e-6);
    bool ok = std::abs(pre - std::sqrt(3.0)) <= 1e-3 && std::abs(ex - 1.5) <= 1e-3;
    rep.add({"bck_limits", {{"r", 1 - 1e-6}}, {{"prefactor", pre}, {"exponent", ex}},
             {{"prefactor", std::sqrt(3.0)}, {"exponent", 1.5}, {"tol", 1e-3}}, ok});
  }
  {
    Json obs = Json::array();
    std::vector<double> pv;
    for (int N : {20, 30, 40}) {
      auto c = main_vs_exact(N);
      pv.push_back(c.per_vertex);
      obs.push_back({{"N", N}, {"M", c.M}, {"ln_exact", c.ln_exact}, {"ln_estimate", c.ln_estimate},
                     {"per_vertex_err", c.per_vertex}});
    }
    rep.add({"main_formula_vs_exact", {{"N", {20, 30, 40}}, {"R", "ceil(N/6)"}}, obs, {{"strictly_decreasing", true}},
             pv[1] < pv[0] && pv[2] < pv[1]});
  }
  {
    // fcore concave with its maximum at nu1*
    double n = 1e4, m = 0.6 * n;
    double lo = std::max(0.0, 2 - 3 * m / n), hi = std::min(1.0, m / n);
    double star = core_nu1_star(n, m);
    bool concave = true, signs = true;
    for (int i = 1; i <= 50; ++i) {
      double x = lo + (hi - lo) * i / 51.0;
      double h = 1e-4 * std::min(x - lo, hi - x);
      double d2 = (fcore(n, m, x + h) - 2 * fcore(n, m, x) + fcore(n, m, x - h)) / (h * h);
      double d1 = richardson_derivative([&](double y) { return fcore(n, m, y); }, x, h);
      concave = concave && d2 < 0;
      if (std::abs(x - star) > 1e-3) signs = signs && ((x < star) == (d1 > 0));
    }
    double dstar = richardson_derivative([&](double y) { return fcore(n, m, y); }, star, 1e-4);
    rep.add({"fcore_shape", {{"n", n}, {"m", m}, {"grid", 50}},
             {{"concave", concave}, {"sign_pattern", signs}, {"derivative_at_star", dstar}},
             {{"derivative_max", 1e-8}}, concave && signs && std::abs(dstar) <= 1e-8});
  }
  {
    double N = 1e6, M = 501000, R = M - N / 2;
    auto e = main_count_estimate(N, M);
    auto t = [&](double v) { return t_of_nu(v, N, R).by_definition; };
    double h = 1e-4;
    double d1 = richardson_derivative(t, e.nu_star, h);
    double d2 = (t(e.nu_star + h) - 2 * t(e.nu_star) + t(e.nu_star - h)) / (h * h);
    rep.add({"t_maximum_at_nu_star", {{"N", N}, {"M", M}},
             {{"nu_star", e.nu_star}, {"t_prime", d1}, {"t_second", d2}},
             {{"t_prime_max", 1e-7}, {"t_second_range", {-1.3, -0.7}}},
             std::abs(d1) <= 1e-7 && d2 >= -1.3 && d2 <= -0.7});
  }
  {
    Json obs = Json::array();
    double prev = INFINITY;
    bool ok = true;
    for (int j = 3; j <= 7; ++j) {
      double N = std::pow(10.0, j), M = N / 2 + std::pow(N, 0.7);
      double d = std::abs(bck_count_estimate(N, M).log_value - main_count_estimate(N, M).log_phi_form);
      obs.push_back({{"N", N}, {"abs_log_ratio", d}});
      ok = ok && d < prev;
      prev = d;
    }
    rep.add({"main_vs_bck", {{"R", "N^0.7"}}, obs, {{"decreasing", true}}, ok});
  }
  {
    Json obs = Json::array();
    for (auto [n, m] : std::vector<std::pair<int, int>>{{6, 4}, {8, 5}}) {
      auto census = census_cores_bruteforce(n, m);
      double lb = gcore_upper_bound(n, m), lc = log_big(census.total);
      obs.push_back({{"n", n}, {"m", m}, {"ln_bound", lb}, {"ln_cores", lc}, {"alpha_needed", std::exp(lc - lb)}});
    }
    CheckReport c{"gcore_bound_calibration", {{"alpha", 1}}, obs, {}, true, true};
    rep.add(c);
  }
  return rep;
}

}  // namespace hypercount
