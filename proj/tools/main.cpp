// hypercount command-line front end.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypercount/asymptotics.hpp"
#include "hypercount/errors.hpp"
#include "hypercount/exact_enum.hpp"
#include "hypercount/report.hpp"
#include "hypercount/sampler.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/suites.hpp"
#include "hypercount/tpoisson.hpp"

using namespace hypercount;

namespace {

enum Exit { kOk = 0, kCheckFail = 1, kDomain = 2, kResource = 3 };

using Clock = std::chrono::steady_clock;

struct RunReport {
  std::string command;
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::optional<std::uint64_t> seed;
  Clock::time_point start = Clock::now();

  void emit() const {
    Json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    if (seed) j["seed"] = *seed;
    std::cout << j.dump() << '\n';
  }
};

std::string param_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void emit_stats_csv(const std::string& params, long trials, long successes) {
  double p = trials ? static_cast<double>(successes) / trials : 0.0;
  double se = trials ? std::sqrt(p * (1 - p) / trials) : 0.0;
  std::cout << "param-hash,trials,successes,stderr,fraction\n"
            << param_hash(params) << ',' << trials << ',' << successes << ',' << se << ',' << p << '\n';
}

// exact connected counts, optionally read from and written to a fixture directory
BigCount connected_count(int N, int M, std::string& source) {
  const char* dir = std::getenv("HYPERCOUNT_ORACLE_DIR");
  std::filesystem::path file;
  if (dir && *dir) {
    file = std::filesystem::path(dir) / ("connected_" + std::to_string(N) + "_" + std::to_string(M) + ".txt");
    std::ifstream in(file);
    std::string text;
    if (in >> text) {
      source = "cache";
      return BigCount(text);
    }
  }
  BigCount c = count_connected_exact(N, M);
  source = "computed";
  if (!file.empty()) {
    std::ofstream out(file);
    if (out) out << c << '\n';
  }
  return c;
}

double log_count(const BigCount& c) {
  std::string s = c.str();
  if (s.size() < 300) return std::log(c.convert_to<double>());
  return std::log(std::stod(s.substr(0, 17))) + (static_cast<double>(s.size()) - 17) * std::log(10.0);
}

std::vector<int> draw_degrees(int count, long total, int k, Rng& rng) {
  if (count == 0) {
    if (total != 0) throw DomainError("degree sum must be 0 when there are no vertices");
    return {};
  }
  double c = static_cast<double>(total) / count;
  double lam = c > k ? solve_tpo_mean(k, c).lambda : 0.0;
  SigmaEvent ev{count, total, TruncatedPoisson(k, lam)};
  auto d = sample_conditioned(ev, rng);
  return {d.begin(), d.end()};
}

void print_kernel(const Kernel& k) {
  std::cout << k.vertices.size() << ' ' << k.edges2.size() << ' ' << k.edges3.size() << '\n';
  for (const auto& e : k.edges2) std::cout << e[0] + 1 << ' ' << e[1] + 1 << '\n';
  for (const auto& e : k.edges3) std::cout << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
}

bool kernel_loopless(const Kernel& k) {
  for (const auto& e : k.edges2)
    if (e[0] == e[1]) return false;
  for (const auto& e : k.edges3)
    if (e[0] == e[1] || e[1] == e[2] || e[0] == e[2]) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and asymptotic counts of connected 3-uniform hypergraphs"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for samplers and censuses")->check(CLI::PositiveNumber);

  // count
  auto* count = app.add_subcommand("count", "connected (N,M) hypergraphs");
  int cN = 0, cM = 0;
  bool c_exact = false, c_asym = false, c_bck = false, c_all = false;
  count->add_option("N", cN)->required();
  count->add_option("M", cM)->required();
  auto* mode = count->add_option_group("mode");
  mode->add_flag("--exact", c_exact);
  mode->add_flag("--asymptotic", c_asym);
  mode->add_flag("--bck", c_bck);
  mode->add_flag("--all", c_all);
  mode->require_option(1);

  // forests
  auto* forests = app.add_subcommand("forests", "rooted forests of k-edges on [N] with roots [n]");
  long fN = 0, fn = 0;
  int fk = 3;
  bool f_brute = false;
  forests->add_option("N", fN)->required();
  forests->add_option("n", fn)->required();
  forests->add_option("--k", fk, "edge size");
  forests->add_flag("--brute", f_brute, "also enumerate (N <= 7)");

  // census
  auto* census = app.add_subcommand("census", "connected pre-kernels on [n] with m edges, CSV");
  int sn = 0, sm = 0;
  census->add_option("n", sn)->required();
  census->add_option("m", sm)->required();

  // validate
  auto* validate = app.add_subcommand("validate", "run a check suite");
  std::string suite;
  std::uint64_t seed = 1;
  validate->add_option("--suite", suite)->required()->check(CLI::IsMember(suite_names()));
  validate->add_option("--seed", seed);

  // sample
  auto* sample = app.add_subcommand("sample", "configuration-model samplers");
  sample->require_subcommand(1);
  long trials = 0;
  std::vector<int> degrees;
  auto common = [&](CLI::App* s) {
    s->add_option("--seed", seed);
    s->add_option("--trials", trials, "run repeatedly and emit statistics CSV");
  };
  auto* s_core = sample->add_subcommand("core", "Gcore: n m nu1");
  int a_n = 0, a_m = 0, a_nu1 = 0, a_k0 = 0, a_k1 = 0, a_k2 = 0, a_m3 = 0;
  s_core->add_option("n", a_n)->required();
  s_core->add_option("m", a_m)->required();
  s_core->add_option("nu1", a_nu1)->required();
  s_core->add_option("--degrees", degrees, "degrees of the n - nu1 vertices outside V1")->delimiter(',');
  common(s_core);
  auto* s_kernel = sample->add_subcommand("kernel", "kernel: m3 k1 k2 --degrees d");
  s_kernel->add_option("m3", a_m3)->required();
  s_kernel->add_option("k1", a_k1)->required();
  s_kernel->add_option("k2", a_k2)->required();
  s_kernel->add_option("--degrees", degrees, "degrees (>= 3) of the remaining vertices")->delimiter(',')->required();
  common(s_kernel);
  auto* s_pre = sample->add_subcommand("prekernel", "Gpre: n m nu1 k0 k1 k2");
  s_pre->add_option("n", a_n)->required();
  s_pre->add_option("m", a_m)->required();
  s_pre->add_option("nu1", a_nu1)->required();
  s_pre->add_option("k0", a_k0)->required();
  s_pre->add_option("k1", a_k1)->required();
  s_pre->add_option("k2", a_k2)->required();
  s_pre->add_option("--degrees", degrees, "degrees (>= 3) of the kernel vertices")->delimiter(',');
  common(s_pre);
  auto* s_bin = sample->add_subcommand("binmodel", "left/right bin model with K across-edges");
  long K = 0, bins = -1;
  s_bin->add_option("K", K)->required();
  s_bin->add_option("--bins", bins, "all-3 bins per side (default K)");
  common(s_bin);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }

  try {
    if (*count) {
      RunReport rep{"count"};
      rep.inputs = {{"N", cN}, {"M", cM}};
      if (c_exact || c_all) {
        std::string source;
        BigCount c = connected_count(cN, cM, source);
        rep.outputs["C"] = dec(c);
        rep.outputs["source"] = source;
        if (c_all && c > 0) rep.outputs["lnC_exact"] = log_count(c);
      }
      if (c_asym || c_all) {
        auto e = main_count_estimate(cN, cM);
        rep.outputs[c_all ? "lnC_asymptotic" : "lnC"] = e.log_phi_form;
        rep.outputs["lambda"] = e.lambda;
        rep.outputs["nu_star"] = e.nu_star;
      }
      if (c_bck || c_all) {
        auto b = bck_count_estimate(cN, cM);
        rep.outputs[c_all ? "lnC_bck" : "lnC"] = b.log_value;
        rep.outputs["r"] = b.r;
      }
      if (c_all) {
        double la = rep.outputs["lnC_asymptotic"], lb = rep.outputs["lnC_bck"];
        rep.outputs["ratio_asymptotic_bck"] = std::exp(la - lb);
        if (rep.outputs.contains("lnC_exact")) {
          double le = rep.outputs["lnC_exact"];
          rep.outputs["ratio_asymptotic_exact"] = std::exp(la - le);
          rep.outputs["ratio_bck_exact"] = std::exp(lb - le);
        }
      }
      rep.emit();
      return kOk;
    }
    if (*forests) {
      RunReport rep{"forests"};
      rep.inputs = {{"N", fN}, {"n", fn}, {"k", fk}};
      BigCount c = count_forests(fN, fn, fk);
      rep.outputs["count"] = dec(c);
      int code = kOk;
      if (f_brute) {
        BigCount b = count_forests_bruteforce(static_cast<int>(fN), static_cast<int>(fn), fk);
        rep.outputs["brute"] = dec(b);
        rep.outputs["match"] = b == c;
        if (b != c) code = kCheckFail;
      }
      rep.emit();
      return code;
    }
    if (*census) {
      std::cout << census_csv(census_prekernels_bruteforce(sn, sm, jobs));
      return kOk;
    }
    if (*validate) {
      RunReport rep{"validate"};
      rep.seed = seed;
      rep.inputs = {{"suite", suite}, {"seed", seed}};
      SuiteReport s = run_suite(suite, seed, jobs);
      rep.outputs = to_json(s);
      rep.emit();
      return s.all_pass() ? kOk : kCheckFail;
    }
    if (*sample) {
      Rng rng(seed, 0x636c69);
      if (*s_core) {
        if (a_nu1 > a_m) throw DomainError("nu1 exceeds m");
        if (a_nu1 < 0 || a_nu1 > a_n) throw DomainError("nu1 must lie in [0, n]");
        std::vector<int> d = degrees;
        std::string params = "core " + std::to_string(a_n) + " " + std::to_string(a_m) + " " + std::to_string(a_nu1);
        if (trials > 0) {
          long ok = 0;
          for (long t = 0; t < trials; ++t) {
            Rng r = rng.split(static_cast<std::uint64_t>(t));
            auto dd = degrees.empty() ? draw_degrees(a_n - a_nu1, 3L * a_m - a_nu1, 2, r) : d;
            ok += is_simple(sample_gcore(a_n, a_m, a_nu1, dd, r).graph);
          }
          emit_stats_csv(params + " seed " + std::to_string(seed), trials, ok);
          return kOk;
        }
        if (d.empty()) d = draw_degrees(a_n - a_nu1, 3L * a_m - a_nu1, 2, rng);
        write_multigraph(std::cout, sample_gcore(a_n, a_m, a_nu1, d, rng).graph);
        return kOk;
      }
      if (*s_kernel) {
        int nv = static_cast<int>(degrees.size()) + a_k1 + a_k2;
        std::vector<int> V(nv);
        for (int i = 0; i < nv; ++i) V[i] = i;
        if (trials > 0) {
          long ok = 0;
          for (long t = 0; t < trials; ++t) {
            Rng r = rng.split(static_cast<std::uint64_t>(t));
            ok += kernel_loopless(sample_kernel(V, a_m3, a_k1, a_k2, degrees, r).kernel);
          }
          emit_stats_csv("kernel " + std::to_string(a_m3) + " " + std::to_string(a_k1) + " " + std::to_string(a_k2) +
                             " seed " + std::to_string(seed),
                         trials, ok);
          return kOk;
        }
        print_kernel(sample_kernel(V, a_m3, a_k1, a_k2, degrees, rng).kernel);
        return kOk;
      }
      if (*s_pre) {
        PreX x{a_nu1, a_k0, a_k1, a_k2};
        check_region(a_n, a_m, x);
        if (trials > 0) {
          auto c = prekernel_success(a_n, a_m, x, trials, rng, jobs);
          emit_stats_csv("prekernel " + std::to_string(a_n) + " " + std::to_string(a_m) + " " + std::to_string(a_nu1) +
                             " " + std::to_string(a_k0) + " " + std::to_string(a_k1) + " " + std::to_string(a_k2) +
                             " seed " + std::to_string(seed),
                         c.trials, c.successes);
          return kOk;
        }
        PreDerived dv = pre_derived(a_n, a_m, x);
        std::vector<int> d = degrees;
        if (d.empty()) d = draw_degrees(static_cast<int>(dv.n3), dv.Q3, 3, rng);
        write_multigraph(std::cout, sample_prekernel(a_n, a_m, x, d, rng));
        return kOk;
      }
      if (*s_bin) {
        BinModel b = bin_model_for_K(K, bins);
        std::string params = "binmodel K " + std::to_string(K) + " bins " + std::to_string(b.ts.size()) + " seed " +
                             std::to_string(seed);
        if (trials > 0) {
          auto c = bin_model_connectivity(b, trials, rng, jobs);
          emit_stats_csv(params, c.trials, c.successes);
          return kOk;
        }
        RunReport rep{"sample binmodel"};
        rep.seed = seed;
        rep.inputs = {{"K", K}, {"bins", b.ts.size()}, {"L", b.L}};
        rep.outputs["connected"] = sample_bin_model(b, rng);
        rep.emit();
        return kOk;
      }
    }
  } catch (const ResourceError& e) {
    std::cerr << "resource bound: " << e.what() << '\n';
    return kResource;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
