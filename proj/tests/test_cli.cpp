#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool with_stderr = false) {
  std::string cmd = std::string(HYPERCOUNT_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::ordered_json json_of(const Run& r) { return nlohmann::ordered_json::parse(r.out); }

}  // namespace

TEST_CASE("count --exact") {
  auto r = run("count --exact 4 2");
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["command"] == "count");
  CHECK(j["outputs"]["C"] == "6");
  CHECK(j["outputs"]["C"].is_string());
  CHECK(j["elapsed_ms"].is_number_integer());
  CHECK(json_of(run("count --exact 4 1"))["outputs"]["C"] == "0");
  // a count past 2^64 stays exact
  CHECK(json_of(run("count --exact 12 12"))["outputs"]["C"].get<std::string>().size() > 0);
}

TEST_CASE("count --asymptotic, --bck and --all") {
  auto a = json_of(run("count --asymptotic 1000 520"));
  CHECK(std::isfinite(a["outputs"]["lnC"].get<double>()));
  auto b = json_of(run("count --bck 1000 520"));
  CHECK(std::isfinite(b["outputs"]["lnC"].get<double>()));
  auto all = json_of(run("count --all 20 14"));
  CHECK(all["outputs"].contains("lnC_exact"));
  CHECK(all["outputs"].contains("lnC_asymptotic"));
  CHECK(all["outputs"].contains("lnC_bck"));
  CHECK(run("count --exact --bck 4 2").code == 2);
  CHECK(run("count 4 2").code == 2);
}

TEST_CASE("count errors") {
  auto r = run("count --exact 61 10", true);
  CHECK(r.code == 3);
  CHECK(r.out.find("N <= 60") != std::string::npos);
  CHECK(run("count --asymptotic 100 40").code == 2);
  CHECK(run("count --exact -3 2").code == 2);
}

TEST_CASE("forests") {
  auto j = json_of(run("forests 5 1 --k 3 --brute"));
  CHECK(j["outputs"]["count"] == "15");
  CHECK(j["outputs"]["brute"] == "15");
  CHECK(j["outputs"]["match"] == true);
  CHECK(json_of(run("forests 4 1 --k 2"))["outputs"]["count"] == "16");
  CHECK(json_of(run("forests 4 1 --k 3"))["outputs"]["count"] == "0");
  CHECK(run("forests 5 1 --k 1").code == 2);
}

TEST_CASE("census") {
  auto r = run("census 4 3");
  CHECK(r.code == 0);
  CHECK(r.out == "n,m,nu1,k0,k1,k2,count\n4,3,0,0,0,3,4\n");
  CHECK(run("census 9 6").code == 3);
}

TEST_CASE("validate") {
  auto id = run("validate --suite identities");
  CHECK(id.code == 0);
  auto j = json_of(id);
  CHECK(j["outputs"]["pass"] == true);
  auto dec = json_of(run("validate --suite decomposition"));
  CHECK(dec["outputs"]["pass"] == true);
  CHECK(run("validate --suite nonsense").code == 2);
}

TEST_CASE("validate samplers is deterministic under a seed") {
  auto a = json_of(run("validate --suite samplers --seed 7"));
  auto b = json_of(run("validate --suite samplers --seed 7"));
  a.erase("elapsed_ms");
  b.erase("elapsed_ms");
  CHECK(a == b);
  CHECK(a["seed"] == 7);
}

TEST_CASE("sample prekernel is byte-identical under a seed") {
  auto a = run("sample prekernel 12 9 3 1 2 1 --seed 4");
  auto b = run("sample prekernel 12 9 3 1 2 1 --seed 4");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("12 9\n", 0) == 0);
  auto c = run("sample prekernel 12 9 3 1 2 1 --seed 5");
  CHECK(c.out != a.out);
}

TEST_CASE("sample core and kernel") {
  auto r = run("sample core 5 2 3", true);
  CHECK(r.code == 2);
  CHECK(r.out.find("nu1 exceeds m") != std::string::npos);
  auto c = run("sample core 3 2 2 --degrees 4 --seed 1");
  CHECK(c.code == 0);
  CHECK(c.out.rfind("3 2\n", 0) == 0);
  auto k = run("sample kernel 1 0 0 --degrees 3 --seed 1");
  CHECK(k.out == "1 0 1\n1 1 1\n");
}

TEST_CASE("sample trials emit CSV") {
  auto r = run("sample binmodel 64 --trials 10000 --seed 2");
  REQUIRE(r.code == 0);
  auto nl = r.out.find('\n');
  CHECK(r.out.substr(0, nl) == "param-hash,trials,successes,stderr,fraction");
  std::string row = r.out.substr(nl + 1);
  std::array<std::string, 5> cells;
  std::size_t pos = 0;
  for (int i = 0; i < 5; ++i) {
    std::size_t next = row.find_first_of(",\n", pos);
    cells[i] = row.substr(pos, next - pos);
    pos = next + 1;
  }
  CHECK(cells[1] == "10000");
  CHECK(std::stod(cells[4]) >= 0.99);
  auto again = run("sample binmodel 64 --trials 10000 --seed 2");
  CHECK(again.out == r.out);
}

TEST_CASE("RunReport JSON round-trips") {
  auto r = run("count --exact 6 4");
  auto j = json_of(r);
  CHECK(nlohmann::ordered_json::parse(j.dump()) == j);
  CHECK(j.contains("inputs"));
  CHECK(j["inputs"]["N"] == 6);
  CHECK(j["outputs"]["C"] == "3600");
}
