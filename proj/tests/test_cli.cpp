#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
  const char* p = std::getenv("SWL_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int status;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int rc = pclose(pipe);
  return {WEXITSTATUS(rc), out};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

}  // namespace

TEST_CASE("cones: hilbert prints the two-point sphere") {
  auto r = run("cones --kernel hilbert");
  CHECK(r.status == 0);
  CHECK(r.out.find("z+ = [1") != std::string::npos);
  CHECK(r.out.find("z- = [-1") != std::string::npos);
}

TEST_CASE("cones: the constant kernel exits 2") {
  auto r = run("cones --kernel const");
  CHECK(r.status == 2);
}

TEST_CASE("build then verify round-trips green") {
  auto b = run("build -d 1 -N 3 -K 2 --kernel hilbert -o cli_w.json");
  CHECK(b.status == 0);
  auto v = run("verify cli_w.json");
  CHECK(v.status == 0);
  CHECK(v.out.find("all invariants hold") != std::string::npos);
}

TEST_CASE("verify rejects a corrupted tree with exit 1") {
  auto b = run("build -d 1 -N 2 -K 1 --kernel hilbert -o cli_w2.json");
  REQUIRE(b.status == 0);
  std::string text = slurp("cli_w2.json");
  // flip one node's branch consistently so the file loads but the
  // recomputed I1 sign disagrees
  auto pos = text.find("\"s\":-1,\"sg\":0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 13, "\"s\":1,\"sg\":1");
  spit("cli_w2.json", text);
  auto v = run("verify cli_w2.json");
  CHECK(v.status == 1);
  CHECK(v.out.find("sign-matching") != std::string::npos);
}

TEST_CASE("operator emits the documented CSV schema") {
  run("build -d 1 -N 2 -K 1 --kernel hilbert -o cli_w3.json");
  auto r = run("operator cli_w3.json --ratios -o cli_ratios.csv");
  CHECK(r.status == 0);
  const std::string csv = slurp("cli_ratios.csv");
  CHECK(csv.rfind("d,N,K,generation,node_id,x,I1,I2,II1,II2,III,total,ratio,ratio_over_N,"
                  "quad_err",
                  0) == 0);
}

TEST_CASE("oversized builds trip the resource guard with exit 3") {
  auto r = run("build -d 1 -N 8 -K 2 --kernel hilbert -o cli_huge.json");
  CHECK(r.status == 3);
}

TEST_CASE("unknown config keys exit 2") {
  spit("cli_bad_config.json", "{\"frobnicate\":1}");
  auto r = run("--config cli_bad_config.json cones --kernel hilbert");
  CHECK(r.status == 2);
}

TEST_CASE("rh subcommand reproduces the divergent series") {
  auto r = run("rh -d 1 -N 3 --A 9 --eps 1 --terms 40 -o cli_rh.json");
  CHECK(r.status == 0);
  const std::string j = slurp("cli_rh.json");
  CHECK(j.find("\"diverges\":true") != std::string::npos);
}

TEST_CASE("plot renders a d=2 support svg") {
  run("build -d 2 -N 2 -K 1 --kernel riesz:d=2,j=1 -o cli_w4.json");
  auto r = run("plot cli_w4.json -o cli_plot.svg");
  CHECK(r.status == 0);
  const std::string svg = slurp("cli_plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  // one filled J-rect per node: 1 + 9 at K=1
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("#e74c3c", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 10);
}

TEST_CASE("reruns are byte-identical") {
  run("build -d 1 -N 2 -K 1 --kernel hilbert -o cli_rep1.json");
  run("build -d 1 -N 2 -K 1 --kernel hilbert -o cli_rep2.json");
  CHECK(slurp("cli_rep1.json") == slurp("cli_rep2.json"));
  run("operator cli_rep1.json --ratios -o cli_rep1.csv");
  run("operator cli_rep1.json --ratios -o cli_rep2.csv");
  CHECK(slurp("cli_rep1.csv") == slurp("cli_rep2.csv"));
}
