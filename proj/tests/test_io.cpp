#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "swl/weight.hpp"

using namespace swl;

namespace {

WeightTree make_tree(int d, int N, int K, const char* kernel = nullptr) {
  BuildParams bp;
  bp.d = d;
  bp.N = N;
  bp.K = K;
  bp.kernel = kernel ? kernel_from_id(kernel) : riesz_kernel(d, 1);
  bp.cones = find_cones(bp.kernel);
  if (bp.kernel.kind == KernelKind::Registry) bp.selection = ChildSelection::CapCone;
  return build(bp);
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("round-trip is bit-exact across the build matrix") {
  for (auto [d, N, K] : std::vector<std::array<int, 3>>{{1, 2, 1}, {1, 3, 2}, {2, 2, 1}}) {
    WeightTree t = make_tree(d, N, K);
    const std::string s1 = serialize(t);
    WeightTree u = deserialize(s1);
    const std::string s2 = serialize(u);
    CHECK(s1 == s2);
    CHECK(u.A == t.A);
    CHECK(u.total_mass == t.total_mass);
    for (int k = 0; k <= K; ++k) {
      REQUIRE(u.gens[k].nodes.size() == t.gens[k].nodes.size());
      for (std::size_t i = 0; i < u.gens[k].nodes.size(); ++i) {
        CHECK(u.gens[k].nodes[i].i1 == t.gens[k].nodes[i].i1);
        CHECK(u.gens[k].nodes[i].coords == t.gens[k].nodes[i].coords);
      }
    }
  }
}

TEST_CASE("round-trip covers cap-cone registry kernels") {
  WeightTree t = make_tree(2, 2, 1, "sin3");
  WeightTree u = deserialize(serialize(t));
  CHECK(serialize(u) == serialize(t));
}

TEST_CASE("tampered alpha chain is rejected") {
  WeightTree t = make_tree(1, 2, 1);
  // alpha = ["9/4","81/16"]: break the chain
  std::string s = replace_once(serialize(t), "\"81/16\"", "\"82/16\"");
  CHECK_THROWS_AS(deserialize(s), FormatError);
}

TEST_CASE("tampered total mass is rejected") {
  WeightTree t = make_tree(1, 2, 1);
  std::string s = replace_once(serialize(t), "\"total_mass\":\"1\"", "\"total_mass\":\"2\"");
  CHECK_THROWS_AS(deserialize(s), FormatError);
}

TEST_CASE("wrong version and format are rejected") {
  WeightTree t = make_tree(1, 2, 1);
  CHECK_THROWS_AS(deserialize(replace_once(serialize(t), "\"version\":1", "\"version\":9")),
                  FormatError);
  CHECK_THROWS_AS(deserialize(replace_once(serialize(t), "swl-tree", "swl-shrub")), FormatError);
  CHECK_THROWS_AS(deserialize("this is not json"), FormatError);
}

TEST_CASE("cross-dimension mixups are rejected by the header") {
  WeightTree t = make_tree(2, 2, 1);
  // claim the 2-d tree was built with the 1-d kernel
  std::string s = replace_once(serialize(t), "riesz:d=2,j=1", "hilbert");
  CHECK_THROWS_AS(deserialize(s), FormatError);
}

TEST_CASE("sigma inconsistent with the branch rule is rejected") {
  WeightTree t = make_tree(1, 2, 1);
  // flip one node's sign without flipping sigma
  std::string s = replace_once(serialize(t), "\"s\":-1,\"sg\":0", "\"s\":1,\"sg\":0");
  CHECK_THROWS_AS(deserialize(s), FormatError);
}

TEST_CASE("save and load through the filesystem") {
  WeightTree t = make_tree(1, 3, 1);
  const std::string path = "test_tree_roundtrip.json";
  save_tree(t, path);
  WeightTree u = load_tree(path);
  CHECK(serialize(u) == serialize(t));
  std::remove(path.c_str());
}
