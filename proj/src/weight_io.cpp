#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swl/weight.hpp"

namespace swl {
namespace {

using nlohmann::json;

const char* selection_name(ChildSelection s) {
  return s == ChildSelection::FullCone ? "full_cone" : "cap_cone";
}
const char* truncation_name(Truncation t) {
  return t == Truncation::LeafUniform ? "leaf_uniform" : "drop_tail";
}
const char* tie_name(TieBreak t) { return t == TieBreak::Positive ? "positive" : "negative"; }

void write_dpoint(std::ostream& os, const DPoint& p, int d) {
  os << '[';
  for (int i = 0; i < d; ++i) {
    if (i) os << ',';
    os << double_to_string(p[i]);
  }
  os << ']';
}

}  // namespace

std::string serialize(const WeightTree& t) {
  const int d = t.params.d;
  std::ostringstream os;
  os << "{\"format\":\"swl-tree\",\"version\":1,\n\"header\":{";
  os << "\"d\":" << d << ",\"N\":" << t.params.N << ",\"K\":" << t.params.K;
  os << ",\"kernel\":\"" << t.params.kernel.id << "\"";
  os << ",\"adjoint\":" << (t.params.adjoint_flag ? "true" : "false");
  os << ",\"cones\":{\"z_plus\":";
  write_dpoint(os, t.params.cones.z_plus, d);
  os << ",\"z_minus\":";
  write_dpoint(os, t.params.cones.z_minus, d);
  os << ",\"cap_radius\":" << double_to_string(t.params.cones.cap_radius);
  os << ",\"lambda\":" << double_to_string(t.params.cones.lambda);
  os << ",\"tau\":[";
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << int(t.params.cones.tau[i]);
  os << "]}";
  os << ",\"selection\":\"" << selection_name(t.params.selection) << "\"";
  os << ",\"truncation\":\"" << truncation_name(t.params.truncation) << "\"";
  os << ",\"tie_break\":\"" << tie_name(t.params.tie_break) << "\"";
  os << ",\"tie_eps\":" << double_to_string(t.params.tie_eps);
  os << "},\n";
  os << "\"A\":" << t.A << ",\"a\":\"" << rational_to_string(t.a) << "\",";
  os << "\"alpha\":[";
  for (std::size_t k = 0; k < t.alpha.size(); ++k)
    os << (k ? "," : "") << '"' << rational_to_string(t.alpha[k]) << '"';
  os << "],\"total_mass\":\"" << rational_to_string(t.total_mass) << "\",\n";
  os << "\"child_offsets\":[";
  for (std::size_t i = 0; i < t.child_offsets.size(); ++i) {
    os << (i ? ",[" : "[");
    for (int a = 0; a < d; ++a) os << (a ? "," : "") << t.child_offsets[i][a];
    os << ']';
  }
  os << "],\n\"nodes\":[";
  for (int k = 0; k < int(t.gens.size()); ++k) {
    os << (k ? ",\n[" : "\n[");
    const auto& nodes = t.gens[k].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const TreeNode& n = nodes[i];
      os << (i ? ",{" : "{") << "\"c\":[";
      for (int a = 0; a < d; ++a) os << (a ? "," : "") << n.coords[a];
      os << "],\"i1\":" << double_to_string(n.i1) << ",\"s\":" << int(n.i1_sign)
         << ",\"sg\":" << int(n.sigma_mask) << '}';
    }
    os << ']';
  }
  os << "]}\n";
  return os.str();
}

WeightTree deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("tree file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "swl-tree") throw FormatError("not a swl-tree file");
    if (j.value("version", 0) != 1) throw FormatError("unsupported tree file version");
    const json& h = j.at("header");

    BuildParams p;
    p.d = h.at("d").get<int>();
    p.N = h.at("N").get<int>();
    p.K = h.at("K").get<int>();
    if (p.d < 1 || p.d > kMaxDim || p.N < 2 || p.K < 0 || p.N * (p.K + 1) > kMaxLevel)
      throw FormatError("header dimensions out of range");
    const std::string kid = h.at("kernel").get<std::string>();
    p.kernel = kernel_from_id(kid);
    if (h.at("adjoint").get<bool>()) {
      p.kernel = adjoint_of(p.kernel);
      p.adjoint_flag = true;
    }
    if (p.kernel.d != p.d) throw FormatError("kernel dimension does not match header");
    const json& c = h.at("cones");
    for (int i = 0; i < p.d; ++i) {
      p.cones.z_plus[i] = c.at("z_plus").at(i).get<double>();
      p.cones.z_minus[i] = c.at("z_minus").at(i).get<double>();
      p.cones.tau[i] = int8_t(c.at("tau").at(i).get<int>());
    }
    p.cones.cap_radius = c.at("cap_radius").get<double>();
    p.cones.lambda = c.at("lambda").get<double>();
    const std::string sel = h.at("selection").get<std::string>();
    if (sel == "full_cone")
      p.selection = ChildSelection::FullCone;
    else if (sel == "cap_cone")
      p.selection = ChildSelection::CapCone;
    else
      throw FormatError("unknown selection mode");
    const std::string tr = h.at("truncation").get<std::string>();
    if (tr == "leaf_uniform")
      p.truncation = Truncation::LeafUniform;
    else if (tr == "drop_tail")
      p.truncation = Truncation::DropTail;
    else
      throw FormatError("unknown truncation mode");
    const std::string tb = h.at("tie_break").get<std::string>();
    if (tb == "positive")
      p.tie_break = TieBreak::Positive;
    else if (tb == "negative")
      p.tie_break = TieBreak::Negative;
    else
      throw FormatError("unknown tie break");
    p.tie_eps = h.at("tie_eps").get<double>();

    WeightTree t;
    t.params = p;
    t.A = j.at("A").get<int64_t>();
    t.a = rational_from_string(j.at("a").get<std::string>());
    if (t.a != Rational(pow3_big(p.N * p.d), BigInt(t.A) + 1))
      throw FormatError("density ratio a does not match A");

    const json& al = j.at("alpha");
    if (int(al.size()) != p.K + 1) throw FormatError("alpha table has the wrong length");
    Rational prev(1);
    for (int k = 0; k <= p.K; ++k) {
      t.alpha.push_back(rational_from_string(al.at(k).get<std::string>()));
      if (t.alpha[k] != prev * t.a) throw FormatError("alpha chain violates alpha_k = a^(k+1)");
      prev = t.alpha[k];
    }

    const json& off = j.at("child_offsets");
    if (int64_t(off.size()) != t.A) throw FormatError("child offset count differs from A");
    const int64_t f = pow3_i64(p.N - 1);
    for (const auto& o : off) {
      std::array<int64_t, kMaxDim> m{};
      for (int i = 0; i < p.d; ++i) {
        m[i] = o.at(i).get<int64_t>();
        if (m[i] < 0 || m[i] >= f) throw FormatError("child offset out of range");
      }
      t.child_offsets.push_back(m);
    }

    const json& gens = j.at("nodes");
    if (int(gens.size()) != p.K + 1) throw FormatError("generation count differs from K+1");
    uint64_t expect = 1;
    t.gens.resize(p.K + 1);
    for (int k = 0; k <= p.K; ++k) {
      const json& gn = gens.at(k);
      if (gn.size() != expect) throw FormatError("generation size differs from A^k");
      expect *= uint64_t(t.A);
      const int64_t range = pow3_i64(p.N * k);
      for (const auto& nj : gn) {
        TreeNode n;
        for (int i = 0; i < p.d; ++i) {
          n.coords[i] = nj.at("c").at(i).get<int64_t>();
          if (n.coords[i] < 0 || n.coords[i] >= range)
            throw FormatError("node coordinates out of range");
        }
        n.i1 = nj.at("i1").get<double>();
        n.i1_sign = int8_t(nj.at("s").get<int>());
        if (n.i1_sign < -1 || n.i1_sign > 1) throw FormatError("bad i1 sign");
        n.sigma_mask = uint8_t(nj.at("sg").get<int>());
        if (n.sigma_mask !=
            detail::sigma_mask_for_branch(p.cones, p.d, detail::branch_of(n, p.tie_break)))
          throw FormatError("sigma inconsistent with the branch rule");
        t.gens[k].nodes.push_back(n);
      }
      // lexicographic order and (k >= 1) parent/offset membership
      for (std::size_t i = 0; i < t.gens[k].nodes.size(); ++i) {
        if (i > 0) {
          const auto& a = t.gens[k].nodes[i - 1].coords;
          const auto& b = t.gens[k].nodes[i].coords;
          bool less = false;
          for (int x = 0; x < p.d; ++x) {
            if (a[x] != b[x]) {
              less = a[x] < b[x];
              break;
            }
          }
          if (!less) throw FormatError("nodes are not in lexicographic order");
        }
        if (k >= 1) {
          TriadicAddress me;
          me.dim = p.d;
          me.level = p.N * k;
          me.coords = t.gens[k].nodes[i].coords;
          TriadicAddress anc = me.ancestor(p.N * (k - 1));
          std::size_t pi = t.node_index(k - 1, anc.coords);
          if (pi == std::size_t(-1)) throw FormatError("node has no parent in the tree");
          const TreeNode& par = t.gens[k - 1].nodes[pi];
          // invert the child map to recover the offset
          std::array<int64_t, kMaxDim> m{};
          const int64_t ff = pow3_i64(p.N - 1);
          for (int x = 0; x < p.d; ++x) {
            const int64_t hat = 3 * par.coords[x] + 1;
            const bool plus = (par.sigma_mask >> x) & 1;
            const int64_t v = (hat + (plus ? 1 : 0)) * ff;
            m[x] = plus ? v - 1 - me.coords[x] : me.coords[x] - v;
            if (m[x] < 0 || m[x] >= ff) throw FormatError("node outside its parent's cone");
          }
          if (std::find(t.child_offsets.begin(), t.child_offsets.end(), m) ==
              t.child_offsets.end())
            throw FormatError("node offset not in the selected cone set");
        }
      }
    }

    t.total_mass = rational_from_string(j.at("total_mass").get<std::string>());
    // Recompute and compare.
    Rational jm(0), cnt(1);
    for (int k = 0; k <= p.K; ++k) {
      jm += cnt * t.alpha[k] / Rational(pow3_big(p.N * p.d * (k + 1)));
      cnt *= t.A;
    }
    if (p.truncation == Truncation::LeafUniform)
      jm += cnt * t.alpha[p.K] / Rational(pow3_big(p.N * p.d * (p.K + 1)));
    if (jm != t.total_mass) throw FormatError("total mass does not match the construction");
    if (p.truncation == Truncation::LeafUniform && t.total_mass != 1)
      throw FormatError("leaf-uniform total mass must be exactly 1");
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed tree file: ") + e.what());
  }
}

void save_tree(const WeightTree& tree, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw SwlError(ErrorCode::Config, "cannot open " + tmp + " for writing");
    os << serialize(tree);
  }
  std::filesystem::rename(tmp, path);
}

WeightTree load_tree(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SwlError(ErrorCode::Config, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return deserialize(ss.str());
}

}  // namespace swl
