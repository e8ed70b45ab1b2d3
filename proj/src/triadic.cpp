#include "swl/triadic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace swl {

int64_t pow3_i64(int e) {
  if (e < 0 || e > kMaxLevel) throw TooDeepError("pow3_i64: exponent out of range");
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

BigInt pow3_big(int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw FormatError("rational with zero denominator: " + s);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw FormatError("malformed rational: " + s);
  }
}

std::string double_to_string(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int default_thread_count() {
  if (const char* env = std::getenv("SWL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) threads = default_thread_count();
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    const std::size_t chunk = std::max<std::size_t>(1, n / (8 * std::size_t(threads)));
    for (;;) {
      std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

RatPoint TriadicAddress::center() const {
  RatPoint c{};
  const BigInt den = 2 * pow3_big(level);
  for (int i = 0; i < dim; ++i) c[i] = Rational(2 * coords[i] + 1, den);
  return c;
}

TriadicAddress TriadicAddress::ancestor(int coarser_level) const {
  if (coarser_level > level) throw SwlError(ErrorCode::Config, "ancestor level deeper than cube");
  TriadicAddress a = *this;
  const int64_t f = pow3_i64(level - coarser_level);
  a.level = coarser_level;
  for (int i = 0; i < dim; ++i) a.coords[i] = coords[i] / f;
  return a;
}

bool TriadicAddress::contains(const TriadicAddress& finer) const {
  if (finer.dim != dim || finer.level < level) return false;
  return finer.ancestor(level) == *this;
}

bool TriadicAddress::contains_point(const RatPoint& x) const {
  for (int i = 0; i < dim; ++i) {
    if (x[i] < lo(i) || x[i] >= hi(i)) return false;
  }
  return true;
}

TriadicAddress make_address(int dim, int level, std::initializer_list<int64_t> cs) {
  if (dim < 1 || dim > kMaxDim) throw SwlError(ErrorCode::Config, "dimension out of range");
  if (level < 0 || level > kMaxLevel) throw TooDeepError("level out of range");
  TriadicAddress a;
  a.dim = dim;
  a.level = level;
  int i = 0;
  const int64_t n = pow3_i64(level);
  for (int64_t c : cs) {
    if (i >= dim) throw SwlError(ErrorCode::Config, "too many coordinates");
    if (c < 0 || c >= n) throw SwlError(ErrorCode::Config, "coordinate out of [0,3^level)");
    a.coords[i++] = c;
  }
  if (i != dim) throw SwlError(ErrorCode::Config, "missing coordinates");
  return a;
}

TriadicAddress root_cube(int dim) {
  if (dim < 1 || dim > kMaxDim) throw SwlError(ErrorCode::Config, "dimension out of range");
  TriadicAddress a;
  a.dim = dim;
  return a;
}

SignVector make_signs(std::initializer_list<int> ss) {
  SignVector v;
  v.dim = 0;
  for (int s : ss) {
    if (s != 1 && s != -1) throw SwlError(ErrorCode::Config, "sign entries must be +-1");
    if (v.dim >= kMaxDim) throw SwlError(ErrorCode::Config, "too many sign entries");
    v.s[v.dim++] = static_cast<int8_t>(s);
  }
  return v;
}

RatPoint corner(const TriadicAddress& q, const SignVector& sigma) {
  if (sigma.dim != q.dim) throw SwlError(ErrorCode::Config, "sign vector dimension mismatch");
  RatPoint v{};
  const BigInt den = pow3_big(q.level);
  for (int i = 0; i < q.dim; ++i)
    v[i] = Rational(q.coords[i] + (sigma.s[i] > 0 ? 1 : 0), den);
  return v;
}

TriadicAddress middle_child(const TriadicAddress& addr) {
  TriadicAddress m = addr;
  m.level = addr.level + 1;
  if (m.level > kMaxLevel) throw TooDeepError("middle_child exceeds level limit");
  for (int i = 0; i < addr.dim; ++i) m.coords[i] = 3 * addr.coords[i] + 1;
  return m;
}

TriadicAddress j_cube(const TriadicAddress& hatQ, const SignVector& sigma, int target_level) {
  if (sigma.dim != hatQ.dim) throw SwlError(ErrorCode::Config, "sign vector dimension mismatch");
  if (target_level <= hatQ.level)
    throw SwlError(ErrorCode::Config, "j_cube target level must be finer than hatQ");
  if (hatQ.level == 0) throw OutOfParentError("hatQ has no parent");
  TriadicAddress j;
  j.dim = hatQ.dim;
  j.level = target_level;
  const int64_t f = pow3_i64(target_level - hatQ.level);
  for (int i = 0; i < hatQ.dim; ++i) {
    // Corner of hatQ in target-level lattice units; the J cube extends
    // outward from it in the sigma direction.
    const int64_t v = (hatQ.coords[i] + (sigma.s[i] > 0 ? 1 : 0)) * f;
    j.coords[i] = sigma.s[i] > 0 ? v : v - 1;
  }
  const TriadicAddress parent = hatQ.ancestor(hatQ.level - 1);
  const int64_t pf = pow3_i64(target_level - parent.level);
  for (int i = 0; i < hatQ.dim; ++i) {
    const int64_t plo = parent.coords[i] * pf;
    if (j.coords[i] < plo || j.coords[i] >= plo + pf)
      throw OutOfParentError("j_cube leaves the parent cube");
  }
  return j;
}

bool cone_offset_selected(const std::array<int64_t, kMaxDim>& m, int dim,
                          const DPoint& abs_axis, double cap_radius) {
  double n2 = 0;
  for (int i = 0; i < dim; ++i) {
    const double u = static_cast<double>(m[i]) + 0.5;
    n2 += u * u;
  }
  const double inv = 1.0 / std::sqrt(n2);
  double d2 = 0;
  for (int i = 0; i < dim; ++i) {
    const double u = (static_cast<double>(m[i]) + 0.5) * inv - abs_axis[i];
    d2 += u * u;
  }
  return d2 < cap_radius * cap_radius;  // open condition
}

std::vector<TriadicAddress> cone_children(const TriadicAddress& hatQ, const Cone& cone,
                                          int child_level) {
  if (cone.dim != hatQ.dim) throw SwlError(ErrorCode::Config, "cone dimension mismatch");
  if (child_level <= hatQ.level)
    throw SwlError(ErrorCode::Config, "child level must be finer than hatQ");
  const int d = hatQ.dim;
  const int64_t f = pow3_i64(child_level - hatQ.level);

  // Detect apex at a lattice corner of hatQ; that path uses exact integer
  // offsets so the selection is identical at every node of a build.
  SignVector sigma;
  sigma.dim = d;
  bool apex_is_corner = true;
  for (int i = 0; i < d && apex_is_corner; ++i) {
    if (cone.apex[i] == hatQ.lo(i))
      sigma.s[i] = -1;
    else if (cone.apex[i] == hatQ.hi(i))
      sigma.s[i] = +1;
    else
      apex_is_corner = false;
  }

  std::vector<TriadicAddress> out;
  std::array<int64_t, kMaxDim> m{};
  TriadicAddress child;
  child.dim = d;
  child.level = child_level;

  if (apex_is_corner) {
    // Offsets measured inward from the corner; axis folded to |axis| only if
    // the cone points into the cube on every axis (axis_i and sigma_i oppose).
    DPoint folded{};
    for (int i = 0; i < d; ++i) folded[i] = -sigma.s[i] * cone.axis[i];
    std::function<void(int)> rec = [&](int axis) {
      if (axis == d) {
        if (!cone_offset_selected(m, d, folded, cone.cap_radius)) return;
        for (int i = 0; i < d; ++i) {
          const int64_t v = (hatQ.coords[i] + (sigma.s[i] > 0 ? 1 : 0)) * f;
          child.coords[i] = sigma.s[i] > 0 ? v - 1 - m[i] : v + m[i];
        }
        out.push_back(child);
        return;
      }
      for (m[axis] = 0; m[axis] < f; ++m[axis]) rec(axis + 1);
    };
    rec(0);
    std::sort(out.begin(), out.end());
  } else {
    // General apex: exact rational center offset, then one double rounding.
    std::function<void(int)> rec = [&](int axis) {
      if (axis == d) {
        for (int i = 0; i < d; ++i) child.coords[i] = hatQ.coords[i] * f + m[i];
        RatPoint c = child.center();
        double n2 = 0;
        DPoint u{};
        for (int i = 0; i < d; ++i) {
          u[i] = to_double(Rational(c[i] - cone.apex[i]));
          n2 += u[i] * u[i];
        }
        if (n2 == 0) return;
        const double inv = 1.0 / std::sqrt(n2);
        double d2 = 0;
        for (int i = 0; i < d; ++i) {
          const double t = u[i] * inv - cone.axis[i];
          d2 += t * t;
        }
        if (d2 < cone.cap_radius * cone.cap_radius) out.push_back(child);
        return;
      }
      for (m[axis] = 0; m[axis] < f; ++m[axis]) rec(axis + 1);
    };
    rec(0);
    std::sort(out.begin(), out.end());
  }

  if (out.empty())
    throw EmptySelectionError("cone contains no child center; increase N or cap radius");
  return out;
}

CubeGap min_distance(const TriadicAddress& a, const TriadicAddress& b) {
  if (a.dim != b.dim) throw SwlError(ErrorCode::Config, "dimension mismatch");
  CubeGap g{Rational(0), Rational(0)};
  for (int i = 0; i < a.dim; ++i) {
    Rational gap(0);
    if (a.lo(i) > b.hi(i)) gap = a.lo(i) - b.hi(i);
    if (b.lo(i) > a.hi(i)) gap = b.lo(i) - a.hi(i);
    if (gap > g.linf) g.linf = gap;
    g.l2_squared += gap * gap;
  }
  return g;
}

}  // namespace swl
