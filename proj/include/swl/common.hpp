#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace swl {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// All geometry lives in [0,1]^d with d in 1..3.
inline constexpr int kMaxDim = 3;
// 3^level must fit in int64; 3^39 overflows.
inline constexpr int kMaxLevel = 38;

using RatPoint = std::array<Rational, kMaxDim>;
using DPoint   = std::array<double, kMaxDim>;

enum class ErrorCode {
  InvariantViolation = 1,  // CLI exit 1
  Config             = 2,  // CLI exit 2
  Resource           = 3,  // CLI exit 3
};

struct SwlError : std::runtime_error {
  ErrorCode code;
  SwlError(ErrorCode c, const std::string& what) : std::runtime_error(what), code(c) {}
};

struct OutOfParentError : SwlError {
  explicit OutOfParentError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct EmptySelectionError : SwlError {
  explicit EmptySelectionError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct NoConeFoundError : SwlError {
  explicit NoConeFoundError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct SingularPointError : SwlError {
  explicit SingularPointError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct SingularityTooCloseError : SwlError {
  explicit SingularityTooCloseError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct BallNotContainedError : SwlError {
  explicit BallNotContainedError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct ConeTooNarrowError : SwlError {
  explicit ConeTooNarrowError(const std::string& w) : SwlError(ErrorCode::InvariantViolation, w) {}
};
struct TooDeepError : SwlError {
  explicit TooDeepError(const std::string& w) : SwlError(ErrorCode::Resource, w) {}
};
struct TooLargeError : SwlError {
  explicit TooLargeError(const std::string& w) : SwlError(ErrorCode::Resource, w) {}
};
struct FormatError : SwlError {
  explicit FormatError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct NotOnSupportError : SwlError {
  explicit NotOnSupportError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};
struct CertificateMissingError : SwlError {
  explicit CertificateMissingError(const std::string& w) : SwlError(ErrorCode::Config, w) {}
};

/// 3^e as int64; e must be within representable range.
int64_t pow3_i64(int e);
/// 3^e as big integer (any nonnegative e).
BigInt pow3_big(int e);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string rational_to_string(const Rational& r);     // "num/den" (or "num" when den==1)
Rational rational_from_string(const std::string& s);   // inverse of the above

/// Fixed 17-significant-digit decimal form; round-trips IEEE doubles.
std::string double_to_string(double v);

/// Runs fn(i) for i in [0,n) on up to `threads` workers (0 -> hardware default).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

int default_thread_count();  // SWL_THREADS override, else hardware concurrency

}  // namespace swl
