#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace skewdiff {

using Index = long long;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "skewdiff-config/1";
inline constexpr const char* kReportSchema = "skewdiff-report/1";
inline constexpr const char* kLayersSchema = "skewdiff-layers/1";

// Which half line a partition / density sequence lives on.
// negative: breakpoints l_k < 0, accumulation at 0 as k -> +inf.
// positive: breakpoints r_k > 0, accumulation at 0 as k -> -inf.
enum class Side { negative, positive };

inline const char* side_name(Side s) {
  return s == Side::negative ? "negative" : "positive";
}

// Index direction pointing toward the accumulation point.
inline int inner_direction(Side s) { return s == Side::negative ? +1 : -1; }

struct SkewdiffError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad call arguments (alpha outside (0,1), a >= b, ...).
struct DomainError : SkewdiffError {
  using SkewdiffError::SkewdiffError;
};

// An operation was invoked on a configuration that does not support it
// (scale function without S1, conservativeness criteria without S0 and S1, ...).
struct PreconditionError : SkewdiffError {
  using SkewdiffError::SkewdiffError;
};

// Evaluation outside the representable range (h_inverse beyond h(+-inf), ...).
struct RangeError : SkewdiffError {
  using SkewdiffError::SkewdiffError;
};

namespace tol {
// Relative agreement required between explicit window edges and tail families.
inline constexpr double window_tail_agreement = 1e-12;
// Tail remainder bound below which a symbolic Converges verdict is accepted.
inline constexpr double tail = 1e-10;
// Partial-sum level treated as numeric divergence when it keeps growing.
inline constexpr double series_divergence = 1e6;
// Truncation target for inner-tail closures of h and Phi.
inline constexpr double inner_truncation = 1e-12;
}  // namespace tol

}  // namespace skewdiff
