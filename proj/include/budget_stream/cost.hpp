#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace budget_stream {

/// Exact fixed-point amount of acquisition cost (or budget), in millionths of
/// a cost unit. All budget accounting happens on these integers so the
/// budget constraint holds exactly rather than up to float drift.
class Cost {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Cost() = default;

  static constexpr Cost from_micros(std::int64_t micros) { return Cost(micros); }
  /// Rounds to the nearest micro-unit.
  static Cost from_double(double units);
  /// Parses a decimal literal ("10", "9.25", "1.5e2"). Throws ParameterError.
  static Cost parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }
  /// Shortest exact decimal rendering ("10", "0.25", "63350").
  std::string to_string() const;

  constexpr Cost& operator+=(Cost o) {
    micros_ += o.micros_;
    return *this;
  }
  constexpr Cost& operator-=(Cost o) {
    micros_ -= o.micros_;
    return *this;
  }
  friend constexpr Cost operator+(Cost a, Cost b) { return Cost(a.micros_ + b.micros_); }
  friend constexpr Cost operator-(Cost a, Cost b) { return Cost(a.micros_ - b.micros_); }
  friend constexpr Cost operator*(Cost a, std::int64_t k) { return Cost(a.micros_ * k); }
  friend constexpr auto operator<=>(Cost, Cost) = default;

 private:
  constexpr explicit Cost(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

using CostVector = std::vector<Cost>;

Cost total_cost(const CostVector& costs);

/// floor(amount / parts); the remainder is forfeited.
Cost divide_floor(Cost amount, std::int64_t parts);

/// floor(fraction * count * unit) computed exactly, where fraction is first
/// quantized to millionths. Used for B = alpha * |S| * sum(costs).
Cost scale_budget(double fraction, std::int64_t count, Cost unit);

/// floor(amount / unit) for unit > 0.
std::int64_t whole_multiples(Cost amount, Cost unit);

}  // namespace budget_stream
