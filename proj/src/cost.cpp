#include "budget_stream/cost.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "budget_stream/error.hpp"

namespace budget_stream {

Cost Cost::from_double(double units) {
  if (!std::isfinite(units)) throw ParameterError("cost must be finite");
  const double scaled = std::round(units * static_cast<double>(kScale));
  if (std::abs(scaled) > 9.0e18) throw ParameterError("cost out of range");
  return Cost(static_cast<std::int64_t>(scaled));
}

Cost Cost::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParameterError("not a decimal number: '" + std::string(text) + "'");
  return from_double(value);
}

std::string Cost::to_string() const {
  std::int64_t whole = micros_ / kScale;
  std::int64_t frac = micros_ % kScale;
  std::string out;
  if (micros_ < 0) {
    out = "-";
    whole = -whole;
    frac = -frac;
  }
  out += std::to_string(whole);
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

Cost total_cost(const CostVector& costs) {
  return std::accumulate(costs.begin(), costs.end(), Cost{});
}

Cost divide_floor(Cost amount, std::int64_t parts) {
  if (parts <= 0) throw ParameterError("divide_floor: parts must be positive");
  if (amount.micros() < 0) throw ParameterError("divide_floor: negative amount");
  return Cost::from_micros(amount.micros() / parts);
}

Cost scale_budget(double fraction, std::int64_t count, Cost unit) {
  if (!(fraction >= 0.0) || !std::isfinite(fraction))
    throw ParameterError("budget fraction must be finite and >= 0");
  if (count < 0 || unit.micros() < 0) throw ParameterError("scale_budget: negative operand");
  const auto ppm = static_cast<__int128>(std::llround(fraction * 1e6));
  const __int128 product = ppm * count * unit.micros() / 1'000'000;
  if (product > std::numeric_limits<std::int64_t>::max())
    throw ParameterError("budget overflows the fixed-point range");
  return Cost::from_micros(static_cast<std::int64_t>(product));
}

std::int64_t whole_multiples(Cost amount, Cost unit) {
  if (unit.micros() <= 0) throw ParameterError("whole_multiples: unit must be positive");
  return amount.micros() / unit.micros();
}

}  // namespace budget_stream
