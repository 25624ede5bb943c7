#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace chainprop {

using u128 = unsigned __int128;

// Non-negative currency or token quantity. All arithmetic is checked.
class Amount {
 public:
  constexpr Amount() = default;
  constexpr Amount(std::uint64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr Amount from_u128(u128 v) {
    Amount a;
    a.value_ = v;
    return a;
  }
  static constexpr Amount max() { return from_u128(std::numeric_limits<u128>::max()); }

  constexpr u128 raw() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  // Narrowing accessor; throws when the value does not fit.
  std::uint64_t to_u64() const {
    if (value_ > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("amount does not fit in 64 bits");
    }
    return static_cast<std::uint64_t>(value_);
  }

  constexpr std::optional<Amount> checked_add(Amount o) const {
    u128 r = value_ + o.value_;
    if (r < value_) return std::nullopt;
    return from_u128(r);
  }
  constexpr std::optional<Amount> checked_sub(Amount o) const {
    if (o.value_ > value_) return std::nullopt;
    return from_u128(value_ - o.value_);
  }
  constexpr std::optional<Amount> checked_mul(Amount o) const {
    if (value_ != 0 && o.value_ > std::numeric_limits<u128>::max() / value_) return std::nullopt;
    return from_u128(value_ * o.value_);
  }
  constexpr std::optional<Amount> checked_div(Amount o) const {
    if (o.value_ == 0) return std::nullopt;
    return from_u128(value_ / o.value_);
  }

  // Throwing operators for arithmetic the caller has already bounded.
  friend Amount operator+(Amount a, Amount b) {
    if (auto r = a.checked_add(b)) return *r;
    throw std::overflow_error("amount overflow");
  }
  friend Amount operator-(Amount a, Amount b) {
    if (auto r = a.checked_sub(b)) return *r;
    throw std::underflow_error("amount underflow");
  }
  friend Amount operator*(Amount a, Amount b) {
    if (auto r = a.checked_mul(b)) return *r;
    throw std::overflow_error("amount overflow");
  }
  friend Amount operator/(Amount a, Amount b) {
    if (auto r = a.checked_div(b)) return *r;
    throw std::domain_error("division by zero");
  }
  Amount& operator+=(Amount o) { return *this = *this + o; }
  Amount& operator-=(Amount o) { return *this = *this - o; }

  friend constexpr bool operator==(Amount, Amount) = default;
  friend constexpr auto operator<=>(Amount a, Amount b) { return a.value_ <=> b.value_; }

 private:
  u128 value_ = 0;
};

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return out;
}

inline std::string to_string(Amount a) { return to_string(a.raw()); }

inline std::ostream& operator<<(std::ostream& os, Amount a) { return os << to_string(a); }

}  // namespace chainprop
