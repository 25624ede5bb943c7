#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace chainprop {

struct Address {
  std::uint64_t id = 0;

  friend constexpr bool operator==(Address, Address) = default;
  friend constexpr auto operator<=>(Address, Address) = default;
};

// Users live in [0, 128), contracts in [128, ...).
inline constexpr std::uint64_t contract_base_id = 128;
inline constexpr Address contract_base_addr{contract_base_id};

constexpr bool is_contract(Address a) { return a.id >= contract_base_id; }

inline std::string to_string(Address a) { return std::to_string(a.id); }

inline std::ostream& operator<<(std::ostream& os, Address a) { return os << a.id; }

}  // namespace chainprop
