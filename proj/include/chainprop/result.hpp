#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace chainprop {

// Diagnostic for a failed chain operation.
struct Failure {
  std::string reason;
  // Index of the external action (within its block) that triggered the failure.
  std::optional<std::size_t> action_index = std::nullopt;
  // Index of the block within a trace, set by replay.
  std::optional<std::size_t> block_index = std::nullopt;

  friend bool operator==(const Failure&, const Failure&) = default;
};

inline std::string describe(const Failure& f) {
  std::string out = f.reason;
  if (f.action_index) out += " (action " + std::to_string(*f.action_index) + ")";
  if (f.block_index) out += " (block " + std::to_string(*f.block_index) + ")";
  return out;
}

// Either a value or a Failure.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}        // NOLINT(google-explicit-constructor)
  Result(Failure failure) : data_(std::move(failure)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Result::value on failure: " + error().reason);
    return std::get<0>(data_);
  }
  T& value() & {
    if (!ok()) throw std::logic_error("Result::value on failure: " + error().reason);
    return std::get<0>(data_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("Result::value on failure: " + error().reason);
    return std::get<0>(std::move(data_));
  }
  const T* operator->() const { return &value(); }
  const T& operator*() const& { return value(); }

  const Failure& error() const { return std::get<1>(data_); }

 private:
  std::variant<T, Failure> data_;
};

}  // namespace chainprop
