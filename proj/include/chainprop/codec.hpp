#pragma once

// Byte-level codecs for contract setups, states and messages.
//
// Every type that crosses the contract boundary specializes Codec<T> with
//   static constexpr std::string_view name;
//   static void write(ByteWriter&, const T&);
//   static T read(ByteReader&);
//   static std::string show(const T&);
// and optionally
//   static std::vector<T> shrink(const T&);
// which lists strictly smaller candidates for counterexample minimization.

#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <typeinfo>
#include <utility>
#include <variant>
#include <vector>

#include "chainprop/address.hpp"
#include "chainprop/amount.hpp"

namespace chainprop {

class codec_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct Codec;

class ByteWriter {
 public:
  void put_u8(std::uint8_t b) { bytes_.push_back(b); }
  void put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void put_u128(u128 v) {
    put_u64(static_cast<std::uint64_t>(v));
    put_u64(static_cast<std::uint64_t>(v >> 64));
  }

  template <class... Ts>
  ByteWriter& operator()(const Ts&... values) {
    (Codec<Ts>::write(*this, values), ...);
    return *this;
  }

  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t get_u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint64_t get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  u128 get_u128() {
    u128 lo = get_u64();
    u128 hi = get_u64();
    return lo | (hi << 64);
  }

  template <class T>
  T get() {
    return Codec<T>::read(*this);
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw codec_error("trailing bytes after decode");
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw codec_error("unexpected end of input");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <class T>
concept Shrinkable = requires(const T& t) {
  { Codec<T>::shrink(t) } -> std::same_as<std::vector<T>>;
};

// Candidates v - (v >> k): 0, v/2, 3v/4, ..., v-1.
template <class I>
std::vector<I> halving_ladder(I v) {
  std::vector<I> out;
  for (I d = v; d != 0; d = d / 2) out.push_back(v - d);
  return out;
}

template <class T>
std::vector<T> shrink_value(const T& v) {
  if constexpr (Shrinkable<T>) {
    return Codec<T>::shrink(v);
  } else {
    return {};
  }
}

template <class T>
std::string show_value(const T& v) {
  return Codec<T>::show(v);
}

template <>
struct Codec<bool> {
  static constexpr std::string_view name = "bool";
  static void write(ByteWriter& w, bool v) { w.put_u8(v ? 1 : 0); }
  static bool read(ByteReader& r) {
    auto b = r.get_u8();
    if (b > 1) throw codec_error("invalid bool byte");
    return b == 1;
  }
  static std::string show(bool v) { return v ? "true" : "false"; }
};

template <>
struct Codec<std::uint64_t> {
  static constexpr std::string_view name = "u64";
  static void write(ByteWriter& w, std::uint64_t v) { w.put_u64(v); }
  static std::uint64_t read(ByteReader& r) { return r.get_u64(); }
  static std::string show(std::uint64_t v) { return std::to_string(v); }
  static std::vector<std::uint64_t> shrink(std::uint64_t v) { return halving_ladder(v); }
};

template <>
struct Codec<Amount> {
  static constexpr std::string_view name = "amount";
  static void write(ByteWriter& w, Amount v) { w.put_u128(v.raw()); }
  static Amount read(ByteReader& r) { return Amount::from_u128(r.get_u128()); }
  static std::string show(Amount v) { return to_string(v); }
  static std::vector<Amount> shrink(Amount v) {
    std::vector<Amount> out;
    for (u128 c : halving_ladder(v.raw())) out.push_back(Amount::from_u128(c));
    return out;
  }
};

// Addresses are identities, not quantities: no shrink.
template <>
struct Codec<Address> {
  static constexpr std::string_view name = "address";
  static void write(ByteWriter& w, Address a) { w.put_u64(a.id); }
  static Address read(ByteReader& r) { return Address{r.get_u64()}; }
  static std::string show(Address a) { return to_string(a); }
};

template <class A, class B>
struct Codec<std::pair<A, B>> {
  static constexpr std::string_view name = "pair";
  static void write(ByteWriter& w, const std::pair<A, B>& p) { w(p.first, p.second); }
  static std::pair<A, B> read(ByteReader& r) {
    A a = r.get<A>();
    B b = r.get<B>();
    return {std::move(a), std::move(b)};
  }
  static std::string show(const std::pair<A, B>& p) {
    return "(" + show_value(p.first) + ", " + show_value(p.second) + ")";
  }
};

template <class K, class V>
struct Codec<std::map<K, V>> {
  static constexpr std::string_view name = "map";
  static void write(ByteWriter& w, const std::map<K, V>& m) {
    w.put_u64(m.size());
    for (const auto& [k, v] : m) w(k, v);
  }
  static std::map<K, V> read(ByteReader& r) {
    std::map<K, V> m;
    const auto n = r.get_u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      K k = r.get<K>();
      V v = r.get<V>();
      if (!m.emplace(std::move(k), std::move(v)).second) throw codec_error("duplicate map key");
    }
    return m;
  }
  static std::string show(const std::map<K, V>& m) {
    std::string out = "[";
    bool first = true;
    for (const auto& [k, v] : m) {
      if (!first) out += "; ";
      first = false;
      out += show_value(k) + "-->" + show_value(v);
    }
    return out + "]";
  }
};

template <class T>
struct Codec<std::vector<T>> {
  static constexpr std::string_view name = "list";
  static void write(ByteWriter& w, const std::vector<T>& xs) {
    w.put_u64(xs.size());
    for (const auto& x : xs) w(x);
  }
  static std::vector<T> read(ByteReader& r) {
    std::vector<T> xs;
    const auto n = r.get_u64();
    for (std::uint64_t i = 0; i < n; ++i) xs.push_back(r.get<T>());
    return xs;
  }
  static std::string show(const std::vector<T>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i != 0) out += "; ";
      out += show_value(xs[i]);
    }
    return out + "]";
  }
};

template <class T>
struct Codec<std::optional<T>> {
  static constexpr std::string_view name = "option";
  static void write(ByteWriter& w, const std::optional<T>& o) {
    w.put_u8(o ? 1 : 0);
    if (o) w(*o);
  }
  static std::optional<T> read(ByteReader& r) {
    switch (r.get_u8()) {
      case 0: return std::nullopt;
      case 1: return r.get<T>();
      default: throw codec_error("invalid option tag");
    }
  }
  static std::string show(const std::optional<T>& o) {
    return o ? "Some " + show_value(*o) : std::string("None");
  }
};

// Sum types: one tag byte selecting the alternative.
template <class... Ts>
struct Codec<std::variant<Ts...>> {
  using V = std::variant<Ts...>;
  static_assert(sizeof...(Ts) < 256);
  static constexpr std::string_view name = "variant";

  static void write(ByteWriter& w, const V& v) {
    w.put_u8(static_cast<std::uint8_t>(v.index()));
    std::visit([&](const auto& alt) { w(alt); }, v);
  }
  static V read(ByteReader& r) {
    const std::size_t tag = r.get_u8();
    if (tag >= sizeof...(Ts)) throw codec_error("invalid variant tag");
    return read_alt<0>(r, tag);
  }
  static std::string show(const V& v) {
    return std::visit([](const auto& alt) { return show_value(alt); }, v);
  }
  static std::vector<V> shrink(const V& v) {
    return std::visit(
        [](const auto& alt) {
          std::vector<V> out;
          for (auto& c : shrink_value(alt)) out.emplace_back(std::move(c));
          return out;
        },
        v);
  }

 private:
  template <std::size_t I>
  static V read_alt(ByteReader& r, std::size_t tag) {
    if constexpr (I < sizeof...(Ts)) {
      if (tag == I) return V(std::in_place_index<I>, r.get<std::variant_alternative_t<I, V>>());
      return read_alt<I + 1>(r, tag);
    } else {
      throw codec_error("invalid variant tag");
    }
  }
};

// Erased view of a Codec<T>, one static instance per T.
struct TypeDescriptor {
  std::string_view name;
  std::string (*show)(std::span<const std::uint8_t>);
  std::vector<std::vector<std::uint8_t>> (*shrink)(std::span<const std::uint8_t>);
};

template <class T>
std::vector<std::uint8_t> encode(const T& v) {
  ByteWriter w;
  w(v);
  return std::move(w).take();
}

template <class T>
T decode_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  T v = r.get<T>();
  r.expect_end();
  return v;
}

template <class T>
const TypeDescriptor& type_descriptor() {
  static const TypeDescriptor d{
      Codec<T>::name,
      [](std::span<const std::uint8_t> b) { return show_value(decode_bytes<T>(b)); },
      [](std::span<const std::uint8_t> b) {
        std::vector<std::vector<std::uint8_t>> out;
        for (const T& c : shrink_value(decode_bytes<T>(b))) out.push_back(encode(c));
        return out;
      },
  };
  return d;
}

// An opaque serialized value tagged with the codec that produced it.
struct Serialized {
  const TypeDescriptor* type = nullptr;
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const Serialized& a, const Serialized& b) {
    return a.type == b.type && a.bytes == b.bytes;
  }
};

template <class T>
Serialized serialize(const T& v) {
  return Serialized{&type_descriptor<T>(), encode(v)};
}

template <class T>
bool holds(const Serialized& s) {
  return s.type == &type_descriptor<T>();
}

// Throws codec_error on a type mismatch or malformed bytes.
template <class T>
T deserialize(const Serialized& s) {
  if (s.type != &type_descriptor<T>()) {
    throw codec_error("codec mismatch: expected " + std::string(Codec<T>::name) + ", found " +
                      (s.type ? std::string(s.type->name) : std::string("<untyped>")));
  }
  return decode_bytes<T>(s.bytes);
}

inline std::string show(const Serialized& s) {
  if (s.type == nullptr) return "<untyped>";
  return s.type->show(s.bytes);
}

inline std::vector<Serialized> shrink(const Serialized& s) {
  std::vector<Serialized> out;
  if (s.type == nullptr) return out;
  for (auto& b : s.type->shrink(s.bytes)) out.push_back(Serialized{s.type, std::move(b)});
  return out;
}

}  // namespace chainprop
