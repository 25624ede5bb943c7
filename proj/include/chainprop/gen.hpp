#pragma once

// Generator combinators. A Gen<T> draws from a threaded Rng; return does not
// consume randomness and bind does not split, so the monad laws hold exactly
// for a fixed (seed, size).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "chainprop/rng.hpp"

namespace chainprop {

template <class T>
class Gen {
 public:
  using value_type = T;
  using Fn = std::function<T(Rng&, std::size_t)>;

  explicit Gen(Fn fn) : fn_(std::move(fn)) {}

  T operator()(Rng& rng, std::size_t size) const { return fn_(rng, size); }

  template <class F>
  auto map(F f) const {
    using U = std::invoke_result_t<F, T>;
    return Gen<U>([g = *this, f = std::move(f)](Rng& r, std::size_t n) { return f(g(r, n)); });
  }

  // f : T -> Gen<U>
  template <class F>
  auto bind(F f) const {
    using U = typename std::invoke_result_t<F, T>::value_type;
    return Gen<U>([g = *this, f = std::move(f)](Rng& r, std::size_t n) { return f(g(r, n))(r, n); });
  }

 private:
  Fn fn_;
};

template <class T>
T sample(const Gen<T>& g, std::uint64_t seed, std::size_t size = 30) {
  Rng r(seed);
  return g(r, size);
}

template <class T>
Gen<std::decay_t<T>> gen_return(T&& v) {
  return Gen<std::decay_t<T>>([v = std::forward<T>(v)](Rng&, std::size_t) { return v; });
}

template <class T, class F>
auto gen_bind(const Gen<T>& g, F f) {
  return g.bind(std::move(f));
}

template <class T, class F>
auto gen_map(const Gen<T>& g, F f) {
  return g.map(std::move(f));
}

// Uniform integer in [lo, hi].
template <class I = std::uint64_t>
Gen<I> gen_choose(I lo, I hi) {
  static_assert(std::is_integral_v<I>);
  if (lo > hi) throw std::invalid_argument("gen_choose: lo > hi");
  using U = std::make_unsigned_t<I>;
  const U span = static_cast<U>(static_cast<U>(hi) - static_cast<U>(lo));
  return Gen<I>([lo, span](Rng& r, std::size_t) {
    U off = span == std::numeric_limits<U>::max() ? static_cast<U>(r.next_u64())
                                                   : static_cast<U>(r.below(static_cast<std::uint64_t>(span) + 1));
    return static_cast<I>(static_cast<U>(lo) + off);
  });
}

inline Gen<bool> gen_bool() {
  return Gen<bool>([](Rng& r, std::size_t) { return r.below(2) == 1; });
}

template <class T>
Gen<T> gen_elements(std::vector<T> xs) {
  if (xs.empty()) throw std::invalid_argument("gen_elements: empty list");
  return Gen<T>([xs = std::move(xs)](Rng& r, std::size_t) { return xs[r.below(xs.size())]; });
}

template <class T>
Gen<T> gen_one_of(std::vector<Gen<T>> gens) {
  if (gens.empty()) throw std::invalid_argument("gen_one_of: empty list");
  return Gen<T>([gens = std::move(gens)](Rng& r, std::size_t n) { return gens[r.below(gens.size())](r, n); });
}

// Picks index i with probability weights[i] / sum(weights).
inline std::size_t pick_weighted(Rng& r, const std::vector<std::uint64_t>& weights, std::uint64_t total) {
  std::uint64_t x = r.below(total);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

template <class T>
Gen<T> gen_frequency(std::vector<std::pair<std::uint64_t, Gen<T>>> branches) {
  std::vector<std::uint64_t> weights;
  std::vector<Gen<T>> gens;
  std::uint64_t total = 0;
  for (auto& [w, g] : branches) {
    if (w == 0) continue;
    if (total > std::numeric_limits<std::uint64_t>::max() - w) throw std::invalid_argument("gen_frequency: weight overflow");
    total += w;
    weights.push_back(w);
    gens.push_back(std::move(g));
  }
  if (total == 0) throw std::invalid_argument("gen_frequency: no positive weight");
  return Gen<T>([weights = std::move(weights), gens = std::move(gens), total](Rng& r, std::size_t n) {
    return gens[pick_weighted(r, weights, total)](r, n);
  });
}

// List whose length is uniform in [0, size].
template <class T>
Gen<std::vector<T>> gen_list(Gen<T> g) {
  return Gen<std::vector<T>>([g = std::move(g)](Rng& r, std::size_t n) {
    const std::size_t len = r.below(n + 1);
    std::vector<T> out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) out.push_back(g(r, n));
    return out;
  });
}

template <class T>
Gen<std::optional<T>> gen_some(Gen<T> g) {
  return g.map([](T v) { return std::optional<T>(std::move(v)); });
}

template <class T>
Gen<std::optional<T>> gen_none() {
  return gen_return(std::optional<T>{});
}

template <class F>
auto gen_sized(F f) {
  using G = std::invoke_result_t<F, std::size_t>;
  using T = typename G::value_type;
  return Gen<T>([f = std::move(f)](Rng& r, std::size_t n) { return f(n)(r, n); });
}

}  // namespace chainprop
