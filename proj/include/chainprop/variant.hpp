#pragma once

namespace chainprop {

// Which implementation of a case-study contract a suite deploys.
enum class Variant { buggy, fixed };

inline const char* to_string(Variant v) { return v == Variant::buggy ? "buggy" : "fixed"; }

}  // namespace chainprop
