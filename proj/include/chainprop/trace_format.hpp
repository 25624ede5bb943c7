#pragma once

#include <string>

#include "chainprop/chain.hpp"

namespace chainprop {

inline std::string render(const ActionBody& body) {
  return std::visit(
      [](const auto& b) -> std::string {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, act::Transfer>) {
          return "(act_transfer " + to_string(b.to) + ", " + to_string(b.amount) + ")";
        } else if constexpr (std::is_same_v<B, act::Call>) {
          return "(act_call " + to_string(b.to) + ", " + to_string(b.amount) + ", " + show(b.msg) + ")";
        } else {
          return "(act_deploy " + to_string(b.amount) + ", " + show(b.setup) + ")";
        }
      },
      body);
}

inline std::string render(const Action& a) {
  return "Action{act_from: " + to_string(a.from) + ", act_body: " + render(a.body) + "}";
}

inline std::string render(const Block& b) {
  std::string out = "Block " + std::to_string(b.height) + " [";
  for (std::size_t i = 0; i < b.actions.size(); ++i) {
    if (i != 0) out += "; ";
    out += render(b.actions[i]);
  }
  return out + "]";
}

// Chain{|
//   Block 1 [Action{act_from: 10, act_body: (act_deploy 0, Setup{...})}];
//   Block 2 [Action{act_from: 17, act_body: (act_call 128, 0, transfer 14 16)}]
// |}
inline std::string render(const ChainTrace& t) {
  std::string out = "Chain{|\n";
  for (std::size_t i = 0; i < t.blocks.size(); ++i) {
    out += "  " + render(t.blocks[i]);
    out += (i + 1 < t.blocks.size()) ? ";\n" : "\n";
  }
  return out + "|}";
}

}  // namespace chainprop
