#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "btsbm/error.hpp"

namespace btsbm {

/// Address of a node in a binary tree: the sequence of left (0) / right (1)
/// turns taken from the root. The root is the empty code.
class NodeCode {
 public:
  NodeCode() = default;

  /// Parses a string over {'0','1'}; throws InvalidArgument otherwise.
  explicit NodeCode(std::string_view bits) : bits_(bits) {
    if (!std::all_of(bits_.begin(), bits_.end(),
                     [](char c) { return c == '0' || c == '1'; })) {
      throw InvalidArgument("node code must consist of '0'/'1': \"" +
                            std::string(bits) + "\"");
    }
  }

  static NodeCode root() { return {}; }

  std::size_t size() const noexcept { return bits_.size(); }
  bool is_root() const noexcept { return bits_.empty(); }
  int bit(std::size_t i) const { return bits_.at(i) == '1' ? 1 : 0; }

  NodeCode left() const { return child(0); }
  NodeCode right() const { return child(1); }
  NodeCode child(int b) const {
    NodeCode c = *this;
    c.bits_.push_back(b ? '1' : '0');
    return c;
  }

  /// Prefix of the given length (the whole code if length >= size()).
  NodeCode truncated(std::size_t length) const {
    NodeCode c;
    c.bits_ = bits_.substr(0, std::min(length, bits_.size()));
    return c;
  }

  bool is_prefix_of(const NodeCode& other) const noexcept {
    return other.bits_.size() >= bits_.size() &&
           std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
  }

  const std::string& str() const noexcept { return bits_; }

  friend auto operator<=>(const NodeCode&, const NodeCode&) = default;
  friend bool operator==(const NodeCode&, const NodeCode&) = default;

  friend std::ostream& operator<<(std::ostream& os, const NodeCode& c) {
    return os << (c.is_root() ? std::string("<root>") : c.bits_);
  }

 private:
  std::string bits_;
};

/// The node obtained by flipping the last bit.
inline NodeCode sibling(const NodeCode& s) {
  if (s.is_root()) throw InvalidArgument("the root has no sibling");
  std::string bits = s.str();
  bits.back() = bits.back() == '0' ? '1' : '0';
  return NodeCode(bits);
}

/// The i-th ancestor: the first |s| - i bits of s. ancestor(s, |s|) is the root.
inline NodeCode ancestor(const NodeCode& s, std::size_t i) {
  if (i > s.size()) {
    throw InvalidArgument("ancestor index " + std::to_string(i) +
                          " exceeds code length " + std::to_string(s.size()));
  }
  return s.truncated(s.size() - i);
}

/// Longest common prefix.
inline NodeCode lowest_common_ancestor(const NodeCode& a, const NodeCode& b) {
  const auto& x = a.str();
  const auto& y = b.str();
  auto [ix, iy] = std::mismatch(x.begin(), x.end(), y.begin(), y.end());
  (void)iy;
  return a.truncated(static_cast<std::size_t>(ix - x.begin()));
}

}  // namespace btsbm

template <>
struct std::hash<btsbm::NodeCode> {
  std::size_t operator()(const btsbm::NodeCode& c) const noexcept {
    return std::hash<std::string>{}(c.str());
  }
};
