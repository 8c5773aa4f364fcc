/*
 * Copyright 2026 The erx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERX_COMMON_HPP_
#define ERX_COMMON_HPP_

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erx {

enum class ErrorCode {
  kInvalidArgument = 1,
  kLoad,
  kParse,
  kTransport,
  kProtocol,
  kExplanationUnavailable,
  kOracle,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported as Error; the C API
// maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// The two tables of an ER task. U is the left table (tableA), V the right one.
enum class Side : std::uint8_t { kU = 0, kV = 1 };

inline constexpr Side Opposite(Side side) {
  return side == Side::kU ? Side::kV : Side::kU;
}

inline constexpr std::string_view SideName(Side side) {
  return side == Side::kU ? "U" : "V";
}

// Report-only prefix for attribute names ("L_" for U, "R_" for V).
inline constexpr std::string_view DisplayPrefix(Side side) {
  return side == Side::kU ? "L_" : "R_";
}

// A subset of one schema's attributes, bit i standing for attribute i.
class AttributeSet {
 public:
  static constexpr int kMaxAttributes = 30;

  constexpr AttributeSet() = default;
  constexpr explicit AttributeSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr AttributeSet Full(int num_attributes) {
    return AttributeSet(num_attributes >= 32
                            ? ~std::uint32_t{0}
                            : (std::uint32_t{1} << num_attributes) - 1);
  }
  static constexpr AttributeSet Single(int index) {
    return AttributeSet(std::uint32_t{1} << index);
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int index) const { return (bits_ >> index) & 1u; }

  constexpr AttributeSet with(int index) const {
    return AttributeSet(bits_ | (std::uint32_t{1} << index));
  }
  constexpr AttributeSet without(int index) const {
    return AttributeSet(bits_ & ~(std::uint32_t{1} << index));
  }
  constexpr bool IsSubsetOf(AttributeSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool IsStrictSubsetOf(AttributeSet other) const {
    return IsSubsetOf(other) && bits_ != other.bits_;
  }

  friend constexpr bool operator==(AttributeSet, AttributeSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

// Deterministic subset order used by every enumeration and tie-break:
// by size, then by bit pattern.
inline constexpr bool SubsetOrderLess(AttributeSet a, AttributeSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.bits() < b.bits();
}

}  // namespace erx

#endif  // ERX_COMMON_HPP_
