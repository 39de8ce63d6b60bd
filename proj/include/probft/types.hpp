// Copyright 2026 The probft Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace probft {

using Bytes = std::vector<std::uint8_t>;

/// Replica identifier, 1-based so that leader(v) = ((v - 1) mod n) + 1.
struct ReplicaId {
  std::uint32_t value = 0;

  constexpr ReplicaId() = default;
  constexpr explicit ReplicaId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const ReplicaId&) const = default;
};

/// View number. 0 is reserved for "never prepared"; protocol views start at 1.
struct View {
  std::uint64_t value = 0;

  constexpr View() = default;
  constexpr explicit View(std::uint64_t v) : value(v) {}

  constexpr View next() const { return View{value + 1}; }
  constexpr bool is_none() const { return value == 0; }

  constexpr auto operator<=>(const View&) const = default;
};

/// Opaque application value. Equality is byte equality and ordering is
/// lexicographic on unsigned bytes (std::char_traits<char> compares as
/// unsigned char).
struct Value {
  std::string bytes;

  Value() = default;
  explicit Value(std::string b) : bytes(std::move(b)) {}

  bool empty() const { return bytes.empty(); }

  auto operator<=>(const Value& other) const {
    const int c = bytes.compare(other.bytes);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  bool operator==(const Value&) const = default;
};

enum class MessageKind : std::uint8_t {
  kPropose = 1,
  kNewLeader = 2,
  kPrepare = 3,
  kCommit = 4,
};

std::string_view to_string(MessageKind kind);

/// Thrown when protocol parameters violate the system model.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace probft

template <>
struct std::hash<probft::ReplicaId> {
  std::size_t operator()(const probft::ReplicaId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<probft::View> {
  std::size_t operator()(const probft::View& v) const noexcept {
    return std::hash<std::uint64_t>{}(v.value);
  }
};

template <>
struct std::hash<probft::Value> {
  std::size_t operator()(const probft::Value& v) const noexcept {
    return std::hash<std::string>{}(v.bytes);
  }
};
