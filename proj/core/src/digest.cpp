// Copyright 2026 The spikecp Authors.
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

#include "spikecp/digest.hpp"

#include <bit>
#include <cstdio>

namespace spikecp {

Fnv1a& Fnv1a::add_bytes(const unsigned char* data, std::size_t size) noexcept {
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= data[i];
    state_ *= 0x100000001b3ull;
  }
  return *this;
}

Fnv1a& Fnv1a::add(std::string_view bytes) noexcept {
  add(static_cast<std::uint64_t>(bytes.size()));
  return add_bytes(reinterpret_cast<const unsigned char*>(bytes.data()),
                   bytes.size());
}

Fnv1a& Fnv1a::add(std::uint64_t value) noexcept {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  return add_bytes(buf, 8);
}

Fnv1a& Fnv1a::add(double value) noexcept {
  if (value == 0.0) value = 0.0;  // fold -0.0
  return add(std::bit_cast<std::uint64_t>(value));
}

Fnv1a& Fnv1a::add(std::span<const double> values) noexcept {
  add(static_cast<std::uint64_t>(values.size()));
  for (double v : values) add(v);
  return *this;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace spikecp
