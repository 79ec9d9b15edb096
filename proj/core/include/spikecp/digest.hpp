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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace spikecp {

/// 64-bit FNV-1a, used to fingerprint configurations and kernel inputs.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes) noexcept;
  Fnv1a& add(std::uint64_t value) noexcept;
  Fnv1a& add(double value) noexcept;
  Fnv1a& add(std::span<const double> values) noexcept;

  std::uint64_t value() const noexcept { return state_; }

 private:
  Fnv1a& add_bytes(const unsigned char* data, std::size_t size) noexcept;

  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

/// Lower-case 16-digit hexadecimal rendering.
std::string to_hex(std::uint64_t value);

}  // namespace spikecp
