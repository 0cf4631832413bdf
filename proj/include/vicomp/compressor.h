// Copyright 2026 The vicomp Authors. All Rights Reserved.
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
// =============================================================================

#ifndef VICOMP_COMPRESSOR_H_
#define VICOMP_COMPRESSOR_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vicomp/linalg.h"
#include "vicomp/rng.h"

namespace vicomp {

enum class CompressorKind { kIdentity, kRandK, kTopK };

struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t dim = 0;
  std::size_t k = 0;  // ignored for identity
  int float_bits = 64;

  static CompressorSpec identity(std::size_t dim, int float_bits = 64);
  static CompressorSpec rand_k(std::size_t dim, std::size_t k,
                               int float_bits = 64);
  static CompressorSpec top_k(std::size_t dim, std::size_t k,
                              int float_bits = 64);

  // Number of retained coordinates, d for identity.
  std::size_t kept() const;
  bool unbiased() const { return kind != CompressorKind::kTopK; }
  void validate() const;
};

// q for unbiased operators, delta for contractive ones: d/k, identity 1.
double variance_param(const CompressorSpec& spec);
// beta: ratio of a full vector's bits to one message's payload bits.
double expected_density(const CompressorSpec& spec);

// Parses "identity", "rand:30%", "rand:30", "top:25%", "top:7".
CompressorSpec parse_compressor(const std::string& text, std::size_t dim,
                                int float_bits = 64);
std::string describe(const CompressorSpec& spec);

std::uint64_t index_bits_per_entry(std::size_t dim);

struct CompressedMessage {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;
  std::uint64_t payload_bits = 0;
  std::uint64_t index_bits = 0;
};

CompressedMessage compress(const CompressorSpec& spec, const Vector& z,
                           Rng& rng);
Vector decompress(const CompressedMessage& msg);
void decompress_into(const CompressedMessage& msg, Vector& out);

// Full uncompressed vector at the given precision, no index overhead.
CompressedMessage full_message(const Vector& z, int float_bits = 64);

// Little-endian u32 count, u32 indices, f64 values.
std::vector<std::uint8_t> encode(const CompressedMessage& msg);
CompressedMessage decode(const std::vector<std::uint8_t>& bytes,
                         std::size_t dim, CompressorKind kind,
                         int float_bits = 64);

}  // namespace vicomp

#endif  // VICOMP_COMPRESSOR_H_
