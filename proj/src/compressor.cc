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

#include "vicomp/compressor.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace vicomp {

namespace {

double to_wire_precision(double v, int float_bits) {
  return float_bits == 32 ? static_cast<double>(static_cast<float>(v)) : v;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw std::invalid_argument("message truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

CompressorSpec CompressorSpec::identity(std::size_t dim, int float_bits) {
  CompressorSpec spec{CompressorKind::kIdentity, dim, dim, float_bits};
  spec.validate();
  return spec;
}

CompressorSpec CompressorSpec::rand_k(std::size_t dim, std::size_t k,
                                      int float_bits) {
  CompressorSpec spec{CompressorKind::kRandK, dim, k, float_bits};
  spec.validate();
  return spec;
}

CompressorSpec CompressorSpec::top_k(std::size_t dim, std::size_t k,
                                     int float_bits) {
  CompressorSpec spec{CompressorKind::kTopK, dim, k, float_bits};
  spec.validate();
  return spec;
}

std::size_t CompressorSpec::kept() const {
  return kind == CompressorKind::kIdentity ? dim : k;
}

void CompressorSpec::validate() const {
  if (dim == 0) throw std::invalid_argument("compressor: dimension must be >= 1");
  if (float_bits != 32 && float_bits != 64) {
    throw std::invalid_argument("compressor: float bits must be 32 or 64");
  }
  if (kind != CompressorKind::kIdentity && (k < 1 || k > dim)) {
    throw std::invalid_argument("compressor: need 1 <= k <= d, got k=" +
                                std::to_string(k) + ", d=" + std::to_string(dim));
  }
}

double variance_param(const CompressorSpec& spec) {
  spec.validate();
  return static_cast<double>(spec.dim) / static_cast<double>(spec.kept());
}

double expected_density(const CompressorSpec& spec) {
  return variance_param(spec);
}

CompressorSpec parse_compressor(const std::string& text, std::size_t dim,
                                int float_bits) {
  if (text == "identity" || text == "none") {
    return CompressorSpec::identity(dim, float_bits);
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("unknown compressor '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  std::string amount = text.substr(colon + 1);
  const bool percent = !amount.empty() && amount.back() == '%';
  if (percent) amount.pop_back();
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(amount, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != amount.size() || !(value > 0.0)) {
    throw std::invalid_argument("bad compressor amount in '" + text + "'");
  }
  std::size_t k = 0;
  if (percent) {
    k = static_cast<std::size_t>(std::llround(value / 100.0 * static_cast<double>(dim)));
    k = std::max<std::size_t>(k, 1);
  } else {
    if (value != std::floor(value)) {
      throw std::invalid_argument("compressor k must be an integer in '" + text + "'");
    }
    k = static_cast<std::size_t>(value);
  }
  if (kind == "rand" || kind == "randk") return CompressorSpec::rand_k(dim, k, float_bits);
  if (kind == "top" || kind == "topk") return CompressorSpec::top_k(dim, k, float_bits);
  throw std::invalid_argument("unknown compressor kind '" + kind + "'");
}

std::string describe(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::kIdentity:
      return "identity";
    case CompressorKind::kRandK:
      return "rand:" + std::to_string(spec.k);
    case CompressorKind::kTopK:
      return "top:" + std::to_string(spec.k);
  }
  return "?";
}

std::uint64_t index_bits_per_entry(std::size_t dim) {
  if (dim <= 1) return 0;
  return std::bit_width(static_cast<std::uint64_t>(dim - 1));
}

CompressedMessage compress(const CompressorSpec& spec, const Vector& z,
                           Rng& rng) {
  spec.validate();
  if (static_cast<std::size_t>(z.size()) != spec.dim) {
    throw std::invalid_argument("compress: dimension mismatch: expected " +
                                std::to_string(spec.dim) + ", got " +
                                std::to_string(z.size()));
  }
  const std::size_t d = spec.dim;
  CompressedMessage msg;
  msg.kind = spec.kind;
  msg.dim = d;
  switch (spec.kind) {
    case CompressorKind::kIdentity: {
      msg.indices.resize(d);
      std::iota(msg.indices.begin(), msg.indices.end(), 0u);
      msg.values.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        msg.values[i] = to_wire_precision(z[i], spec.float_bits);
      }
      msg.payload_bits = d * spec.float_bits;
      return msg;
    }
    case CompressorKind::kRandK: {
      std::vector<std::uint32_t> pool(d);
      std::iota(pool.begin(), pool.end(), 0u);
      for (std::size_t i = 0; i < spec.k; ++i) {
        const std::size_t j = i + uniform_below(rng, d - i);
        std::swap(pool[i], pool[j]);
      }
      pool.resize(spec.k);
      std::sort(pool.begin(), pool.end());
      const double scale = static_cast<double>(d) / static_cast<double>(spec.k);
      msg.values.reserve(spec.k);
      for (std::uint32_t i : pool) {
        msg.values.push_back(to_wire_precision(scale * z[i], spec.float_bits));
      }
      msg.indices = std::move(pool);
      break;
    }
    case CompressorKind::kTopK: {
      std::vector<std::uint32_t> order(d);
      std::iota(order.begin(), order.end(), 0u);
      auto larger = [&z](std::uint32_t a, std::uint32_t b) {
        const double ma = std::abs(z[a]);
        const double mb = std::abs(z[b]);
        return ma != mb ? ma > mb : a < b;
      };
      std::nth_element(order.begin(), order.begin() + (spec.k - 1), order.end(),
                       larger);
      order.resize(spec.k);
      std::sort(order.begin(), order.end());
      msg.values.reserve(spec.k);
      for (std::uint32_t i : order) {
        msg.values.push_back(to_wire_precision(z[i], spec.float_bits));
      }
      msg.indices = std::move(order);
      break;
    }
  }
  msg.payload_bits = spec.k * spec.float_bits;
  msg.index_bits = spec.k * index_bits_per_entry(d);
  return msg;
}

void decompress_into(const CompressedMessage& msg, Vector& out) {
  if (msg.indices.size() != msg.values.size()) {
    throw std::invalid_argument("decompress: indices and values differ in length");
  }
  out.setZero(msg.dim);
  std::int64_t previous = -1;
  for (std::size_t j = 0; j < msg.indices.size(); ++j) {
    const std::uint32_t i = msg.indices[j];
    if (i >= msg.dim) {
      throw std::out_of_range("decompress: index " + std::to_string(i) +
                              " >= d = " + std::to_string(msg.dim));
    }
    if (static_cast<std::int64_t>(i) <= previous) {
      throw std::invalid_argument("decompress: indices not strictly increasing");
    }
    previous = i;
    out[i] = msg.values[j];
  }
}

Vector decompress(const CompressedMessage& msg) {
  Vector out;
  decompress_into(msg, out);
  return out;
}

CompressedMessage full_message(const Vector& z, int float_bits) {
  Rng unused;
  return compress(CompressorSpec::identity(z.size(), float_bits), z, unused);
}

std::vector<std::uint8_t> encode(const CompressedMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + msg.indices.size() * 12);
  put_u32(out, static_cast<std::uint32_t>(msg.indices.size()));
  for (std::uint32_t i : msg.indices) put_u32(out, i);
  for (double v : msg.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

CompressedMessage decode(const std::vector<std::uint8_t>& bytes,
                         std::size_t dim, CompressorKind kind,
                         int float_bits) {
  std::size_t pos = 0;
  const std::uint32_t count = get_u32(bytes, pos);
  if (bytes.size() != 4 + static_cast<std::size_t>(count) * 12) {
    throw std::invalid_argument("decode: byte length does not match count");
  }
  CompressedMessage msg;
  msg.kind = kind;
  msg.dim = dim;
  msg.indices.reserve(count);
  for (std::uint32_t j = 0; j < count; ++j) msg.indices.push_back(get_u32(bytes, pos));
  msg.values.reserve(count);
  for (std::uint32_t j = 0; j < count; ++j) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    msg.values.push_back(std::bit_cast<double>(bits));
  }
  msg.payload_bits = static_cast<std::uint64_t>(count) * float_bits;
  msg.index_bits = kind == CompressorKind::kIdentity
                       ? 0
                       : count * index_bits_per_entry(dim);
  return msg;
}

}  // namespace vicomp
