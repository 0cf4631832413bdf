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

#ifndef VICOMP_SIMNET_H_
#define VICOMP_SIMNET_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "vicomp/compressor.h"
#include "vicomp/linalg.h"
#include "vicomp/rng.h"

namespace vicomp {

struct IterationBits {
  std::uint64_t iter = 0;
  std::uint64_t up_payload = 0;
  std::uint64_t up_index = 0;
  std::uint64_t down_payload = 0;
  std::uint64_t down_index = 0;
  bool full_sync = false;
};

// Records are numbered by the iterate they produce: record 0 holds the
// initial exchange, record k+1 the traffic of iteration k.
class CommLedger {
 public:
  explicit CommLedger(std::size_t devices);

  void open_record(std::uint64_t iter);
  void add_uplink(std::size_t m, std::uint64_t payload, std::uint64_t index);
  void add_downlink(std::uint64_t payload, std::uint64_t index);
  void mark_full_sync();

  std::size_t devices() const { return up_payload_.size(); }
  std::uint64_t uplink_payload_bits(std::size_t m) const;
  std::uint64_t uplink_index_bits(std::size_t m) const;
  std::uint64_t uplink_payload_bits() const;
  std::uint64_t uplink_index_bits() const;
  std::uint64_t downlink_payload_bits() const { return down_payload_; }
  std::uint64_t downlink_index_bits() const { return down_index_; }
  std::uint64_t full_sync_events() const { return full_syncs_; }

  const std::vector<IterationBits>& records() const { return records_; }

  // iter,bits_up_payload,bits_up_index,bits_down_payload,bits_down_index,full_sync
  void write_csv(std::ostream& out) const;

 private:
  IterationBits& current();

  std::vector<std::uint64_t> up_payload_;
  std::vector<std::uint64_t> up_index_;
  std::uint64_t down_payload_ = 0;
  std::uint64_t down_index_ = 0;
  std::uint64_t full_syncs_ = 0;
  std::vector<IterationBits> records_;
};

class Network {
 public:
  Network(std::vector<CompressorSpec> device_specs, CompressorSpec server_spec,
          std::uint64_t seed, int float_bits = 64);

  std::size_t devices() const { return device_specs_.size(); }
  std::uint64_t seed() const { return seed_; }
  int float_bits() const { return float_bits_; }
  const CompressorSpec& device_spec(std::size_t m) const;
  const CompressorSpec& server_spec() const { return server_spec_; }

  CommLedger& ledger() { return ledger_; }
  const CommLedger& ledger() const { return ledger_; }

  // Device m's compression stream for one phase of iteration k.
  Rng device_stream(std::size_t m, std::uint64_t k, std::uint64_t phase) const;
  Rng server_stream(std::uint64_t k, std::uint64_t phase) const;

  // Device m sends a compressed message; returns what the server decodes.
  Vector uplink(std::size_t m, const CompressedMessage& msg);
  // Uncompressed d*b exchange used by full synchronizations.
  Vector uplink_full(std::size_t m, const Vector& v);
  // Counted once regardless of M; every device decodes the same vector.
  Vector broadcast(const CompressedMessage& msg);
  Vector broadcast_full(const Vector& v);

  bool shared_coin(double p);
  // Queue outcomes that the next shared_coin calls return instead of sampling.
  void force_coins(std::vector<bool> outcomes);

  std::vector<std::size_t> sample_participants(std::size_t b);

 private:
  void check_device(std::size_t m) const;

  std::vector<CompressorSpec> device_specs_;
  CompressorSpec server_spec_;
  std::uint64_t seed_;
  int float_bits_;
  CommLedger ledger_;
  Rng coin_rng_;
  Rng participant_rng_;
  std::deque<bool> forced_;
};

}  // namespace vicomp

#endif  // VICOMP_SIMNET_H_
