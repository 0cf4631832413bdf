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

#include "vicomp/simnet.h"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace vicomp {

CommLedger::CommLedger(std::size_t devices)
    : up_payload_(devices, 0), up_index_(devices, 0) {
  if (devices == 0) throw std::invalid_argument("ledger: need at least one device");
}

void CommLedger::open_record(std::uint64_t iter) {
  if (!records_.empty() && iter <= records_.back().iter) {
    throw std::logic_error("ledger: records must advance");
  }
  records_.push_back({});
  records_.back().iter = iter;
}

IterationBits& CommLedger::current() {
  if (records_.empty()) open_record(0);
  return records_.back();
}

void CommLedger::add_uplink(std::size_t m, std::uint64_t payload,
                            std::uint64_t index) {
  if (m >= up_payload_.size()) throw std::out_of_range("ledger: bad device index");
  up_payload_[m] += payload;
  up_index_[m] += index;
  current().up_payload += payload;
  current().up_index += index;
}

void CommLedger::add_downlink(std::uint64_t payload, std::uint64_t index) {
  down_payload_ += payload;
  down_index_ += index;
  current().down_payload += payload;
  current().down_index += index;
}

void CommLedger::mark_full_sync() {
  IterationBits& rec = current();
  if (!rec.full_sync) {
    rec.full_sync = true;
    ++full_syncs_;
  }
}

std::uint64_t CommLedger::uplink_payload_bits(std::size_t m) const {
  return up_payload_.at(m);
}

std::uint64_t CommLedger::uplink_index_bits(std::size_t m) const {
  return up_index_.at(m);
}

std::uint64_t CommLedger::uplink_payload_bits() const {
  return std::accumulate(up_payload_.begin(), up_payload_.end(), std::uint64_t{0});
}

std::uint64_t CommLedger::uplink_index_bits() const {
  return std::accumulate(up_index_.begin(), up_index_.end(), std::uint64_t{0});
}

void CommLedger::write_csv(std::ostream& out) const {
  out << "iter,bits_up_payload,bits_up_index,bits_down_payload,"
         "bits_down_index,full_sync\n";
  for (const IterationBits& r : records_) {
    out << r.iter << ',' << r.up_payload << ',' << r.up_index << ','
        << r.down_payload << ',' << r.down_index << ','
        << (r.full_sync ? 1 : 0) << '\n';
  }
}

Network::Network(std::vector<CompressorSpec> device_specs,
                 CompressorSpec server_spec, std::uint64_t seed,
                 int float_bits)
    : device_specs_(std::move(device_specs)),
      server_spec_(server_spec),
      seed_(seed),
      float_bits_(float_bits),
      ledger_(device_specs_.size()),
      coin_rng_(make_stream(seed, Stream::kSharedCoin)),
      participant_rng_(make_stream(seed, Stream::kParticipants)) {
  server_spec_.validate();
  for (const auto& spec : device_specs_) {
    spec.validate();
    if (spec.dim != server_spec_.dim) {
      throw std::invalid_argument("network: compressor dimensions disagree");
    }
  }
  if (float_bits_ != 32 && float_bits_ != 64) {
    throw std::invalid_argument("network: float bits must be 32 or 64");
  }
}

void Network::check_device(std::size_t m) const {
  if (m >= device_specs_.size()) {
    throw std::out_of_range("network: device " + std::to_string(m) +
                            " out of range");
  }
}

const CompressorSpec& Network::device_spec(std::size_t m) const {
  check_device(m);
  return device_specs_[m];
}

Rng Network::device_stream(std::size_t m, std::uint64_t k,
                           std::uint64_t phase) const {
  return make_stream(seed_, Stream::kDeviceCompression, {m, k, phase});
}

Rng Network::server_stream(std::uint64_t k, std::uint64_t phase) const {
  return make_stream(seed_, Stream::kServerCompression, {k, phase});
}

Vector Network::uplink(std::size_t m, const CompressedMessage& msg) {
  check_device(m);
  Vector out = decompress(msg);
  ledger_.add_uplink(m, msg.payload_bits, msg.index_bits);
  return out;
}

Vector Network::uplink_full(std::size_t m, const Vector& v) {
  return uplink(m, full_message(v, float_bits_));
}

Vector Network::broadcast(const CompressedMessage& msg) {
  Vector out = decompress(msg);
  ledger_.add_downlink(msg.payload_bits, msg.index_bits);
  return out;
}

Vector Network::broadcast_full(const Vector& v) {
  return broadcast(full_message(v, float_bits_));
}

bool Network::shared_coin(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("shared_coin: probability must lie in [0, 1]");
  }
  if (!forced_.empty()) {
    const bool out = forced_.front();
    forced_.pop_front();
    return out;
  }
  return uniform01(coin_rng_) < p;
}

void Network::force_coins(std::vector<bool> outcomes) {
  forced_.insert(forced_.end(), outcomes.begin(), outcomes.end());
}

std::vector<std::size_t> Network::sample_participants(std::size_t b) {
  const std::size_t M = devices();
  if (b < 1 || b > M) {
    throw std::invalid_argument("sample_participants: need 1 <= b <= M");
  }
  std::vector<std::size_t> pool(M);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = i + uniform_below(participant_rng_, M - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(b);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace vicomp
