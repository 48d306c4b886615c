// SPDX-License-Identifier: Apache-2.0
//
// mgmcast: multigroup multicast precoding for large-scale antenna arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MGMCAST_RNG_HPP
#define MGMCAST_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace mgmcast {

// Seed/stream derivation, documented so every draw in the artifact is
// reproducible from a single master seed:
//
//   master_seed --split_seed(trial)--> trial_seed
//   trial_seed + purpose id          --> one independent RandomStream
//
// Purpose ids used by the library:
enum class Substream : std::uint64_t {
  kUePositions = 1,
  kSmallScaleFading = 2,
  kPilotNoise = 3,
  kScaInit = 4,
};

// SplitMix64 finalizer (Steele et al.), used only for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent 64-bit seed for a trial index from the master seed.
std::uint64_t split_seed(std::uint64_t master_seed, std::uint64_t index);

/// Counter-based generator: Philox4x32-10 (Salmon et al., SC'11).
/// The 64-bit key selects the keyed permutation; the 128-bit counter is
/// (stream_id, block_index), so streams with distinct ids are independent
/// and a stream's output is a pure function of (key, stream_id, position).
class RandomStream {
 public:
  RandomStream(std::uint64_t key, std::uint64_t stream_id);
  RandomStream(std::uint64_t key, Substream purpose)
      : RandomStream(key, static_cast<std::uint64_t>(purpose)) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit();

  /// Standard normal via Box-Muller (pairs cached).
  double next_gaussian();

  /// CN(0,1): real and imaginary parts are independent N(0, 1/2).
  std::complex<double> next_cgaussian();

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // consumed
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace mgmcast

#endif  // MGMCAST_RNG_HPP
