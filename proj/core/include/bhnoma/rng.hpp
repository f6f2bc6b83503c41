/*
   Copyright 2026 The bhnoma Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace bhnoma {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
/// Output is a pure function of (counter, key), so any draw can be
/// regenerated independently of evaluation order.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key);
};

/// Tags separating independent random streams that share a master seed.
enum class StreamDomain : std::uint32_t {
    UserPlacement = 1,
    Demand = 2,
    Fading = 3,
    EstimationError = 4,
    InterbeamFading = 5,
    OverlapGeometry = 6,
    OutageTrials = 7,
    Scenario = 8,
};

/// Sequential view over one Philox substream. The substream is identified by
/// (seed, domain, a, b, c); successive draws walk the fourth counter word.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, StreamDomain domain, std::uint32_t a = 0,
                  std::uint32_t b = 0, std::uint32_t c = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double exponential();
    /// Circularly-symmetric complex Gaussian CN(0, variance).
    std::complex<double> complex_normal(double variance = 1.0);

private:
    void refill();

    Philox4x32::Key key_{};
    Philox4x32::Counter ctr_{};
    Philox4x32::Counter buffer_{};
    int used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// splitmix64 finalizer, used to derive keys and content hashes.
std::uint64_t mix64(std::uint64_t x);

}  // namespace bhnoma
