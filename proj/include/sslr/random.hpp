/*
   Copyright 2026 The sslr Authors

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

#include <cstdint>
#include <random>
#include <vector>

namespace sslr {

// One step of the SplitMix64 generator; used to derive independent stream
// seeds from a master seed and a list of counters.
std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0,
                          std::uint64_t d = 0);

// Seeded random stream. Every variate is built from raw 64-bit engine output
// so that draws are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    // Gamma(shape, 1), Marsaglia-Tsang with the shape < 1 boost.
    double gamma(double shape);
    // Uniform integer in [0, bound).
    std::uint64_t index(std::uint64_t bound);
    int sign() { return (engine_() >> 63) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Fisher-Yates partial shuffle: the first k entries of the returned vector
// are a uniformly random k-subset (in random order) of 0..n-1.
std::vector<std::size_t> partial_shuffle(std::size_t n, std::size_t k, Rng& rng);

} // namespace sslr
