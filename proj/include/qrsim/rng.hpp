#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace qrsim {

// Deterministic pseudorandom stream (xoshiro256++). Every stochastic routine
// in the project takes one of these by reference; per-task substreams are
// derived from a master seed by hashing (label, index), so serial and
// parallel execution orders produce identical results.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1), 53 bits of entropy.
    double uniform();

    // Standard normal via Box-Muller (no cached spare; two draws per call).
    double normal();

    // Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n);

    // Independent stream keyed by (this stream's seed, label, index).
    Rng substream(const std::string& label, std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_;
};

// 128-bit secret driving all keystream-derived choices (measurement bases,
// phase-state sign functions). A PRF stand-in: expansion uses SipHash-2-4
// keyed by the seed, which gives deterministic, well-mixed output but makes
// no cryptographic security claim.
struct KeystreamSeed {
    std::array<std::uint8_t, 16> bytes{};

    static KeystreamSeed from_hex(const std::string& hex);
    static KeystreamSeed derive(std::uint64_t master_seed);
    std::string to_hex() const;
};

// Keystream expansion: one 64-bit word per (seed, label, counter).
std::uint64_t keystream_word(const KeystreamSeed& seed, const std::string& label,
                             std::uint64_t counter);

// Bit x of the word for (seed, "phase"/index); requires x < 64.
int keystream_bit(const KeystreamSeed& seed, std::uint64_t index, unsigned bit);

}  // namespace qrsim
