#include "qrsim/rng.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace qrsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// SipHash-2-4, 64-bit output.
std::uint64_t siphash24(const std::array<std::uint8_t, 16>& key, const std::uint8_t* msg,
                        std::size_t len) {
    auto read64 = [](const std::uint8_t* p) {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
        return v;
    };
    std::uint64_t k0 = read64(key.data());
    std::uint64_t k1 = read64(key.data() + 8);
    std::uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
    std::uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
    std::uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
    std::uint64_t v3 = 0x7465646279746573ULL ^ k1;
    auto round = [&] {
        v0 += v1; v1 = rotl(v1, 13); v1 ^= v0; v0 = rotl(v0, 32);
        v2 += v3; v3 = rotl(v3, 16); v3 ^= v2;
        v0 += v3; v3 = rotl(v3, 21); v3 ^= v0;
        v2 += v1; v1 = rotl(v1, 17); v1 ^= v2; v2 = rotl(v2, 32);
    };
    std::size_t blocks = len / 8;
    for (std::size_t i = 0; i < blocks; ++i) {
        std::uint64_t m = read64(msg + 8 * i);
        v3 ^= m;
        round();
        round();
        v0 ^= m;
    }
    std::uint64_t last = static_cast<std::uint64_t>(len & 0xff) << 56;
    for (std::size_t i = 0; i < len - 8 * blocks; ++i)
        last |= static_cast<std::uint64_t>(msg[8 * blocks + i]) << (8 * i);
    v3 ^= last;
    round();
    round();
    v0 ^= last;
    v2 ^= 0xff;
    round();
    round();
    round();
    round();
    return v0 ^ v1 ^ v2 ^ v3;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    // Box-Muller; guard against log(0).
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
}

Rng Rng::substream(const std::string& label, std::uint64_t index) const {
    std::uint64_t s = seed_ ^ fnv1a(label);
    std::uint64_t a = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    return Rng(a ^ rotl(b, 31));
}

KeystreamSeed KeystreamSeed::from_hex(const std::string& hex) {
    if (hex.size() != 32)
        throw std::invalid_argument("KeystreamSeed: expected 32 hex characters, got " +
                                    std::to_string(hex.size()));
    KeystreamSeed out;
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument(std::string("KeystreamSeed: bad hex character '") + c + "'");
    };
    for (int i = 0; i < 16; ++i)
        out.bytes[i] = static_cast<std::uint8_t>(nib(hex[2 * i]) << 4 | nib(hex[2 * i + 1]));
    return out;
}

KeystreamSeed KeystreamSeed::derive(std::uint64_t master_seed) {
    KeystreamSeed out;
    std::uint64_t s = master_seed;
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    for (int i = 0; i < 8; ++i) {
        out.bytes[i] = static_cast<std::uint8_t>(a >> (8 * i));
        out.bytes[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
    }
    return out;
}

std::string KeystreamSeed::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : bytes) {
        s += digits[b >> 4];
        s += digits[b & 0xf];
    }
    return s;
}

std::uint64_t keystream_word(const KeystreamSeed& seed, const std::string& label,
                             std::uint64_t counter) {
    std::vector<std::uint8_t> msg(label.begin(), label.end());
    for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(counter >> (8 * i)));
    return siphash24(seed.bytes, msg.data(), msg.size());
}

int keystream_bit(const KeystreamSeed& seed, std::uint64_t index, unsigned bit) {
    if (bit >= 64) throw std::invalid_argument("keystream_bit: bit index out of range");
    return static_cast<int>((keystream_word(seed, "phase", index) >> bit) & 1);
}

}  // namespace qrsim
