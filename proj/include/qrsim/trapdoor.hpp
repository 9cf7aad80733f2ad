#pragma once

#include <cstdint>
#include <string>

#include "qrsim/qcore.hpp"

namespace qrsim {

// One CHSH setting pair derived from the keystream. The four canonical
// pairs: Alice in {0, pi/2}, Bob in {pi/4, 3pi/4}, equatorial Bloch angles.
struct ChshSetting {
    double alice_axis = 0.0;
    double bob_axis = 0.0;
    std::int64_t pair_index = 0;
    int alice_bit = 0;
    int bob_bit = 0;
};

struct GameVerdict {
    int wins = 0;
    int rounds = 0;
    double win_rate = 0.0;
    bool accepted = false;
    double threshold = 0.0;
};

struct HybridReport {
    double rate_real = 0.0;
    double rate_ideal = 0.0;
    double difference = 0.0;
    double sigma = 0.0;  // two-proportion standard error
    std::int64_t trials = 0;
};

// Midpoint of the classical bound 3/4 and the quantum optimum cos^2(pi/8).
double default_chsh_threshold();

// Deterministic map from (seed, i) to one of the four setting pairs,
// uniform over pairs for uniform keystream output.
ChshSetting keystream_settings(const KeystreamSeed& seed, std::int64_t i);

// Sample the joint +/- outcome of the two equatorial measurements by Born
// rule; returns the CHSH-game win flag for this setting pair.
bool chsh_round(const DensityMatrix& state, const ChshSetting& setting, Rng& rng);

// Exact single-round win probability (used by tests as an oracle).
double chsh_win_probability(const DensityMatrix& state, const ChshSetting& setting);

// k rounds with keystream-derived settings against a fixed i.i.d. adversary
// state; verdict by threshold on the win rate.
GameVerdict trapdoor_game(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                          double threshold, Rng& rng);

// Same game with fresh uniform random settings instead of the keystream.
GameVerdict trapdoor_game_ideal(int k, const DensityMatrix& adversary, double threshold,
                                Rng& rng);

// Pass rates of the keystream-driven (real) and truly random (ideal) games
// over `trials` games each, with the two-proportion sigma.
HybridReport hybrid_compare(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                            double threshold, std::int64_t trials, const Rng& rng,
                            bool parallel = true);

// Mean pass rate of the keystream game over `trials` independent games.
double trapdoor_pass_rate(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                          double threshold, std::int64_t trials, const Rng& rng,
                          bool parallel = true);

// Named adversary states: "separable" (|00><00|), "aligned" (the CHSH-optimal
// separable product |+>|+>), "singlet" (|Phi+>), "jam:<eta>".
DensityMatrix trapdoor_adversary(const std::string& name);

}  // namespace qrsim
