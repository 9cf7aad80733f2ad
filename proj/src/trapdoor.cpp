#include "qrsim/trapdoor.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>

#include "qrsim/adversary.hpp"
#include "qrsim/parallel.hpp"

namespace qrsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Equatorial observables. Bob's axis carries the conjugate orientation so
// that |Phi+> correlations read cos(alice - bob); with Alice in {0, pi/2}
// and Bob in {pi/4, 3pi/4} every pair then has |E| = 1/sqrt(2), and the
// single anticorrelated pair sits at (alice 0, bob 3pi/4).
Matrix alice_observable(double theta) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    m << 0.0, std::cos(theta) - i * std::sin(theta),
         std::cos(theta) + i * std::sin(theta), 0.0;
    return m;
}

Matrix bob_observable(double theta) { return alice_observable(-theta); }

bool minus_one_wins(const ChshSetting& s) { return s.alice_bit == 0 && s.bob_bit == 1; }

struct JointDistribution {
    // p[a][b] with a, b in {0 (+1), 1 (-1)}.
    std::array<std::array<double, 2>, 2> p{};
};

JointDistribution joint_outcomes(const DensityMatrix& state, const ChshSetting& setting) {
    if (state.dim() != 4)
        throw DimensionMismatch("chsh_round: expected a two-qubit state");
    const Matrix a = alice_observable(setting.alice_axis);
    const Matrix b = bob_observable(setting.bob_axis);
    const Matrix id = Matrix::Identity(2, 2);
    JointDistribution out;
    for (int ia = 0; ia < 2; ++ia) {
        const Matrix pa = 0.5 * (id + (ia == 0 ? 1.0 : -1.0) * a);
        for (int ib = 0; ib < 2; ++ib) {
            const Matrix pb = 0.5 * (id + (ib == 0 ? 1.0 : -1.0) * b);
            const Matrix joint = Eigen::kroneckerProduct(pa, pb).eval();
            out.p[ia][ib] = std::max(0.0, (joint * state.entries()).trace().real());
        }
    }
    return out;
}

KeystreamSeed per_game_key(const KeystreamSeed& seed, std::uint64_t trial) {
    return KeystreamSeed::derive(keystream_word(seed, "game-key", trial));
}

}  // namespace

double default_chsh_threshold() {
    const double quantum = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    return 0.5 * (0.75 + quantum);
}

ChshSetting keystream_settings(const KeystreamSeed& seed, std::int64_t i) {
    if (i < 0) throw std::invalid_argument("keystream_settings: index must be >= 0");
    const std::uint64_t w = keystream_word(seed, "chsh", static_cast<std::uint64_t>(i));
    ChshSetting s;
    s.pair_index = i;
    s.alice_bit = static_cast<int>(w & 1);
    s.bob_bit = static_cast<int>((w >> 1) & 1);
    s.alice_axis = s.alice_bit ? kPi / 2.0 : 0.0;
    s.bob_axis = s.bob_bit ? 3.0 * kPi / 4.0 : kPi / 4.0;
    return s;
}

double chsh_win_probability(const DensityMatrix& state, const ChshSetting& setting) {
    const JointDistribution jd = joint_outcomes(state, setting);
    const double agree = jd.p[0][0] + jd.p[1][1];
    const double disagree = jd.p[0][1] + jd.p[1][0];
    const double total = agree + disagree;
    return (minus_one_wins(setting) ? disagree : agree) / total;
}

bool chsh_round(const DensityMatrix& state, const ChshSetting& setting, Rng& rng) {
    const JointDistribution jd = joint_outcomes(state, setting);
    double u = rng.uniform() * (jd.p[0][0] + jd.p[0][1] + jd.p[1][0] + jd.p[1][1]);
    int oa = 1, ob = 1;
    for (int ia = 0; ia < 2 && oa == 1 && ob == 1; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            u -= jd.p[ia][ib];
            if (u < 0.0) {
                oa = ia;
                ob = ib;
                break;
            }
        }
    const bool agree = oa == ob;
    return minus_one_wins(setting) ? !agree : agree;
}

namespace {

GameVerdict play_game(int k, const DensityMatrix& adversary, double threshold, Rng& rng,
                      const KeystreamSeed* seed) {
    if (k < 1) throw std::invalid_argument("trapdoor_game: k must be >= 1");
    if (threshold <= 0.0 || threshold >= 1.0)
        throw std::invalid_argument("trapdoor_game: threshold must lie in (0,1)");
    int wins = 0;
    for (int i = 0; i < k; ++i) {
        ChshSetting s;
        if (seed) {
            s = keystream_settings(*seed, i);
        } else {
            const std::uint64_t w = rng.next_u64();
            s.pair_index = i;
            s.alice_bit = static_cast<int>(w & 1);
            s.bob_bit = static_cast<int>((w >> 1) & 1);
            s.alice_axis = s.alice_bit ? kPi / 2.0 : 0.0;
            s.bob_axis = s.bob_bit ? 3.0 * kPi / 4.0 : kPi / 4.0;
        }
        if (chsh_round(adversary, s, rng)) ++wins;
    }
    GameVerdict v;
    v.wins = wins;
    v.rounds = k;
    v.threshold = threshold;
    v.win_rate = static_cast<double>(wins) / static_cast<double>(k);
    v.accepted = v.win_rate >= threshold;
    return v;
}

}  // namespace

GameVerdict trapdoor_game(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                          double threshold, Rng& rng) {
    return play_game(k, adversary, threshold, rng, &seed);
}

GameVerdict trapdoor_game_ideal(int k, const DensityMatrix& adversary, double threshold,
                                Rng& rng) {
    return play_game(k, adversary, threshold, rng, nullptr);
}

double trapdoor_pass_rate(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                          double threshold, std::int64_t trials, const Rng& rng,
                          bool parallel) {
    if (trials < 1) throw std::invalid_argument("trapdoor_pass_rate: trials must be >= 1");
    return mean_over_samples(
        trials,
        [&](std::int64_t t) {
            Rng sub = rng.substream("trapdoor-real", static_cast<std::uint64_t>(t));
            const KeystreamSeed key = per_game_key(seed, static_cast<std::uint64_t>(t));
            return trapdoor_game(key, k, adversary, threshold, sub).accepted ? 1.0 : 0.0;
        },
        parallel);
}

HybridReport hybrid_compare(const KeystreamSeed& seed, int k, const DensityMatrix& adversary,
                            double threshold, std::int64_t trials, const Rng& rng,
                            bool parallel) {
    if (trials < 100) throw std::invalid_argument("hybrid_compare: trials must be >= 100");
    const double real_rate = trapdoor_pass_rate(seed, k, adversary, threshold, trials, rng,
                                                parallel);
    const double ideal_rate = mean_over_samples(
        trials,
        [&](std::int64_t t) {
            Rng sub = rng.substream("trapdoor-ideal", static_cast<std::uint64_t>(t));
            return trapdoor_game_ideal(k, adversary, threshold, sub).accepted ? 1.0 : 0.0;
        },
        parallel);

    HybridReport out;
    out.rate_real = real_rate;
    out.rate_ideal = ideal_rate;
    out.difference = real_rate - ideal_rate;
    const double n = static_cast<double>(trials);
    out.sigma = std::sqrt(real_rate * (1.0 - real_rate) / n +
                          ideal_rate * (1.0 - ideal_rate) / n);
    out.trials = trials;
    return out;
}

DensityMatrix trapdoor_adversary(const std::string& name) {
    if (name == "separable") return DensityMatrix::from_pure(zero_pair());
    if (name == "singlet") return DensityMatrix::from_pure(phi_plus());
    if (name == "aligned") {
        // CHSH-optimal separable product |+>|+>; win rate 1/2 + sqrt(2)/8.
        CVector v(4);
        v << 0.5, 0.5, 0.5, 0.5;
        return DensityMatrix::from_pure(PureState{v});
    }
    if (name.rfind("jam:", 0) == 0) {
        const double eta = std::stod(name.substr(4));
        return jamming_state(JammingSpec{eta, JammingModel::Effective});
    }
    throw std::invalid_argument("trapdoor_adversary: unknown adversary '" + name + "'");
}

}  // namespace qrsim
