#include <doctest.h>

#include <cmath>

#include "qrsim/adversary.hpp"
#include "qrsim/trapdoor.hpp"

using namespace qrsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

double average_win_probability(const DensityMatrix& rho) {
    const auto seed = KeystreamSeed::derive(0);
    double total = 0.0;
    for (int ab = 0; ab < 2; ++ab)
        for (int bb = 0; bb < 2; ++bb) {
            ChshSetting s;
            s.alice_bit = ab;
            s.bob_bit = bb;
            s.alice_axis = ab ? kPi / 2.0 : 0.0;
            s.bob_axis = bb ? 3.0 * kPi / 4.0 : kPi / 4.0;
            total += chsh_win_probability(rho, s);
        }
    return total / 4.0;
}

}  // namespace

TEST_SUITE_BEGIN("trapdoor");

TEST_CASE("threshold sits midway between classical and quantum optima") {
    const double q = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    CHECK(default_chsh_threshold() == doctest::Approx(0.5 * (0.75 + q)).epsilon(1e-15));
    CHECK(default_chsh_threshold() == doctest::Approx(0.80178).epsilon(1e-4));
}

TEST_CASE("keystream settings are deterministic and uniform") {
    const auto seed = KeystreamSeed::derive(31);
    const ChshSetting a = keystream_settings(seed, 12);
    const ChshSetting b = keystream_settings(seed, 12);
    CHECK(a.alice_axis == b.alice_axis);
    CHECK(a.bob_axis == b.bob_axis);

    int counts[4] = {0, 0, 0, 0};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const ChshSetting s = keystream_settings(seed, i);
        CHECK((s.alice_axis == 0.0 || s.alice_axis == doctest::Approx(kPi / 2.0)));
        CHECK((s.bob_axis == doctest::Approx(kPi / 4.0) ||
               s.bob_axis == doctest::Approx(3.0 * kPi / 4.0)));
        ++counts[s.alice_bit * 2 + s.bob_bit];
    }
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - n / 4) < 3 * sigma);

    CHECK_THROWS(keystream_settings(seed, -1));
}

TEST_CASE("distinct seeds give mostly distinct setting sequences") {
    const auto s1 = KeystreamSeed::derive(1);
    const auto s2 = KeystreamSeed::derive(2);
    int differ = 0;
    for (int i = 0; i < 1000; ++i) {
        const ChshSetting a = keystream_settings(s1, i);
        const ChshSetting b = keystream_settings(s2, i);
        if (a.alice_bit != b.alice_bit || a.bob_bit != b.bob_bit) ++differ;
    }
    CHECK(differ >= 400);
}

TEST_CASE("exact win probabilities per adversary") {
    const double q = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    const auto singlet = trapdoor_adversary("singlet");
    // Every setting pair reaches the quantum optimum on |Phi+>.
    for (int ab = 0; ab < 2; ++ab)
        for (int bb = 0; bb < 2; ++bb) {
            ChshSetting s;
            s.alice_bit = ab;
            s.bob_bit = bb;
            s.alice_axis = ab ? kPi / 2.0 : 0.0;
            s.bob_axis = bb ? 3.0 * kPi / 4.0 : kPi / 4.0;
            CHECK(chsh_win_probability(singlet, s) == doctest::Approx(q).epsilon(1e-12));
        }

    CHECK(average_win_probability(trapdoor_adversary("separable")) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(average_win_probability(trapdoor_adversary("aligned")) ==
          doctest::Approx(0.5 + std::sqrt(2.0) / 8.0).epsilon(1e-12));
    CHECK(average_win_probability(DensityMatrix::maximally_mixed(4)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // No separable strategy beats the classical bound.
    CHECK(average_win_probability(trapdoor_adversary("aligned")) < 0.75);
}

TEST_CASE("sampled rounds track the exact win probability") {
    Rng rng(47);
    const auto singlet = trapdoor_adversary("singlet");
    ChshSetting s;
    s.alice_axis = 0.0;
    s.bob_axis = kPi / 4.0;
    const int n = 100000;
    int wins = 0;
    for (int i = 0; i < n; ++i) wins += chsh_round(singlet, s, rng);
    const double q = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
    CHECK(std::abs(static_cast<double>(wins) / n - q) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("game verdicts are deterministic and arithmetically consistent") {
    const auto seed = KeystreamSeed::derive(55);
    Rng r1(55), r2(55);
    const auto singlet = trapdoor_adversary("singlet");
    const GameVerdict a = trapdoor_game(seed, 64, singlet, default_chsh_threshold(), r1);
    const GameVerdict b = trapdoor_game(seed, 64, singlet, default_chsh_threshold(), r2);
    CHECK(a.wins == b.wins);
    CHECK(a.accepted == b.accepted);
    CHECK(a.win_rate == doctest::Approx(static_cast<double>(a.wins) / 64.0));
    CHECK(a.accepted == (a.win_rate >= a.threshold));

    CHECK_THROWS(trapdoor_game(seed, 0, singlet, 0.8, r1));
    CHECK_THROWS(trapdoor_game(seed, 16, singlet, 1.5, r1));
}

TEST_CASE("pass rates separate honest from separable adversaries") {
    const auto seed = KeystreamSeed::derive(91);
    const Rng rng(91);
    const double th = default_chsh_threshold();

    const double singlet_rate =
        trapdoor_pass_rate(seed, 256, trapdoor_adversary("singlet"), th, 200, rng);
    CHECK(singlet_rate >= 0.95);

    const double sep_rate =
        trapdoor_pass_rate(seed, 256, trapdoor_adversary("separable"), th, 200, rng);
    CHECK(sep_rate <= 0.05);
}

TEST_CASE("aligned separable pass rate decays in the round count") {
    const auto seed = KeystreamSeed::derive(92);
    const Rng rng(92);
    const double th = default_chsh_threshold();
    const auto aligned = trapdoor_adversary("aligned");
    const double r16 = trapdoor_pass_rate(seed, 16, aligned, th, 200, rng);
    const double r64 = trapdoor_pass_rate(seed, 64, aligned, th, 200, rng);
    const double r256 = trapdoor_pass_rate(seed, 256, aligned, th, 200, rng);
    CHECK(r16 > r64);
    CHECK(r64 >= r256);
    CHECK(r256 <= 0.05);
}

TEST_CASE("hybrid real and ideal rates agree within noise") {
    const auto seed = KeystreamSeed::derive(93);
    const Rng rng(93);
    const HybridReport rep = hybrid_compare(seed, 64, trapdoor_adversary("singlet"),
                                            default_chsh_threshold(), 500, rng);
    CHECK(std::abs(rep.difference) <= 3.0 * std::max(rep.sigma, 1e-3));
    CHECK(rep.rate_real >= 0.5);
    CHECK(rep.rate_ideal >= 0.5);

    CHECK_THROWS(hybrid_compare(seed, 64, trapdoor_adversary("singlet"), 0.8, 50, rng));
}

TEST_CASE("parallel and serial pass rates coincide bit for bit") {
    const auto seed = KeystreamSeed::derive(94);
    const Rng rng(94);
    const auto adv = trapdoor_adversary("jam:0.3");
    const double p = trapdoor_pass_rate(seed, 32, adv, 0.8, 100, rng, true);
    const double s = trapdoor_pass_rate(seed, 32, adv, 0.8, 100, rng, false);
    CHECK(p == s);
}

TEST_CASE("named adversary parsing") {
    CHECK(fidelity_to_pure(trapdoor_adversary("jam:0.2"), phi_plus()) ==
          doctest::Approx(0.9).epsilon(1e-12));
    CHECK_THROWS(trapdoor_adversary("unknown"));
}

TEST_SUITE_END();
