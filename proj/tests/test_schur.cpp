#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qrsim/schur.hpp"

using namespace qrsim;

namespace {

// Permutation operator on (C^d)^{(x)k} sending basis index digits through pi.
Matrix permutation_op(int d, int k, const std::vector<int>& pi) {
    int dim = 1;
    for (int i = 0; i < k; ++i) dim *= d;
    Matrix u = Matrix::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        std::vector<int> digits(k);
        int rem = col;
        for (int pos = k - 1; pos >= 0; --pos) {
            digits[pos] = rem % d;
            rem /= d;
        }
        int row = 0;
        for (int pos = 0; pos < k; ++pos) row = row * d + digits[pi[pos]];
        u(row, col) = 1.0;
    }
    return u;
}

}  // namespace

TEST_SUITE_BEGIN("schur");

TEST_CASE("symmetric subspace dimensions") {
    CHECK(sym_dim(2, 2) == 3);
    CHECK(sym_dim(4, 2) == 10);
    CHECK(sym_dim(4, 3) == 20);
    CHECK(sym_dim(2, 6) == 7);
    for (int d : {2, 3, 4, 7}) CHECK(sym_dim(d, 1) == d);
}

TEST_CASE("projector invariants and k=1 identity") {
    const SymmetricProjector one = sym_projector(3, 1);
    CHECK((one.matrix - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

    for (auto [d, k] : {std::pair{2, 2}, {2, 3}, {2, 4}, {3, 2}, {4, 2}, {4, 3}}) {
        const SymmetricProjector p = sym_projector(d, k);
        CHECK_NOTHROW(p.check());
        CHECK(p.dim_sym == sym_dim(d, k));
        CHECK(std::abs(p.matrix.trace().real() - static_cast<double>(p.dim_sym)) < 1e-8);

        // Commutes with (and absorbs) every copy permutation.
        std::vector<int> pi(k);
        std::iota(pi.begin(), pi.end(), 0);
        do {
            const Matrix u = permutation_op(d, k, pi);
            CHECK((p.matrix * u - p.matrix).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((u * p.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-10);
        } while (std::next_permutation(pi.begin(), pi.end()));
    }
}

TEST_CASE("d=2 k=2 projector annihilates the singlet") {
    const SymmetricProjector p = sym_projector(2, 2);
    CVector singlet = CVector::Zero(4);
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    CHECK((p.matrix * singlet).cwiseAbs().maxCoeff() < 1e-12);
    // Rank 3.
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.matrix);
    int rank = 0;
    for (int i = 0; i < 4; ++i) rank += es.eigenvalues()(i) > 0.5;
    CHECK(rank == 3);
}

TEST_CASE("tensor powers of pure states are always accepted") {
    Rng rng(101);
    for (auto [d, k] : {std::pair{2, 3}, {4, 2}, {4, 3}, {2, 6}}) {
        for (int trial = 0; trial < 5; ++trial) {
            const PureState psi = haar_sample(d, rng);
            PureState buf = psi;
            for (int i = 1; i < k; ++i) buf = tensor(buf, psi);
            CHECK(schur_accept_prob(buf, d, k) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(schur_accept_prob(DensityMatrix::from_pure(buf), d, k) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("phi-plus iid buffer at d=4 k=3 accepted with certainty") {
    const PureState phi = phi_plus();
    const PureState buf = tensor(tensor(phi, phi), phi);
    CHECK(schur_accept_prob(buf, 4, 3) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("permutation-sum acceptance matches the dense projector") {
    Rng rng(103);
    for (auto [d, k] : {std::pair{2, 2}, {2, 3}, {4, 2}}) {
        const SymmetricProjector p = sym_projector(d, k);
        int dim = 1;
        for (int i = 0; i < k; ++i) dim *= d;
        const PureState big = haar_sample(dim * 2, rng);
        const auto rho = partial_trace(DensityMatrix::from_pure(big), {dim, 2}, {0});
        const double direct = (p.matrix * rho.entries()).trace().real();
        CHECK(schur_accept_prob(rho, d, k) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("maximally mixed buffer accepts at exactly the dimension ratio") {
    for (auto [d, k] : {std::pair{2, 2}, {2, 3}, {4, 2}, {4, 3}}) {
        int dim = 1;
        for (int i = 0; i < k; ++i) dim *= d;
        const double expect = static_cast<double>(sym_dim(d, k)) / dim;
        CHECK(schur_accept_prob(DensityMatrix::maximally_mixed(dim), d, k) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("global haar buffers accept near the dimension ratio") {
    const auto seed = KeystreamSeed::derive(7);
    const Rng rng(7);
    for (auto [d, k] : {std::pair{2, 2}, {2, 3}, {4, 2}, {4, 3}}) {
        BufferModel model{BufferMode::GlobalPseudorandom, k, d};
        const SchurVerdictStats stats =
            schur_filter_game(model, EnsembleSpec{EnsembleKind::Haar, d}, 4000, seed, rng);
        int dim = 1;
        for (int i = 0; i < k; ++i) dim *= d;
        const double expect = static_cast<double>(sym_dim(d, k)) / dim;
        CHECK(stats.dsym_ratio == doctest::Approx(expect).epsilon(1e-15));
        CHECK(stats.inv_k_factorial ==
              doctest::Approx(1.0 / std::tgamma(k + 1.0)).epsilon(1e-12));
        CHECK(std::abs(stats.accept_prob - expect) < 3.0 * stats.accept_stderr);
        CHECK(stats.extinction_ratio == doctest::Approx(1.0 / stats.accept_prob));
    }
}

TEST_CASE("iid pure buffers accept with probability one in the game") {
    const auto seed = KeystreamSeed::derive(8);
    const Rng rng(8);
    BufferModel model{BufferMode::IIDCopies, 3, 2};
    const SchurVerdictStats stats = schur_filter_game(
        model, EnsembleSpec{EnsembleKind::BinaryPhase, 2}, 200, seed, rng);
    CHECK(stats.accept_prob == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(stats.accept_stderr < 1e-10);
}

TEST_CASE("global binary-phase buffer at d=2 k=3 tracks the haar ratio") {
    const auto seed = KeystreamSeed::derive(9);
    const Rng rng(9);
    BufferModel model{BufferMode::GlobalPseudorandom, 3, 2};
    const SchurVerdictStats stats = schur_filter_game(
        model, EnsembleSpec{EnsembleKind::BinaryPhase, 8}, 2000, seed, rng);
    CHECK(std::abs(stats.accept_prob - 0.5) < 3.0 * std::max(stats.accept_stderr, 1e-3));
}

TEST_CASE("game results are deterministic in the seed") {
    const auto seed = KeystreamSeed::derive(10);
    const Rng rng(10);
    BufferModel model{BufferMode::GlobalPseudorandom, 2, 4};
    const EnsembleSpec spec{EnsembleKind::Haar, 4};
    const auto a = schur_filter_game(model, spec, 500, seed, rng);
    const auto b = schur_filter_game(model, spec, 500, seed, rng);
    CHECK(a.accept_prob == b.accept_prob);
    // Serial reference agrees bit-for-bit with the parallel path.
    const auto serial = schur_filter_game(model, spec, 500, seed, rng, false);
    CHECK(a.accept_prob == serial.accept_prob);
    CHECK(a.accept_stderr == serial.accept_stderr);
}

TEST_SUITE_END();
