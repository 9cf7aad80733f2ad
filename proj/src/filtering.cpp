#include "qrsim/filtering.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace qrsim {

namespace {
constexpr double kStagnationTol = 1e-12;
constexpr double kPureFloor = 1e-8;
}  // namespace

Matrix FilterPair::povm() const {
    Matrix f = Matrix::Zero(2, 2);
    f(0, 0) = f0;
    f(1, 1) = f1;
    return basis.adjoint() * f * basis;
}

FilterPair filter_params(double lambda0, double lambda1, double eps_deg) {
    if (lambda1 < -kStructTol || lambda0 < lambda1)
        throw std::invalid_argument("filter_params: requires lambda0 >= lambda1 >= 0");
    if (std::abs(lambda0 + lambda1 - 1.0) > kStructTol)
        throw std::invalid_argument("filter_params: eigenvalues must sum to 1");

    FilterPair out;
    if (lambda0 - lambda1 < eps_deg) return out;  // degeneracy snap: identity filter

    if (lambda1 <= 0.0) {
        // Pure marginal: the exact filter amplitude vanishes; clamp and flag.
        out.f0 = kPureFloor;
        out.f1 = 1.0;
        out.pure_marginal = true;
        return out;
    }
    out.f0 = std::min(1.0, std::sqrt(lambda1 / lambda0));
    out.f1 = std::min(1.0, std::sqrt(lambda0 / lambda1));
    if (out.f0 < kPureFloor) {
        out.f0 = kPureFloor;
        out.pure_marginal = true;
    }
    return out;
}

FilterRoundResult filter_round(const DensityMatrix& rho, FilterSide side, double eps_deg) {
    if (rho.dim() != 4) throw DimensionMismatch("filter_round: expected a two-qubit state");

    auto side_filter = [&](int keep) {
        const DensityMatrix marginal = partial_trace(rho, {2, 2}, {keep});
        const EighResult eig = eigh(marginal);
        FilterPair fp = filter_params(eig.eigenvalues(0), std::max(0.0, eig.eigenvalues(1)),
                                      eps_deg);
        // eigh returns rho = W Lambda W^dagger; the diagonalizing rotation is W^dagger.
        if (!fp.identity()) fp.basis = eig.eigenvectors.adjoint();
        return fp;
    };

    FilterPair alice = side_filter(0);
    FilterPair bob;  // identity
    if (side == FilterSide::Both) bob = side_filter(1);

    Matrix op = Eigen::kroneckerProduct(alice.povm(), bob.povm()).eval();
    Matrix filtered = conjugate(rho.entries(), op);
    const double p = filtered.trace().real();
    if (p <= 1e-12)
        throw ExperimentFailure("filter_round: filtration succeeded with probability ~0");
    return FilterRoundResult{DensityMatrix(filtered / p, false), p, alice, bob};
}

FilteringTrajectory run_filtering(const DensityMatrix& rho0, int rounds, FilterSide side,
                                  double eps_deg) {
    if (rounds < 0 || rounds > 64)
        throw std::invalid_argument("run_filtering: rounds must lie in 0..64");

    FilteringTrajectory traj;
    DensityMatrix state = rho0;
    for (int m = 1; m <= rounds; ++m) {
        FilterRoundResult r = filter_round(state, side, eps_deg);
        const double change = (r.state.entries() - state.entries()).cwiseAbs().maxCoeff();

        FilterRoundRecord rec{m, r.state, r.p_succ, r.alice, r.bob, 0.5, 0.5};
        rec.lambda0_alice = eigh(partial_trace(state, {2, 2}, {0})).eigenvalues(0);
        rec.lambda0_bob = eigh(partial_trace(state, {2, 2}, {1})).eigenvalues(0);
        traj.rounds.push_back(std::move(rec));

        state = traj.rounds.back().state;
        if (change < kStagnationTol) {
            traj.stagnated = true;
            traj.stagnation_round = m;
            break;
        }
    }
    return traj;
}

}  // namespace qrsim
