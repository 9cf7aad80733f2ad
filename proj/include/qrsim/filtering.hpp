#pragma once

#include <vector>

#include "qrsim/qcore.hpp"

namespace qrsim {

enum class FilterSide { AliceOnly, Both };

struct FilterPair {
    double f0 = 1.0;
    double f1 = 1.0;
    Matrix basis = Matrix::Identity(2, 2);  // diagonalizing rotation V
    bool pure_marginal = false;             // lambda1 ~ 0 clamp applied

    bool identity() const { return f0 == 1.0 && f1 == 1.0; }
    // Complete POVM element M = V^dagger F V.
    Matrix povm() const;
};

struct FilterRoundResult {
    DensityMatrix state;
    double p_succ = 0.0;
    FilterPair alice;
    FilterPair bob;
};

struct FilterRoundRecord {
    int round = 0;
    DensityMatrix state;
    double p_succ = 0.0;
    FilterPair alice;
    FilterPair bob;
    double lambda0_alice = 0.5;
    double lambda0_bob = 0.5;
};

struct FilteringTrajectory {
    std::vector<FilterRoundRecord> rounds;
    bool stagnated = false;
    int stagnation_round = -1;  // first round whose state change fell below 1e-12
};

// Filter amplitudes from the marginal eigenvalues lambda0 >= lambda1:
// f0 = min(1, sqrt(l1/l0)), f1 = min(1, sqrt(l0/l1)), with a snap to the
// identity filter when the eigenvalues are within eps_deg of degenerate.
FilterPair filter_params(double lambda0, double lambda1, double eps_deg);

// One round of generalized local filtering on a two-qubit state.
FilterRoundResult filter_round(const DensityMatrix& rho, FilterSide side, double eps_deg);

inline constexpr double kDefaultEpsDeg = 1e-9;

// Iterate filter_round, recording each round and the round at which the
// state change drops below 1e-12.
FilteringTrajectory run_filtering(const DensityMatrix& rho0, int rounds, FilterSide side,
                                  double eps_deg = kDefaultEpsDeg);

}  // namespace qrsim
