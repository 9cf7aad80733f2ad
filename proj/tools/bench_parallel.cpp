// Benchmark the OpenMP Monte Carlo kernels against the serial reference
// path and confirm both produce identical results.

#include <chrono>
#include <cstdio>

#include "qrsim/adversary.hpp"
#include "qrsim/schur.hpp"
#include "qrsim/verification.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qrsim;

namespace {

template <class F>
double time_seconds(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: disabled at build time\n");
#endif

    const Rng rng(0x9d2c5680u);
    const KeystreamSeed key = KeystreamSeed::derive(0x9d2c5680u);

    {
        EnsembleSpec haar{EnsembleKind::Haar, 4};
        MomentOperator serial{}, parallel{};
        const double ts = time_seconds([&] {
            serial = ensemble_moment(haar, 2, 20000, key, rng, /*parallel=*/false);
        });
        const double tp = time_seconds([&] {
            parallel = ensemble_moment(haar, 2, 20000, key, rng, /*parallel=*/true);
        });
        const double dev =
            (serial.matrix.entries() - parallel.matrix.entries()).cwiseAbs().maxCoeff();
        std::printf("haar moment d=4 k=2, 20000 samples: serial %.3fs  openmp %.3fs  "
                    "speedup %.2fx  max dev %.3g\n",
                    ts, tp, ts / tp, dev);
    }

    {
        BufferModel model{BufferMode::GlobalPseudorandom, 3, 4};
        EnsembleSpec haar{EnsembleKind::Haar, 4};
        SchurVerdictStats serial{}, parallel{};
        const double ts = time_seconds([&] {
            serial = schur_filter_game(model, haar, 4000, key, rng, /*parallel=*/false);
        });
        const double tp = time_seconds([&] {
            parallel = schur_filter_game(model, haar, 4000, key, rng, /*parallel=*/true);
        });
        std::printf("schur game d=4 k=3, 4000 samples: serial %.3fs  openmp %.3fs  "
                    "speedup %.2fx  dev %.3g\n",
                    ts, tp, ts / tp, serial.accept_prob - parallel.accept_prob);
    }
    return 0;
}
