#ifndef NSKEY_INTRINSIC_HPP
#define NSKEY_INTRINSIC_HPP

#include <cstdint>
#include <vector>

#include "nskey/distribution.hpp"

namespace nskey {

struct IntrinsicOptions {
    // Output alphabet cap for the post-processing channel; -1 means |E|.
    int eprime_cap = -1;
    int restarts = 32;
    std::uint64_t seed = 0;
    std::vector<Channel<double>> seed_channels;
    int max_evals_per_restart = 1600;
    // Deterministic channels are enumerated exhaustively while
    // |E'|^|E| stays below this.
    long deterministic_budget = 1000000;
};

struct IntrinsicResult {
    double bits = 0.0;
    Channel<double> witness;
};

// Certified upper bound on the intrinsic information I(A:B|E') minimized
// over post-processing channels on E. The identity and constant channels
// are always in the searched class, so the result never exceeds
// min{ I(A:B|E), I(A:B) }.
IntrinsicResult intrinsic_information_upper(const JointDistribution<double>& dist,
                                            const std::vector<int>& vars_a,
                                            const std::vector<int>& vars_b,
                                            const std::vector<int>& vars_e,
                                            const IntrinsicOptions& opts = {});

}  // namespace nskey

#endif
