#ifndef NSKEY_ENSEMBLES_HPP
#define NSKEY_ENSEMBLES_HPP

#include <string>
#include <vector>

#include "nskey/device.hpp"

namespace nskey {

// Weighted decomposition of a device; the mixture reconstructs the parent
// exactly in rational arithmetic.
struct Ensemble {
    std::vector<Rat> weights;
    std::vector<Device<Rat>> members;
};

// Support of polytope vertices with unique strictly positive weights; no
// proper subset of the support can reconstruct the parent.
struct MinimalEnsemble {
    std::vector<int> support;  // ascending vertex indices
    std::vector<Rat> weights;
};

struct EnumerationOptions {
    long budget = -1;             // candidate scan cap, -1 = unlimited
    long max_ensembles = -1;      // stop once this many are found
    std::string resume;           // checkpoint blob from a previous run
    bool exact_only = false;      // disable the floating-point prefilter
};

struct EnumerationResult {
    std::vector<MinimalEnsemble> ensembles;
    long scanned = 0;
    long total_candidates = 0;
    bool complete = true;
    std::string checkpoint;  // present when the budget ran out
};

// Enumerates every minimal ensemble of the device over the given vertex
// list. Supports are scanned by increasing size in lexicographic order;
// any support containing an already-found minimal support is skipped, so a
// support that survives to its own feasibility test is minimal by
// definition. Exact rational arithmetic decides every acceptance.
EnumerationResult enumerate_minimal_ensembles(const Device<Rat>& device,
                                              const std::vector<Device<Rat>>& vertices,
                                              const EnumerationOptions& opts = {});

// The tripartite extension: input z selects a minimal ensemble, output e
// reveals the member. Non-signaling toward the honest parties holds by
// construction since every z reconstructs the same parent.
struct CompleteExtension {
    Device<Rat> parent;
    std::vector<Device<Rat>> vertices;
    std::vector<MinimalEnsemble> ensembles;
    int e_alphabet = 0;  // max ensemble size; missing symbols carry zero mass

    int z_size() const { return static_cast<int>(ensembles.size()); }
    Rat weight(int z, int e) const {
        const auto& ens = ensembles.at(z);
        return e < static_cast<int>(ens.weights.size()) ? ens.weights[e] : Rat(0);
    }
    const Device<Rat>& member(int z, int e) const {
        return vertices.at(ensembles.at(z).support.at(e));
    }
};

CompleteExtension build_complete_extension(const Device<Rat>& device,
                                           const std::vector<Device<Rat>>& vertices,
                                           const EnumerationOptions& opts = {});

// Joint distribution over (a, b, e) after the honest parties measure (x, y)
// and Eve picks input z; e runs over the padded alphabet.
JointDistribution<Rat> measured_tripartite(const CompleteExtension& ce, int z,
                                           const DirectMeasurement& m);

// Applies a dice over Z (single-column channel) and a post-processing
// channel on E; returns the induced possibly-mixed-member ensemble.
Ensemble eve_attack(const CompleteExtension& ce, const Channel<Rat>& dice,
                    const Channel<Rat>& post);

}  // namespace nskey

#endif
