#ifndef NSKEY_SQUASH_HPP
#define NSKEY_SQUASH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nskey/device.hpp"
#include "nskey/ensembles.hpp"

namespace nskey {

// ---- Squashed secrecy quantifiers ---------------------------------------

struct SquashedMi {
    double bits = 0.0;
    int x = 0, y = 0;  // maximizing honest inputs
};

// max over direct measurements of I(A:B) of the measured distribution.
SquashedMi squashed_mutual_information(const Device<Rat>& device);

struct SquashedCmi {
    double bits = 0.0;
    std::vector<int> argmin_z;  // per input pair, x-major
};

// max over (x,y) of the exact minimum over Eve's direct measurements z of
// I(A:B|E) on the complete extension.
SquashedCmi squashed_cmi_over_ce(const Device<Rat>& device, const CompleteExtension& ce);

struct RefinedCmi {
    double direct_bits = 0.0;
    double refined_bits = 0.0;  // after mixing z with a dice; never larger
    bool improved = false;
};

// Reports whether general measurements (dice mixtures over z) beat the best
// direct measurement for the conditional mutual information.
RefinedCmi squashed_cmi_refined(const Device<Rat>& device, const CompleteExtension& ce,
                                std::uint64_t seed = 0);

// ---- Eve strategies and the tabulated channel family ---------------------

struct EveStrategy {
    Channel<Rat> dice;  // single column over Z
    Channel<Rat> post;  // E -> E'
    std::string note;
};

EveStrategy direct_strategy(const CompleteExtension& ce, int z);

// The member order of the nine-vertex minimal ensemble of the HRW family.
const std::vector<std::string>& hrw_support_labels();
const std::vector<int>& hrw_support_vertex_ids();

// Deterministic 9 -> 7 post-processing channels, one per honest input pair,
// with columns in the order of hrw_support_labels().
Channel<Rat> hrw_tabulated_channel(int x, int y);

// Exact product test of every member at the given measurement.
bool ensemble_all_product_at(const Ensemble& ensemble, const DirectMeasurement& m);

// Constructs an Eve strategy whose induced ensemble measures to products at
// (x,y), when one exists with a single non-deterministic member per z:
// the nonlocal member's weight is spread uniformly over the output cells by
// routing fractions of point-mass members into it.
std::optional<EveStrategy> product_zero_certificate(const CompleteExtension& ce, int x, int y);

// ---- The upper-bound pipeline -------------------------------------------

struct NsqOptions {
    std::uint64_t seed = 0;
    int restarts = 4;           // intrinsic-refinement restarts per (x,y)
    int max_evals = 500;        // per restart
    int refine_top_z = 2;       // number of best direct z refined by channels
    bool dice_search = true;    // pairwise dice mixtures of direct z
};

struct InputStrategyReport {
    int x = 0, y = 0;
    double bits = 0.0;
    std::string strategy;
    bool certified_product = false;
};

struct SquashedBound {
    std::string device_id;
    double i_ab = 0.0;
    double i_ab_e_direct = 0.0;
    double i_ab_e_channel = 0.0;
    double n_c = 0.0;
    double nsq_upper = 0.0;
    bool certified_zero = false;
    bool general_beats_direct = false;
    std::vector<InputStrategyReport> per_input;
};

SquashedBound nsq_upper_bound(const Device<Rat>& device, const CompleteExtension& ce,
                              const std::vector<std::vector<EveStrategy>>& extra_strategies = {},
                              const NsqOptions& opts = {});

// ---- Curves ---------------------------------------------------------------

struct BoundCurve {
    std::string param_name = "param";
    std::vector<double> grid;
    std::vector<double> i_ab, i_ab_e_direct, i_ab_e_channel, n_c, nsq_upper, lch;
    std::vector<bool> certified;
    std::vector<double> overlay;  // optional pass-through column
};

// Pointwise-minimum envelope followed by the one-dimensional lower convex
// hull (monotone chain), linearly interpolated back onto the grid.
void lower_convex_hull(BoundCurve& curve);

// Fixed header, one row per grid point, 12 significant digits.
std::string curve_to_csv(const BoundCurve& curve);

std::string curve_to_gnuplot(const BoundCurve& curve, const std::string& csv_path);

enum class Family { Iso, HrwA, HrwB, HrwC, HrwD };

Family family_from_string(const std::string& name);
std::string family_to_string(Family fam);

// (delta, epsilon_p) as a function of the CHSH error.
std::pair<Rat, Rat> family_params(Family fam, const Rat& chsh_eps);
Device<Rat> family_device(Family fam, const Rat& chsh_eps);

BoundCurve compute_bound_curve(Family fam, const std::vector<Rat>& grid,
                               const NsqOptions& opts = {});

SquashedBound device_bound(const Device<Rat>& device, const NsqOptions& opts = {},
                           const std::string& id = "device");

}  // namespace nskey

#endif
