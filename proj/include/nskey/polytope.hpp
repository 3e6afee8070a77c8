#ifndef NSKEY_POLYTOPE_HPP
#define NSKEY_POLYTOPE_HPP

#include <optional>
#include <string>
#include <vector>

#include "nskey/affine.hpp"
#include "nskey/device.hpp"

namespace nskey {

// The 24 extremal (2,2,2,2) devices: locals L_{abgs} at indices
// 8a+4b+2g+s in 0..15, nonlocal boxes B_{rst} at 16+4r+2s+t.
struct LabeledVertex {
    std::string label;
    Device<Rat> device;
    bool local = false;
};

const std::vector<LabeledVertex>& chsh_vertices();
int vertex_index(const std::string& label);

// Shared exact chart over the 24 vertices (built once).
const AffineChart& chsh_chart();

struct Decomposition {
    std::vector<int> vertex_ids;
    std::vector<Rat> weights;
    std::vector<bool> local_flags;
};

struct LocalityResult {
    bool local = false;
    std::optional<Decomposition> model;
};

// Feasibility over the 16 local vertices; returns an explicit hidden
// variable model when one exists.
LocalityResult is_local(const Device<Rat>& device);

struct FractionResult {
    Rat fraction;
    Decomposition witness;
};

// Minimal weight of a single nonlocal vertex in P = a B + (1-a) P_L,
// minimized over the 8 nonlocal vertices.
FractionResult nonlocality_fraction(const Device<Rat>& device);

// C(P) * log2(min{d_A, d_B}) with d the largest output support per side.
double nonlocality_cost(const Device<Rat>& device);

// Diagnostic: largest local weight when the remainder may be any
// non-signaling device (not only a nonlocal vertex).
Rat local_fraction(const Device<Rat>& device);

}  // namespace nskey

#endif
