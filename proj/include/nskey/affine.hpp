#ifndef NSKEY_AFFINE_HPP
#define NSKEY_AFFINE_HPP

#include <cstddef>
#include <vector>

#include "nskey/rational.hpp"

namespace nskey {

// Row-space tools for the lifted generator matrix [g_1 .. g_n ; 1 .. 1].
// Solving membership systems on an exact spanning subset of rows is valid
// whenever the target point lies in the affine hull of the full generator
// set, because the target column then satisfies every row dependency.
struct AffineChart {
    std::vector<std::size_t> row_ids;  // indices into the lifted rows, size = rank
    std::size_t ambient = 0;           // tensor length (lifted length - 1)

    // Reduced coordinates of a tensor: the selected rows of [v; 1].
    std::vector<Rat> reduce(const std::vector<Rat>& tensor) const {
        std::vector<Rat> out(row_ids.size());
        for (std::size_t i = 0; i < row_ids.size(); ++i)
            out[i] = row_ids[i] == ambient ? Rat(1) : tensor[row_ids[i]];
        return out;
    }
};

// Selects a maximal independent set of rows of the lifted matrix, by exact
// elimination. Generators are flat tensors of identical length.
AffineChart build_affine_chart(const std::vector<std::vector<Rat>>& generators);

}  // namespace nskey

#endif
