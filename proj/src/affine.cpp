#include "nskey/affine.hpp"

#include <stdexcept>

namespace nskey {

AffineChart build_affine_chart(const std::vector<std::vector<Rat>>& generators) {
    if (generators.empty()) throw std::invalid_argument("no generators");
    const std::size_t len = generators[0].size();
    for (const auto& g : generators)
        if (g.size() != len) throw std::invalid_argument("generator length mismatch");
    const std::size_t n = generators.size();

    AffineChart chart;
    chart.ambient = len;

    // Incremental echelon basis of accepted rows; a lifted row enters the
    // chart when it is independent of the rows accepted so far.
    std::vector<std::vector<Rat>> echelon;   // reduced accepted rows
    std::vector<std::size_t> pivot_cols;
    auto try_accept = [&](std::size_t row_id) {
        std::vector<Rat> row(n);
        for (std::size_t j = 0; j < n; ++j)
            row[j] = row_id == len ? Rat(1) : generators[j][row_id];
        for (std::size_t k = 0; k < echelon.size(); ++k) {
            const Rat& lead = row[pivot_cols[k]];
            if (lead == 0) continue;
            Rat f = lead / echelon[k][pivot_cols[k]];
            for (std::size_t j = 0; j < n; ++j) row[j] -= f * echelon[k][j];
        }
        std::size_t pivot = n;
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] != 0) {
                pivot = j;
                break;
            }
        if (pivot == n) return;
        echelon.push_back(std::move(row));
        pivot_cols.push_back(pivot);
        chart.row_ids.push_back(row_id);
    };

    try_accept(len);  // the affine normalization row first
    for (std::size_t r = 0; r < len && echelon.size() <= n; ++r) try_accept(r);
    return chart;
}

}  // namespace nskey
