#include "nskey/polytope.hpp"

#include <cmath>
#include <stdexcept>

#include "nskey/lp.hpp"

namespace nskey {

namespace {

std::vector<LabeledVertex> build_vertices() {
    std::vector<LabeledVertex> vs;
    vs.reserve(24);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int g = 0; g < 2; ++g)
                for (int s = 0; s < 2; ++s)
                    vs.push_back({"L" + std::to_string(a) + std::to_string(b) +
                                      std::to_string(g) + std::to_string(s),
                                  make_local_vertex<Rat>(a, b, g, s), true});
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t)
                vs.push_back({"B" + std::to_string(r) + std::to_string(s) + std::to_string(t),
                              make_nonlocal_vertex<Rat>(r, s, t), false});
    return vs;
}

void require_chsh_shape(const Device<Rat>& device) {
    if (device.parties != 2 || device.input_sizes != std::vector<int>{2, 2} ||
        device.output_sizes != std::vector<int>{2, 2})
        throw std::invalid_argument("operation requires a (2,2,2,2) device");
}

}  // namespace

const std::vector<LabeledVertex>& chsh_vertices() {
    static const std::vector<LabeledVertex> vertices = build_vertices();
    return vertices;
}

int vertex_index(const std::string& label) {
    const auto& vs = chsh_vertices();
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (vs[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("unknown vertex label: " + label);
}

const AffineChart& chsh_chart() {
    static const AffineChart chart = [] {
        std::vector<std::vector<Rat>> tensors;
        for (const auto& v : chsh_vertices()) tensors.push_back(v.device.probabilities);
        return build_affine_chart(tensors);
    }();
    return chart;
}

LocalityResult is_local(const Device<Rat>& device) {
    require_chsh_shape(device);
    const auto& chart = chsh_chart();
    const auto& vs = chsh_vertices();

    std::vector<std::vector<Rat>> gens;
    for (int i = 0; i < 16; ++i) gens.push_back(chart.reduce(vs[i].device.probabilities));
    auto weights = convex_combination_on_support(chart.reduce(device.probabilities), gens);

    LocalityResult res;
    res.local = weights.has_value();
    if (weights) {
        Decomposition d;
        for (int i = 0; i < 16; ++i) {
            if ((*weights)[i] == 0) continue;
            d.vertex_ids.push_back(i);
            d.weights.push_back((*weights)[i]);
            d.local_flags.push_back(true);
        }
        res.model = std::move(d);
    }
    return res;
}

FractionResult nonlocality_fraction(const Device<Rat>& device) {
    require_chsh_shape(device);
    const auto& chart = chsh_chart();
    const auto& vs = chsh_vertices();
    auto target = chart.reduce(device.probabilities);
    const int rows = static_cast<int>(target.size());

    std::vector<std::vector<Rat>> local_cols(16);
    for (int i = 0; i < 16; ++i) local_cols[i] = chart.reduce(vs[i].device.probabilities);

    std::optional<FractionResult> best;
    for (int v = 16; v < 24; ++v) {
        auto nl_col = chart.reduce(vs[v].device.probabilities);
        // Variables: alpha, then the 16 local weights. The chart rows
        // include the affine row, so sum(weights) = 1 is implied.
        LinearProgram<Rat> lp;
        lp.num_vars = 17;
        lp.objective.assign(17, Rat(0));
        lp.objective[0] = Rat(-1);  // maximize -alpha
        for (int r = 0; r < rows; ++r) {
            std::vector<Rat> row(17);
            row[0] = nl_col[r];
            for (int i = 0; i < 16; ++i) row[i + 1] = local_cols[i][r];
            lp.eq_matrix.push_back(std::move(row));
            lp.eq_rhs.push_back(target[r]);
        }
        auto sol = solve(lp);
        if (sol.status != LpStatus::Optimal) continue;
        Rat alpha = sol.point[0];
        if (!best || alpha < best->fraction) {
            FractionResult fr;
            fr.fraction = alpha;
            if (alpha > 0) {
                fr.witness.vertex_ids.push_back(v);
                fr.witness.weights.push_back(alpha);
                fr.witness.local_flags.push_back(false);
            }
            for (int i = 0; i < 16; ++i) {
                if (sol.point[i + 1] == 0) continue;
                fr.witness.vertex_ids.push_back(i);
                fr.witness.weights.push_back(sol.point[i + 1]);
                fr.witness.local_flags.push_back(true);
            }
            best = std::move(fr);
        }
    }
    if (!best)
        throw std::runtime_error(
            "no vertex decomposition found; the device violates non-signaling");
    return *best;
}

double nonlocality_cost(const Device<Rat>& device) {
    if (device.parties != 2) throw std::invalid_argument("non-locality cost needs 2 parties");
    Rat c;
    if (device.input_sizes == std::vector<int>{2, 2} &&
        device.output_sizes == std::vector<int>{2, 2}) {
        c = nonlocality_fraction(device).fraction;
    } else {
        throw std::invalid_argument("built-in vertices cover only (2,2,2,2) devices");
    }

    // Output dimensions as the largest per-input support.
    int d_a = 1, d_b = 1;
    for (int x = 0; x < device.input_sizes[0]; ++x) {
        int supp = 0;
        for (int a = 0; a < device.output_sizes[0]; ++a) {
            Rat mass{0};
            for (int y = 0; y < device.input_sizes[1]; ++y)
                for (int b = 0; b < device.output_sizes[1]; ++b) mass += device.at({x, y}, {a, b});
            if (mass > 0) ++supp;
        }
        d_a = std::max(d_a, supp);
    }
    for (int y = 0; y < device.input_sizes[1]; ++y) {
        int supp = 0;
        for (int b = 0; b < device.output_sizes[1]; ++b) {
            Rat mass{0};
            for (int x = 0; x < device.input_sizes[0]; ++x)
                for (int a = 0; a < device.output_sizes[0]; ++a) mass += device.at({x, y}, {a, b});
            if (mass > 0) ++supp;
        }
        d_b = std::max(d_b, supp);
    }
    return to_double(c) * std::log2(static_cast<double>(std::min(d_a, d_b)));
}

Rat local_fraction(const Device<Rat>& device) {
    require_chsh_shape(device);
    const auto& chart = chsh_chart();
    const auto& vs = chsh_vertices();
    auto target = chart.reduce(device.probabilities);
    const int rows = static_cast<int>(target.size());

    std::vector<std::vector<Rat>> cols(24);
    for (int j = 0; j < 24; ++j) cols[j] = chart.reduce(vs[j].device.probabilities);

    // Variables: 16 local weights q_i, then 24 remainder weights r_j taken
    // over all vertices; maximize sum(q).
    LinearProgram<Rat> lp;
    lp.num_vars = 40;
    lp.objective.assign(40, Rat(0));
    for (int i = 0; i < 16; ++i) lp.objective[i] = Rat(1);
    for (int r = 0; r < rows; ++r) {
        std::vector<Rat> row(40);
        for (int i = 0; i < 16; ++i) row[i] = cols[i][r];
        for (int j = 0; j < 24; ++j) row[16 + j] = cols[j][r];
        lp.eq_matrix.push_back(std::move(row));
        lp.eq_rhs.push_back(target[r]);
    }
    auto sol = solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("device is outside the non-signaling polytope");
    return sol.objective;
}

}  // namespace nskey
