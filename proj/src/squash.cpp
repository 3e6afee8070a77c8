#include "nskey/squash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nskey/intrinsic.hpp"
#include "nskey/polytope.hpp"

namespace nskey {

namespace {

struct InputIter {
    int nx, ny;
    std::vector<std::pair<int, int>> pairs;
    explicit InputIter(const Device<Rat>& d) : nx(d.input_sizes[0]), ny(d.input_sizes[1]) {
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) pairs.emplace_back(x, y);
    }
};

void require_bipartite(const Device<Rat>& device) {
    if (device.parties != 2)
        throw std::invalid_argument("squashed quantifiers act on bipartite devices");
}

double measured_mi(const Device<Rat>& device, int x, int y) {
    auto m = direct_measure(device, {{x, y}}).to_double();
    return mutual_information(m, {0}, {1});
}

// I(A:B|E) of one minimal ensemble at fixed honest inputs; members are
// vertices, so the conditional slices are their measured distributions.
double cmi_of_ensemble(const CompleteExtension& ce, int z,
                       const std::vector<std::vector<double>>& vertex_mi, int pair_idx) {
    const auto& ens = ce.ensembles[z];
    double cmi = 0.0;
    for (std::size_t e = 0; e < ens.support.size(); ++e)
        cmi += to_double(ens.weights[e]) * vertex_mi[ens.support[e]][pair_idx];
    return cmi;
}

double cmi_of_mixed_ensemble(const Ensemble& ens, int x, int y) {
    double cmi = 0.0;
    for (std::size_t i = 0; i < ens.members.size(); ++i)
        cmi += to_double(ens.weights[i]) * measured_mi(ens.members[i], x, y);
    return cmi;
}

bool is_product_dist(const JointDistribution<Rat>& m) {
    const int da = m.alphabet_sizes[0], db = m.alphabet_sizes[1];
    std::vector<Rat> pa(da, Rat(0)), pb(db, Rat(0));
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b) {
            pa[a] += m.at({a, b});
            pb[b] += m.at({a, b});
        }
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b)
            if (m.at({a, b}) != pa[a] * pb[b]) return false;
    return true;
}

Channel<double> pad_channel_to(const Channel<Rat>& ch, int input_size) {
    Channel<double> out(input_size, ch.output_size);
    for (int in = 0; in < ch.input_size; ++in)
        for (int o = 0; o < ch.output_size; ++o) out(o, in) = to_double(ch(o, in));
    for (int in = ch.input_size; in < input_size; ++in) out(0, in) = 1.0;
    return out;
}

}  // namespace

SquashedMi squashed_mutual_information(const Device<Rat>& device) {
    require_bipartite(device);
    SquashedMi best;
    best.bits = -1.0;
    for (int x = 0; x < device.input_sizes[0]; ++x)
        for (int y = 0; y < device.input_sizes[1]; ++y) {
            double mi = measured_mi(device, x, y);
            if (mi > best.bits) best = {mi, x, y};
        }
    return best;
}

SquashedCmi squashed_cmi_over_ce(const Device<Rat>& device, const CompleteExtension& ce) {
    require_bipartite(device);
    if (ce.parent.probabilities != device.probabilities)
        throw std::invalid_argument("complete extension was built for a different device");
    if (ce.z_size() == 0) throw std::invalid_argument("complete extension has no ensembles");

    std::vector<std::vector<double>> vertex_mi(ce.vertices.size());
    InputIter inputs(device);
    for (std::size_t v = 0; v < ce.vertices.size(); ++v)
        for (auto [x, y] : inputs.pairs) vertex_mi[v].push_back(measured_mi(ce.vertices[v], x, y));

    SquashedCmi out;
    for (std::size_t pi = 0; pi < inputs.pairs.size(); ++pi) {
        double best = std::numeric_limits<double>::infinity();
        int best_z = 0;
        for (int z = 0; z < ce.z_size(); ++z) {
            double v = cmi_of_ensemble(ce, z, vertex_mi, static_cast<int>(pi));
            if (v < best) {
                best = v;
                best_z = z;
            }
        }
        out.argmin_z.push_back(best_z);
        out.bits = std::max(out.bits, best);
    }
    return out;
}

RefinedCmi squashed_cmi_refined(const Device<Rat>& device, const CompleteExtension& ce,
                                std::uint64_t) {
    auto direct = squashed_cmi_over_ce(device, ce);
    RefinedCmi out;
    out.direct_bits = direct.bits;
    out.refined_bits = direct.bits;

    InputIter inputs(device);
    std::vector<std::vector<double>> vertex_mi(ce.vertices.size());
    for (std::size_t v = 0; v < ce.vertices.size(); ++v)
        for (auto [x, y] : inputs.pairs) vertex_mi[v].push_back(measured_mi(ce.vertices[v], x, y));

    double refined_max = 0.0;
    for (std::size_t pi = 0; pi < inputs.pairs.size(); ++pi) {
        auto [x, y] = inputs.pairs[pi];
        // Two best direct choices, then a dice grid between them.
        int z1 = -1, z2 = -1;
        double v1 = std::numeric_limits<double>::infinity(), v2 = v1;
        for (int z = 0; z < ce.z_size(); ++z) {
            double v = cmi_of_ensemble(ce, z, vertex_mi, static_cast<int>(pi));
            if (v < v1) {
                v2 = v1;
                z2 = z1;
                v1 = v;
                z1 = z;
            } else if (v < v2) {
                v2 = v;
                z2 = z;
            }
        }
        double best = v1;
        if (z2 >= 0) {
            for (int num = 1; num <= 7; ++num) {
                Channel<Rat> dice(1, ce.z_size());
                dice(z1, 0) = make_rat(num, 8);
                dice(z2, 0) = make_rat(8 - num, 8);
                auto mixed = eve_attack(ce, dice, Channel<Rat>::identity(ce.e_alphabet));
                best = std::min(best, cmi_of_mixed_ensemble(mixed, x, y));
            }
        }
        refined_max = std::max(refined_max, best);
    }
    out.refined_bits = std::min(out.direct_bits, refined_max);
    out.improved = out.refined_bits < out.direct_bits - 1e-12;
    return out;
}

EveStrategy direct_strategy(const CompleteExtension& ce, int z) {
    if (z < 0 || z >= ce.z_size()) throw std::out_of_range("z out of range");
    EveStrategy s;
    s.dice = Channel<Rat>(1, ce.z_size());
    s.dice(z, 0) = Rat(1);
    s.post = Channel<Rat>::identity(ce.e_alphabet);
    s.note = "direct z=" + std::to_string(z);
    return s;
}

const std::vector<std::string>& hrw_support_labels() {
    static const std::vector<std::string> labels = {"B000",  "L0000", "L0010", "L0101", "L0111",
                                                    "L1000", "L1101", "L1011", "L1110"};
    return labels;
}

const std::vector<int>& hrw_support_vertex_ids() {
    static const std::vector<int> ids = [] {
        std::vector<int> v;
        for (const auto& label : hrw_support_labels()) v.push_back(vertex_index(label));
        return v;
    }();
    return ids;
}

Channel<Rat> hrw_tabulated_channel(int x, int y) {
    if (x < 0 || x > 1 || y < 0 || y > 1) throw std::out_of_range("inputs must be bits");
    // Column order follows hrw_support_labels(); row 0 absorbs the nonlocal
    // vertex together with the two point-mass boxes that land on the cells
    // complementary to it at the given honest inputs. The table superscripts
    // in the source follow the (row, column) = (y, x) layout of the box
    // table, hence the [y][x] lookup; only that assignment turns the merged
    // member into a product at its own input pair.
    static const int tables[2][2][9] = {
        {{0, 1, 2, 3, 4, 5, 6, 0, 0},    // honest inputs (0,0)
         {0, 1, 2, 3, 4, 0, 0, 5, 6}},   // honest inputs (1,0)
        {{0, 1, 0, 2, 0, 3, 4, 5, 6},    // honest inputs (0,1)
         {0, 0, 1, 0, 2, 3, 4, 5, 6}},   // honest inputs (1,1)
    };
    Channel<Rat> ch(9, 7);
    for (int e = 0; e < 9; ++e) ch(tables[y][x][e], e) = Rat(1);
    return ch;
}

bool ensemble_all_product_at(const Ensemble& ensemble, const DirectMeasurement& m) {
    for (const auto& member : ensemble.members)
        if (!is_product_dist(direct_measure(member, m))) return false;
    return true;
}

std::optional<EveStrategy> product_zero_certificate(const CompleteExtension& ce, int x, int y) {
    const DirectMeasurement m{{x, y}};
    const int da = ce.parent.output_sizes[0], db = ce.parent.output_sizes[1];
    const int cells = da * db;

    for (int z = 0; z < ce.z_size(); ++z) {
        const auto& ens = ce.ensembles[z];
        const int k = static_cast<int>(ens.support.size());

        // Classify members at (x,y): exact products pass as they are;
        // point masses can donate weight; at most one uniform-over-cells
        // member may need completion.
        int odd_member = -1;
        std::vector<int> point_cell(k, -1);
        bool usable = true;
        std::vector<JointDistribution<Rat>> measured;
        measured.reserve(k);
        for (int e = 0; e < k && usable; ++e) {
            measured.push_back(direct_measure(ce.vertices[ens.support[e]], m));
            const auto& dist = measured.back();
            int nonzero = 0, cell = -1;
            bool uniform = true;
            Rat level{0};
            for (int c = 0; c < cells; ++c) {
                const Rat& v = dist.probabilities[c];
                if (v == 0) continue;
                if (nonzero == 0)
                    level = v;
                else if (v != level)
                    uniform = false;
                ++nonzero;
                cell = c;
            }
            if (nonzero == 1) {
                point_cell[e] = cell;
            } else if (is_product_dist(dist)) {
                // already harmless
            } else if (uniform && odd_member < 0) {
                odd_member = e;
            } else {
                usable = false;
            }
        }
        if (!usable) continue;

        EveStrategy strategy;
        strategy.dice = Channel<Rat>(1, ce.z_size());
        strategy.dice(z, 0) = Rat(1);

        if (odd_member < 0) {
            strategy.post = Channel<Rat>::identity(ce.e_alphabet);
            strategy.note = "product ensemble z=" + std::to_string(z);
            auto induced = eve_attack(ce, strategy.dice, strategy.post);
            if (ensemble_all_product_at(induced, m)) return strategy;
            continue;
        }

        // Spread the odd member uniformly over all cells: every cell outside
        // its support must absorb weight/|support| from point-mass donors.
        const auto& odd = measured[odd_member];
        int supp = 0;
        for (int c = 0; c < cells; ++c)
            if (odd.probabilities[c] != 0) ++supp;
        Rat need_per_cell = ens.weights[odd_member] / supp;

        // Channel outputs: 0 = merged member, e+1 = passthrough of member e.
        Channel<Rat> post(ce.e_alphabet, k + 1);
        for (int e = 0; e < k; ++e) post(e + 1, e) = Rat(1);
        for (int e = k; e < ce.e_alphabet; ++e) post(0, e) = Rat(1);
        post(0, odd_member) = Rat(1);
        post(odd_member + 1, odd_member) = Rat(0);

        bool feasible = true;
        for (int c = 0; c < cells && feasible; ++c) {
            if (odd.probabilities[c] != 0) continue;
            Rat need = need_per_cell;
            for (int e = 0; e < k && need > 0; ++e) {
                if (point_cell[e] != c) continue;
                Rat give = std::min(Rat(ens.weights[e] * (Rat(1) - post(0, e))), need);
                if (give <= 0) continue;
                Rat fraction = give / ens.weights[e];
                post(0, e) += fraction;
                post(e + 1, e) -= fraction;
                need -= give;
            }
            if (need > 0) feasible = false;
        }
        if (!feasible) continue;

        strategy.post = post;
        strategy.note = "uniformized ensemble z=" + std::to_string(z);
        auto induced = eve_attack(ce, strategy.dice, strategy.post);
        if (ensemble_all_product_at(induced, m)) return strategy;
    }
    return std::nullopt;
}

SquashedBound nsq_upper_bound(const Device<Rat>& device, const CompleteExtension& ce,
                              const std::vector<std::vector<EveStrategy>>& extra_strategies,
                              const NsqOptions& opts) {
    require_bipartite(device);
    if (ce.parent.probabilities != device.probabilities)
        throw std::invalid_argument("complete extension was built for a different device");
    InputIter inputs(device);
    if (!extra_strategies.empty() && extra_strategies.size() != inputs.pairs.size())
        throw std::invalid_argument("need one strategy list per honest input pair");

    SquashedBound out;
    out.i_ab = squashed_mutual_information(device).bits;
    bool chsh_shape = device.input_sizes == std::vector<int>{2, 2} &&
                      device.output_sizes == std::vector<int>{2, 2};
    out.n_c = chsh_shape ? nonlocality_cost(device) : std::numeric_limits<double>::quiet_NaN();

    std::vector<std::vector<double>> vertex_mi(ce.vertices.size());
    for (std::size_t v = 0; v < ce.vertices.size(); ++v)
        for (auto [x, y] : inputs.pairs) vertex_mi[v].push_back(measured_mi(ce.vertices[v], x, y));

    // The nine-vertex ensemble of the HRW family gets its tabulated
    // channels applied verbatim whenever it is present.
    int z_tab = -1;
    if (chsh_shape) {
        std::vector<int> nine = hrw_support_vertex_ids();
        std::sort(nine.begin(), nine.end());
        for (int z = 0; z < ce.z_size(); ++z)
            if (ce.ensembles[z].support == nine) {
                z_tab = z;
                break;
            }
    }
    auto remapped_tabulated_channel = [&](int x, int y) {
        auto table = hrw_tabulated_channel(x, y);
        Channel<Rat> out(ce.e_alphabet, 7);
        const auto& ids = hrw_support_vertex_ids();
        for (int e = 0; e < 9; ++e) {
            int vertex = ce.ensembles[z_tab].support[e];
            int col = static_cast<int>(std::find(ids.begin(), ids.end(), vertex) - ids.begin());
            for (int o = 0; o < 7; ++o) out(o, e) = table(o, col);
        }
        for (int e = 9; e < ce.e_alphabet; ++e) out(0, e) = Rat(1);
        return out;
    };

    bool all_certified = true;
    double max_direct = 0.0, max_channel = 0.0, max_best = 0.0;
    for (std::size_t pi = 0; pi < inputs.pairs.size(); ++pi) {
        auto [x, y] = inputs.pairs[pi];
        const DirectMeasurement meas{{x, y}};
        InputStrategyReport report;
        report.x = x;
        report.y = y;

        // Exact minimum over direct measurements.
        std::vector<std::pair<double, int>> direct;
        direct.reserve(ce.z_size());
        for (int z = 0; z < ce.z_size(); ++z)
            direct.emplace_back(cmi_of_ensemble(ce, z, vertex_mi, static_cast<int>(pi)), z);
        std::stable_sort(direct.begin(), direct.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        double best_direct = direct.front().first;
        double best = best_direct;
        report.strategy = "direct z=" + std::to_string(direct.front().second);

        // Constant channel discards Eve entirely.
        double parent_mi = measured_mi(device, x, y);
        if (parent_mi < best) {
            best = parent_mi;
            report.strategy = "constant channel";
        }

        // The tabulated channel on the nine-vertex ensemble, exactly.
        if (z_tab >= 0) {
            Channel<Rat> dice(1, ce.z_size());
            dice(z_tab, 0) = Rat(1);
            auto induced = eve_attack(ce, dice, remapped_tabulated_channel(x, y));
            double v = cmi_of_mixed_ensemble(induced, x, y);
            if (v < best) {
                best = v;
                report.strategy = "tabulated channel on z=" + std::to_string(z_tab);
            }
        }

        // Channel refinement on the most promising direct choices plus the
        // nine-vertex ensemble when present.
        double best_channel = best_direct;
        std::vector<int> refine;
        for (int t = 0; t < std::min<int>(opts.refine_top_z, static_cast<int>(direct.size())); ++t)
            refine.push_back(direct[t].second);
        if (z_tab >= 0 && std::find(refine.begin(), refine.end(), z_tab) == refine.end())
            refine.push_back(z_tab);
        for (std::size_t t = 0; t < refine.size(); ++t) {
            int z = refine[t];
            auto joint = measured_tripartite(ce, z, meas).to_double();
            IntrinsicOptions iopts;
            iopts.restarts = opts.restarts;
            iopts.max_evals_per_restart = opts.max_evals;
            iopts.seed = opts.seed + 7919 * (pi + 1) + 104729 * (t + 1);
            iopts.deterministic_budget = 4096;
            if (z == z_tab)
                iopts.seed_channels.push_back(
                    pad_channel_to(remapped_tabulated_channel(x, y), ce.e_alphabet));
            auto res = intrinsic_information_upper(joint, {0}, {1}, {2}, iopts);
            best_channel = std::min(best_channel, res.bits);
            if (res.bits < best) {
                best = res.bits;
                report.strategy = "channel on z=" + std::to_string(z);
            }
        }

        // Dice mixtures of the two best direct choices.
        if (opts.dice_search && direct.size() >= 2) {
            int z1 = direct[0].second, z2 = direct[1].second;
            for (int num = 1; num <= 7; ++num) {
                Channel<Rat> dice(1, ce.z_size());
                dice(z1, 0) = make_rat(num, 8);
                dice(z2, 0) = make_rat(8 - num, 8);
                auto mixed = eve_attack(ce, dice, Channel<Rat>::identity(ce.e_alphabet));
                double v = cmi_of_mixed_ensemble(mixed, x, y);
                if (v < best_direct - 1e-12) out.general_beats_direct = true;
                if (v < best) {
                    best = v;
                    report.strategy = "dice mix z=" + std::to_string(z1) + "," +
                                      std::to_string(z2) + " w=" + std::to_string(num) + "/8";
                }
            }
        }

        // User-supplied strategies.
        if (!extra_strategies.empty())
            for (const auto& s : extra_strategies[pi]) {
                auto induced = eve_attack(ce, s.dice, s.post);
                double v = cmi_of_mixed_ensemble(induced, x, y);
                bool product = ensemble_all_product_at(induced, meas);
                if (product) v = 0.0;
                if (v < best || (product && !report.certified_product)) {
                    best = std::min(best, v);
                    report.strategy = s.note.empty() ? "user strategy" : s.note;
                    report.certified_product = report.certified_product || product;
                }
            }

        // Exact product certificate.
        if (auto cert = product_zero_certificate(ce, x, y)) {
            best = 0.0;
            report.certified_product = true;
            report.strategy = cert->note;
        }

        report.bits = best;
        out.per_input.push_back(report);
        all_certified = all_certified && report.certified_product;
        max_direct = std::max(max_direct, best_direct);
        max_channel = std::max(max_channel, best_channel);
        max_best = std::max(max_best, best);
    }

    out.i_ab_e_direct = max_direct;
    out.i_ab_e_channel = max_channel;
    out.certified_zero = all_certified;
    out.nsq_upper = out.certified_zero ? 0.0 : max_best;
    if (out.certified_zero)
        for (auto& rep : out.per_input) rep.bits = 0.0;
    return out;
}

void lower_convex_hull(BoundCurve& curve) {
    const std::size_t n = curve.grid.size();
    if (n < 1) throw std::invalid_argument("empty curve");
    auto check = [&](const std::vector<double>& s) {
        if (s.size() != n) throw std::invalid_argument("series length mismatch");
        for (double v : s)
            if (std::isnan(v)) throw std::invalid_argument("NaN in bound series");
    };
    check(curve.i_ab);
    check(curve.i_ab_e_direct);
    check(curve.i_ab_e_channel);
    check(curve.n_c);
    check(curve.nsq_upper);

    std::vector<double> low(n);
    for (std::size_t i = 0; i < n; ++i)
        low[i] = std::min({curve.i_ab[i], curve.i_ab_e_direct[i], curve.i_ab_e_channel[i],
                           curve.n_c[i], curve.nsq_upper[i]});
    if (n == 1) {
        curve.lch = low;
        return;
    }

    // Monotone chain on (param, min value); grid points are ascending.
    std::vector<std::pair<double, double>> hull;
    for (std::size_t i = 0; i < n; ++i) {
        std::pair<double, double> p{curve.grid[i], low[i]};
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    curve.lch.assign(n, 0.0);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = curve.grid[i];
        while (seg + 1 < hull.size() && hull[seg + 1].first < t) ++seg;
        if (seg + 1 >= hull.size()) {
            curve.lch[i] = hull.back().second;
        } else {
            const auto& a = hull[seg];
            const auto& b = hull[seg + 1];
            double w = (t - a.first) / (b.first - a.first);
            curve.lch[i] = a.second + w * (b.second - a.second);
        }
    }
}

std::string curve_to_csv(const BoundCurve& curve) {
    std::ostringstream os;
    os.precision(12);
    bool overlay = !curve.overlay.empty();
    os << "param,I_AB,I_ABgE_direct,I_ABgE_channel,N_C,nsq_upper,lch";
    if (overlay) os << ",overlay";
    os << "\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        os << curve.grid[i] << ',' << curve.i_ab[i] << ',' << curve.i_ab_e_direct[i] << ','
           << curve.i_ab_e_channel[i] << ',' << curve.n_c[i] << ',' << curve.nsq_upper[i] << ','
           << curve.lch[i];
        if (overlay) os << ',' << curve.overlay[i];
        os << "\n";
    }
    return os.str();
}

std::string curve_to_gnuplot(const BoundCurve& curve, const std::string& csv_path) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key outside\n"
       << "set xlabel '" << curve.param_name << "'\n"
       << "set ylabel 'bits'\n"
       << "plot '" << csv_path << "' using 1:2 with lines title 'I(A:B)', \\\n"
       << "     '" << csv_path << "' using 1:3 with lines title 'I(A:B|E) direct', \\\n"
       << "     '" << csv_path << "' using 1:4 with lines title 'I(A:B|E) channel', \\\n"
       << "     '" << csv_path << "' using 1:5 with lines title 'N_C', \\\n"
       << "     '" << csv_path << "' using 1:6 with lines title 'nsq upper', \\\n"
       << "     '" << csv_path << "' using 1:7 with lines lw 2 title 'lower convex hull'";
    if (!curve.overlay.empty())
        os << ", \\\n     '" << csv_path << "' using 1:8 with lines title 'overlay'";
    os << "\n";
    return os.str();
}

Family family_from_string(const std::string& name) {
    if (name == "iso") return Family::Iso;
    if (name == "hrw-a") return Family::HrwA;
    if (name == "hrw-b") return Family::HrwB;
    if (name == "hrw-c") return Family::HrwC;
    if (name == "hrw-d") return Family::HrwD;
    throw std::invalid_argument("unknown family: " + name);
}

std::string family_to_string(Family fam) {
    switch (fam) {
        case Family::Iso: return "iso";
        case Family::HrwA: return "hrw-a";
        case Family::HrwB: return "hrw-b";
        case Family::HrwC: return "hrw-c";
        case Family::HrwD: return "hrw-d";
    }
    throw std::logic_error("bad family");
}

std::pair<Rat, Rat> family_params(Family fam, const Rat& eps) {
    switch (fam) {
        case Family::Iso:
        case Family::HrwD:
            return {eps, eps - Rat(1, 4)};
        case Family::HrwA: {
            // delta fixed; epsilon_p from inverting the CHSH error formula.
            Rat delta(1, 100);
            return {delta, (16 * eps - 3 - 4 * delta) / 12};
        }
        case Family::HrwB: {
            Rat delta(3, 100);
            return {delta, (16 * eps - 3 - 4 * delta) / 12};
        }
        case Family::HrwC:
            return {2 * eps / 5, 6 * eps / 5 - Rat(1, 4)};
    }
    throw std::logic_error("bad family");
}

Device<Rat> family_device(Family fam, const Rat& eps) {
    if (fam == Family::Iso) return make_isotropic<Rat>(eps);
    auto [delta, ep] = family_params(fam, eps);
    return make_hrw({delta, ep});
}

BoundCurve compute_bound_curve(Family fam, const std::vector<Rat>& grid,
                               const NsqOptions& opts) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    BoundCurve curve;
    curve.param_name = "chsh_error";
    const auto& vertices = chsh_vertices();
    std::vector<Device<Rat>> vertex_devices;
    for (const auto& v : vertices) vertex_devices.push_back(v.device);

    for (const Rat& eps : grid) {
        auto device = family_device(fam, eps);
        auto ce = build_complete_extension(device, vertex_devices);
        auto bound = nsq_upper_bound(device, ce, {}, opts);
        curve.grid.push_back(to_double(eps));
        curve.i_ab.push_back(bound.i_ab);
        curve.i_ab_e_direct.push_back(bound.i_ab_e_direct);
        curve.i_ab_e_channel.push_back(bound.i_ab_e_channel);
        curve.n_c.push_back(bound.n_c);
        curve.nsq_upper.push_back(bound.nsq_upper);
        curve.certified.push_back(bound.certified_zero);
    }
    lower_convex_hull(curve);
    return curve;
}

SquashedBound device_bound(const Device<Rat>& device, const NsqOptions& opts,
                           const std::string& id) {
    std::vector<Device<Rat>> vertex_devices;
    for (const auto& v : chsh_vertices()) vertex_devices.push_back(v.device);
    auto ce = build_complete_extension(device, vertex_devices);
    auto bound = nsq_upper_bound(device, ce, {}, opts);
    bound.device_id = id;
    return bound;
}

}  // namespace nskey
