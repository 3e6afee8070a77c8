#include "nskey/intrinsic.hpp"

#include <cmath>
#include <random>

#include "nskey/optimize.hpp"

namespace nskey {

namespace {

// Joint p(a,b,e) flattened with e fastest, plus the CMI after a channel on e.
struct TripartiteTable {
    int da = 0, db = 0, de = 0;
    std::vector<double> p;  // (a*db + b)*de + e

    double cmi_after(const Channel<double>& ch) const {
        const int dep = ch.output_size;
        std::vector<double> joint(static_cast<std::size_t>(da) * db * dep, 0.0);
        for (int a = 0; a < da; ++a)
            for (int b = 0; b < db; ++b)
                for (int e = 0; e < de; ++e) {
                    double mass = p[(a * db + b) * de + e];
                    if (mass == 0.0) continue;
                    for (int ep = 0; ep < dep; ++ep)
                        joint[(a * db + b) * dep + ep] += ch(ep, e) * mass;
                }
        double cmi = 0.0;
        std::vector<double> pa(da), pb(db);
        for (int ep = 0; ep < dep; ++ep) {
            double pe = 0.0;
            std::fill(pa.begin(), pa.end(), 0.0);
            std::fill(pb.begin(), pb.end(), 0.0);
            for (int a = 0; a < da; ++a)
                for (int b = 0; b < db; ++b) {
                    double v = joint[(a * db + b) * dep + ep];
                    pe += v;
                    pa[a] += v;
                    pb[b] += v;
                }
            if (pe <= 0.0) continue;
            double h = 0.0;
            for (int a = 0; a < da; ++a) h -= plogp(pa[a] / pe);
            for (int b = 0; b < db; ++b) h -= plogp(pb[b] / pe);
            for (int a = 0; a < da; ++a)
                for (int b = 0; b < db; ++b) h += plogp(joint[(a * db + b) * dep + ep] / pe);
            cmi += pe * h;
        }
        return cmi;
    }
};

Channel<double> softmax_channel(const std::vector<double>& logits, int de, int dep) {
    Channel<double> ch(de, dep);
    for (int e = 0; e < de; ++e) {
        double mx = logits[e * dep];
        for (int ep = 1; ep < dep; ++ep) mx = std::max(mx, logits[e * dep + ep]);
        double z = 0.0;
        for (int ep = 0; ep < dep; ++ep) z += std::exp(logits[e * dep + ep] - mx);
        for (int ep = 0; ep < dep; ++ep) ch(ep, e) = std::exp(logits[e * dep + ep] - mx) / z;
    }
    return ch;
}

}  // namespace

IntrinsicResult intrinsic_information_upper(const JointDistribution<double>& dist,
                                            const std::vector<int>& vars_a,
                                            const std::vector<int>& vars_b,
                                            const std::vector<int>& vars_e,
                                            const IntrinsicOptions& opts) {
    auto joint = dist.marginal(detail::concat(detail::concat(vars_a, vars_b), vars_e));
    TripartiteTable table;
    table.da = table.db = table.de = 1;
    for (std::size_t v = 0; v < vars_a.size(); ++v) table.da *= joint.alphabet_sizes[v];
    for (std::size_t v = 0; v < vars_b.size(); ++v)
        table.db *= joint.alphabet_sizes[vars_a.size() + v];
    for (std::size_t v = vars_a.size() + vars_b.size(); v < joint.alphabet_sizes.size(); ++v)
        table.de *= joint.alphabet_sizes[v];
    table.p = joint.probabilities;

    int cap = opts.eprime_cap < 0 ? table.de : opts.eprime_cap;
    if (cap < 1) throw std::invalid_argument("E' cardinality cap must be at least 1");

    IntrinsicResult best;
    best.witness = Channel<double>::identity(table.de);
    best.bits = table.cmi_after(best.witness);
    auto consider = [&](const Channel<double>& ch) {
        double v = table.cmi_after(ch);
        if (v < best.bits) {
            best.bits = v;
            best.witness = ch;
        }
    };

    consider(Channel<double>::constant(table.de, 1));
    for (const auto& ch : opts.seed_channels) {
        if (ch.input_size != table.de)
            throw std::invalid_argument("seed channel input does not match |E|");
        if (!ch.is_stochastic(1e-9))
            throw std::invalid_argument("seed channel is not stochastic");
        consider(ch);
    }

    // Exhaustive deterministic channels when cheap enough.
    double det_count = std::pow(static_cast<double>(cap), static_cast<double>(table.de));
    if (det_count <= static_cast<double>(opts.deterministic_budget)) {
        std::vector<int> map(table.de, 0);
        while (true) {
            consider(Channel<double>::deterministic(map, cap));
            int i = table.de - 1;
            while (i >= 0 && ++map[i] == cap) map[i--] = 0;
            if (i < 0) break;
        }
    }

    // Local search over stochastic channels, column softmax parametrization.
    // Restart r draws from seed+r, so enlarging `restarts` extends the
    // search rather than reshuffling it.
    const int dim = table.de * cap;
    for (int r = 0; r < opts.restarts; ++r) {
        std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ull * (r + 1));
        std::normal_distribution<double> gauss(0.0, 1.5);
        std::vector<double> logits(dim);
        for (double& v : logits) v = gauss(rng);
        NelderMeadOptions nm;
        nm.max_evals = opts.max_evals_per_restart;
        auto res = nelder_mead(
            [&](const std::vector<double>& x) {
                return table.cmi_after(softmax_channel(x, table.de, cap));
            },
            logits, nm);
        consider(softmax_channel(res.x, table.de, cap));
    }
    return best;
}

}  // namespace nskey
