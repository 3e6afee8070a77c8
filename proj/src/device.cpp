#include "nskey/device.hpp"

#include <algorithm>

namespace nskey {

namespace {

template <typename T>
T frac(long num, long den) {
    if constexpr (is_exact_v<T>)
        return make_rat(num, den);
    else
        return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<int> unpack(std::size_t idx, const std::vector<int>& sizes) {
    std::vector<int> v(sizes.size());
    for (int p = static_cast<int>(sizes.size()) - 1; p >= 0; --p) {
        v[p] = static_cast<int>(idx % sizes[p]);
        idx /= sizes[p];
    }
    return v;
}

}  // namespace

template <typename T>
ValidationReport validate(const Device<T>& device, double norm_tol, double ns_tol) {
    ValidationReport report;
    const std::size_t n_in = device.total_inputs();
    const std::size_t n_out = device.total_outputs();
    if (device.probabilities.size() != n_in * n_out)
        throw std::invalid_argument("device tensor length does not match alphabets");

    double worst_norm = 0.0;
    bool normalized = true;
    for (std::size_t xi = 0; xi < n_in; ++xi) {
        T sum{0};
        for (std::size_t ai = 0; ai < n_out; ++ai) {
            const T& p = device.probabilities[xi * n_out + ai];
            if (p < T{0}) {
                normalized = false;
                worst_norm = std::max(worst_norm, -to_double(p));
            }
            sum += p;
        }
        worst_norm = std::max(worst_norm, std::abs(to_double(sum) - 1.0));
        if constexpr (is_exact_v<T>) {
            if (sum != T{1}) normalized = false;
        } else {
            if (std::abs(sum - 1.0) > norm_tol) normalized = false;
        }
    }
    report.normalized = normalized;

    // Non-signaling for every proper nonempty party subset: the output
    // marginal of the complement may not depend on the subset's inputs.
    double worst_ns = 0.0;
    const int parties = device.parties;
    for (int mask = 1; mask + 1 < (1 << parties); ++mask) {
        std::vector<int> sub, comp;
        for (int p = 0; p < parties; ++p)
            ((mask >> p) & 1 ? sub : comp).push_back(p);

        std::size_t comp_in = 1, comp_out = 1, sub_in = 1;
        for (int p : comp) {
            comp_in *= device.input_sizes[p];
            comp_out *= device.output_sizes[p];
        }
        for (int p : sub) sub_in *= device.input_sizes[p];

        std::vector<int> comp_in_sizes, comp_out_sizes, sub_in_sizes;
        for (int p : comp) comp_in_sizes.push_back(device.input_sizes[p]);
        for (int p : comp) comp_out_sizes.push_back(device.output_sizes[p]);
        for (int p : sub) sub_in_sizes.push_back(device.input_sizes[p]);

        std::vector<int> sub_out_sizes;
        std::size_t sub_out = 1;
        for (int p : sub) {
            sub_out_sizes.push_back(device.output_sizes[p]);
            sub_out *= device.output_sizes[p];
        }

        std::vector<int> x(parties), a(parties);
        for (std::size_t ci = 0; ci < comp_in; ++ci) {
            auto cx = unpack(ci, comp_in_sizes);
            for (std::size_t co = 0; co < comp_out; ++co) {
                auto ca = unpack(co, comp_out_sizes);
                T reference{0};
                for (std::size_t si = 0; si < sub_in; ++si) {
                    auto sx = unpack(si, sub_in_sizes);
                    for (std::size_t k = 0; k < comp.size(); ++k) x[comp[k]] = cx[k];
                    for (std::size_t k = 0; k < sub.size(); ++k) x[sub[k]] = sx[k];
                    // Sum over the subset's outputs with the complement fixed.
                    T sum{0};
                    for (std::size_t so = 0; so < sub_out; ++so) {
                        auto sa = unpack(so, sub_out_sizes);
                        for (std::size_t k = 0; k < comp.size(); ++k) a[comp[k]] = ca[k];
                        for (std::size_t k = 0; k < sub.size(); ++k) a[sub[k]] = sa[k];
                        sum += device.at(x, a);
                    }
                    if (si == 0) {
                        reference = sum;
                    } else {
                        worst_ns = std::max(worst_ns, std::abs(to_double(sum - reference)));
                        if constexpr (is_exact_v<T>) {
                            if (sum != reference) worst_ns = std::max(worst_ns, 1e-9);
                        }
                    }
                }
            }
        }
    }
    report.nonsignaling = worst_ns <= ns_tol;
    report.worst_violation = std::max(worst_norm, worst_ns);
    return report;
}

template <typename T>
JointDistribution<T> direct_measure(const Device<T>& device, const DirectMeasurement& m) {
    if (static_cast<int>(m.input_choice.size()) != device.parties)
        throw std::invalid_argument("one input choice per party required");
    for (int p = 0; p < device.parties; ++p)
        if (m.input_choice[p] < 0 || m.input_choice[p] >= device.input_sizes[p])
            throw std::out_of_range("measurement input out of range");
    const std::size_t n_out = device.total_outputs();
    std::size_t base = device.input_index(m.input_choice) * n_out;
    std::vector<T> probs(device.probabilities.begin() + base,
                         device.probabilities.begin() + base + n_out);
    return JointDistribution<T>(device.output_sizes, std::move(probs));
}

template <typename T>
Device<T> general_measure(const Device<T>& device, int party, const GeneralMeasurement<T>& gm) {
    if (party < 0 || party >= device.parties) throw std::out_of_range("party out of range");
    if (gm.dice.output_size != device.input_sizes[party])
        throw std::invalid_argument("dice output must match the party's input alphabet");
    if (!gm.dice.is_stochastic(1e-12)) throw std::invalid_argument("dice is not stochastic");

    std::vector<int> new_in = device.input_sizes;
    new_in[party] = gm.dice.input_size;
    Device<T> out(new_in, device.output_sizes);
    const std::size_t n_out = device.total_outputs();

    std::vector<int> x(device.parties, 0);
    for (std::size_t xi = 0; xi < out.total_inputs(); ++xi) {
        auto nx = unpack(xi, new_in);
        int zp = nx[party];
        for (int z = 0; z < device.input_sizes[party]; ++z) {
            const T& w = gm.dice(z, zp);
            if (w == T{0}) continue;
            x = nx;
            x[party] = z;
            std::size_t src = device.input_index(x) * n_out;
            for (std::size_t ai = 0; ai < n_out; ++ai)
                out.probabilities[xi * n_out + ai] += w * device.probabilities[src + ai];
        }
    }
    return out;
}

template <typename T>
Device<T> tensor_product(const Device<T>& a, const Device<T>& b) {
    std::vector<int> in = a.input_sizes, out = a.output_sizes;
    in.insert(in.end(), b.input_sizes.begin(), b.input_sizes.end());
    out.insert(out.end(), b.output_sizes.begin(), b.output_sizes.end());
    Device<T> prod(in, out);

    const std::size_t a_in = a.total_inputs(), a_out = a.total_outputs();
    const std::size_t b_in = b.total_inputs(), b_out = b.total_outputs();
    for (std::size_t xa = 0; xa < a_in; ++xa)
        for (std::size_t xb = 0; xb < b_in; ++xb)
            for (std::size_t aa = 0; aa < a_out; ++aa)
                for (std::size_t ab = 0; ab < b_out; ++ab)
                    prod.probabilities[((xa * b_in + xb) * a_out + aa) * b_out + ab] =
                        a.probabilities[xa * a_out + aa] * b.probabilities[xb * b_out + ab];
    return prod;
}

template <typename T>
Device<T> tensor_bipartite(const Device<T>& a, const Device<T>& b) {
    if (a.parties != 2 || b.parties != 2)
        throw std::invalid_argument("tensor_bipartite needs two bipartite devices");
    Device<T> prod({a.input_sizes[0] * b.input_sizes[0], a.input_sizes[1] * b.input_sizes[1]},
                   {a.output_sizes[0] * b.output_sizes[0], a.output_sizes[1] * b.output_sizes[1]});
    for (int x1 = 0; x1 < a.input_sizes[0]; ++x1)
        for (int x2 = 0; x2 < b.input_sizes[0]; ++x2)
            for (int y1 = 0; y1 < a.input_sizes[1]; ++y1)
                for (int y2 = 0; y2 < b.input_sizes[1]; ++y2)
                    for (int a1 = 0; a1 < a.output_sizes[0]; ++a1)
                        for (int a2 = 0; a2 < b.output_sizes[0]; ++a2)
                            for (int b1 = 0; b1 < a.output_sizes[1]; ++b1)
                                for (int b2 = 0; b2 < b.output_sizes[1]; ++b2)
                                    prod.at({x1 * b.input_sizes[0] + x2,
                                             y1 * b.input_sizes[1] + y2},
                                            {a1 * b.output_sizes[0] + a2,
                                             b1 * b.output_sizes[1] + b2}) =
                                        a.at({x1, y1}, {a1, b1}) * b.at({x2, y2}, {a2, b2});
    return prod;
}

template <typename T>
Device<T> mix(const T& lambda, const Device<T>& p, const Device<T>& q) {
    if (!p.same_shape(q)) throw std::invalid_argument("mixture needs identical shapes");
    if (lambda < T{0} || lambda > T{1}) throw std::invalid_argument("lambda must be in [0,1]");
    Device<T> out(p.input_sizes, p.output_sizes);
    for (std::size_t i = 0; i < out.probabilities.size(); ++i)
        out.probabilities[i] =
            lambda * p.probabilities[i] + (T{1} - lambda) * q.probabilities[i];
    return out;
}

template <typename T>
Device<T> process_outputs(const Device<T>& device, int party, const std::vector<int>& map,
                          int new_size) {
    if (party < 0 || party >= device.parties) throw std::out_of_range("party out of range");
    if (static_cast<int>(map.size()) != device.output_sizes[party])
        throw std::invalid_argument("output map must cover the party's alphabet");
    for (int v : map)
        if (v < 0 || v >= new_size) throw std::out_of_range("output map target out of range");

    std::vector<int> new_out = device.output_sizes;
    new_out[party] = new_size;
    Device<T> out(device.input_sizes, new_out);
    std::vector<int> a(device.parties);
    const std::size_t n_out = device.total_outputs();
    for (std::size_t xi = 0; xi < device.total_inputs(); ++xi)
        for (std::size_t ai = 0; ai < n_out; ++ai) {
            a = unpack(ai, device.output_sizes);
            a[party] = map[a[party]];
            out.probabilities[xi * out.total_outputs() + out.output_index(a)] +=
                device.probabilities[xi * n_out + ai];
        }
    return out;
}

template <typename T>
Device<T> make_local_vertex(int alpha, int beta, int gamma, int sigma) {
    Device<T> d({2, 2}, {2, 2});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            d.at({x, y}, {(alpha * x + beta) % 2, (gamma * y + sigma) % 2}) = T{1};
    return d;
}

template <typename T>
Device<T> make_nonlocal_vertex(int r, int s, int t) {
    Device<T> d({2, 2}, {2, 2});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if ((a + b) % 2 == (x * y + r * x + s * y + t) % 2)
                        d.at({x, y}, {a, b}) = frac<T>(1, 2);
    return d;
}

template <typename T>
Device<T> make_isotropic(const T& eps) {
    if (eps < T{0} || eps > T{1}) throw std::invalid_argument("isotropic weight must be in [0,1]");
    T pr_weight = T{1} - eps;
    return mix(pr_weight, make_pr<T>(), make_anti_pr<T>());
}

Device<Rat> make_hrw(const HrwParams& params) {
    const Rat& d = params.delta;
    const Rat& e = params.epsilon_p;
    if (d < 0 || d > 1) throw std::invalid_argument("delta must be in [0,1]");
    if (e < Rat(-1, 4) || e > Rat(3, 4))
        throw std::invalid_argument("epsilon_p must be in [-1/4, 3/4]");

    Device<Rat> box({2, 2}, {2, 2});
    const Rat half_d = d / 2;
    const Rat agree = Rat(3, 8) - e / 2;
    const Rat differ = Rat(1, 8) + e / 2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            box.at({0, 0}, {a, b}) = (a == b) ? Rat(1, 2) - half_d : half_d;
            box.at({0, 1}, {a, b}) = (a == b) ? agree : differ;
            box.at({1, 0}, {a, b}) = (a == b) ? agree : differ;
            box.at({1, 1}, {a, b}) = (a != b) ? agree : differ;
        }
    return box;
}

template <typename T>
T chsh_error(const Device<T>& device) {
    if (device.parties != 2 || device.input_sizes != std::vector<int>{2, 2} ||
        device.output_sizes != std::vector<int>{2, 2})
        throw std::invalid_argument("CHSH error is defined for (2,2,2,2) devices");
    T err{0};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if ((a + b) % 2 != x * y) err += device.at({x, y}, {a, b});
    return err / T{4};
}

template struct Device<double>;
template struct Device<Rat>;

template ValidationReport validate(const Device<double>&, double, double);
template ValidationReport validate(const Device<Rat>&, double, double);
template JointDistribution<double> direct_measure(const Device<double>&, const DirectMeasurement&);
template JointDistribution<Rat> direct_measure(const Device<Rat>&, const DirectMeasurement&);
template Device<double> general_measure(const Device<double>&, int,
                                        const GeneralMeasurement<double>&);
template Device<Rat> general_measure(const Device<Rat>&, int, const GeneralMeasurement<Rat>&);
template Device<double> tensor_product(const Device<double>&, const Device<double>&);
template Device<Rat> tensor_product(const Device<Rat>&, const Device<Rat>&);
template Device<double> tensor_bipartite(const Device<double>&, const Device<double>&);
template Device<Rat> tensor_bipartite(const Device<Rat>&, const Device<Rat>&);
template Device<double> mix(const double&, const Device<double>&, const Device<double>&);
template Device<Rat> mix(const Rat&, const Device<Rat>&, const Device<Rat>&);
template Device<double> process_outputs(const Device<double>&, int, const std::vector<int>&, int);
template Device<Rat> process_outputs(const Device<Rat>&, int, const std::vector<int>&, int);
template Device<double> make_local_vertex(int, int, int, int);
template Device<Rat> make_local_vertex(int, int, int, int);
template Device<double> make_nonlocal_vertex(int, int, int);
template Device<Rat> make_nonlocal_vertex(int, int, int);
template Device<double> make_isotropic(const double&);
template Device<Rat> make_isotropic(const Rat&);
template double chsh_error(const Device<double>&);
template Rat chsh_error(const Device<Rat>&);

}  // namespace nskey
