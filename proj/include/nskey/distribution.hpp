#ifndef NSKEY_DISTRIBUTION_HPP
#define NSKEY_DISTRIBUTION_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nskey/rational.hpp"

namespace nskey {

// Joint distribution over a tuple of finite variables, stored as a flat
// tensor indexed lexicographically (first variable most significant).
template <typename T>
struct JointDistribution {
    std::vector<int> alphabet_sizes;
    std::vector<T> probabilities;

    JointDistribution() = default;
    JointDistribution(std::vector<int> sizes, std::vector<T> probs)
        : alphabet_sizes(std::move(sizes)), probabilities(std::move(probs)) {
        std::size_t n = 1;
        for (int s : alphabet_sizes) {
            if (s <= 0) throw std::invalid_argument("alphabet size must be positive");
            n *= static_cast<std::size_t>(s);
        }
        if (n != probabilities.size())
            throw std::invalid_argument("tensor length does not match alphabet sizes");
    }

    std::size_t size() const { return probabilities.size(); }
    int num_vars() const { return static_cast<int>(alphabet_sizes.size()); }

    std::size_t index_of(const std::vector<int>& values) const {
        std::size_t idx = 0;
        for (int v = 0; v < num_vars(); ++v)
            idx = idx * alphabet_sizes[v] + values[v];
        return idx;
    }

    const T& at(const std::vector<int>& values) const {
        return probabilities[index_of(values)];
    }
    T& at(const std::vector<int>& values) { return probabilities[index_of(values)]; }

    bool is_normalized(double tol = 1e-12) const {
        T sum{0};
        for (const T& p : probabilities) {
            if (p < T{0}) return false;
            sum += p;
        }
        if constexpr (is_exact_v<T>)
            return sum == T{1};
        else
            return std::abs(sum - 1.0) <= tol;
    }

    // Marginal over the listed variables, in the given order.
    JointDistribution marginal(const std::vector<int>& vars) const {
        for (int v : vars)
            if (v < 0 || v >= num_vars())
                throw std::out_of_range("variable index out of range");
        std::vector<int> msizes;
        msizes.reserve(vars.size());
        for (int v : vars) msizes.push_back(alphabet_sizes[v]);
        std::size_t mlen = 1;
        for (int s : msizes) mlen *= static_cast<std::size_t>(s);
        std::vector<T> mprobs(mlen, T{0});

        std::vector<int> values(num_vars(), 0);
        for (std::size_t idx = 0; idx < size(); ++idx) {
            std::size_t midx = 0;
            for (int v : vars) midx = midx * alphabet_sizes[v] + values[v];
            mprobs[midx] += probabilities[idx];
            for (int v = num_vars() - 1; v >= 0; --v) {
                if (++values[v] < alphabet_sizes[v]) break;
                values[v] = 0;
            }
        }
        return JointDistribution(std::move(msizes), std::move(mprobs));
    }

    JointDistribution<double> to_double() const {
        std::vector<double> probs;
        probs.reserve(size());
        for (const T& p : probabilities) probs.push_back(nskey::to_double(p));
        return JointDistribution<double>(alphabet_sizes, std::move(probs));
    }
};

// Column-stochastic map: matrix(out, in), every column sums to 1.
template <typename T>
struct Channel {
    int input_size = 0;
    int output_size = 0;
    std::vector<T> matrix;  // row-major, output_size x input_size

    Channel() = default;
    Channel(int in, int out) : input_size(in), output_size(out), matrix(in * out, T{0}) {
        if (in <= 0 || out <= 0) throw std::invalid_argument("channel sizes must be positive");
    }

    T& operator()(int out, int in) { return matrix[out * input_size + in]; }
    const T& operator()(int out, int in) const { return matrix[out * input_size + in]; }

    bool is_stochastic(double tol = 1e-12) const {
        for (int in = 0; in < input_size; ++in) {
            T col{0};
            for (int out = 0; out < output_size; ++out) {
                if ((*this)(out, in) < T{0}) return false;
                col += (*this)(out, in);
            }
            if constexpr (is_exact_v<T>) {
                if (col != T{1}) return false;
            } else {
                if (std::abs(col - 1.0) > tol) return false;
            }
        }
        return true;
    }

    static Channel identity(int n) {
        Channel ch(n, n);
        for (int i = 0; i < n; ++i) ch(i, i) = T{1};
        return ch;
    }

    static Channel constant(int in, int out, int target = 0) {
        Channel ch(in, out);
        for (int i = 0; i < in; ++i) ch(target, i) = T{1};
        return ch;
    }

    // Deterministic channel from an explicit map in -> out.
    static Channel deterministic(const std::vector<int>& map, int out) {
        Channel ch(static_cast<int>(map.size()), out);
        for (std::size_t i = 0; i < map.size(); ++i) ch(map[i], static_cast<int>(i)) = T{1};
        return ch;
    }

    Channel<double> to_double() const {
        Channel<double> ch(input_size, output_size);
        for (std::size_t i = 0; i < matrix.size(); ++i)
            ch.matrix[i] = nskey::to_double(matrix[i]);
        return ch;
    }
};

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Shannon entropy of the marginal on `vars`, in bits.
template <typename T>
double shannon_entropy(const JointDistribution<T>& dist, const std::vector<int>& vars) {
    if (vars.empty()) throw std::invalid_argument("entropy needs a nonempty variable set");
    auto m = dist.marginal(vars);
    double h = 0.0;
    for (const T& p : m.probabilities) h -= plogp(to_double(p));
    return h;
}

namespace detail {
inline void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a)
        for (int y : b)
            if (x == y) throw std::invalid_argument("variable sets must be disjoint");
}
inline std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}
}  // namespace detail

template <typename T>
double mutual_information(const JointDistribution<T>& dist, const std::vector<int>& vars_a,
                          const std::vector<int>& vars_b) {
    detail::check_disjoint(vars_a, vars_b);
    return shannon_entropy(dist, vars_a) + shannon_entropy(dist, vars_b) -
           shannon_entropy(dist, detail::concat(vars_a, vars_b));
}

// I(A:B|E) = sum_e p(e) I(A:B | E=e); zero-probability e are skipped.
template <typename T>
double conditional_mutual_information(const JointDistribution<T>& dist,
                                      const std::vector<int>& vars_a,
                                      const std::vector<int>& vars_b,
                                      const std::vector<int>& vars_e) {
    detail::check_disjoint(vars_a, vars_b);
    detail::check_disjoint(vars_a, vars_e);
    detail::check_disjoint(vars_b, vars_e);
    auto joint = dist.marginal(detail::concat(detail::concat(vars_a, vars_b), vars_e)).to_double();
    const int na = static_cast<int>(vars_a.size());
    const int nb = static_cast<int>(vars_b.size());
    std::size_t da = 1, db = 1, de = 1;
    for (int v = 0; v < na; ++v) da *= joint.alphabet_sizes[v];
    for (int v = 0; v < nb; ++v) db *= joint.alphabet_sizes[na + v];
    for (std::size_t v = na + nb; v < joint.alphabet_sizes.size(); ++v)
        de *= joint.alphabet_sizes[v];

    // With (a,b,e) flattened, index = (a*db + b)*de + e.
    double cmi = 0.0;
    std::vector<double> pa(da), pb(db);
    for (std::size_t e = 0; e < de; ++e) {
        double pe = 0.0;
        std::fill(pa.begin(), pa.end(), 0.0);
        std::fill(pb.begin(), pb.end(), 0.0);
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t b = 0; b < db; ++b) {
                double p = joint.probabilities[(a * db + b) * de + e];
                pe += p;
                pa[a] += p;
                pb[b] += p;
            }
        if (pe <= 0.0) continue;
        double h = 0.0;
        for (std::size_t a = 0; a < da; ++a) h -= plogp(pa[a] / pe);
        for (std::size_t b = 0; b < db; ++b) h -= plogp(pb[b] / pe);
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t b = 0; b < db; ++b)
                h += plogp(joint.probabilities[(a * db + b) * de + e] / pe);
        cmi += pe * h;
    }
    return cmi;
}

// Replaces variable `var` by the channel's output variable; mass preserved.
template <typename T>
JointDistribution<T> apply_channel(const JointDistribution<T>& dist, const Channel<T>& ch,
                                   int var) {
    if (var < 0 || var >= dist.num_vars()) throw std::out_of_range("variable index out of range");
    if (ch.input_size != dist.alphabet_sizes[var])
        throw std::invalid_argument("channel input does not match variable alphabet");

    std::vector<int> sizes = dist.alphabet_sizes;
    sizes[var] = ch.output_size;
    std::size_t outer = 1, inner = 1;
    for (int v = 0; v < var; ++v) outer *= dist.alphabet_sizes[v];
    for (int v = var + 1; v < dist.num_vars(); ++v) inner *= dist.alphabet_sizes[v];

    std::size_t len = outer * ch.output_size * inner;
    std::vector<T> probs(len, T{0});
    for (std::size_t o = 0; o < outer; ++o)
        for (int in = 0; in < ch.input_size; ++in)
            for (int out = 0; out < ch.output_size; ++out) {
                const T& w = ch(out, in);
                if (w == T{0}) continue;
                for (std::size_t i = 0; i < inner; ++i)
                    probs[(o * ch.output_size + out) * inner + i] +=
                        w * dist.probabilities[(o * ch.input_size + in) * inner + i];
            }
    return JointDistribution<T>(std::move(sizes), std::move(probs));
}

template <typename T>
T total_variation(const JointDistribution<T>& p, const JointDistribution<T>& q) {
    if (p.alphabet_sizes != q.alphabet_sizes)
        throw std::invalid_argument("total variation needs identical shapes");
    T sum{0};
    for (std::size_t i = 0; i < p.size(); ++i)
        sum += abs_val<T>(p.probabilities[i] - q.probabilities[i]);
    return sum / T{2};
}

}  // namespace nskey

#endif
