#ifndef NSKEY_DEVICE_HPP
#define NSKEY_DEVICE_HPP

#include <string>
#include <vector>

#include "nskey/distribution.hpp"
#include "nskey/rational.hpp"

namespace nskey {

// Multi-party conditional distribution P(outputs|inputs). The flat tensor is
// indexed with all inputs first (party-major), then all outputs
// (party-major), so
//   index = (x_1 ... x_n , a_1 ... a_n) in lexicographic order.
template <typename T>
struct Device {
    int parties = 0;
    std::vector<int> input_sizes;
    std::vector<int> output_sizes;
    std::vector<T> probabilities;

    Device() = default;
    Device(std::vector<int> in_sizes, std::vector<int> out_sizes)
        : parties(static_cast<int>(in_sizes.size())),
          input_sizes(std::move(in_sizes)),
          output_sizes(std::move(out_sizes)) {
        if (input_sizes.size() != output_sizes.size())
            throw std::invalid_argument("one input and one output alphabet per party");
        probabilities.assign(total_inputs() * total_outputs(), T{0});
    }

    std::size_t total_inputs() const {
        std::size_t n = 1;
        for (int s : input_sizes) n *= static_cast<std::size_t>(s);
        return n;
    }
    std::size_t total_outputs() const {
        std::size_t n = 1;
        for (int s : output_sizes) n *= static_cast<std::size_t>(s);
        return n;
    }

    std::size_t input_index(const std::vector<int>& x) const {
        std::size_t idx = 0;
        for (int p = 0; p < parties; ++p) idx = idx * input_sizes[p] + x[p];
        return idx;
    }
    std::size_t output_index(const std::vector<int>& a) const {
        std::size_t idx = 0;
        for (int p = 0; p < parties; ++p) idx = idx * output_sizes[p] + a[p];
        return idx;
    }

    const T& at(const std::vector<int>& x, const std::vector<int>& a) const {
        return probabilities[input_index(x) * total_outputs() + output_index(a)];
    }
    T& at(const std::vector<int>& x, const std::vector<int>& a) {
        return probabilities[input_index(x) * total_outputs() + output_index(a)];
    }

    bool same_shape(const Device& other) const {
        return input_sizes == other.input_sizes && output_sizes == other.output_sizes;
    }

    Device<double> to_double() const {
        Device<double> d(input_sizes, output_sizes);
        for (std::size_t i = 0; i < probabilities.size(); ++i)
            d.probabilities[i] = nskey::to_double(probabilities[i]);
        return d;
    }
};

struct ValidationReport {
    bool normalized = false;
    bool nonsignaling = false;
    double worst_violation = 0.0;
    bool ok() const { return normalized && nonsignaling; }
};

// Checks normalization for every joint input and the non-signaling
// condition for every proper nonempty party subset.
template <typename T>
ValidationReport validate(const Device<T>& device, double norm_tol = 1e-12,
                          double ns_tol = 1e-10);

struct DirectMeasurement {
    std::vector<int> input_choice;
};

template <typename T>
struct GeneralMeasurement {
    Channel<T> dice;  // declared inputs -> the measured party's inputs
};

// Distribution over all parties' outputs at fixed inputs.
template <typename T>
JointDistribution<T> direct_measure(const Device<T>& device, const DirectMeasurement& m);

// Mixes a party's direct measurements through the dice; the party's input
// alphabet becomes the dice's declared input alphabet.
template <typename T>
Device<T> general_measure(const Device<T>& device, int party, const GeneralMeasurement<T>& gm);

template <typename T>
Device<T> tensor_product(const Device<T>& a, const Device<T>& b);

// Tensor product of two bipartite devices regrouped as a bipartite device
// with composite alphabets (Alice holds both first parties, Bob both second).
template <typename T>
Device<T> tensor_bipartite(const Device<T>& a, const Device<T>& b);

template <typename T>
Device<T> mix(const T& lambda, const Device<T>& p, const Device<T>& q);

// Relabels/coarse-grains one party's outputs through a deterministic map.
template <typename T>
Device<T> process_outputs(const Device<T>& device, int party, const std::vector<int>& map,
                          int new_size);

// ---- The (2,2,2,2) families -------------------------------------------

struct HrwParams {
    Rat delta;      // delta in [0,1]
    Rat epsilon_p;  // the box parameter, in [-1/4, 3/4]
};

// Deterministic box: a = alpha*x + beta, b = gamma*y + sigma (mod 2).
template <typename T>
Device<T> make_local_vertex(int alpha, int beta, int gamma, int sigma);

// Nonlocal vertex: a + b = x*y + r*x + s*y + t (mod 2), uniform marginals.
template <typename T>
Device<T> make_nonlocal_vertex(int r, int s, int t);

template <typename T>
Device<T> make_pr() {
    return make_nonlocal_vertex<T>(0, 0, 0);
}
template <typename T>
Device<T> make_anti_pr() {
    return make_nonlocal_vertex<T>(0, 0, 1);
}

// (1 - eps) PR + eps anti-PR.
template <typename T>
Device<T> make_isotropic(const T& eps);

Device<Rat> make_hrw(const HrwParams& params);

// Probability of losing the CHSH game under uniform inputs.
template <typename T>
T chsh_error(const Device<T>& device);

extern template struct Device<double>;
extern template struct Device<Rat>;

}  // namespace nskey

#endif
