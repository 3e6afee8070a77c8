#include "nskey/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "json.hpp"
#include "nskey/affine.hpp"
#include "nskey/lp.hpp"

namespace nskey {

namespace {

enum class FilterVerdict { Reject, Accept, Ambiguous };

// Incremental floating-point prefilter over the depth-first support scan.
// The reduced system has r rows (full row rank of the lifted vertex
// matrix); candidate columns are eliminated one vertex at a time with
// partial pivoting, so a shared combination prefix pays for its
// elimination once. A prefix whose new column has no usable pivot is
// linearly dependent, and every support containing a dependent set is
// non-minimal, which prunes the whole subtree. Margins are generous
// relative to the rounding error of a partially pivoted elimination at
// these sizes; anything inside a margin goes to the exact path, and any
// depth with a marginal pivot poisons the chain so that all leaves below
// it are decided exactly.
class IncrementalFilter {
  public:
    IncrementalFilter(std::vector<double> cols, std::vector<double> target, int r, int kmax)
        : cols_(std::move(cols)), target_(std::move(target)), r_(r) {
        col_data_.assign(static_cast<std::size_t>(kmax) * r_, 0.0);
        target_stack_.assign(static_cast<std::size_t>(kmax + 1) * r_, 0.0);
        for (int i = 0; i < r_; ++i) target_stack_[i] = target_[i];
        pivot_rows_.assign(kmax, -1);
        pivot_values_.assign(kmax, 0.0);
        certain_.assign(kmax + 1, true);
        weights_.assign(kmax, 0.0);
    }

    // Eliminates vertex column v at depth d (columns 0..d-1 already in
    // place). Returns Reject when the column is confidently dependent on
    // the prefix, in which case the subtree cannot contain a minimal
    // support.
    FilterVerdict push(int d, int v) {
        double* w = &col_data_[static_cast<std::size_t>(d) * r_];
        const double* src = &cols_[static_cast<std::size_t>(v) * r_];
        for (int i = 0; i < r_; ++i) w[i] = src[i];

        bool used[64] = {};
        for (int j = 0; j < d; ++j) {
            const double* cj = &col_data_[static_cast<std::size_t>(j) * r_];
            int pj = pivot_rows_[j];
            used[pj] = true;
            double f = w[pj] / pivot_values_[j];
            if (f != 0.0)
                for (int i = 0; i < r_; ++i)
                    if (!used[i]) w[i] -= f * cj[i];
        }

        int pivot = -1;
        double best = 0.0;
        for (int i = 0; i < r_; ++i) {
            if (used[i]) continue;
            double mag = std::abs(w[i]);
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (best < kHardZero && certain_[d]) return FilterVerdict::Reject;
        certain_[d + 1] = certain_[d] && best >= kPivotTol;
        pivot_rows_[d] = pivot < 0 ? first_unused(used) : pivot;
        pivot_values_[d] = w[pivot_rows_[d]];

        // Propagate the elimination into the target copy for this depth.
        const double* tin = &target_stack_[static_cast<std::size_t>(d) * r_];
        double* tout = &target_stack_[static_cast<std::size_t>(d + 1) * r_];
        for (int i = 0; i < r_; ++i) tout[i] = tin[i];
        int pd = pivot_rows_[d];
        double ft = pivot_values_[d] != 0.0 ? tout[pd] / pivot_values_[d] : 0.0;
        if (ft != 0.0) {
            used[pd] = true;
            for (int i = 0; i < r_; ++i)
                if (!used[i]) tout[i] -= ft * w[i];
        }
        return FilterVerdict::Ambiguous;  // "keep going"; leaves decide
    }

    // Decision at a full support of size k (columns 0..k-1 eliminated).
    FilterVerdict leaf(int k) {
        if (!certain_[k]) return FilterVerdict::Ambiguous;

        bool used[64] = {};
        for (int j = 0; j < k; ++j) used[pivot_rows_[j]] = true;
        const double* t = &target_stack_[static_cast<std::size_t>(k) * r_];
        for (int i = 0; i < r_; ++i) {
            if (used[i]) continue;
            double res = std::abs(t[i]);
            if (res > kResidualHigh) return FilterVerdict::Reject;
            if (res > kResidualLow) return FilterVerdict::Ambiguous;
        }

        for (int j = k - 1; j >= 0; --j) {
            double v = t[pivot_rows_[j]];
            for (int m = j + 1; m < k; ++m)
                v -= col_data_[static_cast<std::size_t>(m) * r_ + pivot_rows_[j]] * weights_[m];
            weights_[j] = v / pivot_values_[j];
        }
        bool ambiguous = false;
        for (int j = 0; j < k; ++j) {
            if (weights_[j] < -kWeightMargin) return FilterVerdict::Reject;
            if (weights_[j] < kWeightMargin) ambiguous = true;
        }
        return ambiguous ? FilterVerdict::Ambiguous : FilterVerdict::Accept;
    }

  private:
    static int first_unused(const bool* used) {
        for (int i = 0;; ++i)
            if (!used[i]) return i;
    }

    static constexpr double kPivotTol = 1e-6;
    static constexpr double kHardZero = 1e-9;
    static constexpr double kResidualLow = 1e-9;
    static constexpr double kResidualHigh = 1e-5;
    static constexpr double kWeightMargin = 1e-5;

    std::vector<double> cols_;    // column-major reduced vertex coordinates
    std::vector<double> target_;
    int r_;
    std::vector<double> col_data_;      // transformed column per depth
    std::vector<double> target_stack_;  // transformed target per depth
    std::vector<int> pivot_rows_;
    std::vector<double> pivot_values_;
    std::vector<char> certain_;
    std::vector<double> weights_;
};

// Exact decision: solves the reduced system on the support; minimality on
// an unpruned support amounts to a unique strictly positive solution.
bool exact_minimal(const std::vector<std::vector<Rat>>& cols, const std::vector<Rat>& target,
                   const int* support, int k, std::vector<Rat>* weights_out) {
    const int r = static_cast<int>(target.size());
    const int w = k + 1;
    std::vector<Rat> m(static_cast<std::size_t>(r) * w);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < k; ++j) m[i * w + j] = cols[support[j]][i];
        m[i * w + k] = target[i];
    }

    int row = 0;
    for (int col = 0; col < k; ++col) {
        int pivot = -1;
        for (int i = row; i < r; ++i)
            if (m[i * w + col] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) return false;  // dependent support cannot be minimal here
        if (pivot != row)
            for (int j = col; j <= k; ++j) std::swap(m[row * w + j], m[pivot * w + j]);
        for (int i = row + 1; i < r; ++i) {
            if (m[i * w + col] == 0) continue;
            Rat f = m[i * w + col] / m[row * w + col];
            for (int j = col; j <= k; ++j) m[i * w + j] -= f * m[row * w + j];
        }
        ++row;
    }
    for (int i = row; i < r; ++i)
        if (m[i * w + k] != 0) return false;  // target outside the support's affine hull

    std::vector<Rat> weights(k);
    for (int i = k - 1; i >= 0; --i) {
        Rat v = m[i * w + k];
        for (int j = i + 1; j < k; ++j) v -= m[i * w + j] * weights[j];
        weights[i] = v / m[i * w + i];
        if (weights[i] <= 0) return false;
    }
    if (weights_out) *weights_out = std::move(weights);
    return true;
}

struct ScanPosition {
    int k = 1;
    std::vector<int> comb;
};

nlohmann::json checkpoint_to_json(const ScanPosition& pos, long scanned,
                                  const std::vector<MinimalEnsemble>& found) {
    nlohmann::json j;
    j["version"] = 1;
    j["k"] = pos.k;
    j["comb"] = pos.comb;
    j["scanned"] = scanned;
    auto& arr = j["found"] = nlohmann::json::array();
    for (const auto& e : found) arr.push_back(e.support);
    return j;
}

}  // namespace

EnumerationResult enumerate_minimal_ensembles(const Device<Rat>& device,
                                              const std::vector<Device<Rat>>& vertices,
                                              const EnumerationOptions& opts) {
    if (vertices.empty()) throw std::invalid_argument("vertex list is empty");
    const int n = static_cast<int>(vertices.size());
    if (n > 64) throw std::invalid_argument("vertex lists above 64 entries are unsupported");
    for (const auto& v : vertices)
        if (!v.same_shape(device))
            throw std::invalid_argument("vertex shape differs from the device");

    // Membership precondition, checked on the full tensor. This also
    // justifies solving candidate systems on the spanning rows only.
    {
        std::vector<std::vector<Rat>> gens;
        gens.reserve(n);
        for (const auto& v : vertices) gens.push_back(v.probabilities);
        if (!convex_combination_on_support(device.probabilities, gens))
            throw std::invalid_argument("device lies outside the hull of the vertices");
    }

    std::vector<std::vector<Rat>> tensors;
    tensors.reserve(n);
    for (const auto& v : vertices) tensors.push_back(v.probabilities);
    AffineChart chart = build_affine_chart(tensors);
    const int r = static_cast<int>(chart.row_ids.size());

    std::vector<std::vector<Rat>> cols(n);
    std::vector<double> fcols(static_cast<std::size_t>(n) * r);
    for (int i = 0; i < n; ++i) {
        cols[i] = chart.reduce(tensors[i]);
        for (int j = 0; j < r; ++j) fcols[i * r + j] = to_double(cols[i][j]);
    }
    std::vector<Rat> target = chart.reduce(device.probabilities);
    std::vector<double> ftarget(r);
    for (int j = 0; j < r; ++j) ftarget[j] = to_double(target[j]);

    IncrementalFilter filter(std::move(fcols), std::move(ftarget), r, std::min(r, n));

    EnumerationResult result;
    {
        // Combinatorial candidate count, for reporting only.
        double total = 0;
        for (int k = 1; k <= std::min(r, n); ++k) {
            double c = 1;
            for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
            total += c;
        }
        result.total_candidates = static_cast<long>(std::llround(total));
    }

    ScanPosition pos;
    pos.comb = {0};
    std::vector<std::uint64_t> found_masks;
    if (!opts.resume.empty()) {
        auto j = nlohmann::json::parse(opts.resume);
        if (j.at("version").get<int>() != 1)
            throw std::invalid_argument("unknown checkpoint version");
        pos.k = j.at("k").get<int>();
        pos.comb = j.at("comb").get<std::vector<int>>();
        result.scanned = j.at("scanned").get<long>();
        for (const auto& sup : j.at("found")) {
            MinimalEnsemble ens;
            ens.support = sup.get<std::vector<int>>();
            std::uint64_t mask = 0;
            for (int idx : ens.support) mask |= std::uint64_t{1} << idx;
            found_masks.push_back(mask);
            if (!exact_minimal(cols, target, ens.support.data(),
                               static_cast<int>(ens.support.size()), &ens.weights))
                throw std::invalid_argument("checkpoint support is not a minimal ensemble");
            result.ensembles.push_back(std::move(ens));
        }
    }

    const int kmax = std::min(r, n);
    bool resuming = !opts.resume.empty();
    for (int k = std::max(pos.k, 1); k <= kmax; ++k) {
        // Only strictly smaller supports can prune size-k candidates, and
        // they are all known before this pass starts.
        std::vector<std::uint64_t> prune_masks;
        for (std::uint64_t fm : found_masks)
            if (std::popcount(fm) < k) prune_masks.push_back(fm);

        std::vector<int> comb(k);
        std::vector<std::uint64_t> prefix_mask(k + 1, 0);
        int depth = 0;
        int next = 0;
        if (resuming && k == pos.k && static_cast<int>(pos.comb.size()) == k) {
            // Rebuild the elimination stack along the stored combination;
            // verdicts along the way are ignored, the leaf decides.
            comb = pos.comb;
            for (int d = 0; d + 1 < k; ++d) {
                if (!opts.exact_only) filter.push(d, comb[d]);
                prefix_mask[d + 1] = prefix_mask[d] | (std::uint64_t{1} << comb[d]);
            }
            depth = k - 1;
            next = comb[k - 1];
        }
        resuming = false;

        while (true) {
            if (next > n - (k - depth)) {  // level exhausted
                if (depth == 0) break;
                --depth;
                next = comb[depth] + 1;
                continue;
            }

            std::uint64_t mask = prefix_mask[depth] | (std::uint64_t{1} << next);
            bool pruned = false;
            for (std::uint64_t fm : prune_masks)
                if ((mask & fm) == fm) {
                    pruned = true;
                    break;
                }
            if (pruned) {
                ++next;
                continue;
            }

            FilterVerdict verdict = FilterVerdict::Ambiguous;
            if (!opts.exact_only) {
                verdict = filter.push(depth, next);
                if (verdict == FilterVerdict::Reject) {
                    // Dependent prefix: no superset is a minimal support.
                    ++next;
                    continue;
                }
            }

            if (depth + 1 == k) {
                comb[depth] = next;
                if (opts.budget >= 0 && result.scanned >= opts.budget) {
                    result.complete = false;
                    result.checkpoint =
                        checkpoint_to_json({k, comb}, result.scanned, result.ensembles).dump();
                    return result;
                }
                ++result.scanned;

                FilterVerdict decision =
                    opts.exact_only ? FilterVerdict::Ambiguous : filter.leaf(k);
                if (decision != FilterVerdict::Reject) {
                    MinimalEnsemble ens;
                    if (exact_minimal(cols, target, comb.data(), k, &ens.weights)) {
                        ens.support = comb;
                        found_masks.push_back(mask);
                        result.ensembles.push_back(std::move(ens));
                        if (opts.max_ensembles >= 0 &&
                            static_cast<long>(result.ensembles.size()) >= opts.max_ensembles) {
                            result.complete = false;
                            result.checkpoint =
                                checkpoint_to_json({k, comb}, result.scanned, result.ensembles)
                                    .dump();
                            return result;
                        }
                    }
                }
                ++next;
            } else {
                comb[depth] = next;
                prefix_mask[depth + 1] = mask;
                ++depth;
                next = comb[depth - 1] + 1;
            }
        }
    }
    return result;
}

CompleteExtension build_complete_extension(const Device<Rat>& device,
                                           const std::vector<Device<Rat>>& vertices,
                                           const EnumerationOptions& opts) {
    auto enumeration = enumerate_minimal_ensembles(device, vertices, opts);
    if (!enumeration.complete)
        throw std::runtime_error("enumeration budget exhausted before completion");
    CompleteExtension ce;
    ce.parent = device;
    ce.vertices = vertices;
    ce.ensembles = std::move(enumeration.ensembles);
    for (const auto& e : ce.ensembles)
        ce.e_alphabet = std::max(ce.e_alphabet, static_cast<int>(e.support.size()));
    return ce;
}

JointDistribution<Rat> measured_tripartite(const CompleteExtension& ce, int z,
                                           const DirectMeasurement& m) {
    if (z < 0 || z >= ce.z_size()) throw std::out_of_range("z out of range");
    const auto& ens = ce.ensembles[z];
    std::size_t out_len = ce.parent.total_outputs();
    std::vector<int> sizes = ce.parent.output_sizes;
    sizes.push_back(ce.e_alphabet);
    std::vector<Rat> probs(out_len * ce.e_alphabet, Rat(0));
    for (std::size_t e = 0; e < ens.support.size(); ++e) {
        auto member = direct_measure(ce.vertices[ens.support[e]], m);
        for (std::size_t o = 0; o < out_len; ++o)
            probs[o * ce.e_alphabet + e] = ens.weights[e] * member.probabilities[o];
    }
    return JointDistribution<Rat>(std::move(sizes), std::move(probs));
}

Ensemble eve_attack(const CompleteExtension& ce, const Channel<Rat>& dice,
                    const Channel<Rat>& post) {
    if (dice.input_size != 1 || dice.output_size != ce.z_size())
        throw std::invalid_argument("dice must be a single distribution over Z");
    if (post.input_size != ce.e_alphabet)
        throw std::invalid_argument("post-processing channel input must match |E|");
    if (!dice.is_stochastic(1e-12) || !post.is_stochastic(1e-12))
        throw std::invalid_argument("dice and channel must be stochastic");

    const std::size_t tensor_len = ce.parent.probabilities.size();
    std::vector<std::vector<Rat>> mass(post.output_size,
                                       std::vector<Rat>(tensor_len, Rat(0)));
    std::vector<Rat> totals(post.output_size, Rat(0));
    for (int z = 0; z < ce.z_size(); ++z) {
        const Rat& pz = dice(z, 0);
        if (pz == 0) continue;
        const auto& ens = ce.ensembles[z];
        for (std::size_t e = 0; e < ens.support.size(); ++e) {
            Rat pe = pz * ens.weights[e];
            if (pe == 0) continue;
            const auto& member = ce.vertices[ens.support[e]];
            for (int ep = 0; ep < post.output_size; ++ep) {
                Rat w = pe * post(ep, static_cast<int>(e));
                if (w == 0) continue;
                totals[ep] += w;
                for (std::size_t t = 0; t < tensor_len; ++t)
                    mass[ep][t] += w * member.probabilities[t];
            }
        }
    }

    Ensemble out;
    for (int ep = 0; ep < post.output_size; ++ep) {
        if (totals[ep] == 0) continue;
        Device<Rat> member(ce.parent.input_sizes, ce.parent.output_sizes);
        for (std::size_t t = 0; t < tensor_len; ++t)
            member.probabilities[t] = mass[ep][t] / totals[ep];
        out.weights.push_back(totals[ep]);
        out.members.push_back(std::move(member));
    }
    return out;
}

}  // namespace nskey
