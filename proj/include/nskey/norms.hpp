#ifndef NSKEY_NORMS_HPP
#define NSKEY_NORMS_HPP

#include <stdexcept>
#include <vector>

#include "nskey/distribution.hpp"
#include "nskey/rational.hpp"

namespace nskey {

// Classical-classical-device state: the post-protocol object. S_A, S_B and
// Q are classical, Eve keeps a device with input z and output e. Flat index
// order: (s_a, s_b, q, e, z).
template <typename T>
struct CcdState {
    int sa = 0, sb = 0, q = 0, e = 0, z = 0;
    std::vector<T> p;

    CcdState() = default;
    CcdState(int sa_, int sb_, int q_, int e_, int z_)
        : sa(sa_), sb(sb_), q(q_), e(e_), z(z_),
          p(static_cast<std::size_t>(sa_) * sb_ * q_ * e_ * z_, T{0}) {
        if (sa_ < 1 || sb_ < 1 || q_ < 1 || e_ < 1 || z_ < 1)
            throw std::invalid_argument("alphabet sizes must be positive");
    }

    std::size_t index(int a, int b, int qq, int ee, int zz) const {
        return ((((static_cast<std::size_t>(a) * sb + b) * q + qq) * e + ee) * z + zz);
    }
    T& at(int a, int b, int qq, int ee, int zz) { return p[index(a, b, qq, ee, zz)]; }
    const T& at(int a, int b, int qq, int ee, int zz) const {
        return p[index(a, b, qq, ee, zz)];
    }

    bool same_shape(const CcdState& o) const {
        return sa == o.sa && sb == o.sb && q == o.q && e == o.e && z == o.z;
    }
};

struct CcdReport {
    bool normalized = false;
    bool nonsignaling = false;  // in Z
    double worst_violation = 0.0;
    bool ok() const { return normalized && nonsignaling; }
};

template <typename T>
CcdReport validate(const CcdState<T>& s, double tol = 1e-12) {
    CcdReport rep;
    double worst = 0.0;
    bool ok_norm = true;
    for (int zz = 0; zz < s.z; ++zz) {
        T mass{0};
        for (int a = 0; a < s.sa; ++a)
            for (int b = 0; b < s.sb; ++b)
                for (int qq = 0; qq < s.q; ++qq)
                    for (int ee = 0; ee < s.e; ++ee) {
                        const T& v = s.at(a, b, qq, ee, zz);
                        if (v < T{0}) ok_norm = false;
                        mass += v;
                    }
        worst = std::max(worst, std::abs(to_double(mass) - 1.0));
        if constexpr (is_exact_v<T>) {
            if (mass != T{1}) ok_norm = false;
        } else {
            if (std::abs(mass - 1.0) > tol) ok_norm = false;
        }
    }
    rep.normalized = ok_norm;

    double worst_ns = 0.0;
    for (int a = 0; a < s.sa; ++a)
        for (int b = 0; b < s.sb; ++b)
            for (int qq = 0; qq < s.q; ++qq) {
                T ref{0};
                for (int zz = 0; zz < s.z; ++zz) {
                    T sum{0};
                    for (int ee = 0; ee < s.e; ++ee) sum += s.at(a, b, qq, ee, zz);
                    if (zz == 0) {
                        ref = sum;
                    } else {
                        worst_ns = std::max(worst_ns, std::abs(to_double(sum - ref)));
                        if constexpr (is_exact_v<T>) {
                            if (sum != ref) worst_ns = std::max(worst_ns, 1e-9);
                        }
                    }
                }
            }
    rep.nonsignaling = worst_ns <= tol;
    rep.worst_violation = std::max(worst, worst_ns);
    return rep;
}

// The closed-form NS norm for cc-d states:
//   (1/2) sum_{s_a, s_b, q} max_z sum_e | p - r |.
template <typename T>
T ns_norm_ccd(const CcdState<T>& p, const CcdState<T>& r) {
    if (!p.same_shape(r)) throw std::invalid_argument("cc-d shapes differ");
    T total{0};
    for (int a = 0; a < p.sa; ++a)
        for (int b = 0; b < p.sb; ++b)
            for (int qq = 0; qq < p.q; ++qq) {
                T best{0};
                for (int zz = 0; zz < p.z; ++zz) {
                    T sum{0};
                    for (int ee = 0; ee < p.e; ++ee)
                        sum += abs_val<T>(p.at(a, b, qq, ee, zz) - r.at(a, b, qq, ee, zz));
                    if (sum > best) best = sum;
                }
                total += best;
            }
    return total / T{2};
}

// Uniform perfectly correlated keys, Eve's side left as in the real state.
template <typename T>
CcdState<T> ideal_state(const CcdState<T>& real) {
    CcdState<T> out(real.sa, real.sb, real.q, real.e, real.z);
    for (int qq = 0; qq < real.q; ++qq)
        for (int ee = 0; ee < real.e; ++ee)
            for (int zz = 0; zz < real.z; ++zz) {
                T rest{0};
                for (int a = 0; a < real.sa; ++a)
                    for (int b = 0; b < real.sb; ++b) rest += real.at(a, b, qq, ee, zz);
                for (int a = 0; a < real.sa && a < real.sb; ++a)
                    out.at(a, a, qq, ee, zz) = rest / T{real.sa};
            }
    return out;
}

// Correlated but not uniform: Bob's key collapsed onto Alice's.
template <typename T>
CcdState<T> intermediate_state(const CcdState<T>& real) {
    CcdState<T> out(real.sa, real.sb, real.q, real.e, real.z);
    for (int a = 0; a < real.sa; ++a)
        for (int qq = 0; qq < real.q; ++qq)
            for (int ee = 0; ee < real.e; ++ee)
                for (int zz = 0; zz < real.z; ++zz) {
                    T sum{0};
                    for (int b = 0; b < real.sb; ++b) sum += real.at(a, b, qq, ee, zz);
                    if (a < real.sb) out.at(a, a, qq, ee, zz) = sum;
                }
    return out;
}

// Marginalizes Bob's key away (|S_B| becomes 1).
template <typename T>
CcdState<T> drop_bob_key(const CcdState<T>& s) {
    CcdState<T> out(s.sa, 1, s.q, s.e, s.z);
    for (int a = 0; a < s.sa; ++a)
        for (int b = 0; b < s.sb; ++b)
            for (int qq = 0; qq < s.q; ++qq)
                for (int ee = 0; ee < s.e; ++ee)
                    for (int zz = 0; zz < s.z; ++zz)
                        out.at(a, 0, qq, ee, zz) += s.at(a, b, qq, ee, zz);
    return out;
}

// P[S_A != S_B]; independent of z for a valid state, evaluated at z = 0.
template <typename T>
T prob_keys_differ(const CcdState<T>& s) {
    T total{0};
    for (int a = 0; a < s.sa; ++a)
        for (int b = 0; b < s.sb; ++b) {
            if (a == b) continue;
            for (int qq = 0; qq < s.q; ++qq)
                for (int ee = 0; ee < s.e; ++ee) total += s.at(a, b, qq, ee, 0);
        }
    return total;
}

struct SecurityReport {
    double eps_secrecy = 0.0;
    double eps_correctness = 0.0;
    double eps_security = 0.0;
    double p_abort = 0.0;
};

// Distances of the real state to its ideal counterpart, scaled by the pass
// probability; abort branches are taken identical on both sides.
template <typename T>
SecurityReport security_report(const CcdState<T>& real, double p_abort = 0.0) {
    if (p_abort < 0.0 || p_abort > 1.0)
        throw std::invalid_argument("abort probability outside [0,1]");
    auto ideal = ideal_state(real);
    SecurityReport rep;
    rep.p_abort = p_abort;
    const double pass = 1.0 - p_abort;
    rep.eps_correctness = pass * to_double(prob_keys_differ(real));
    rep.eps_secrecy = pass * to_double(ns_norm_ccd(drop_bob_key(real), drop_bob_key(ideal)));
    rep.eps_security = pass * to_double(ns_norm_ccd(real, ideal));
    return rep;
}

struct DistinguisherCaps {
    int dice_in = 2;   // dice input alphabet |X2|
    int dice_out = 2;  // dice output alphabet |A2|
    long strategy_limit = 10000000;
};

// Exhaustive distinguisher over dice-and-wiring strategies followed by a
// direct measurement. Always a lower bound on the NS norm; the direct
// strategies alone already reproduce the closed form.
double brute_force_distinguisher(const CcdState<double>& p, const CcdState<double>& r,
                                 const DistinguisherCaps& caps = {});

}  // namespace nskey

#endif
