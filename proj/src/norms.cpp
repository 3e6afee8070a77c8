#include "nskey/norms.hpp"

#include <cmath>
#include <cstdint>

namespace nskey {

namespace {

// Enumerates all maps from a domain of size `dom` into `cod` symbols.
class MapEnumerator {
  public:
    MapEnumerator(int dom, int cod) : map_(dom, 0), cod_(cod) {}
    const std::vector<int>& current() const { return map_; }
    bool next() {
        int i = static_cast<int>(map_.size()) - 1;
        while (i >= 0 && ++map_[i] == cod_) map_[i--] = 0;
        return i >= 0;
    }

  private:
    std::vector<int> map_;
    int cod_;
};

double count_maps(int dom, int cod) {
    return std::pow(static_cast<double>(cod), static_cast<double>(dom));
}

}  // namespace

double brute_force_distinguisher(const CcdState<double>& p, const CcdState<double>& r,
                                 const DistinguisherCaps& caps) {
    if (!p.same_shape(r)) throw std::invalid_argument("cc-d shapes differ");
    const int ne = p.e, nz = p.z;
    const int dice_in = caps.dice_in, dice_out = caps.dice_out;

    // Strategy-space size guard before enumerating anything.
    {
        double per_b = nz;                                            // direct choices
        per_b += nz * count_maps(ne, dice_in) * count_maps(dice_in, dice_out) *
                 (count_maps(ne * dice_out, 3) + 1.0);                // forward wirings
        per_b += nz * count_maps(dice_out, nz) * (dice_out + 5.0) *
                 (count_maps(ne * dice_out, 3) + 1.0);                // reverse wirings
        double total = per_b * p.sa * p.sb * p.q;
        if (total > static_cast<double>(caps.strategy_limit))
            throw std::runtime_error("distinguisher strategy space exceeds the cap");
    }

    double norm = 0.0;
    std::vector<double> delta(ne);      // per (b, z) differences over e
    std::vector<double> wired(ne * dice_out);

    for (int a = 0; a < p.sa; ++a)
        for (int b = 0; b < p.sb; ++b)
            for (int qq = 0; qq < p.q; ++qq) {
                double best = 0.0;

                // Direct measurements.
                for (int zz = 0; zz < nz; ++zz) {
                    double sum = 0.0;
                    for (int ee = 0; ee < ne; ++ee)
                        sum += std::abs(p.at(a, b, qq, ee, zz) - r.at(a, b, qq, ee, zz));
                    best = std::max(best, sum);
                }

                // Forward wirings: the state's output e drives the dice.
                for (int zz = 0; zz < nz; ++zz) {
                    for (int ee = 0; ee < ne; ++ee)
                        delta[ee] = p.at(a, b, qq, ee, zz) - r.at(a, b, qq, ee, zz);
                    MapEnumerator f(ne, dice_in);
                    do {
                        MapEnumerator dice(dice_in, dice_out);
                        do {
                            // wired(e, a2) = delta(e) [dice(f(e)) == a2]
                            std::fill(wired.begin(), wired.end(), 0.0);
                            for (int ee = 0; ee < ne; ++ee)
                                wired[ee * dice_out + dice.current()[f.current()[ee]]] =
                                    delta[ee];
                            // Injective post-map dominates any coarse-graining.
                            double inj = 0.0;
                            for (double v : wired) inj += std::abs(v);
                            best = std::max(best, inj);
                            if (count_maps(ne * dice_out, 3) <= 100000.0) {
                                MapEnumerator g(ne * dice_out, 3);
                                do {
                                    double acc[3] = {0, 0, 0};
                                    for (int i = 0; i < ne * dice_out; ++i)
                                        acc[g.current()[i]] += wired[i];
                                    best = std::max(best, std::abs(acc[0]) + std::abs(acc[1]) +
                                                              std::abs(acc[2]));
                                } while (g.next());
                            }
                        } while (dice.next());
                    } while (f.next());
                }

                // Reverse wirings: the dice output picks the measurement and
                // mixes over it; grid-stochastic dice exercise general
                // measurements.
                {
                    MapEnumerator f(dice_out, nz);
                    do {
                        for (int grid = 0; grid <= 4; ++grid) {
                            double lam = grid / 4.0;
                            // Two-point dice over the first two symbols.
                            double sum = 0.0;
                            for (int ee = 0; ee < ne; ++ee) {
                                double v = 0.0;
                                for (int a2 = 0; a2 < dice_out; ++a2) {
                                    double w = a2 == 0 ? lam
                                               : a2 == 1 ? 1.0 - lam
                                                         : 0.0;
                                    if (w == 0.0) continue;
                                    int zz = f.current()[a2];
                                    v += w * (p.at(a, b, qq, ee, zz) - r.at(a, b, qq, ee, zz));
                                }
                                sum += std::abs(v);
                            }
                            best = std::max(best, sum);
                        }
                    } while (f.next());
                }

                norm += best;
            }
    return norm / 2.0;
}

}  // namespace nskey
