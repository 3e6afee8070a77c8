#ifndef NSKEY_OPTIMIZE_HPP
#define NSKEY_OPTIMIZE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace nskey {

struct NelderMeadOptions {
    int max_evals = 2000;
    double initial_step = 0.8;
    double xtol = 1e-7;
    double ftol = 1e-12;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
};

// Standard Nelder-Mead downhill simplex on an unconstrained vector.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start,
                             const NelderMeadOptions& opts = {});

}  // namespace nskey

#endif
