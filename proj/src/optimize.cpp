#include "nskey/optimize.hpp"

#include <cmath>
#include <numeric>

namespace nskey {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start, const NelderMeadOptions& opts) {
    const int n = static_cast<int>(start.size());
    NelderMeadResult res;
    res.x = start;
    if (n == 0) {
        res.value = f(start);
        res.evals = 1;
        return res;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    for (int i = 1; i <= n; ++i) simplex[i][i - 1] += opts.initial_step;
    int evals = 0;
    for (int i = 0; i <= n; ++i) fv[i] = (++evals, f(simplex[i]));

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<int> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        int best = order[0], worst = order[n], second_worst = order[n - 1];

        double spread = 0.0;
        for (int j = 0; j < n; ++j)
            spread = std::max(spread, std::abs(simplex[worst][j] - simplex[best][j]));
        if (spread < opts.xtol && std::abs(fv[worst] - fv[best]) < opts.ftol) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (int j = 0; j < n; ++j) centroid[j] /= n;

        for (int j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
        double fr = (++evals, f(xr));

        if (fr < fv[best]) {
            for (int j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            double fe = (++evals, f(xe));
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            for (int j = 0; j < n; ++j) xc[j] = centroid[j] + rho * (simplex[worst][j] - centroid[j]);
            double fc = (++evals, f(xc));
            if (fc < fv[worst]) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
                    fv[i] = (++evals, f(simplex[i]));
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.value = fv[best];
    res.evals = evals;
    return res;
}

}  // namespace nskey
