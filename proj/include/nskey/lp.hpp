#ifndef NSKEY_LP_HPP
#define NSKEY_LP_HPP

#include <optional>
#include <vector>

#include "nskey/rational.hpp"

namespace nskey {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename T>
struct LinearProgram {
    int num_vars = 0;
    std::vector<T> objective;  // maximized
    std::vector<std::vector<T>> eq_matrix;
    std::vector<T> eq_rhs;
    std::vector<std::vector<T>> ineq_matrix;  // rows are "<= rhs"
    std::vector<T> ineq_rhs;
    std::vector<T> lower_bounds;                 // empty means all zero
    std::vector<std::optional<T>> upper_bounds;  // empty means unbounded above
};

template <typename T>
struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> point;
    T objective{0};
    std::vector<int> basis;  // basic column indices of the internal standard form
};

namespace lp_detail {

template <typename T>
bool is_neg(const T& x) {
    if constexpr (is_exact_v<T>)
        return x < 0;
    else
        return x < -1e-9;
}
template <typename T>
bool is_pos(const T& x) {
    if constexpr (is_exact_v<T>)
        return x > 0;
    else
        return x > 1e-9;
}
template <typename T>
bool is_zero(const T& x) {
    return !is_neg(x) && !is_pos(x);
}

// Dense revised simplex on equality standard form: min c.x, A x = b, x >= 0,
// with b >= 0 and an initial basis of artificial/slack columns. Bland's rule
// on both the entering and leaving choice guarantees termination.
template <typename T>
class SimplexCore {
  public:
    SimplexCore(std::vector<std::vector<T>> a, std::vector<T> b)
        : a_(std::move(a)), b_(std::move(b)), m_(static_cast<int>(b_.size())),
          n_(m_ ? static_cast<int>(a_[0].size()) : 0) {}

    int rows() const { return m_; }
    int cols() const { return n_; }
    std::vector<int>& basis() { return basis_; }

    // Iterates until optimal for the cost vector; returns false on unbounded.
    // Columns at or beyond `forbidden_from` never enter the basis.
    bool minimize(const std::vector<T>& cost, int forbidden_from = -1) {
        const int limit = forbidden_from < 0 ? n_ : forbidden_from;
        while (true) {
            factorize();
            std::vector<T> y = solve_transposed(basic_cost(cost));
            int entering = -1;
            for (int j = 0; j < limit; ++j) {
                if (in_basis_[j]) continue;
                T reduced = cost[j];
                for (int i = 0; i < m_; ++i) reduced -= y[i] * a_[i][j];
                if (is_neg(reduced)) {
                    entering = j;
                    break;  // Bland: smallest index
                }
            }
            if (entering < 0) return true;

            std::vector<T> col(m_);
            for (int i = 0; i < m_; ++i) col[i] = a_[i][entering];
            std::vector<T> dir = solve(col);

            int leaving = -1;
            T best_ratio{0};
            for (int i = 0; i < m_; ++i) {
                if (!is_pos(dir[i])) continue;
                T ratio = x_basic_[i] / dir[i];
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leaving])) {
                    leaving = i;
                    best_ratio = ratio;
                }
            }
            if (leaving < 0) return false;  // unbounded

            in_basis_[basis_[leaving]] = false;
            in_basis_[entering] = true;
            basis_[leaving] = entering;
        }
    }

    void set_basis(std::vector<int> basis) {
        basis_ = std::move(basis);
        in_basis_.assign(n_, false);
        for (int j : basis_) in_basis_[j] = true;
    }

    std::vector<T> basic_solution() {
        factorize();
        std::vector<T> x(n_, T{0});
        for (int i = 0; i < m_; ++i) x[basis_[i]] = x_basic_[i];
        return x;
    }

    // Pivots artificial columns (indices >= first_artificial) out of the
    // basis where possible; rows that cannot pivot are redundant and get
    // neutralized in place.
    void drive_out_artificials(int first_artificial) {
        factorize();
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < first_artificial) continue;
            int replacement = -1;
            for (int j = 0; j < first_artificial && replacement < 0; ++j) {
                if (in_basis_[j]) continue;
                std::vector<T> col(m_);
                for (int r = 0; r < m_; ++r) col[r] = a_[r][j];
                std::vector<T> dir = solve(col);
                if (!is_zero(dir[i])) replacement = j;
            }
            if (replacement >= 0) {
                in_basis_[basis_[i]] = false;
                in_basis_[replacement] = true;
                basis_[i] = replacement;
                factorize();
            }
        }
    }

  private:
    std::vector<T> basic_cost(const std::vector<T>& cost) const {
        std::vector<T> cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
        return cb;
    }

    // LU-style elimination of the basis matrix, recomputed per iteration;
    // problem sizes here make this cheap and keeps the arithmetic exact.
    void factorize() {
        lu_.assign(m_, std::vector<T>(m_));
        perm_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            perm_[i] = i;
            for (int k = 0; k < m_; ++k) lu_[i][k] = a_[i][basis_[k]];
        }
        for (int c = 0; c < m_; ++c) {
            int pivot = -1;
            for (int r = c; r < m_; ++r)
                if (!is_zero(lu_[r][c])) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) throw std::runtime_error("singular simplex basis");
            std::swap(lu_[c], lu_[pivot]);
            std::swap(perm_[c], perm_[pivot]);
            for (int r = c + 1; r < m_; ++r) {
                if (is_zero(lu_[r][c])) {
                    lu_[r][c] = T{0};
                    continue;
                }
                T f = lu_[r][c] / lu_[c][c];
                lu_[r][c] = f;
                for (int k = c + 1; k < m_; ++k) lu_[r][k] -= f * lu_[c][k];
            }
        }
        x_basic_ = solve(b_);
    }

    // Solves B z = rhs with the current factorization.
    std::vector<T> solve(const std::vector<T>& rhs) const {
        std::vector<T> z(m_);
        for (int i = 0; i < m_; ++i) z[i] = rhs[perm_[i]];
        for (int c = 0; c < m_; ++c)
            for (int r = c + 1; r < m_; ++r) z[r] -= lu_[r][c] * z[c];
        for (int r = m_ - 1; r >= 0; --r) {
            for (int k = r + 1; k < m_; ++k) z[r] -= lu_[r][k] * z[k];
            z[r] /= lu_[r][r];
        }
        return z;
    }

    // Solves B^T y = rhs.
    std::vector<T> solve_transposed(const std::vector<T>& rhs) const {
        std::vector<T> y = rhs;
        for (int r = 0; r < m_; ++r) {
            for (int k = 0; k < r; ++k) y[r] -= lu_[k][r] * y[k];
            y[r] /= lu_[r][r];
        }
        for (int r = m_ - 1; r >= 0; --r)
            for (int k = r + 1; k < m_; ++k) y[r] -= lu_[k][r] * y[k];
        std::vector<T> out(m_);
        for (int i = 0; i < m_; ++i) out[perm_[i]] = y[i];
        return out;
    }

    std::vector<std::vector<T>> a_;
    std::vector<T> b_;
    int m_, n_;
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
    std::vector<std::vector<T>> lu_;
    std::vector<int> perm_;
    std::vector<T> x_basic_;
};

}  // namespace lp_detail

template <typename T>
LpSolution<T> solve(const LinearProgram<T>& lp) {
    using namespace lp_detail;
    const int n = lp.num_vars;
    if (static_cast<int>(lp.objective.size()) != n)
        throw std::invalid_argument("objective size mismatch");
    for (const auto& row : lp.eq_matrix)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("eq row size mismatch");
    for (const auto& row : lp.ineq_matrix)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("ineq row size mismatch");
    if (lp.eq_matrix.size() != lp.eq_rhs.size() || lp.ineq_matrix.size() != lp.ineq_rhs.size())
        throw std::invalid_argument("rhs size mismatch");

    std::vector<T> lower(n, T{0});
    if (!lp.lower_bounds.empty()) {
        if (static_cast<int>(lp.lower_bounds.size()) != n)
            throw std::invalid_argument("lower bound size mismatch");
        lower = lp.lower_bounds;
    }

    // Shift to u = x - lower >= 0 and fold upper bounds into <= rows.
    std::vector<std::vector<T>> ineq = lp.ineq_matrix;
    std::vector<T> ineq_rhs = lp.ineq_rhs;
    if (!lp.upper_bounds.empty()) {
        if (static_cast<int>(lp.upper_bounds.size()) != n)
            throw std::invalid_argument("upper bound size mismatch");
        for (int j = 0; j < n; ++j)
            if (lp.upper_bounds[j]) {
                std::vector<T> row(n, T{0});
                row[j] = T{1};
                ineq.push_back(std::move(row));
                ineq_rhs.push_back(*lp.upper_bounds[j]);
            }
    }

    const int m_eq = static_cast<int>(lp.eq_matrix.size());
    const int m_ineq = static_cast<int>(ineq.size());
    const int m = m_eq + m_ineq;
    const int n_slack = m_ineq;

    if (m == 0) {
        LpSolution<T> sol;
        for (int j = 0; j < n; ++j)
            if (lp_detail::is_pos(lp.objective[j])) {
                sol.status = LpStatus::Unbounded;
                return sol;
            }
        sol.status = LpStatus::Optimal;
        sol.point = lower;
        sol.objective = T{0};
        for (int j = 0; j < n; ++j) sol.objective += lp.objective[j] * lower[j];
        return sol;
    }

    // Standard form columns: structural | slack | artificial.
    std::vector<T> rhs(m);
    std::vector<std::vector<T>> rows(m, std::vector<T>(n + n_slack, T{0}));
    for (int i = 0; i < m_eq; ++i) {
        T b = lp.eq_rhs[i];
        for (int j = 0; j < n; ++j) b -= lp.eq_matrix[i][j] * lower[j];
        for (int j = 0; j < n; ++j) rows[i][j] = lp.eq_matrix[i][j];
        rhs[i] = b;
    }
    for (int i = 0; i < m_ineq; ++i) {
        T b = ineq_rhs[i];
        for (int j = 0; j < n; ++j) b -= ineq[i][j] * lower[j];
        for (int j = 0; j < n; ++j) rows[m_eq + i][j] = ineq[i][j];
        rows[m_eq + i][n + i] = T{1};
        rhs[m_eq + i] = b;
    }
    // Make rhs nonnegative (flips slack signs where needed).
    for (int i = 0; i < m; ++i)
        if (is_neg(rhs[i])) {
            for (auto& v : rows[i]) v = -v;
            rhs[i] = -rhs[i];
        }

    // A slack column with +1 and nonnegative rhs can start basic; everything
    // else gets an artificial.
    std::vector<int> basis;
    std::vector<int> needs_artificial;
    for (int i = 0; i < m; ++i) {
        if (i >= m_eq && is_pos(rows[i][n + (i - m_eq)])) {
            basis.push_back(n + (i - m_eq));
        } else {
            basis.push_back(-1);
            needs_artificial.push_back(i);
        }
    }
    const int first_artificial = n + n_slack;
    int n_art = static_cast<int>(needs_artificial.size());
    for (auto& row : rows) row.resize(first_artificial + n_art, T{0});
    for (int k = 0; k < n_art; ++k) {
        rows[needs_artificial[k]][first_artificial + k] = T{1};
        basis[needs_artificial[k]] = first_artificial + k;
    }

    SimplexCore<T> core(rows, rhs);
    core.set_basis(basis);

    LpSolution<T> sol;
    if (n_art > 0) {
        std::vector<T> phase1(first_artificial + n_art, T{0});
        for (int k = 0; k < n_art; ++k) phase1[first_artificial + k] = T{1};
        if (!core.minimize(phase1)) throw std::runtime_error("phase 1 unbounded");
        auto x = core.basic_solution();
        T infeas{0};
        for (int k = 0; k < n_art; ++k) infeas += x[first_artificial + k];
        if (is_pos(infeas)) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        core.drive_out_artificials(first_artificial);
    }

    std::vector<T> cost(first_artificial + n_art, T{0});
    for (int j = 0; j < n; ++j) cost[j] = -lp.objective[j];  // maximize

    if (!core.minimize(cost, first_artificial)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }
    auto x = core.basic_solution();
    sol.status = LpStatus::Optimal;
    sol.point.resize(n);
    sol.objective = T{0};
    for (int j = 0; j < n; ++j) {
        sol.point[j] = x[j] + lower[j];
        sol.objective += lp.objective[j] * sol.point[j];
    }
    sol.basis = core.basis();
    return sol;
}

// Nonnegative weights summing to one with sum_i w_i g_i = point, or nullopt.
template <typename T>
std::optional<std::vector<T>> convex_combination_on_support(
    const std::vector<T>& point, const std::vector<std::vector<T>>& generators) {
    if (generators.empty()) throw std::invalid_argument("empty generator set");
    const int k = static_cast<int>(generators.size());
    const std::size_t dim = point.size();
    for (const auto& g : generators)
        if (g.size() != dim) throw std::invalid_argument("generator dimension mismatch");

    LinearProgram<T> lp;
    lp.num_vars = k;
    lp.objective.assign(k, T{0});
    lp.eq_matrix.reserve(dim + 1);
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<T> row(k);
        for (int i = 0; i < k; ++i) row[i] = generators[i][d];
        lp.eq_matrix.push_back(std::move(row));
        lp.eq_rhs.push_back(point[d]);
    }
    lp.eq_matrix.push_back(std::vector<T>(k, T{1}));
    lp.eq_rhs.push_back(T{1});

    auto sol = solve(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    return sol.point;
}

}  // namespace nskey

#endif
