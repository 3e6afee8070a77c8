#ifndef NSKEY_RATIONAL_HPP
#define NSKEY_RATIONAL_HPP

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace nskey {

// Exact rational scalar used for all polytope geometry. Entropic values are
// irrational, so those functions always work in double.
using Rat = mpq_class;

template <typename T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rat>;

inline double to_double(const Rat& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

// mpq_class(num, den) keeps common factors; this wrapper reduces them.
inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

template <typename T>
T abs_val(const T& x) {
    if constexpr (is_exact_v<T>) {
        return x < 0 ? T(-x) : x;
    } else {
        return std::abs(x);
    }
}

// Parses "0.375", "3/8", "-1.25e-2" or plain integers into an exact rational.
Rat rat_from_string(const std::string& s);

// Decimal-string form when the denominator is 2^a 5^b, otherwise "num/den".
std::string rat_to_string(const Rat& x);

}  // namespace nskey

#endif
