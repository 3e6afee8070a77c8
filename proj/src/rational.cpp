#include "nskey/rational.hpp"

#include <algorithm>
#include <cctype>

namespace nskey {

Rat rat_from_string(const std::string& input) {
    std::string s = input;
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    if (s.find('/') != std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0)
            throw std::invalid_argument("bad rational literal: " + input);
        r.canonicalize();
        return r;
    }

    bool neg = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        neg = s[pos] == '-';
        ++pos;
    }

    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    long exponent = 0;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("bad literal: " + input);
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            exponent = std::stol(s.substr(pos + 1));
            break;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_dot) ++frac_digits;
        } else {
            throw std::invalid_argument("bad literal: " + input);
        }
    }
    if (digits.empty()) throw std::invalid_argument("bad literal: " + input);

    mpz_class num(digits, 10);
    if (neg) num = -num;
    long p10 = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(p10)));
    Rat r;
    if (p10 >= 0)
        r = Rat(num * scale);
    else
        r = Rat(num, scale);
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& x) {
    mpz_class den = x.get_den();
    // Strip factors of 2 and 5; a pure power of ten denominator means the
    // value has a finite decimal expansion.
    mpz_class d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1) return x.get_str();

    int digits = std::max(twos, fives);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = x.get_num() * (p10 / den);
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string raw = scaled.get_str();
    if (digits == 0) return (neg ? "-" : "") + raw;
    if (static_cast<int>(raw.size()) <= digits)
        raw.insert(0, digits + 1 - raw.size(), '0');
    raw.insert(raw.size() - digits, ".");
    // Trim trailing zeros but keep at least one fractional digit.
    while (raw.back() == '0' && raw[raw.size() - 2] != '.') raw.pop_back();
    return (neg ? "-" : "") + raw;
}

}  // namespace nskey
