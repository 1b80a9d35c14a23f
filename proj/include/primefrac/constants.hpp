#pragma once

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "primefrac/errors.hpp"

namespace primefrac {

using bigfloat = boost::multiprecision::cpp_bin_float_50;

// Euler-Mascheroni constant, 50 digits (reference table value).
inline const bigfloat& euler_gamma_table() {
    static const bigfloat g("0.57721566490153286060651209008240243104215933593992");
    return g;
}

// Independent route: Euler-Maclaurin for H_n - log n with n = 10^4.
// gamma = H_n - log n - 1/(2n) + 1/(12 n^2) - 1/(120 n^4) + 1/(252 n^6) - ...
// The first dropped term is ~ 1/(240 n^8) ~ 4e-35, comfortably below the
// 30-digit cross-check tolerance.
inline bigfloat euler_gamma_series() {
    const long n = 10000;
    bigfloat h = 0;
    for (long k = n; k >= 1; --k) h += bigfloat(1) / k;
    bigfloat nn = n;
    bigfloat g = h - log(nn) - 1 / (2 * nn) + 1 / (12 * nn * nn)
                 - 1 / (120 * pow(nn, 4)) + 1 / (252 * pow(nn, 6));
    return g;
}

// Cross-checked constant used by the sieve main terms; computed once.
inline double euler_gamma() {
    static const double value = [] {
        bigfloat a = euler_gamma_table();
        bigfloat b = euler_gamma_series();
        if (abs(a - b) > bigfloat("1e-30"))
            throw internal_consistency_error("euler_gamma: table and series disagree");
        return static_cast<double>(a);
    }();
    return value;
}

inline double exp_euler_gamma() {
    static const double value = static_cast<double>(exp(euler_gamma_table()));
    return value;
}

} // namespace primefrac
