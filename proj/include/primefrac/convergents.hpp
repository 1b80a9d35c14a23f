#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "primefrac/fixed_real.hpp"
#include "primefrac/params.hpp"

namespace primefrac {

struct Convergent {
    cpp_int A;  // numerator
    cpp_int Q;  // denominator, positive, gcd(A,Q)=1
};

struct ConvergentList {
    std::vector<Convergent> items;
    bool truncated = false;  // representation precision ran out before `count`
};

namespace detail {

// Continued-fraction digits of the rational p/q, by Euclid.
inline std::vector<cpp_int> cf_digits(cpp_int p, cpp_int q, size_t max_digits) {
    std::vector<cpp_int> out;
    while (q != 0 && out.size() < max_digits) {
        cpp_int a = p / q;
        if (p < 0 && p % q != 0) a -= 1;  // floor for the leading digit
        out.push_back(a);
        cpp_int r = p - a * q;
        p = q;
        q = r;
    }
    return out;
}

} // namespace detail

// First `count` continued-fraction convergents of alpha, certified against
// the 2^-F representation uncertainty: a digit is emitted only while the
// lower and upper bounds alpha in [m/2^F, (m+1)/2^F] share it. Denominators
// are strictly increasing; when a_1 = 1 the 0-th convergent (which would
// repeat Q = 1) is dropped.
inline ConvergentList convergents(const FixedReal& alpha, int count) {
    if (count < 1) throw std::domain_error("convergents: count must be >= 1");
    cpp_int den = cpp_int(1) << alpha.frac_bits();
    size_t budget = static_cast<size_t>(count) + 4;
    auto da = detail::cf_digits(alpha.mantissa(), den, budget + 64);
    auto db = detail::cf_digits(alpha.mantissa() + 1, den, budget + 64);

    std::vector<cpp_int> digits;
    for (size_t i = 0; i < std::min(da.size(), db.size()); ++i) {
        // final digit of a rational's expansion is not trustworthy: the true
        // alpha lies strictly between the two bounds
        if (da[i] != db[i]) break;
        if (i + 1 == da.size() || i + 1 == db.size()) break;
        digits.push_back(da[i]);
        if (digits.size() >= budget) break;
    }

    ConvergentList out;
    cpp_int A_prev = 1, Q_prev = 0;  // h_{-1}, k_{-1}
    cpp_int A_cur = 0, Q_cur = 1;    // h_{-2} -> recurrence seeds
    bool skip_first = digits.size() >= 2 && digits[1] == 1;
    for (size_t i = 0; i < digits.size(); ++i) {
        cpp_int A = digits[i] * A_prev + A_cur;
        cpp_int Q = digits[i] * Q_prev + Q_cur;
        A_cur = A_prev; Q_cur = Q_prev;
        A_prev = A; Q_prev = Q;
        if (i == 0 && skip_first) continue;
        out.items.push_back(Convergent{A, Q});
        if (out.items.size() == static_cast<size_t>(count)) return out;
    }
    out.truncated = true;
    return out;
}

// |alpha - A/Q| < 1/Q^2, checked in representation arithmetic with the
// 2^-F uncertainty included: Q (|mQ - A 2^F| + Q) < 2^F suffices.
inline bool convergent_invariant_holds(const FixedReal& alpha, const Convergent& c) {
    if (c.Q <= 0) return false;
    if (gcd(abs(c.A), c.Q) != 1) return false;
    cpp_int den = cpp_int(1) << alpha.frac_bits();
    cpp_int diff = abs(alpha.mantissa() * c.Q - c.A * den);
    return c.Q * (diff + c.Q) < den;
}

struct XjResult {
    bool overflow = false;     // X_j does not fit a 64-bit integer
    bool exceeds_cap = false;  // X_j above the desk-scale search cap
    uint64_t xj = 0;           // valid when !overflow
    double log2_xj = 0;        // always reported
};

// Invert Q = X^{(4138/15) theta}: X_j = Q^{15/(4138 theta)}, rounded.
// Magnitude-only report when the result cannot be represented.
inline XjResult xj_from_convergent(const Convergent& c, const Params& params,
                                   double search_cap = 2e7) {
    if (params.theta <= 0) throw std::domain_error("xj_from_convergent: theta must be positive");
    double expo = 15.0 / (4138.0 * params.theta);
    // log2(Q) from the leading 53 bits, safe for arbitrarily large Q
    long long k = static_cast<long long>(msb(c.Q));
    double lg2Q;
    if (k <= 52) {
        lg2Q = std::log2(static_cast<double>(c.Q));
    } else {
        cpp_int top = c.Q >> (k - 52);
        lg2Q = std::log2(static_cast<double>(top)) + static_cast<double>(k - 52);
    }
    XjResult r;
    r.log2_xj = expo * lg2Q;
    if (r.log2_xj >= 63.0) {
        r.overflow = true;
        r.exceeds_cap = true;
        return r;
    }
    double x = std::pow(2.0, r.log2_xj);
    r.xj = static_cast<uint64_t>(std::llround(x));
    r.exceeds_cap = static_cast<double>(r.xj) > search_cap;
    return r;
}

} // namespace primefrac
