#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <string_view>
#include <tuple>

#include <boost/multiprecision/cpp_int.hpp>

#include "primefrac/errors.hpp"

namespace primefrac {

using boost::multiprecision::cpp_int;

// Fixed-point real: value = mantissa / 2^frac_bits.
//
// The optional derivation tag ("sqrt2", "golden", "e", "pi", "dec:<s>",
// "rat:<a>/<b>") lets any instance be re-derived from scratch at a higher
// bit count, which is what the doubled-precision certification leans on.
// A tagged value is within 2^-F of the real number it names; mod-1
// reduction on the representation itself is exact.
class FixedReal {
public:
    static constexpr int kDefaultFracBits = 256;

    FixedReal() : mant_(0), frac_bits_(kDefaultFracBits) {}
    FixedReal(cpp_int mantissa, int frac_bits, std::string tag = "")
        : mant_(std::move(mantissa)), frac_bits_(frac_bits), tag_(std::move(tag)) {
        if (frac_bits_ < 1) throw std::domain_error("FixedReal: frac_bits must be positive");
    }

    static FixedReal from_symbol(std::string_view tag, int frac_bits = kDefaultFracBits) {
        return FixedReal(derive_mantissa(tag, frac_bits), frac_bits, std::string(tag));
    }

    // Nearest representable value of a/b.
    static FixedReal from_rational(const cpp_int& a, const cpp_int& b, int frac_bits = kDefaultFracBits) {
        if (b == 0) throw std::domain_error("FixedReal: zero denominator");
        std::string tag = "rat:" + a.str() + "/" + b.str();
        return FixedReal(derive_mantissa(tag, frac_bits), frac_bits, tag);
    }

    // Decimal string like "0.31" or "-2.5e-3" is re-derivable exactly.
    static FixedReal from_decimal(std::string_view dec, int frac_bits = kDefaultFracBits) {
        std::string tag = "dec:" + std::string(dec);
        return FixedReal(derive_mantissa(tag, frac_bits), frac_bits, tag);
    }

    const cpp_int& mantissa() const { return mant_; }
    int frac_bits() const { return frac_bits_; }
    const std::string& tag() const { return tag_; }
    bool rederivable() const { return !tag_.empty(); }

    // Re-derive at a new precision. Tagged values recompute from the tag;
    // untagged mantissas can only be shifted (exact upward, rounded downward).
    FixedReal rederive(int new_frac_bits) const {
        if (!tag_.empty()) return FixedReal(derive_mantissa(tag_, new_frac_bits), new_frac_bits, tag_);
        if (new_frac_bits >= frac_bits_)
            return FixedReal(mant_ << (new_frac_bits - frac_bits_), new_frac_bits, tag_);
        return FixedReal(shift_round(mant_, frac_bits_ - new_frac_bits), new_frac_bits, tag_);
    }

    double to_double() const {
        return std::ldexp(static_cast<double>(mant_), -frac_bits_);
    }

    FixedReal add(const FixedReal& o) const {
        auto [a, b, f] = aligned(*this, o);
        return FixedReal(a + b, f);
    }
    FixedReal sub(const FixedReal& o) const {
        auto [a, b, f] = aligned(*this, o);
        return FixedReal(a - b, f);
    }
    FixedReal mul_int(const cpp_int& n) const { return FixedReal(mant_ * n, frac_bits_); }
    FixedReal add_int(const cpp_int& n) const { return FixedReal(mant_ + (n << frac_bits_), frac_bits_, tag_); }

    // Fractional part in [0,1); exact on the representation.
    FixedReal frac() const {
        cpp_int one = cpp_int(1) << frac_bits_;
        cpp_int m = mant_ % one;
        if (m < 0) m += one;
        return FixedReal(m, frac_bits_);
    }

    // Distance to the nearest integer, exact on the representation.
    FixedReal norm() const {
        cpp_int one = cpp_int(1) << frac_bits_;
        cpp_int m = frac().mantissa();
        cpp_int other = one - m;
        return FixedReal(m <= other ? m : other, frac_bits_);
    }

private:
    cpp_int mant_;
    int frac_bits_;
    std::string tag_;

    static std::tuple<cpp_int, cpp_int, int> aligned(const FixedReal& x, const FixedReal& y) {
        int f = std::max(x.frac_bits_, y.frac_bits_);
        return {x.mant_ << (f - x.frac_bits_), y.mant_ << (f - y.frac_bits_), f};
    }

    static cpp_int shift_round(const cpp_int& m, int sh) {
        cpp_int half = cpp_int(1) << (sh - 1);
        cpp_int r = (m + half) >> sh;
        return r;
    }

    // floor(sqrt(v * 4^F)) / 2^F approximates sqrt(v) within 2^-F.
    static cpp_int isqrt_scaled(const cpp_int& v, int frac_bits) {
        cpp_int shifted = v << (2 * frac_bits);
        return sqrt(shifted);
    }

    static cpp_int derive_mantissa(std::string_view tag, int frac_bits);
};

inline cpp_int FixedReal::derive_mantissa(std::string_view tag, int F) {
    const int G = F + 64;  // guard bits for series truncation
    if (tag == "sqrt2") return isqrt_scaled(2, F);
    if (tag == "golden") {
        // (1 + sqrt 5)/2 carried at F+1 bits, then halved twice
        cpp_int s5 = isqrt_scaled(5, F + 1);
        return ((cpp_int(1) << (F + 1)) + s5) >> 2;
    }
    if (tag == "e") {
        cpp_int acc = 0, term = cpp_int(1) << G;
        for (int k = 1; term != 0; ++k) {
            acc += term;
            term /= k;
        }
        return shift_round(acc, G - F);
    }
    if (tag == "pi") {
        // Machin: pi = 16 atan(1/5) - 4 atan(1/239), alternating integer series
        auto atan_inv = [&](int64_t x) {
            cpp_int acc = 0;
            cpp_int pw = (cpp_int(1) << G) / x;  // x^-(2j+1) * 2^G
            int64_t xx = x * x;
            for (int j = 0; pw != 0; ++j) {
                cpp_int t = pw / (2 * j + 1);
                if (j % 2 == 0) acc += t; else acc -= t;
                pw /= xx;
            }
            return acc;
        };
        cpp_int v = 16 * atan_inv(5) - 4 * atan_inv(239);
        return shift_round(v, G - F);
    }
    if (tag.substr(0, 4) == "rat:") {
        auto body = tag.substr(4);
        auto slash = body.find('/');
        if (slash == std::string_view::npos) throw std::domain_error("FixedReal: bad rational tag");
        cpp_int a(std::string(body.substr(0, slash)));
        cpp_int b(std::string(body.substr(slash + 1)));
        if (b == 0) throw std::domain_error("FixedReal: zero denominator");
        bool neg = (a < 0) != (b < 0);
        cpp_int num = abs(a) << F, den = abs(b);
        cpp_int q = (num + den / 2) / den;
        return neg ? -q : q;
    }
    if (tag.substr(0, 4) == "dec:") {
        std::string s(tag.substr(4));
        bool neg = false;
        size_t i = 0;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = s[i] == '-'; ++i; }
        std::string digits;
        long long exp10 = 0;
        bool seen_dot = false;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (c == '.') { seen_dot = true; continue; }
            if (c == 'e' || c == 'E') {
                exp10 += std::stoll(s.substr(i + 1));
                break;
            }
            if (c < '0' || c > '9') throw std::domain_error("FixedReal: bad decimal");
            digits.push_back(c);
            if (seen_dot) exp10 -= 1;
        }
        if (digits.empty()) throw std::domain_error("FixedReal: empty decimal");
        // leading zeros would switch cpp_int's string parser into octal
        size_t nz = digits.find_first_not_of('0');
        digits = nz == std::string::npos ? "0" : digits.substr(nz);
        cpp_int num(digits), den = 1;
        if (exp10 >= 0) {
            for (long long k = 0; k < exp10; ++k) num *= 10;
        } else {
            for (long long k = 0; k < -exp10; ++k) den *= 10;
        }
        cpp_int q = ((num << F) + den / 2) / den;
        return neg ? -q : q;
    }
    throw std::domain_error("FixedReal: unknown symbol tag '" + std::string(tag) + "'");
}

struct FracNormResult {
    double frac;           // {alpha p^2 + beta} in [0,1)
    double norm;           // || alpha p^2 + beta || in [0, 1/2]
    double max_abs_error;  // certified bound: p^2 2^-F + 2^-F
    FixedReal frac_exact;  // exact on-representation fractional part
};

// ||alpha p^2 + beta|| with a certified error bound. The representation
// arithmetic is exact; the only error is the 2^-F uncertainty of alpha and
// beta themselves, amplified by p^2.
inline FracNormResult frac_norm(const FixedReal& alpha, const FixedReal& beta, uint64_t p) {
    cpp_int p2 = cpp_int(p) * p;
    int F = std::min(alpha.frac_bits(), beta.frac_bits());
    long long need = 2 * static_cast<long long>(msb(p2) + 1) + 64;
    if (F < need)
        throw precision_error("frac_norm: need F >= " + std::to_string(need) +
                              " fractional bits for p = " + std::to_string(p));
    FixedReal v = alpha.mul_int(p2).add(beta);
    FixedReal fr = v.frac();
    FixedReal nm = v.norm();
    double err = (static_cast<double>(p2) + 1.0) * std::ldexp(1.0, -std::min(alpha.frac_bits(), beta.frac_bits()));
    return FracNormResult{fr.to_double(), nm.to_double(), err, fr};
}

} // namespace primefrac
