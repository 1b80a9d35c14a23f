#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "primefrac/errors.hpp"
#include "primefrac/nt.hpp"
#include "primefrac/params.hpp"

namespace primefrac {

namespace cup_detail {

// unqualified calls pick up std:: for builtins and ADL for multiprecision
template <class Real>
Real pi_value() {
    using std::atan;
    return 4 * atan(Real(1));
}

template <class Real>
Real floor_value(const Real& x) {
    using std::floor;
    return floor(x);
}

template <class Real>
Real sin_value(const Real& x) {
    using std::sin;
    return sin(x);
}

template <class Real>
Real cos_value(const Real& x) {
    using std::cos;
    return cos(x);
}

// x^n for small integer n by binary powering; avoids pow() in hot loops.
template <class Real>
Real ipow(Real x, int n) {
    Real r = 1;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

} // namespace cup_detail

// Periodic mollifier with period 1: the indicator of [-Delta/2, Delta/2]
// convolved r times with the unit-mass box of width Delta/r.
//
// Support within one period is exactly (-Delta, Delta); the plateau value 1
// is attained at the single point t = 0. Fourier coefficients are real,
// even, and come in closed form:
//   g(k) = Delta sinc(pi k Delta) sinc(pi k Delta / r)^r,   g(0) = Delta.
//
// Evaluation goes through the Irwin-Hall CDF: the r-fold box convolution is
// the density of a sum of r iid uniforms, so chi(t) is a CDF difference and
// a degree-r piecewise polynomial.
template <class Real>
class CupFunction {
public:
    CupFunction(Real delta, int r) : delta_(std::move(delta)), r_(r) {
        if (!(delta_ > 0) || !(delta_ < Real(0.25)))
            throw std::domain_error("CupFunction: Delta must lie in (0, 1/4)");
        if (r_ < 1) throw std::domain_error("CupFunction: smoothing order must be >= 1");
        pi_ = cup_detail::pi_value<Real>();
        binom_.resize(r_ + 1);
        binom_[0] = 1;
        for (int j = 1; j <= r_; ++j)
            binom_[j] = binom_[j - 1] * Real(r_ - j + 1) / Real(j);
        Real fact = 1;
        for (int j = 2; j <= r_; ++j) fact *= Real(j);
        inv_r_fact_ = Real(1) / fact;
    }

    Real delta() const { return delta_; }
    int smoothing_order() const { return r_; }

    // chi(t); exact spline evaluation, t reduced mod 1.
    Real eval(Real t) const {
        Real half = Real(1) / 2;
        t = t - cup_detail::floor_value<Real>(t + half);  // t in [-1/2, 1/2)
        if (t >= delta_ || t <= -delta_) return Real(0);
        // T = (Delta/r)(S - r/2) with S ~ IrwinHall(r); chi(t) = P(|T - t| <= Delta/2)
        Real x_hi = Real(r_) * (t + delta_ / 2) / delta_ + Real(r_) / 2;
        Real x_lo = Real(r_) * (t - delta_ / 2) / delta_ + Real(r_) / 2;
        Real v = irwin_hall_cdf(x_hi) - irwin_hall_cdf(x_lo);
        if (v < Real(0)) v = Real(0);
        if (v > Real(1)) v = Real(1);
        return v;
    }

    // g(k) in closed form; g(-k) = g(k).
    Real coeff(long long k) const {
        if (k == 0) return delta_;
        Real x = pi_ * Real(k) * delta_;
        Real s1 = cup_detail::sin_value<Real>(x) / x;
        Real y = x / Real(r_);
        Real s2 = cup_detail::ipow<Real>(cup_detail::sin_value<Real>(y) / y, r_);
        return delta_ * s1 * s2;
    }

    // Analytic majorant of sum_{|k|>K} |g(k)|:
    //   |g(k)| <= Delta (r/(pi k Delta))^r / (pi k Delta)
    // and sum_{k>K} k^{-(r+1)} <= K^{-r}/r, so the tail is at most
    //   (2/pi) (r/(pi Delta))^r / (r K^r).
    // Strictly decreasing in K.
    Real tail_bound(long long K) const {
        if (K < 1) throw std::domain_error("tail_bound: K >= 1 required");
        Real base = Real(r_) / (pi_ * delta_ * Real(K));
        return (Real(2) / pi_) * cup_detail::ipow<Real>(base, r_) / Real(r_);
    }

    // Coefficient table g(1..K) for repeated partial-sum evaluation.
    std::vector<Real> coeff_table(long long K) const {
        std::vector<Real> g(static_cast<size_t>(K));
        for (long long k = 1; k <= K; ++k) g[static_cast<size_t>(k - 1)] = coeff(k);
        return g;
    }

    // Delta + sum_{0<|k|<=K} g(k) e(kt), evaluated with a Chebyshev
    // recurrence on cos(2 pi k t); real since g is even.
    Real fourier_partial(Real t, const std::vector<Real>& g) const {
        Real c1 = cup_detail::cos_value<Real>(2 * pi_ * t);
        Real ck_prev = 1, ck = c1;
        Real sum = delta_;
        for (size_t k = 1; k <= g.size(); ++k) {
            sum += 2 * g[k - 1] * ck;
            Real next = 2 * c1 * ck - ck_prev;
            ck_prev = ck;
            ck = next;
        }
        return sum;
    }

    Real fourier_partial(Real t, long long K) const { return fourier_partial(t, coeff_table(K)); }

private:
    Real delta_;
    int r_;
    Real pi_;
    std::vector<Real> binom_;
    Real inv_r_fact_;

    // CDF of the sum of r iid U[0,1] at x, clamped outside [0, r]:
    //   F(x) = (1/r!) sum_{j<=floor(x)} (-1)^j C(r,j) (x-j)^r
    Real irwin_hall_cdf(Real x) const {
        if (x <= Real(0)) return Real(0);
        if (x >= Real(r_)) return Real(1);
        int top = static_cast<int>(cup_detail::floor_value<Real>(x));
        if (top > r_) top = r_;
        Real s = 0;
        for (int j = 0; j <= top; ++j) {
            Real term = binom_[j] * cup_detail::ipow<Real>(x - Real(j), r_);
            s += (j % 2 == 0) ? term : -term;
        }
        return s * inv_r_fact_;
    }
};

// Smoothing order used throughout: r = ceil(log X). It drives the tail
// super-polynomially small, which is what makes the explicit constant 1 in
// tail_bound(H) <= 1/X hold for X >= 100.
inline int cup_smoothing_order(uint64_t X) {
    return static_cast<int>(std::ceil(std::log(static_cast<double>(X))));
}

inline CupFunction<double> cup_build(const Params& params) {
    if (params.X < 100) throw std::domain_error("cup_build: X >= 100 required");
    if (!(params.Delta > 0) || !(params.Delta < 0.25))
        throw std::domain_error("cup_build: Delta must lie in (0, 1/4); support would wrap");
    return CupFunction<double>(params.Delta, cup_smoothing_order(params.X));
}

// Exact spline evaluation in rational arithmetic, available when Delta and
// t are rational. Mirrors CupFunction::eval.
inline cpp_rational cup_eval_rational(const cpp_rational& delta, int r, const cpp_rational& t_in) {
    using boost::multiprecision::cpp_int;
    if (!(delta > 0) || !(delta < cpp_rational(1, 4)))
        throw std::domain_error("cup_eval_rational: Delta must lie in (0, 1/4)");
    cpp_rational t = t_in;
    // reduce mod 1 to [-1/2, 1/2)
    cpp_int num = numerator(t), den = denominator(t);
    cpp_int fl = num / den;
    if (num < 0 && num % den != 0) fl -= 1;
    t -= fl;
    if (t >= cpp_rational(1, 2)) t -= 1;
    if (t >= delta || t <= -delta) return 0;

    auto cdf = [&](const cpp_rational& x) -> cpp_rational {
        if (x <= 0) return 0;
        if (x >= r) return 1;
        cpp_int xf = numerator(x) / denominator(x);
        int top = static_cast<int>(xf);
        cpp_rational s = 0;
        cpp_int binom = 1;
        cpp_rational fact = 1;
        for (int j = 2; j <= r; ++j) fact *= j;
        for (int j = 0; j <= top; ++j) {
            cpp_rational pw = 1, base = x - j;
            for (int i = 0; i < r; ++i) pw *= base;
            cpp_rational term = cpp_rational(binom) * pw;
            s += (j % 2 == 0) ? term : -term;
            binom = binom * (r - j) / (j + 1);
        }
        return s / fact;
    };
    cpp_rational x_hi = cpp_rational(r) * (t + delta / 2) / delta + cpp_rational(r, 2);
    cpp_rational x_lo = cpp_rational(r) * (t - delta / 2) / delta + cpp_rational(r, 2);
    return cdf(x_hi) - cdf(x_lo);
}

} // namespace primefrac
