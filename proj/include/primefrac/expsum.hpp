#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "primefrac/convergents.hpp"
#include "primefrac/errors.hpp"
#include "primefrac/factor_table.hpp"
#include "primefrac/fixed_real.hpp"
#include "primefrac/nt.hpp"
#include "primefrac/params.hpp"

namespace primefrac {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline std::complex<double> e_of(double x) {
    double t = x - std::floor(x);
    return {std::cos(2 * kPi * t), std::sin(2 * kPi * t)};
}

// Compensated (Neumaier) accumulator; fixed-order summation stays
// deterministic and carries an O(eps * sum|x|) rounding error, which is
// tracked alongside for residual budgets.
struct NeumaierSum {
    double s = 0, c = 0, abs = 0;
    void add(double x) {
        abs += std::abs(x);
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// ---------------------------------------------------------------------------
// Bombieri-Iwaniec kernel
// ---------------------------------------------------------------------------

// K(theta) = min(M1 - M + 1, 1/(pi |theta|), 1/(pi^2 theta^2)).
inline double kernel(double theta, long long M, long long M1) {
    if (M1 < M) throw std::domain_error("kernel: M1 >= M required");
    double N = static_cast<double>(M1 - M + 1);
    if (theta == 0) return N;
    double at = std::abs(theta);
    return std::min(N, std::min(1.0 / (kPi * at), 1.0 / (kPi * kPi * at * at)));
}

// Exact integral of K over the line. With N = M1 - M + 1 the kernel equals
// N on [0, 1/(pi N)], then 1/(pi theta) up to 1/pi, then 1/(pi^2 theta^2):
//   integral = 2 [ 1/pi + log(N)/pi + 1/pi ] = (2/pi)(2 + log N).
inline double kernel_integral_closed_form(long long M, long long M1) {
    if (M1 < M) throw std::domain_error("kernel: M1 >= M required");
    double N = static_cast<double>(M1 - M + 1);
    return (2.0 / kPi) * (2.0 + std::log(N));
}

inline double kernel_integral_bound(long long M, long long M1) {
    return 3.0 * std::log(2.0 + static_cast<double>(M1 - M));
}

namespace expsum_detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth = 28) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Dyadic box (2^k, 2^{k+1}] containing n; n = 1 sits in the degenerate
// box indexed -1, rendered as (0, 1].
inline int dyadic_index(uint64_t n) {
    if (n <= 1) return -1;
    return std::bit_width(n - 1) - 1;
}

inline uint64_t box_lo_u(int b) { return b < 0 ? 0 : (uint64_t(1) << b); }
inline uint64_t box_hi_u(int b) { return uint64_t(1) << (b + 1); }
inline double box_lo_d(int b) { return b < 0 ? 0.5 : static_cast<double>(uint64_t(1) << b); }

} // namespace expsum_detail

struct KernelCheckReport {
    double lhs = 0;        // |sum_{N<n<=N1} a_n|
    double integral = 0;   // quadrature of K(theta)|sum a_m e(theta m)| over [-B, B]
    double remainder = 0;  // analytic bound for |theta| > B
    double rhs = 0;        // integral + remainder
    bool ok = false;
    double kernel_integral = 0;
    double kernel_integral_bound = 0;
    bool kernel_bound_ok = false;
};

// Checks |sum_{N<n<=N1} a_n| <= Int K(theta) |sum_{M<m<=M1} a_m e(theta m)| dtheta.
// The integral is truncated to [-B, B]; beyond that K <= 1/(pi^2 theta^2), so
// the discarded part is at most 2 sum|a_m| / (pi^2 B) and is credited to the
// right-hand side.
inline KernelCheckReport kernel_inequality_check(const std::vector<std::complex<double>>& a,
                                                 long long M, long long N, long long N1,
                                                 long long M1, double B, double tol = 1e-6) {
    if (!(M <= N && N < N1 && N1 <= M1)) throw std::domain_error("kernel check: bad windows");
    if (static_cast<long long>(a.size()) != M1 - M)
        throw std::domain_error("kernel check: coefficient count != M1 - M");
    if (B < 1.0) throw std::domain_error("kernel check: B >= 1 required");

    std::complex<double> inner = 0;
    for (long long n = N + 1; n <= N1; ++n) inner += a[static_cast<size_t>(n - M - 1)];

    auto trig_sum_abs = [&](double theta) {
        std::complex<double> s = 0;
        for (long long m = M + 1; m <= M1; ++m)
            s += a[static_cast<size_t>(m - M - 1)] * e_of(theta * static_cast<double>(m));
        return std::abs(s);
    };
    auto integrand = [&](double theta) { return kernel(theta, M, M1) * trig_sum_abs(theta); };

    double A = 0;
    for (auto& x : a) A += std::abs(x);

    KernelCheckReport rep;
    rep.lhs = std::abs(inner);
    // the kernel breakpoint at 1/pi marks the delicate region; split there
    double b1 = std::min(B, 1.0 / kPi);
    double quad = expsum_detail::adaptive_simpson(integrand, -b1, b1, tol / 4);
    if (B > b1) {
        quad += expsum_detail::adaptive_simpson(integrand, b1, B, tol / 4);
        quad += expsum_detail::adaptive_simpson(integrand, -B, -b1, tol / 4);
    }
    rep.integral = quad;
    rep.remainder = 2.0 * A / (kPi * kPi * B);
    rep.rhs = rep.integral + rep.remainder;
    rep.ok = rep.lhs <= rep.rhs + tol * (1.0 + A);
    rep.kernel_integral = kernel_integral_closed_form(M, M1);
    rep.kernel_integral_bound = kernel_integral_bound(M, M1);
    rep.kernel_bound_ok = rep.kernel_integral <= rep.kernel_integral_bound;
    return rep;
}

// ---------------------------------------------------------------------------
// Geometric-series bound
// ---------------------------------------------------------------------------

struct GeometricCheck {
    std::complex<double> sum;
    double abs_closed_form;
    double bound;  // min(P, 1/(2||alpha||))
    bool ok;
};

// |sum_{1<=n<=P} e(alpha n)| <= min(P, 1/(2||alpha||)); exact lemma, checked
// by direct summation against the sin-ratio closed form.
inline GeometricCheck geometric_bound_check(double alpha, long long P) {
    if (P < 1) throw std::domain_error("geometric_bound_check: P >= 1");
    std::complex<double> s = 0;
    for (long long n = 1; n <= P; ++n) s += e_of(alpha * static_cast<double>(n));
    double fr = alpha - std::floor(alpha);
    double norm = std::min(fr, 1.0 - fr);
    double bound = norm == 0 ? static_cast<double>(P)
                             : std::min(static_cast<double>(P), 1.0 / (2.0 * norm));
    double closed = norm == 0
                        ? static_cast<double>(P)
                        : std::abs(std::sin(kPi * fr * static_cast<double>(P)) / std::sin(kPi * fr));
    return GeometricCheck{s, closed, bound, std::abs(s) <= bound + 1e-9};
}

inline GeometricCheck geometric_bound_check(const FixedReal& alpha, long long P) {
    return geometric_bound_check(alpha.frac().to_double(), P);
}

// ---------------------------------------------------------------------------
// min(Y1 Y2/n, 1/||alpha n||) diagnostic (implied constant unknown)
// ---------------------------------------------------------------------------

struct MinSumDiagnostic {
    double lhs;
    double rhs_shape;  // Y1 Y2 (1/q + 1/Y2 + q/(Y1 Y2)) log(2 Y1 q)
    double ratio;
};

inline MinSumDiagnostic min_sum_diagnostic(const FixedReal& alpha, const Convergent& conv,
                                           double Y1, double Y2) {
    if (Y1 < 1 || Y2 < 1) throw std::domain_error("min_sum_diagnostic: Y1, Y2 >= 1");
    if (!convergent_invariant_holds(alpha, conv))
        throw std::domain_error("min_sum_diagnostic: convergent fails |alpha - a/q| < q^-2");
    double lhs = 0;
    FixedReal acc(cpp_int(0), alpha.frac_bits());
    long long n_max = static_cast<long long>(Y1);
    for (long long n = 1; n <= n_max; ++n) {
        acc = acc.add(alpha);
        FixedReal nm = acc.norm();
        if (nm.mantissa() == 0)
            throw std::domain_error("min_sum_diagnostic: ||alpha n|| = 0 at n = " +
                                    std::to_string(n));
        lhs += std::min(Y1 * Y2 / static_cast<double>(n), 1.0 / nm.to_double());
    }
    double q = static_cast<double>(conv.Q);
    double rhs = Y1 * Y2 * (1.0 / q + 1.0 / Y2 + q / (Y1 * Y2)) * std::log(2.0 * Y1 * q);
    return MinSumDiagnostic{lhs, rhs, lhs / rhs};
}

// ---------------------------------------------------------------------------
// Decomposition of sum_{X/2<n<=X} Lambda(n) f(n) into bilinear pieces
// ---------------------------------------------------------------------------

// Lemma-shaped parameters. The joint constraints (u >= 3, w >= 4u^2,
// X >= 64 w^2 u) are only satisfiable for X beyond ~2.5e5, so at desk scale
// validate() reports violations and the decomposition carries on: the
// exact-total identity needs none of them, only the piece labels do.
struct DecompParams {
    double u = 0, v = 0, w = 0;
    uint64_t X = 0;

    static double round_half_integer(double x) {
        double k = std::round(x - 0.5);
        if (k < 1) k = 1;
        return k + 0.5;
    }

    // u = 2^-7 X^{delta/2}, v = 2^7 X^{1/3}, w = X^{1/2 - delta/4},
    // with w rounded so that w - 1/2 is an integer.
    static DecompParams paper_shape(uint64_t X) {
        DecompParams dp;
        dp.X = X;
        double xd = static_cast<double>(X);
        dp.u = std::pow(2.0, -7) * std::pow(xd, Params::kDelta / 2);
        dp.v = std::pow(2.0, 7) * std::pow(xd, 1.0 / 3.0);
        dp.w = round_half_integer(std::pow(xd, 0.5 - Params::kDelta / 4));
        return dp;
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> bad;
        double xd = static_cast<double>(X);
        if (!(3 <= u)) bad.push_back("u >= 3");
        if (!(u < v)) bad.push_back("u < v");
        if (!(v < w)) bad.push_back("v < w");
        if (!(w < xd)) bad.push_back("w < X");
        if (std::abs(w - 0.5 - std::round(w - 0.5)) > 1e-9) bad.push_back("w - 1/2 integral");
        if (!(w >= 4 * u * u)) bad.push_back("w >= 4u^2");
        if (!(xd >= 64 * w * w * u)) bad.push_back("X >= 64 w^2 u");
        if (!(v * v * v >= 32 * xd)) bad.push_back("v^3 >= 32X");
        return bad;
    }
};

struct BilinearPiece {
    enum class Kind { type_i, type_ii, boundary };
    Kind kind = Kind::boundary;
    bool smooth_inner = false;  // inner coefficients built from 1/log variables only
    uint64_t M = 0, M1 = 0;     // outer box (M, M1]; M = 0, M1 = 1 denotes {1}
    uint64_t L = 0, L1 = 0;     // inner box, same convention
    uint64_t X = 0;             // window X/2 < m*l <= X applies inside
    std::vector<std::pair<uint64_t, double>> a;  // outer coefficients, sorted by m
    std::vector<std::pair<uint64_t, double>> b;  // inner coefficients, sorted by l

    std::complex<double> evaluate(const std::function<std::complex<double>(uint64_t)>& f) const {
        std::complex<double> total = 0;
        for (const auto& [m, am] : a) {
            uint64_t lo = (X / 2) / m;  // candidates start just above X/(2m)
            auto it = std::upper_bound(b.begin(), b.end(), lo,
                                       [](uint64_t v, const auto& e) { return v < e.first; });
            std::complex<double> row = 0;
            for (; it != b.end(); ++it) {
                uint64_t n = m * it->first;
                if (n > X) break;
                if (n > X / 2) row += it->second * f(n);
            }
            total += am * row;
        }
        return total;
    }

    const char* kind_name() const {
        switch (kind) {
            case Kind::type_i: return "type_i";
            case Kind::type_ii: return "type_ii";
            default: return "boundary";
        }
    }
};

// Heath-Brown identity with K = 2 and mu-cutoff V = ceil(sqrt(X)):
//   Lambda(n) = 2 sum_{m t = n, m <= V} mu(m) log t
//             -   sum_{m1 m2 u t = n, m1,m2 <= V} mu(m1) mu(m2) log t
// valid for every n <= V^2. Terms are grouped into (outer, inner) products,
// the grouping decided per dyadic box combination so that all terms of a
// combination share it, then bucketed by the dyadic boxes of the grouped
// products. The resulting bilinear pieces reproduce the Lambda sum exactly;
// Type I / Type II labels are best effort and out-of-range pieces are kept
// and flagged as boundary.
class LambdaDecomposition {
public:
    static LambdaDecomposition build(uint64_t X, const DecompParams& dp);

    const std::vector<BilinearPiece>& pieces() const { return pieces_; }
    const std::vector<std::string>& param_violations() const { return violations_; }
    uint64_t X() const { return X_; }

    std::complex<double> evaluate_total(
        const std::function<std::complex<double>(uint64_t)>& f) const {
        std::complex<double> t = 0;
        for (const auto& p : pieces_) t += p.evaluate(f);
        return t;
    }

    // Independent route for the identity check.
    static std::complex<double> direct_total(
        uint64_t X, const std::function<std::complex<double>(uint64_t)>& f) {
        FactorTable table(X / 2 + 1, X + 1);
        std::complex<double> s = 0;
        for (uint64_t n = X / 2 + 1; n <= X; ++n) {
            double l = table.Lambda(n);
            if (l != 0.0) s += l * f(n);
        }
        return s;
    }

private:
    uint64_t X_ = 0;
    std::vector<BilinearPiece> pieces_;
    std::vector<std::string> violations_;
};

inline LambdaDecomposition decompose_lambda_sum(uint64_t X, const DecompParams& dp) {
    return LambdaDecomposition::build(X, dp);
}

inline LambdaDecomposition LambdaDecomposition::build(uint64_t X, const DecompParams& dp) {
    using namespace expsum_detail;
    if (X < 8) throw std::domain_error("decompose_lambda_sum: X >= 8 required");
    if (X > 2'000'000) throw resource_error("decompose_lambda_sum: X cap is 2e6");
    LambdaDecomposition out;
    out.X_ = X;
    out.violations_ = dp.validate();

    uint64_t V = static_cast<uint64_t>(std::ceil(std::sqrt(static_cast<double>(X))));
    while (V * V < X) ++V;

    FactorTable small(2, V + 2);
    auto mu_of = [&](uint64_t m) -> int { return m == 1 ? 1 : small.mu(m); };

    // Box-level grouping: given the dyadic boxes of the smooth variables,
    // choose which of them form the inner product.
    //   rule 1: a lone smooth box entirely >= w        -> Type I shape
    //   rule 2: a smooth subset with box product range within [u, v] -> Type II
    //   else  : all smooth variables inner, flagged boundary later
    auto classify_boxes = [&](const std::vector<int>& sboxes)
        -> std::pair<std::vector<int>, std::string> {
        for (size_t i = 0; i < sboxes.size(); ++i)
            if (box_lo_d(sboxes[i]) >= dp.w)
                return {{static_cast<int>(i)}, "I" + std::to_string(i)};
        size_t ns = sboxes.size();
        for (size_t mask = 1; mask < (size_t(1) << ns); ++mask) {
            double lo = 1, hi = 1;
            for (size_t i = 0; i < ns; ++i)
                if (mask & (size_t(1) << i)) {
                    lo *= box_lo_d(sboxes[i]);
                    hi *= 2 * box_lo_d(sboxes[i]);
                }
            if (lo >= dp.u && hi <= dp.v) {
                std::vector<int> sel;
                for (size_t i = 0; i < ns; ++i)
                    if (mask & (size_t(1) << i)) sel.push_back(static_cast<int>(i));
                return {sel, "II" + std::to_string(mask)};
            }
        }
        std::vector<int> all;
        for (size_t i = 0; i < ns; ++i) all.push_back(static_cast<int>(i));
        return {all, "B"};
    };

    struct Maps {
        std::map<uint64_t, double> outer, inner;
    };
    std::map<std::string, Maps> groups;
    auto log_d = [](uint64_t t) { return std::log(static_cast<double>(t)); };

    const double Xd = static_cast<double>(X);
    int bV = dyadic_index(V);
    int bX = dyadic_index(X);

    // j = 1 terms: 2 mu(m1) log(t) at n = m1 t
    for (int bm = -1; bm <= bV; ++bm) {
        uint64_t m_lo = box_lo_u(bm), m_hi = std::min<uint64_t>(V, box_hi_u(bm));
        if (m_lo >= m_hi) continue;
        for (int bt = -1; bt <= bX; ++bt) {
            double plo = box_lo_d(bm) * box_lo_d(bt);
            if (4 * plo <= Xd / 2 || plo > Xd) continue;
            auto [sel, tag] = classify_boxes({bt});
            // t is the only smooth variable: always the inner one
            std::string key = "1:" + tag + ":" + std::to_string(bm) + "," + std::to_string(bt);
            Maps& g = groups[key];
            for (uint64_t m = m_lo + 1; m <= m_hi; ++m) {
                int mm = mu_of(m);
                if (mm != 0) g.outer[m] += 2.0 * mm;
            }
            uint64_t t_lo = box_lo_u(bt), t_hi = std::min<uint64_t>(X, box_hi_u(bt));
            for (uint64_t t = t_lo + 1; t <= t_hi; ++t) g.inner[t] += log_d(t);
        }
    }

    // j = 2 terms: -mu(m1) mu(m2) log(t) at n = m1 m2 u t
    for (int bm1 = -1; bm1 <= bV; ++bm1) {
        uint64_t m1_lo = box_lo_u(bm1), m1_hi = std::min<uint64_t>(V, box_hi_u(bm1));
        if (m1_lo >= m1_hi) continue;
        for (int bm2 = -1; bm2 <= bV; ++bm2) {
            uint64_t m2_lo = box_lo_u(bm2), m2_hi = std::min<uint64_t>(V, box_hi_u(bm2));
            if (m2_lo >= m2_hi) continue;
            double pm = box_lo_d(bm1) * box_lo_d(bm2);
            if (pm > Xd) continue;
            for (int bu = -1; bu <= bX; ++bu) {
                double pmu = pm * box_lo_d(bu);
                if (pmu > Xd) continue;
                uint64_t u_lo = box_lo_u(bu), u_hi = std::min<uint64_t>(X, box_hi_u(bu));
                for (int bt = -1; bt <= bX; ++bt) {
                    double plo = pmu * box_lo_d(bt);
                    if (16 * plo <= Xd / 2 || plo > Xd) continue;
                    auto [sel, tag] = classify_boxes({bt, bu});
                    bool t_inner = std::find(sel.begin(), sel.end(), 0) != sel.end();
                    bool u_inner = std::find(sel.begin(), sel.end(), 1) != sel.end();
                    uint64_t t_lo = box_lo_u(bt), t_hi = std::min<uint64_t>(X, box_hi_u(bt));
                    std::string key = "2:" + tag + ":" + std::to_string(bm1) + "," +
                                      std::to_string(bm2) + "," + std::to_string(bu) + "," +
                                      std::to_string(bt);
                    Maps& g = groups[key];
                    for (uint64_t m1 = m1_lo + 1; m1 <= m1_hi; ++m1) {
                        int a1 = mu_of(m1);
                        if (a1 == 0) continue;
                        for (uint64_t m2 = m2_lo + 1; m2 <= m2_hi; ++m2) {
                            int a2 = mu_of(m2);
                            if (a2 == 0) continue;
                            double c = -1.0 * a1 * a2;
                            uint64_t base = m1 * m2;
                            if (t_inner && u_inner) {
                                g.outer[base] += c;
                            } else if (t_inner) {
                                for (uint64_t uu = u_lo + 1; uu <= u_hi; ++uu)
                                    g.outer[base * uu] += c;
                            } else {  // u inner, t outer carries its log weight
                                for (uint64_t tt = t_lo + 1; tt <= t_hi; ++tt)
                                    g.outer[base * tt] += c * log_d(tt);
                            }
                        }
                    }
                    if (t_inner && u_inner) {
                        for (uint64_t uu = u_lo + 1; uu <= u_hi; ++uu)
                            for (uint64_t tt = t_lo + 1; tt <= t_hi; ++tt)
                                g.inner[uu * tt] += log_d(tt);
                    } else if (t_inner) {
                        for (uint64_t tt = t_lo + 1; tt <= t_hi; ++tt) g.inner[tt] += log_d(tt);
                    } else {
                        for (uint64_t uu = u_lo + 1; uu <= u_hi; ++uu) g.inner[uu] += 1.0;
                    }
                }
            }
        }
    }

    // Materialize pieces, splitting each group by the dyadic boxes of the
    // grouped products so that M1 <= 2M and L1 <= 2L hold.
    for (auto& [key, g] : groups) {
        if (g.outer.empty() || g.inner.empty()) continue;
        std::map<int, std::vector<std::pair<uint64_t, double>>> outer_by_box, inner_by_box;
        for (auto& [m, c] : g.outer)
            if (c != 0.0) outer_by_box[dyadic_index(m)].emplace_back(m, c);
        for (auto& [l, c] : g.inner)
            if (c != 0.0) inner_by_box[dyadic_index(l)].emplace_back(l, c);
        for (auto& [im, av] : outer_by_box) {
            for (auto& [il, bv] : inner_by_box) {
                double plo = box_lo_d(im) * box_lo_d(il);
                if (4 * plo <= Xd / 2 || plo > Xd) continue;
                BilinearPiece p;
                p.M = box_lo_u(im);
                p.M1 = box_hi_u(im);
                p.L = box_lo_u(il);
                p.L1 = box_hi_u(il);
                p.X = X;
                p.a = av;
                p.b = bv;
                p.smooth_inner = true;  // inner maps are built from t/u only
                double L = box_lo_d(il);
                if (L >= dp.w)
                    p.kind = BilinearPiece::Kind::type_i;
                else if (L >= dp.u && L <= dp.v)
                    p.kind = BilinearPiece::Kind::type_ii;
                else
                    p.kind = BilinearPiece::Kind::boundary;
                out.pieces_.push_back(std::move(p));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// S(X) and the Type I / II sums, evaluated literally
// ---------------------------------------------------------------------------

// S(X) = sum_{d<=D} xi(d) sum_{1<=|k|<=H} c(k) sum_{p=-2 (d)} log p e(alpha p^2 k)
// over primes in (X/2, X]. xi is indexed by d-1; c_pos/c_neg by k-1.
inline std::complex<double> S_of_X(const std::vector<std::complex<double>>& xi,
                                   const std::vector<std::complex<double>>& c_pos,
                                   const std::vector<std::complex<double>>& c_neg,
                                   const FixedReal& alpha, const Params& params,
                                   const FactorTable& table) {
    if (params.X > 10'000'000) throw resource_error("S_of_X: X cap is 10^7");
    if (c_pos.size() != c_neg.size()) throw std::domain_error("S_of_X: |c+| != |c-|");
    uint64_t X = params.X;
    std::complex<double> total = 0;
    FixedReal zero(cpp_int(0), alpha.frac_bits());
    for (uint64_t p = X / 2 + 1; p <= X; ++p) {
        if (!table.is_prime(p)) continue;
        double logp = std::log(static_cast<double>(p));
        std::complex<double> dsum = 0;
        for (uint64_t d = 1; d <= xi.size(); ++d) {
            if (xi[d - 1] == std::complex<double>(0)) continue;
            if ((p + 2) % d == 0) dsum += xi[d - 1];
        }
        if (dsum == std::complex<double>(0)) continue;
        double t1 = frac_norm(alpha, zero, p).frac;
        std::complex<double> z1 = e_of(t1), zk = z1;
        std::complex<double> ksum = 0;
        for (size_t k = 1; k <= c_pos.size(); ++k) {
            ksum += c_pos[k - 1] * zk + c_neg[k - 1] * std::conj(zk);
            zk *= z1;
        }
        total += dsum * logp * ksum;
    }
    return total;
}

// Literal Type I / Type II sum over explicit ranges; a null b_l gives the
// Type I shape (inner coefficient identically 1).
struct TypeSumSpec {
    uint64_t M, M1, L, L1;  // m in (M, M1], l in (L, L1]
    uint64_t X;             // window X/2 < m l <= X
    long long H;            // k in 1..H, both signs
    uint64_t D;             // xi over odd d <= D
    std::function<double(uint64_t)> a_m;
    std::function<double(uint64_t)> b_l;
    std::function<std::complex<double>(long long)> c;  // defined for +-k
    std::function<double(uint64_t)> xi;
};

inline std::complex<double> type_sum_brute(const TypeSumSpec& spec, const FixedReal& alpha) {
    if (spec.M1 - spec.M > 10'000 || spec.L1 - spec.L > 10'000 ||
        static_cast<uint64_t>(spec.H) > 10'000 || spec.D > 10'000)
        throw resource_error("type_sum_brute: range cap is 10^4 per axis");
    std::complex<double> total = 0;
    for (uint64_t m = spec.M + 1; m <= spec.M1; ++m) {
        double am = spec.a_m ? spec.a_m(m) : 1.0;
        if (am == 0) continue;
        for (uint64_t l = spec.L + 1; l <= spec.L1; ++l) {
            uint64_t n = m * l;
            if (!(n > spec.X / 2 && n <= spec.X)) continue;
            double bl = spec.b_l ? spec.b_l(l) : 1.0;
            if (bl == 0) continue;
            double xs = 0;
            for (uint64_t d = 1; d <= spec.D; d += 2)
                if ((n + 2) % d == 0) xs += spec.xi ? spec.xi(d) : 1.0;
            if (xs == 0) continue;
            cpp_int arg = cpp_int(m) * m * l * l;
            double t1 = alpha.mul_int(arg).frac().to_double();
            std::complex<double> z1 = e_of(t1), zk = z1;
            std::complex<double> ksum = 0;
            for (long long k = 1; k <= spec.H; ++k) {
                ksum += spec.c(k) * zk + spec.c(-k) * std::conj(zk);
                zk *= z1;
            }
            total += am * bl * xs * ksum;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// CRT-reduced inner sum V
// ---------------------------------------------------------------------------

struct CrtReducedV {
    bool solvable = false;
    uint64_t f0 = 0, modulus = 1;
    std::complex<double> direct{0, 0};
    std::complex<double> reduced{0, 0};
};

// direct: sum over M_lo < m <= M_hi with m l1 = -2 (mod d1), m l2 = -2 (mod d2)
// of e(alpha m^2 k (l1^2 - l2^2)); reduced: the same sum re-indexed through
// the merged residue class m = f0 (mod lcm). The re-indexing multiplies by a
// unimodular constant phase only, so |direct| = |reduced| exactly; both are
// returned and the equality is asserted to 1e-9.
inline CrtReducedV crt_reduced_V(const FixedReal& alpha, long long k, uint64_t l1, uint64_t l2,
                                 uint64_t d1, uint64_t d2, uint64_t M_lo, uint64_t M_hi) {
    if (M_hi < M_lo) throw std::domain_error("crt_reduced_V: bad window");
    if (M_hi - M_lo > 1'000'000) throw resource_error("crt_reduced_V: window cap is 10^6");
    CrtReducedV out;
    auto c1 = solve_linear_congruence(l1, -2, d1);
    auto c2 = solve_linear_congruence(l2, -2, d2);
    if (!c1 || !c2) return out;
    auto merged = crt_pair(c1->f0, c1->modulus, c2->f0, c2->modulus);
    if (!merged) return out;
    out.solvable = true;
    out.f0 = merged->f0;
    out.modulus = merged->modulus;

    cpp_int dl2 = (cpp_int(l1) * l1) - (cpp_int(l2) * l2);
    auto phase = [&](const cpp_int& arg) {
        return e_of(alpha.mul_int(arg * k).frac().to_double());
    };

    for (uint64_t m = M_lo + 1; m <= M_hi; ++m) {
        if ((m * l1 + 2) % d1 == 0 && (m * l2 + 2) % d2 == 0)
            out.direct += phase(cpp_int(m) * m * dl2);
    }

    uint64_t L = out.modulus;
    int64_t f0s = static_cast<int64_t>(out.f0);
    auto fdiv = [](int64_t a, int64_t b) {
        int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
        return q;
    };
    int64_t r_lo = fdiv(static_cast<int64_t>(M_lo) - f0s, static_cast<int64_t>(L));
    int64_t r_hi = fdiv(static_cast<int64_t>(M_hi) - f0s, static_cast<int64_t>(L));
    std::complex<double> inner = 0;
    for (int64_t r = r_lo + 1; r <= r_hi; ++r) {
        cpp_int arg = (cpp_int(r) * r * L * L + 2 * cpp_int(f0s) * r * L) * dl2;
        inner += phase(arg);
    }
    out.reduced = phase(cpp_int(f0s) * f0s * dl2) * inner;

    double scale = std::max(1.0, std::abs(out.direct));
    if (std::abs(std::abs(out.direct) - std::abs(out.reduced)) > 1e-9 * scale)
        throw internal_consistency_error("crt_reduced_V: |direct| != |reduced|");
    return out;
}

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

struct ThresholdValues {
    double D0;        // X^{(50/3) theta}
    double Q_target;  // X^{(4138/15) theta}
};

inline ThresholdValues thresholds(const Params& params) {
    double lx = std::log(static_cast<double>(params.X));
    return ThresholdValues{std::exp(lx * params.theta * 50.0 / 3.0),
                           std::exp(lx * params.theta * 4138.0 / 15.0)};
}

// Exponents as exact rationals for rational theta (paper-mode reporting).
inline std::pair<cpp_rational, cpp_rational> threshold_exponents_exact(const cpp_rational& theta) {
    return {cpp_rational(50, 3) * theta, cpp_rational(4138, 15) * theta};
}

} // namespace primefrac
