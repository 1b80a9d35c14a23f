#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "primefrac/constants.hpp"
#include "primefrac/errors.hpp"
#include "primefrac/nt.hpp"
#include "primefrac/params.hpp"

namespace primefrac {

enum class SieveKind { lower, upper };

// Linear-sieve weights of level D over divisors of P(z).
//
// Support: d = p1 p2 ... pk with z >= p1 > ... > pk > 2 (odd primes,
// strictly decreasing), d <= D, subject to the cube conditions
//   upper:  p1...p_{2l}   * p_{2l+1}^3 < D  at every odd index 2l+1 <= k,
//   lower:  p1...p_{2l-1} * p_{2l}^3   < D  at every even index 2l   <= k,
// plus d = 1. On the support lambda(d) = mu(d); elsewhere 0.
//
// Entries carry a bitmask over the sifting primes so that divisor-lattice
// scans work even when P(z) itself overflows 64 bits.
class RosserWeights {
public:
    struct Entry {
        uint64_t d;
        uint32_t mask;  // bit i <-> sifting_primes()[i]
        int8_t value;   // mu(d)
    };

    static RosserWeights build(double z, double D, SieveKind kind, size_t support_cap = 10'000'000) {
        if (D < 2) throw std::domain_error("RosserWeights: D >= 2 required");
        RosserWeights w;
        w.z_ = z;
        w.D_ = D;
        w.kind_ = kind;
        for (uint64_t p : primes_upto(z >= 3 ? static_cast<uint64_t>(z) : 0))
            if (p > 2 && static_cast<double>(p) <= z) w.primes_.push_back(p);
        if (w.primes_.size() > 30)
            throw resource_error("RosserWeights: more than 30 sifting primes");
        w.entries_.push_back(Entry{1, 0, 1});
        // descending-prime DFS over admissible products
        w.extend(1.0, 1, 0, 0, 0, support_cap);
        std::sort(w.entries_.begin(), w.entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.d < b.d; });
        return w;
    }

    double z() const { return z_; }
    double level() const { return D_; }
    SieveKind kind() const { return kind_; }
    const std::vector<uint64_t>& sifting_primes() const { return primes_; }
    const std::vector<Entry>& support() const { return entries_; }

    int lambda(uint64_t d) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), d,
                                   [](const Entry& e, uint64_t v) { return e.d < v; });
        return (it != entries_.end() && it->d == d) ? it->value : 0;
    }

    // sum_{d|n} lambda(d) for n | P(z) given as a sifting-prime bitmask.
    int divisor_sum_mask(uint32_t nmask) const {
        int s = 0;
        for (const Entry& e : entries_)
            if ((e.mask & ~nmask) == 0) s += e.value;
        return s;
    }

    // Fundamental sieve inequality at this n: the lower weights stay below
    // the Moebius divisor sum [n=1], the upper weights above it.
    bool fundamental_check_mask(uint32_t nmask) const {
        int target = (nmask == 0) ? 1 : 0;
        int s = divisor_sum_mask(nmask);
        return kind_ == SieveKind::lower ? (s <= target) : (s >= target);
    }

    bool fundamental_check(uint64_t n) const {
        return fundamental_check_mask(mask_of(n));
    }

    // n must be an odd squarefree product of sifting primes.
    uint32_t mask_of(uint64_t n) const {
        uint32_t mask = 0;
        uint64_t m = n;
        for (size_t i = 0; i < primes_.size(); ++i) {
            if (m % primes_[i] == 0) {
                m /= primes_[i];
                if (m % primes_[i] == 0)
                    throw std::domain_error("RosserWeights: n is not squarefree");
                mask |= (1u << i);
            }
        }
        if (m != 1) throw std::domain_error("RosserWeights: n does not divide P(z)");
        return mask;
    }

    // Exact rational sum over the support of lambda(d)/phi(d).
    cpp_rational sieve_sum_phi() const {
        cpp_rational s = 0;
        for (const Entry& e : entries_) {
            uint64_t ph = 1;
            for (size_t i = 0; i < primes_.size(); ++i)
                if (e.mask & (1u << i)) ph *= primes_[i] - 1;
            s += cpp_rational(e.value) / ph;
        }
        return s;
    }

private:
    double z_ = 0, D_ = 0;
    SieveKind kind_ = SieveKind::lower;
    std::vector<uint64_t> primes_;   // odd primes <= z, ascending
    std::vector<Entry> entries_;

    // prod: product so far (p_1 ... p_j), idx: 1-based index of next prime,
    // start: position in primes_ (descending order walk).
    void extend(double prod, uint64_t prod_u, uint32_t mask, int depth, size_t start,
                size_t support_cap) {
        const size_t np = primes_.size();
        for (size_t s = start; s < np; ++s) {
            // descending: take primes from the top
            uint64_t p = primes_[np - 1 - s];
            double pd = static_cast<double>(p);
            double d_new = prod * pd;
            if (d_new > D_) continue;
            int j = depth + 1;
            bool constrained = (kind_ == SieveKind::upper) ? (j % 2 == 1) : (j % 2 == 0);
            if (constrained && !(prod * pd * pd * pd < D_)) continue;
            if (entries_.size() >= support_cap)
                throw resource_error("RosserWeights: support cap exceeded");
            uint64_t d_u = prod_u * p;
            uint32_t m = mask | (1u << (np - 1 - s));
            entries_.push_back(Entry{d_u, m, static_cast<int8_t>(j % 2 == 0 ? 1 : -1)});
            extend(d_new, d_u, m, j, s + 1, support_cap);
        }
    }
};

inline RosserWeights rosser_build(double z, double D, SieveKind kind) {
    return RosserWeights::build(z, D, kind);
}

// Linear-sieve lower main-term factor f(s) = 2 e^gamma log(s-1)/s, 2 < s < 4.
inline double main_term_lower(double s) {
    if (!(s > 2.0 && s < 4.0)) throw std::domain_error("main_term_lower: s must lie in (2,4)");
    return 2.0 * exp_euler_gamma() * std::log(s - 1.0) / s;
}

// Upper main-term factor F(s1) = 2 e^gamma / s1, 1 < s1 < 3.
inline double main_term_upper(double s1) {
    if (!(s1 > 1.0 && s1 < 3.0)) throw std::domain_error("main_term_upper: s1 must lie in (1,3)");
    return 2.0 * exp_euler_gamma() / s1;
}

// Combined weights nu(m) = sum_{m=dq} (1 - log q/log y) lambda^+_q(d) with
// q prime in (z,y) and lambda^+_q of level D/q. The decomposition m = dq is
// unique, which the accumulation asserts.
class NuWeights {
public:
    static NuWeights build(const Params& params) {
        NuWeights nu;
        nu.z_ = params.z;
        nu.y_ = params.y;
        nu.D_ = params.D;
        double logy = std::log(params.y);
        double logz = std::log(params.z);
        for (uint64_t q : primes_upto(static_cast<uint64_t>(params.y))) {
            double qd = static_cast<double>(q);
            if (!(qd > params.z && qd < params.y)) continue;
            double level = params.D / qd;
            if (level < 1) continue;
            double s1 = std::log(level) / logz;
            if (!(s1 > 1.0 && s1 < 3.0))
                throw internal_consistency_error(
                    "NuWeights: s1 = log(D/q)/log z outside (1,3) at q = " + std::to_string(q));
            double wq = 1.0 - std::log(qd) / logy;
            if (level < 2) {
                // support of the level-(D/q) weights is {1}
                nu.insert(q, wq);
                continue;
            }
            auto lam = RosserWeights::build(params.z, level, SieveKind::upper);
            for (const auto& e : lam.support()) {
                double m = static_cast<double>(e.d) * qd;
                if (m > params.D + 1e-9) continue;
                nu.insert(e.d * q, wq * e.value);
            }
        }
        return nu;
    }

    double z() const { return z_; }
    double y() const { return y_; }
    double level() const { return D_; }

    double nu(uint64_t m) const {
        auto it = map_.find(m);
        return it == map_.end() ? 0.0 : it->second;
    }

    const std::map<uint64_t, double>& weights() const { return map_; }

private:
    double z_ = 0, y_ = 0, D_ = 0;
    std::map<uint64_t, double> map_;

    void insert(uint64_t m, double v) {
        auto [it, fresh] = map_.emplace(m, v);
        if (!fresh)
            throw internal_consistency_error("NuWeights: duplicate decomposition at m = " +
                                             std::to_string(m));
    }
};

struct FrakS0Result {
    double value;             // closed form, evaluated in extended precision
    double closed_form;       // closed form in double
    double quadrature;        // Simpson in double
    bigfloat value_hp;        // extended-precision closed form
};

namespace rosser_detail {

template <class Real>
Real s0_closed_form(const Real& delta, const Real& rho, const Real& eta, const Real& kappa,
                    const Real& s) {
    using std::log;
    auto antideriv = [&](const Real& u) {
        return log(u / (delta - u)) / delta + log(delta - u) / rho;
    };
    Real integral = antideriv(rho) - antideriv(eta);
    return log(s - 1) / s - kappa * eta * integral;
}

} // namespace rosser_detail

// frak S0 = log(s-1)/s - kappa eta Int_eta^rho (1/u - 1/rho) du/(delta-u),
// computed in closed form (double and extended precision) and by Simpson
// quadrature. The two double routes must agree to 1e-9.
inline FrakS0Result frak_S0(int simpson_panels = 10000) {
    const double delta = Params::kDelta, rho = Params::kRho, eta = Params::kEta,
                 kappa = Params::kKappa;
    const double s = delta / eta;
    double closed = rosser_detail::s0_closed_form<double>(delta, rho, eta, kappa, s);

    // Simpson on the smooth integrand
    auto f = [&](double u) { return (1.0 / u - 1.0 / rho) / (delta - u); };
    int n = simpson_panels * 2;
    double h = (rho - eta) / n;
    double acc = f(eta) + f(rho);
    for (int i = 1; i < n; ++i) acc += f(eta + i * h) * ((i % 2) ? 4.0 : 2.0);
    double integral_q = acc * h / 3.0;
    double quad = std::log(s - 1.0) / s - kappa * eta * integral_q;

    if (std::abs(closed - quad) > 1e-9)
        throw internal_consistency_error("frak_S0: closed form and quadrature disagree");

    bigfloat bd(Params::delta_exact()), br(Params::rho_exact()), be(Params::eta_exact()),
        bk(Params::kappa_exact()), bs(Params::s_exact());
    bigfloat hp = rosser_detail::s0_closed_form<bigfloat>(bd, br, be, bk, bs);
    return FrakS0Result{static_cast<double>(hp), closed, quad, hp};
}

inline FrakS0Result frak_S0(const Params&, int simpson_panels = 10000) {
    return frak_S0(simpson_panels);
}

// Paper value the certificate checks against.
inline const char* frak_S0_reference_bound() { return "0.000032113949"; }

struct CheckItem {
    std::string name;
    bool pass;
    std::string detail;
};

struct ConstantCertificate {
    std::vector<CheckItem> items;
    bool all_pass = true;

    void add(std::string name, bool pass, std::string detail) {
        all_pass = all_pass && pass;
        items.push_back(CheckItem{std::move(name), pass, std::move(detail)});
    }
    const CheckItem* find(const std::string& name) const {
        for (auto& it : items)
            if (it.name == name) return &it;
        return nullptr;
    }
};

// Mutable exact-rational parameter set for the certificate; defaults are the
// built-in constants.
struct ExactParams {
    cpp_rational delta = Params::delta_exact();
    cpp_rational rho = Params::rho_exact();
    cpp_rational eta = Params::eta_exact();
    cpp_rational kappa = Params::kappa_exact();
    cpp_rational theta = cpp_rational(1, 1000);
    Mode mode = Mode::paper;
};

inline std::string rational_str(const cpp_rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

// Exact-rational verification of every constant identity the argument
// depends on. All comparisons are exact; nothing is floated.
inline ConstantCertificate verify_constants(const ExactParams& p = ExactParams{}) {
    ConstantCertificate cert;

    bool paper_consts = p.delta == Params::delta_exact() && p.rho == Params::rho_exact() &&
                        p.eta == Params::eta_exact() && p.kappa == Params::kappa_exact();
    cert.add("paper-constants", paper_consts,
             paper_consts ? "delta,rho,eta,kappa match the built-in exponent set"
                          : "parameter set deviates from the built-in exponent set");

    cpp_rational s = p.delta / p.eta;
    cert.add("s-exact-rational", s == Params::s_exact(),
             "s = " + rational_str(s) + ", expected 76927/19232");
    cert.add("s-range", s > 2 && s < 4, "require 2 < s < 4, s = " + rational_str(s));

    cpp_rational ksum = 1 / p.kappa + 1 / p.rho;
    cpp_rational margin = 5 - ksum;
    cert.add("kappa-rho-sum", ksum < 5,
             "1/kappa + 1/rho = " + rational_str(ksum) + ", margin to 5 = " + rational_str(margin));

    if (p.mode == Mode::paper) {
        bool ok = p.theta > 0 && p.theta < Params::theta_max_exact();
        cert.add("theta-range", ok, "theta = " + rational_str(p.theta) + ", bound 10/1561");
    }
    return cert;
}

} // namespace primefrac
