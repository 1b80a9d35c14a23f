#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "primefrac/constants.hpp"
#include "primefrac/cup.hpp"
#include "primefrac/errors.hpp"
#include "primefrac/expsum.hpp"
#include "primefrac/factor_table.hpp"
#include "primefrac/fixed_real.hpp"
#include "primefrac/params.hpp"
#include "primefrac/rosser.hpp"

namespace primefrac {

// W_p = 1 - kappa sum_{z<q<=y, q|p+2} (1 - log q / log y).
inline double weight_Wp(uint64_t p, const Params& params, const FactorTable& table) {
    double s = 0;
    double logy = std::log(params.y);
    for (auto [q, e] : table.factorization(p + 2)) {
        double qd = static_cast<double>(q);
        if (qd > params.z && qd <= params.y) s += 1.0 - std::log(qd) / logy;
    }
    return 1.0 - params.kappa * s;
}

// Shared per-prime data for the window (X/2, X].
struct PrimeWindow {
    std::vector<uint64_t> p;
    std::vector<double> logp;
    std::vector<double> t;        // {alpha p^2 + beta}
    std::vector<double> chi;      // cup value at t
    std::vector<double> qsum;     // sum_{z<q<=y, q|p+2} (1 - log q/log y)
    std::vector<double> wp;       // W_p = 1 - kappa * qsum
    std::vector<char> sieved;     // (p+2, P(z)) = 1
    std::vector<int> mu_shift;    // mu(p+2)
    std::vector<uint32_t> mask;   // sifting-prime divisibility of p+2

    static PrimeWindow build(const Params& params, const FixedReal& alpha, const FixedReal& beta,
                             const CupFunction<double>& cup, const FactorTable& table,
                             const std::vector<uint64_t>& sifting_primes) {
        if (params.X > 10'000'000) throw resource_error("gamma: X cap is 10^7");
        PrimeWindow w;
        uint64_t X = params.X;
        double logy = std::log(params.y);
        for (uint64_t n = X / 2 + 1; n <= X; ++n) {
            if (!table.is_prime(n)) continue;
            w.p.push_back(n);
            w.logp.push_back(std::log(static_cast<double>(n)));
            auto fn = frac_norm(alpha, beta, n);
            w.t.push_back(fn.frac);
            w.chi.push_back(cup.eval(fn.frac));
            double s = 0;
            bool sieved = true;
            uint32_t mask = 0;
            for (auto [q, e] : table.factorization(n + 2)) {
                double qd = static_cast<double>(q);
                if (q > 2 && qd <= params.z) {
                    sieved = false;
                    for (size_t i = 0; i < sifting_primes.size(); ++i)
                        if (sifting_primes[i] == q) mask |= (1u << i);
                }
                if (qd > params.z && qd <= params.y) s += 1.0 - std::log(qd) / logy;
            }
            w.qsum.push_back(s);
            w.wp.push_back(1.0 - params.kappa * s);
            w.sieved.push_back(sieved ? 1 : 0);
            w.mu_shift.push_back(table.mu(n + 2));
            w.mask.push_back(mask);
        }
        return w;
    }
};

struct GammaReport {
    uint64_t X = 0;
    Mode mode = Mode::demo;
    double theta = 0;
    bool delta_degenerate = false;

    double Gamma = 0, Psi = 0, Phi = 0;
    double gamma_identity_residual = 0;  // Gamma - (Psi - kappa Phi), relative
    double gamma2_mass = 0;              // terms of Gamma_1 with mu(p+2) = 0
    double gamma2_ratio = 0;             // gamma2_mass / X^{1-eta}
    double edge_mass = 0;                // sieved terms with X-2 < p <= X

    double Psi1 = 0, Psi2 = 0, Psi3 = 0;
    double psi_residual = 0, psi_budget = 0;
    double Phi1 = 0, Phi2 = 0, Phi3 = 0;
    double phi_residual = 0, phi_budget = 0;

    double main_term = 0;       // e^gamma Delta X Pi(z) S0
    double Pi_z = 0;
    double frak_S0 = 0;
    double psi3_minus_kappa_phi3 = 0;

    long long K_used = 0;
    double tail_bound_used = 0;
};

// Direct exact evaluation of Gamma, Psi, Phi plus the mu(p+2)=0 mass and the
// boundary-edge mass. Asserts Gamma = Psi - kappa Phi to 1e-9 relative.
inline GammaReport gamma_of_X(const Params& params, const PrimeWindow& w) {
    GammaReport r;
    r.X = params.X;
    r.mode = params.mode;
    r.theta = params.theta;
    r.delta_degenerate = params.delta_degenerate;
    NeumaierSum gamma, psi, phi, g2, edge;
    for (size_t i = 0; i < w.p.size(); ++i) {
        if (!w.sieved[i]) continue;
        double chi_logp = w.chi[i] * w.logp[i];
        psi.add(chi_logp);
        phi.add(chi_logp * w.qsum[i]);
        double g = chi_logp * w.wp[i];
        gamma.add(g);
        if (w.wp[i] > 0 && w.mu_shift[i] == 0) g2.add(g);
        if (w.p[i] + 2 > params.X) edge.add(g);
    }
    r.Gamma = gamma.value();
    r.Psi = psi.value();
    r.Phi = phi.value();
    r.gamma2_mass = g2.value();
    r.edge_mass = edge.value();
    double rhs = r.Psi - params.kappa * r.Phi;
    double scale = std::max({1.0, std::abs(r.Gamma), std::abs(rhs)});
    r.gamma_identity_residual = std::abs(r.Gamma - rhs) / scale;
    if (r.gamma_identity_residual > 1e-9)
        throw internal_consistency_error("gamma_of_X: Gamma != Psi - kappa Phi");
    double x_pow = std::pow(static_cast<double>(params.X), 1.0 - params.eta);
    r.gamma2_ratio = r.gamma2_mass / x_pow;
    return r;
}

struct ChainResult {
    double base = 0;      // Psi (or Phi) recomputed on the window
    double level1 = 0;    // Psi1 (or Phi1)
    double level2 = 0;    // Psi2 (or Phi2)
    double level3 = 0;    // Psi3 (or Phi3), real by +-k pairing
    double residual = 0;  // level1 - Delta (level2 + level3)
    double mass = 0;      // sum |weights| log p
    double tail = 0;      // cup tail bound at K
    double budget = 0;    // tail * mass + float allowance
    double fp_allowance = 0;
    long long K = 0;
    bool residual_ok = false;
    bool order_ok = false;  // Psi >= Psi1 resp. Phi <= Phi1
};

namespace gamma_detail {

// sum over k of c(k) e(alpha p^2 k) for 0<|k|<=K collapses to
// (fourier_partial(t_p) - Delta)/Delta by the +-k pairing with real even g.
inline double k_sum(const CupFunction<double>& cup, const std::vector<double>& gtab, double t) {
    return cup.fourier_partial(t, gtab) - cup.delta();
}

} // namespace gamma_detail

// Worst-case double-rounding allowance for the chain residual. Each per-prime
// term runs a K-step cosine recurrence against coefficients bounded by Delta
// (noise ~ eps K Delta) plus a degree-r spline evaluation whose alternating
// sum loses about (e/2)^r r ulps; the per-term bound times the absolute mass
// plus the plain accumulation noise covers the whole computation.
inline double chain_fp_allowance(const CupFunction<double>& cup, long long K, double Delta,
                                 double mass, double abs1, double abs2, double abs3) {
    double eps = std::numeric_limits<double>::epsilon();
    int r = cup.smoothing_order();
    double per_term = 32.0 * eps * (Delta * static_cast<double>(K) + std::pow(1.36, r) * r + 16.0);
    double accum = 64.0 * eps * (abs1 + Delta * (abs2 + abs3) + 1.0);
    return per_term * mass + accum;
}

// Psi chain: Psi >= Psi1 = Delta(Psi2 + Psi3) + residual, with the residual
// certified against the cup tail bound times the sieve log-mass plus an
// explicit floating-point allowance.
inline ChainResult psi_chain(const Params& params, const RosserWeights& lower,
                             const CupFunction<double>& cup, const PrimeWindow& w,
                             long long K_max = 0) {
    if (lower.kind() != SieveKind::lower) throw std::domain_error("psi_chain: lower weights required");
    ChainResult r;
    r.K = params.H_cutoff();
    if (K_max > 0) r.K = std::min(r.K, K_max);
    if (r.K < 1) r.K = 1;
    auto gtab = cup.coeff_table(r.K);
    double Delta = cup.delta();

    NeumaierSum base, l1, l2, l3, mass;
    for (size_t i = 0; i < w.p.size(); ++i) {
        if (w.sieved[i]) base.add(w.chi[i] * w.logp[i]);
        int dsum = lower.divisor_sum_mask(w.mask[i]);
        int adsum = 0;
        for (const auto& e : lower.support())
            if ((e.mask & ~w.mask[i]) == 0) adsum += std::abs(static_cast<int>(e.value));
        double d = static_cast<double>(dsum);
        l1.add(d * w.chi[i] * w.logp[i]);
        l2.add(d * w.logp[i]);
        l3.add(d * w.logp[i] * gamma_detail::k_sum(cup, gtab, w.t[i]) / Delta);
        mass.add(std::abs(static_cast<double>(adsum)) * w.logp[i]);
    }
    r.base = base.value();
    r.level1 = l1.value();
    r.level2 = l2.value();
    r.level3 = l3.value();
    r.mass = mass.value();
    r.tail = cup.tail_bound(r.K);
    r.residual = r.level1 - Delta * (r.level2 + r.level3);
    r.fp_allowance = chain_fp_allowance(cup, r.K, Delta, r.mass, l1.abs, l2.abs, l3.abs);
    r.budget = r.tail * r.mass + r.fp_allowance;
    r.residual_ok = std::abs(r.residual) <= r.budget;
    r.order_ok = r.base >= r.level1 - 1e-9 * std::max(1.0, std::abs(r.base));
    return r;
}

// Phi chain, mirrored with the nu weights.
inline ChainResult phi_chain(const Params& params, const NuWeights& nu,
                             const CupFunction<double>& cup, const PrimeWindow& w,
                             long long K_max = 0) {
    ChainResult r;
    r.K = params.H_cutoff();
    if (K_max > 0) r.K = std::min(r.K, K_max);
    if (r.K < 1) r.K = 1;
    auto gtab = cup.coeff_table(r.K);
    double Delta = cup.delta();

    NeumaierSum base, l1, l2, l3, mass;
    for (size_t i = 0; i < w.p.size(); ++i) {
        if (w.sieved[i]) base.add(w.chi[i] * w.logp[i] * w.qsum[i]);
        double nsum = 0, ansum = 0;
        for (const auto& [m, v] : nu.weights()) {
            if ((w.p[i] + 2) % m == 0) {
                nsum += v;
                ansum += std::abs(v);
            }
        }
        if (nsum == 0 && ansum == 0) continue;
        l1.add(nsum * w.chi[i] * w.logp[i]);
        l2.add(nsum * w.logp[i]);
        l3.add(nsum * w.logp[i] * gamma_detail::k_sum(cup, gtab, w.t[i]) / Delta);
        mass.add(ansum * w.logp[i]);
    }
    r.base = base.value();
    r.level1 = l1.value();
    r.level2 = l2.value();
    r.level3 = l3.value();
    r.mass = mass.value();
    r.tail = cup.tail_bound(r.K);
    r.residual = r.level1 - Delta * (r.level2 + r.level3);
    r.fp_allowance = chain_fp_allowance(cup, r.K, Delta, r.mass, l1.abs, l2.abs, l3.abs);
    r.budget = r.tail * r.mass + r.fp_allowance;
    r.residual_ok = std::abs(r.residual) <= r.budget;
    r.order_ok = r.base <= r.level1 + 1e-9 * std::max(1.0, std::abs(r.base));
    return r;
}

// Main-term ledger: e^gamma Delta X Pi(z) S0 next to the measured Gamma and
// the measured |Psi3 - kappa Phi3|. The O(.) terms carry unknown constants,
// so this emits a comparison, not an assertion.
inline void lower_bound_assembly(const Params& params, GammaReport& r, const ChainResult& psi,
                                 const ChainResult& phi) {
    r.Psi1 = psi.level1;
    r.Psi2 = psi.level2;
    r.Psi3 = psi.level3;
    r.psi_residual = psi.residual;
    r.psi_budget = psi.budget;
    r.Phi1 = phi.level1;
    r.Phi2 = phi.level2;
    r.Phi3 = phi.level3;
    r.phi_residual = phi.residual;
    r.phi_budget = phi.budget;
    r.K_used = psi.K;
    r.tail_bound_used = psi.tail;
    r.Pi_z = mertens_pi(params.z);
    r.frak_S0 = frak_S0().value;
    r.main_term = exp_euler_gamma() * params.Delta * static_cast<double>(params.X) * r.Pi_z *
                  r.frak_S0;
    r.psi3_minus_kappa_phi3 = std::abs(psi.level3 - params.kappa * phi.level3);
}

// ---------------------------------------------------------------------------
// End-to-end prime search
// ---------------------------------------------------------------------------

enum class SearchFilter { plain, sieved };

struct SearchRecord {
    uint64_t p = 0;
    double norm = 0;
    double threshold = 0;  // p^-theta
    int omega_shift = 0;   // Omega(p+2)
    bool accepted = false;
    std::string shift_factorization;
};

struct SearchResult {
    std::vector<SearchRecord> records;   // every prime in the window
    std::vector<uint64_t> dropped;       // precision-certification failures
    uint64_t window_lo = 0, window_hi = 0;
    double theta = 0;
    Mode mode = Mode::demo;
    SearchFilter filter = SearchFilter::plain;
    double z = 0;
    size_t primes_scanned = 0, accept_count = 0;
    double min_norm = 1.0;
};

inline std::string factorization_string(const FactorTable& table, uint64_t n) {
    std::string s;
    for (auto [p, e] : table.factorization(n)) {
        if (!s.empty()) s += "*";
        s += std::to_string(p);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s.empty() ? "1" : s;
}

// Classify every prime in (lo, hi]: accepted iff ||alpha p^2 + beta|| <
// p^-theta strictly (ties reject), Omega(p+2) <= 4, and, with the sieved
// filter, (p+2, P(z)) = 1 at z = hi^eta. Accepted records are re-verified at
// doubled FixedReal precision; certification failures are dropped and listed.
inline SearchResult search_solutions(const FixedReal& alpha, const FixedReal& beta, double theta,
                                     uint64_t lo, uint64_t hi,
                                     SearchFilter filter = SearchFilter::plain,
                                     Mode mode = Mode::demo) {
    if (!(lo < hi)) throw std::domain_error("search_solutions: empty window");
    if (hi - lo > FactorTable::kSegmentCap - 8)
        throw resource_error("search_solutions: window exceeds table cap");
    if (theta < 0) throw std::domain_error("search_solutions: theta must be >= 0");
    if (mode == Mode::paper && !(theta > 0 && theta < Params::kThetaMaxPaper))
        throw std::domain_error("search_solutions: paper mode requires theta in (0, 10/1561)");
    SearchResult out;
    out.window_lo = lo;
    out.window_hi = hi;
    out.theta = theta;
    out.mode = mode;
    out.filter = filter;
    out.z = std::pow(static_cast<double>(hi), Params::kEta);

    FactorTable table(lo + 1, hi + 3);
    FixedReal alpha2 = alpha.rederivable() ? alpha.rederive(2 * alpha.frac_bits()) : alpha;
    FixedReal beta2 = beta.rederivable() ? beta.rederive(2 * beta.frac_bits()) : beta;

    for (uint64_t p = lo + 1; p <= hi; ++p) {
        if (!table.is_prime(p)) continue;
        ++out.primes_scanned;
        SearchRecord rec;
        rec.p = p;
        auto fn = frac_norm(alpha, beta, p);
        rec.norm = fn.norm;
        rec.threshold = std::pow(static_cast<double>(p), -theta);
        rec.omega_shift = table.Omega(p + 2);
        rec.shift_factorization = factorization_string(table, p + 2);
        out.min_norm = std::min(out.min_norm, rec.norm);

        bool norm_ok = rec.norm < rec.threshold;  // strict; tie rejects
        bool omega_ok = rec.omega_shift <= 4;
        bool sieve_ok = filter == SearchFilter::plain || coprime_to_Pz(p + 2, out.z);
        rec.accepted = norm_ok && omega_ok && sieve_ok;

        if (rec.accepted) {
            // doubled-precision recertification
            auto fn2 = frac_norm(alpha2, beta2, p);
            bool agree = std::abs(fn2.norm - rec.norm) <= fn.max_abs_error + 1e-300;
            bool still = fn2.norm < rec.threshold &&
                         rec.threshold - fn2.norm > fn2.max_abs_error;
            if (!agree || !still) {
                rec.accepted = false;
                out.dropped.push_back(p);
            }
        }
        if (rec.accepted) ++out.accept_count;
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace primefrac
