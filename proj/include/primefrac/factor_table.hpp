#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "primefrac/errors.hpp"
#include "primefrac/nt.hpp"

namespace primefrac {

// Per-range table of smallest prime factor together with cached
// mu(n), phi(n), Omega(n) and the prime-power data behind Lambda(n).
//
// One sieving pass over the primes below sqrt(hi) fills everything; the
// residual cofactor after that pass is either 1 or a single prime > sqrt(hi).
// Rows are immutable after construction.
class FactorTable {
public:
    static constexpr uint64_t kSegmentCap = uint64_t(1) << 26;

    FactorTable(uint64_t lo, uint64_t hi) : lo_(lo), hi_(hi) {
        if (lo < 2 || lo >= hi) throw std::domain_error("FactorTable: need 2 <= lo < hi");
        if (hi - lo > kSegmentCap) throw resource_error("FactorTable: range exceeds segment cap 2^26");
        const size_t n = static_cast<size_t>(hi - lo);
        spf_.assign(n, 0);
        mu_.assign(n, 1);
        omega_.assign(n, 0);
        distinct_.assign(n, 0);
        phi_.assign(n, 1);
        std::vector<uint64_t> rem(n);
        for (size_t i = 0; i < n; ++i) rem[i] = lo + i;

        uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(hi - 1))) + 1;
        for (uint64_t p : primes_upto(root)) {
            uint64_t first = ((lo + p - 1) / p) * p;
            for (uint64_t m = first; m < hi; m += p) {
                size_t i = static_cast<size_t>(m - lo);
                if (spf_[i] == 0) spf_[i] = static_cast<uint32_t>(p);
                uint32_t e = 0;
                uint64_t ph = 1;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ph = (e == 0) ? (p - 1) : ph * p;
                    ++e;
                }
                omega_[i] = static_cast<uint8_t>(omega_[i] + e);
                distinct_[i] += 1;
                phi_[i] *= ph;
                mu_[i] = (e >= 2) ? 0 : static_cast<int8_t>(-mu_[i]);
            }
        }
        for (size_t i = 0; i < n; ++i) {
            if (rem[i] > 1) {
                // leftover prime factor above sqrt(hi)
                omega_[i] = static_cast<uint8_t>(omega_[i] + 1);
                distinct_[i] += 1;
                phi_[i] *= rem[i] - 1;
                if (mu_[i] != 0) mu_[i] = static_cast<int8_t>(-mu_[i]);
                // spf_ stays 0 when the leftover is n itself (n prime)
            }
        }
    }

    uint64_t lo() const { return lo_; }
    uint64_t hi() const { return hi_; }

    bool contains(uint64_t n) const { return n == 1 || (n >= lo_ && n < hi_); }

    // Smallest prime factor; spf(1) = 1 by convention.
    uint64_t spf(uint64_t n) const {
        if (n == 1) return 1;
        size_t i = index(n);
        return spf_[i] != 0 ? spf_[i] : n;
    }

    int mu(uint64_t n) const { return n == 1 ? 1 : mu_[index(n)]; }
    uint64_t phi(uint64_t n) const { return n == 1 ? 1 : phi_[index(n)]; }
    int Omega(uint64_t n) const { return n == 1 ? 0 : omega_[index(n)]; }
    int omega_distinct(uint64_t n) const { return n == 1 ? 0 : distinct_[index(n)]; }

    bool is_prime(uint64_t n) const {
        if (n == 1) return false;
        return omega_[index(n)] == 1;
    }

    // Lambda(n) = log p when n = p^k, else 0.
    double Lambda(uint64_t n) const {
        if (n == 1) return 0.0;
        size_t i = index(n);
        if (distinct_[i] != 1) return 0.0;
        uint64_t p = spf_[i] != 0 ? spf_[i] : n;
        return std::log(static_cast<double>(p));
    }

    // (prime, exponent) pairs, ascending primes.
    std::vector<std::pair<uint64_t, int>> factorization(uint64_t n) const {
        std::vector<std::pair<uint64_t, int>> out;
        if (n == 1) return out;
        index(n);  // range check
        uint64_t m = n;
        while (m > 1) {
            // cofactors can drop below the table range; fall back to trial division
            uint64_t p = (m >= lo_ && m < hi_) ? spf(m) : smallest_factor_slow(m);
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            out.emplace_back(p, e);
        }
        return out;
    }

private:
    uint64_t lo_, hi_;
    std::vector<uint32_t> spf_;
    std::vector<int8_t> mu_;
    std::vector<uint8_t> omega_;
    std::vector<uint8_t> distinct_;
    std::vector<uint64_t> phi_;

    size_t index(uint64_t n) const {
        if (n < lo_ || n >= hi_) throw std::domain_error("FactorTable: n out of range");
        return static_cast<size_t>(n - lo_);
    }

    static uint64_t smallest_factor_slow(uint64_t m) {
        if (m % 2 == 0) return 2;
        for (uint64_t d = 3; d * d <= m; d += 2)
            if (m % d == 0) return d;
        return m;
    }
};

inline FactorTable build_factor_table(uint64_t lo, uint64_t hi) { return FactorTable(lo, hi); }

// Omega(p+2) with multiplicity; the p+2 = P_4 predicate reads this.
inline int omega_of_shifted(uint64_t p, const FactorTable& table) {
    return table.Omega(p + 2);
}

} // namespace primefrac
