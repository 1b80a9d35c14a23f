#pragma once

#include <cstdint>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "primefrac/errors.hpp"

namespace primefrac {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Simple sieve; fine up to ~10^8.
inline std::vector<uint64_t> primes_upto(uint64_t n) {
    std::vector<uint64_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (uint64_t i = 2; i <= n; ++i) {
        if (!comp[i]) {
            out.push_back(i);
            for (uint64_t j = i * i; j <= n; j += i) comp[j] = true;
        }
        if (i * i > n) {
            for (uint64_t j = i + 1; j <= n; ++j)
                if (!comp[j]) out.push_back(j);
            break;
        }
    }
    return out;
}

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // Sinclair's base set, deterministic below 3.3e24
    for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        uint64_t x = powmod_u64(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// gcd(n, P(z)) == 1 where P(z) is the product of odd primes in (2, z].
// The prime 2 never divides P(z), so even n can still pass.
// An odd composite divisor d of n implies a smaller odd prime divisor,
// so plain trial division by every odd candidate is already exact.
inline bool coprime_to_Pz(uint64_t n, double z) {
    if (n == 0) return false;
    for (uint64_t p = 3; static_cast<double>(p) <= z; p += 2)
        if (n % p == 0) return false;
    return true;
}

struct CrtResidue {
    uint64_t f0;  // residue mod modulus
    uint64_t modulus;
};

// Solve m = r1 (mod d1), m = r2 (mod d2). Empty when the system is unsolvable.
inline std::optional<CrtResidue> crt_pair(uint64_t r1, uint64_t d1, uint64_t r2, uint64_t d2) {
    if (d1 == 0 || d2 == 0) throw std::domain_error("crt_pair: zero modulus");
    r1 %= d1;
    r2 %= d2;
    uint64_t g = std::gcd(d1, d2);
    if ((r1 % g) != (r2 % g)) return std::nullopt;
    // m = r1 + d1 * t, d1 * t = r2 - r1 (mod d2)  =>  t = ((r2-r1)/g) * inv(d1/g) (mod d2/g)
    uint64_t l = d1 / g * d2;  // lcm
    cpp_int dd1 = d1, dd2 = d2;
    cpp_int diff = (cpp_int(r2) - cpp_int(r1)) / g;
    cpp_int m2 = dd2 / g;
    cpp_int a = (dd1 / g) % m2;
    // extended Euclid for inverse of a mod m2
    cpp_int old_r = a, r = m2, old_s = 1, s = 0;
    while (r != 0) {
        cpp_int q = old_r / r;
        cpp_int tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
    }
    cpp_int inv = old_s % m2;
    if (inv < 0) inv += m2;
    cpp_int t = (diff % m2) * inv % m2;
    if (t < 0) t += m2;
    cpp_int m = (cpp_int(r1) + dd1 * t) % l;
    if (m < 0) m += l;
    return CrtResidue{static_cast<uint64_t>(m), l};
}

// Solve c * m = a (mod d); the solutions, when they exist, form one residue
// class mod d/gcd(c,d).
inline std::optional<CrtResidue> solve_linear_congruence(uint64_t c, int64_t a, uint64_t d) {
    if (d == 0) throw std::domain_error("solve_linear_congruence: zero modulus");
    if (d == 1) return CrtResidue{0, 1};
    c %= d;
    uint64_t am = ((a % static_cast<int64_t>(d)) + static_cast<int64_t>(d)) % d;
    uint64_t g = std::gcd(c, d);
    if (am % g != 0) return std::nullopt;
    uint64_t d2 = d / g, c2 = c / g, a2 = am / g;
    // inverse of c2 mod d2 by extended Euclid on 64-bit values
    int64_t old_r = static_cast<int64_t>(c2 % d2), r = static_cast<int64_t>(d2);
    int64_t old_s = 1, s = 0;
    while (r != 0) {
        int64_t q = old_r / r;
        int64_t t = old_r - q * r; old_r = r; r = t;
        t = old_s - q * s; old_s = s; s = t;
    }
    int64_t inv = old_s % static_cast<int64_t>(d2);
    if (inv < 0) inv += static_cast<int64_t>(d2);
    uint64_t m = mulmod_u64(a2 % d2, static_cast<uint64_t>(inv), d2);
    return CrtResidue{m, d2};
}

// Exact rational from a plain decimal string ("1.51", "-0.25", "3").
inline cpp_rational decimal_to_rational(const std::string& s) {
    bool neg = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    std::string digits;
    long long frac_digits = 0;
    bool seen_dot = false;
    long long exp10 = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') { seen_dot = true; continue; }
        if (c == 'e' || c == 'E') { exp10 = std::stoll(s.substr(i + 1)); break; }
        if (c < '0' || c > '9') throw std::domain_error("decimal_to_rational: bad character");
        digits.push_back(c);
        if (seen_dot) ++frac_digits;
    }
    if (digits.empty()) throw std::domain_error("decimal_to_rational: no digits");
    // leading zeros would switch cpp_int's string parser into octal
    size_t nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    cpp_int num(digits), den = 1;
    long long e = exp10 - frac_digits;
    for (long long k = 0; k < e; ++k) num *= 10;
    for (long long k = 0; k < -e; ++k) den *= 10;
    cpp_rational r(num, den);
    return neg ? -r : r;
}

// Pi(z) = prod_{2<p<=z} (1 - 1/(p-1)); the factors start at p=3.
inline double mertens_pi(double z) {
    if (z < 3.0) return 1.0;
    double prod = 1.0;
    auto ps = primes_upto(static_cast<uint64_t>(z));
    for (uint64_t p : ps) {
        if (p <= 2) continue;
        if (static_cast<double>(p) > z) break;
        prod *= 1.0 - 1.0 / static_cast<double>(p - 1);
    }
    return prod;
}

// Exact-rational variant, z capped to keep numerators manageable.
inline cpp_rational mertens_pi_exact(double z) {
    if (z > 1e4) throw resource_error("mertens_pi_exact: z cap is 10^4");
    cpp_rational prod = 1;
    if (z < 3.0) return prod;
    for (uint64_t p : primes_upto(static_cast<uint64_t>(z))) {
        if (p <= 2 || static_cast<double>(p) > z) continue;
        prod *= cpp_rational(p - 2, p - 1);
    }
    return prod;
}

} // namespace primefrac
