#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace primefrac {

enum class Mode { paper, demo };

inline const char* to_string(Mode m) { return m == Mode::paper ? "paper" : "demo"; }

// Exponent set and the quantities derived from it at a given scale X.
//
// The exponents delta, rho, eta and the weight kappa are fixed; only theta
// varies. "paper" mode restricts theta to (0, 10/1561); "demo" mode accepts
// any positive theta and every report produced downstream carries the mode
// stamp. At desk-scale X the paper-mode theta window makes Delta = X^-theta
// land above 1/2; that is recorded in delta_degenerate rather than rejected,
// since the constant certificates do not involve Delta.
struct Params {
    static constexpr double kDelta = 0.307708;
    static constexpr double kRho = 0.23077;
    static constexpr double kEta = 0.076928;
    static constexpr double kKappa = 1.4999676;

    // theta upper limit in paper mode, exactly 10/1561
    static constexpr double kThetaMaxPaper = 10.0 / 1561.0;

    Mode mode = Mode::demo;
    uint64_t X = 0;
    double theta = 0;

    double delta = kDelta, rho = kRho, eta = kEta, kappa = kKappa;
    double z = 0, y = 0, D = 0, Delta = 0, H = 0;
    bool delta_degenerate = false;  // Delta >= 1/2 at this scale

    static Params make(Mode mode, uint64_t X, double theta) {
        if (X < 16) throw std::domain_error("Params: X must be at least 16");
        if (theta <= 0) throw std::domain_error("Params: theta must be positive");
        if (mode == Mode::paper && theta >= kThetaMaxPaper)
            throw std::domain_error("Params: paper mode requires theta in (0, 10/1561)");
        Params p;
        p.mode = mode;
        p.X = X;
        p.theta = theta;
        double lx = std::log(static_cast<double>(X));
        p.z = std::pow(static_cast<double>(X), p.eta);
        p.y = std::pow(static_cast<double>(X), p.rho);
        p.D = std::pow(static_cast<double>(X), p.delta);
        p.Delta = std::pow(static_cast<double>(X), -theta);
        p.H = (1.0 / p.Delta) * lx * lx;
        p.delta_degenerate = !(p.Delta < 0.5);
        if (!(p.z < p.y && p.y < p.D && p.D < static_cast<double>(X)))
            throw std::domain_error("Params: ordering z < y < D < X failed");
        if (!(p.H >= 1.0)) throw std::domain_error("Params: H < 1");
        return p;
    }

    // s = delta/eta; equals 76927/19232 for the built-in exponents.
    double s() const { return delta / eta; }

    static boost::multiprecision::cpp_rational s_exact() {
        return boost::multiprecision::cpp_rational(76927, 19232);
    }
    static boost::multiprecision::cpp_rational kappa_exact() {
        return boost::multiprecision::cpp_rational(14999676, 10000000);
    }
    static boost::multiprecision::cpp_rational rho_exact() {
        return boost::multiprecision::cpp_rational(23077, 100000);
    }
    static boost::multiprecision::cpp_rational delta_exact() {
        return boost::multiprecision::cpp_rational(307708, 1000000);
    }
    static boost::multiprecision::cpp_rational eta_exact() {
        return boost::multiprecision::cpp_rational(76928, 1000000);
    }
    static boost::multiprecision::cpp_rational theta_max_exact() {
        return boost::multiprecision::cpp_rational(10, 1561);
    }

    long long H_cutoff() const { return static_cast<long long>(std::floor(H)); }
};

} // namespace primefrac
