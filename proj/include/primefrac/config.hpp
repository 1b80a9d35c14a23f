#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "primefrac/fixed_real.hpp"
#include "primefrac/params.hpp"

namespace primefrac {

// One canonical JSON document drives every command; command-line flags
// override individual fields. Parse -> validate -> serialize must be
// lossless so certificates can cite their exact input.
struct RunConfig {
    std::string schema = "1";
    Mode mode = Mode::demo;
    std::string alpha = "sqrt2";
    std::string beta = "rat:0/1";
    double theta = 0.25;
    uint64_t X = 1'000'000;
    uint64_t window_lo = 100'000;
    uint64_t window_hi = 200'000;
    int precision_bits = FixedReal::kDefaultFracBits;
    std::string out_dir = ".";
    uint64_t seed = 1;
    bool monitors = true;
    long long k_max = 0;  // 0 = use floor(H)
    std::string filter = "plain";
    // optional exact-decimal overrides for the constant certificate
    std::string kappa_dec, rho_dec;

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        if (j.contains("schema")) c.schema = j.at("schema").get<std::string>();
        if (c.schema != "1") throw std::domain_error("RunConfig: unsupported schema");
        if (j.contains("mode")) {
            auto m = j.at("mode").get<std::string>();
            if (m == "paper") c.mode = Mode::paper;
            else if (m == "demo") c.mode = Mode::demo;
            else throw std::domain_error("RunConfig: mode must be paper|demo");
        }
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<std::string>();
        if (j.contains("beta")) c.beta = j.at("beta").get<std::string>();
        if (j.contains("theta")) c.theta = j.at("theta").get<double>();
        if (j.contains("x")) c.X = j.at("x").get<uint64_t>();
        if (j.contains("window_lo")) c.window_lo = j.at("window_lo").get<uint64_t>();
        if (j.contains("window_hi")) c.window_hi = j.at("window_hi").get<uint64_t>();
        if (j.contains("precision_bits")) c.precision_bits = j.at("precision_bits").get<int>();
        if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
        if (j.contains("monitors")) c.monitors = j.at("monitors").get<bool>();
        if (j.contains("k_max")) c.k_max = j.at("k_max").get<long long>();
        if (j.contains("filter")) {
            c.filter = j.at("filter").get<std::string>();
            if (c.filter != "plain" && c.filter != "sieved")
                throw std::domain_error("RunConfig: filter must be plain|sieved");
        }
        // strings keep these exact; bare numbers go through their shortest
        // round-trip decimal rendering
        auto exact_dec = [](const nlohmann::json& v) {
            return v.is_string() ? v.get<std::string>() : v.dump();
        };
        if (j.contains("kappa")) c.kappa_dec = exact_dec(j.at("kappa"));
        if (j.contains("rho")) c.rho_dec = exact_dec(j.at("rho"));
        c.validate();
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"schema", schema},
                         {"mode", std::string(to_string(mode))},
                         {"alpha", alpha},
                         {"beta", beta},
                         {"theta", theta},
                         {"x", X},
                         {"window_lo", window_lo},
                         {"window_hi", window_hi},
                         {"precision_bits", precision_bits},
                         {"out", out_dir},
                         {"seed", seed},
                         {"monitors", monitors},
                         {"k_max", k_max},
                         {"filter", filter}};
        if (!kappa_dec.empty()) j["kappa"] = kappa_dec;
        if (!rho_dec.empty()) j["rho"] = rho_dec;
        return j;
    }

    void validate() const {
        if (theta <= 0) throw std::domain_error("RunConfig: theta must be positive");
        if (mode == Mode::paper && theta >= Params::kThetaMaxPaper)
            throw std::domain_error("RunConfig: paper mode requires theta in (0, 10/1561)");
        if (precision_bits < 64) throw std::domain_error("RunConfig: precision_bits >= 64");
        if (window_lo >= window_hi) throw std::domain_error("RunConfig: empty window");
    }

    // "sqrt2" | "golden" | "e" | "pi" | "a/b" | decimal string.
    // Rational and decimal specs break the ||alpha n|| != 0 assumption of the
    // min-sum lemma checks; callers surface rational_warning for those.
    static FixedReal parse_real(const std::string& spec, int bits, bool* rational_warning = nullptr) {
        if (rational_warning) *rational_warning = false;
        if (spec == "sqrt2" || spec == "golden" || spec == "e" || spec == "pi")
            return FixedReal::from_symbol(spec, bits);
        if (spec.rfind("dec:", 0) == 0) {
            if (rational_warning) *rational_warning = true;
            return FixedReal::from_decimal(spec.substr(4), bits);
        }
        if (spec.rfind("rat:", 0) == 0) {
            if (rational_warning) *rational_warning = true;
            auto body = spec.substr(4);
            auto slash = body.find('/');
            return FixedReal::from_rational(cpp_int(body.substr(0, slash)),
                                            cpp_int(body.substr(slash + 1)), bits);
        }
        if (spec.find('/') != std::string::npos) {
            if (rational_warning) *rational_warning = true;
            auto slash = spec.find('/');
            return FixedReal::from_rational(cpp_int(spec.substr(0, slash)),
                                            cpp_int(spec.substr(slash + 1)), bits);
        }
        if (rational_warning) *rational_warning = true;
        return FixedReal::from_decimal(spec, bits);
    }

    FixedReal alpha_value(bool* warn = nullptr) const { return parse_real(alpha, precision_bits, warn); }
    FixedReal beta_value(bool* warn = nullptr) const { return parse_real(beta, precision_bits, warn); }
};

} // namespace primefrac
