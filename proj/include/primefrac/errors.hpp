#pragma once

#include <stdexcept>
#include <string>

namespace primefrac {

// Requested computation exceeds a configured size/memory cap.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// A certified-precision requirement cannot be met at the carried bit count.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// Two supposedly-agreeing evaluation routes disagree beyond tolerance.
class internal_consistency_error : public std::logic_error {
public:
    explicit internal_consistency_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace primefrac
