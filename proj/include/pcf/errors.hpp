#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pcf {

// Base of every library error.  `time` is filled in by the evolution driver
// when a step fails, so callers can report where a run broke down.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg), message_(msg) {}

    const char* what() const noexcept override { return full_.empty() ? message_.c_str() : full_.c_str(); }

    void attach_time(double t) {
        time = t;
        full_ = message_ + " (at t=" + std::to_string(t) + ")";
    }

    double time = std::numeric_limits<double>::quiet_NaN();

private:
    std::string message_;
    std::string full_;
};

#define PCF_DECLARE_ERROR(Name) \
    class Name : public Error { \
    public: \
        using Error::Error; \
    }

PCF_DECLARE_ERROR(DomainError);
PCF_DECLARE_ERROR(NumericalDomainError);
PCF_DECLARE_ERROR(SingularDenominator);
PCF_DECLARE_ERROR(CoefficientSingularity);
PCF_DECLARE_ERROR(BlowupDetected);
PCF_DECLARE_ERROR(BoundaryContamination);
PCF_DECLARE_ERROR(SupportError);
PCF_DECLARE_ERROR(WindowUndefined);
PCF_DECLARE_ERROR(InsufficientHistory);
PCF_DECLARE_ERROR(ConfigError);

#undef PCF_DECLARE_ERROR

} // namespace pcf
