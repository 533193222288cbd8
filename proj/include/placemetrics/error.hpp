#ifndef PLACEMETRICS_ERROR_HPP
#define PLACEMETRICS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace placemetrics {

/// Coarse error taxonomy; the CLI serializes `kind` into its error artifact.
enum class ErrorKind {
    Domain,            // argument outside the mathematical domain
    Validation,        // malformed input data
    Sizing,            // too few observations for the requested statistic
    Stratification,    // class too small for the requested folds
    Infeasible,        // e.g. k larger than the number of distinct points
    InsufficientData,
    Calibration,
    Io,
    Config,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Sizing: return "sizing";
    case ErrorKind::Stratification: return "stratification";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace placemetrics

#endif
