#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrsel {

// Stable codes, also written to the per-replication CSV.
enum class ErrorCode {
    None = 0,
    InvalidConfig,
    SchemaViolation,
    UnknownScenario,
    InsufficientSelected,
    DegenerateDesign,
    NonConvergence,
    SeparationDetected,
    ZeroDenominator,
    NoEffectiveReps,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class InvalidConfig : public Error {
public:
    explicit InvalidConfig(const std::string& constraint)
        : Error(ErrorCode::InvalidConfig, "invalid config: " + constraint) {}
};

class SchemaViolation : public Error {
public:
    SchemaViolation(const std::string& path, const std::string& reason)
        : Error(ErrorCode::SchemaViolation, "schema violation at '" + path + "': " + reason),
          path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class UnknownScenario : public Error {
public:
    UnknownScenario(const std::string& id, const std::string& valid)
        : Error(ErrorCode::UnknownScenario, "unknown scenario '" + id + "'; valid ids:\n" + valid) {}
};

class InsufficientSelected : public Error {
public:
    InsufficientSelected(std::size_t available, std::size_t required)
        : Error(ErrorCode::InsufficientSelected,
                "insufficient selected individuals: " + std::to_string(available) +
                    " available, " + std::to_string(required) + " required"),
          available_(available), required_(required) {}
    std::size_t available() const noexcept { return available_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t available_;
    std::size_t required_;
};

class DegenerateDesign : public Error {
public:
    explicit DegenerateDesign(const std::string& what)
        : Error(ErrorCode::DegenerateDesign, "degenerate design: " + what) {}
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(int iterations)
        : Error(ErrorCode::NonConvergence,
                "IRLS did not converge after " + std::to_string(iterations) + " iterations"),
          iterations_(iterations) {}
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

class SeparationDetected : public Error {
public:
    SeparationDetected()
        : Error(ErrorCode::SeparationDetected, "quasi-complete separation detected in logistic fit") {}
};

class ZeroDenominator : public Error {
public:
    ZeroDenominator() : Error(ErrorCode::ZeroDenominator, "ratio estimate with zero denominator") {}
};

class NoEffectiveReps : public Error {
public:
    NoEffectiveReps() : Error(ErrorCode::NoEffectiveReps, "no replication produced an estimate") {}
};

}  // namespace mrsel
