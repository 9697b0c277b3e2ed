#pragma once

#include <stdexcept>
#include <string>

namespace fractlab {

/// Base of every error thrown by the library. `category()` is a stable
/// machine-readable tag; the CLI maps it onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Index or magnitude outside what a model can address.
struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error("range", w) {}
};

// A ratio left (0, 1/2) while converting gaps to ratios.
struct DegeneracyError : Error {
    explicit DegeneracyError(const std::string& w) : Error("degeneracy", w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

struct ConstructionError : Error {
    explicit ConstructionError(const std::string& w) : Error("construction", w) {}
};

struct ArrangementError : Error {
    explicit ArrangementError(const std::string& w) : Error("arrangement", w) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error("precondition", w) {}
};

// A covering query touched a residual that is too coarse for the radius.
struct RefinementRequired : Error {
    explicit RefinementRequired(const std::string& w) : Error("refinement", w) {}
};

struct RefusalError : Error {
    explicit RefusalError(const std::string& w) : Error("refusal", w) {}
};

} // namespace fractlab
