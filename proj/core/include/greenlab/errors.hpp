#pragma once

#include <stdexcept>
#include <string>

namespace greenlab {

// Base for all failures this library raises on purpose. Callers that only
// need exit-code triage can catch the three leaf categories below.
struct GreenlabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input or problem-setup violations (bad generator parameters, K not inside
// the domain, cutoff not admissible, ...). CLI maps these to exit code 2.
struct InvalidInput : GreenlabError {
    using GreenlabError::GreenlabError;
};

// A mathematically well-posed solve that failed to reach tolerance.
// CLI maps these to exit code 3.
struct NonConvergence : GreenlabError {
    NonConvergence(const std::string& what, double residual)
        : GreenlabError(what), residual(residual) {}
    double residual;
};

struct InvalidSpace : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct DisconnectedDomain : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct InvalidProblem : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct SingularityOnBoundary : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct InvalidCutoff : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct EmptyLevelSet : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct EmptyShell : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct EmptyBall : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct InsufficientRows : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct InsufficientShells : InvalidInput {
    using InvalidInput::InvalidInput;
};
struct DivisionByZero : InvalidInput {
    using InvalidInput::InvalidInput;
};

}  // namespace greenlab
