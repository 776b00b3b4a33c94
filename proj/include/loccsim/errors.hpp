#ifndef LOCCSIM_ERRORS_HPP
#define LOCCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace loccsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or incompatible subsystem dimensions (shape mismatches,
// unsupported bipartitions, empty operator sets).
struct DimensionError : Error {
    using Error::Error;
};

// A state does not fit in the requested Fock truncation.
struct TruncationError : Error {
    using Error::Error;
};

// An argument violates a mathematical precondition (negative occupation,
// non-Hermitian measurement operator, non-unitary mixing matrix, ...).
struct DomainError : Error {
    using Error::Error;
};

// A numerical evolution left the physical state space.
struct IntegrationError : Error {
    using Error::Error;
};

} // namespace loccsim

#endif
