#pragma once

#include <stdexcept>
#include <string>

namespace ttc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value lies outside the operation's domain
/// (bad particle count, unknown Fock label, too few eigenphases, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An input failed a numerical precondition that the caller is responsible
/// for (non-Hermitian generator, non-unitary propagator, non-orthonormal basis).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A mean-field trajectory came within the guard distance of |z| = 1.
class PoleError : public Error {
public:
    PoleError(const std::string& what, double z, double phi)
        : Error(what), z_(z), phi_(phi) {}

    double z() const noexcept { return z_; }
    double phi() const noexcept { return phi_; }

private:
    double z_;
    double phi_;
};

}  // namespace ttc
