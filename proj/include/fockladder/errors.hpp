// errors.hpp — exception types raised by the numerical pipeline

#pragma once

#include <stdexcept>
#include <string>

namespace fockladder {

/// Quasienergy lands on (or too near) the folding edge ±π/τ, or the model's
/// energy range exceeds the first Floquet zone.
class BranchAmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense eigensolver failed to converge or produced an inconsistent decomposition.
class EigensolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scan maximum landed on the edge of the supplied grid.
class GridBoundaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fockladder
