#pragma once

#include <stdexcept>
#include <string>

namespace qmr {

/// Base of every error raised by the library. Subclasses name the failed
/// contract so callers (and the CLI) can report it without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QMR_DEFINE_ERROR(Name)                      \
    class Name : public Error {                     \
    public:                                         \
        using Error::Error;                         \
    }

QMR_DEFINE_ERROR(DomainError);         // argument outside the admissible range
QMR_DEFINE_ERROR(EndpointError);       // Strichartz pair at or beyond r = 2
QMR_DEFINE_ERROR(NoSolutionError);     // governing relation has no solution
QMR_DEFINE_ERROR(DegenerateError);     // degenerate assumptions / (A1) failure
QMR_DEFINE_ERROR(DimensionError);      // grid, symbol or axis shapes disagree
QMR_DEFINE_ERROR(AliasingError);       // symbol support beyond the grid Nyquist band
QMR_DEFINE_ERROR(EllipticityError);    // symbol vanishes where it must be elliptic
QMR_DEFINE_ERROR(ResolutionError);     // too few samples per wavelength
QMR_DEFINE_ERROR(PlacementError);      // wave packet leaks across the periodic seam
QMR_DEFINE_ERROR(CausticError);        // Hamiltonian flow develops a caustic
QMR_DEFINE_ERROR(DomainEscapeError);   // characteristic leaves the sampled box
QMR_DEFINE_ERROR(BudgetError);         // dense object larger than allowed
QMR_DEFINE_ERROR(CollinearityError);   // regression design matrix is degenerate
QMR_DEFINE_ERROR(DataError);           // non-positive or non-finite measurements
QMR_DEFINE_ERROR(ConfigError);         // malformed experiment configuration

#undef QMR_DEFINE_ERROR

}  // namespace qmr
