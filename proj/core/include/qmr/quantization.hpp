#pragma once

#include <Eigen/Core>

#include "qmr/grid.hpp"
#include "qmr/rational.hpp"
#include "qmr/symbol.hpp"

namespace qmr::quant {

/// Largest grid (total points) for which dense operator matrices are built.
inline constexpr std::size_t kDenseBudget = 4096;

/// Throws AliasingError when the symbol's frequency support reaches beyond
/// the grid's Nyquist band at this h, DimensionError on shape mismatch.
void check_resolution(const SymbolField& sym, const PeriodicGrid& grid, double h);

/// Kohn-Nirenberg quantization p(x, hD)u. Separable symbols use FFT
/// multipliers; anything else runs the dense double sum.
GridFunction quantize_left(const SymbolField& sym, double h, const GridFunction& u);

/// Weyl quantization. Symbols whose terms are purely spatial or purely
/// frequency coincide with the left quantization; others go through the
/// dense midpoint matrix.
GridFunction quantize_weyl(const SymbolField& sym, double h, const GridFunction& u,
                           std::size_t budget = kDenseBudget);

/// Dense matrices acting on flat value vectors.
Eigen::MatrixXcd left_matrix(const SymbolField& sym, double h, const PeriodicGrid& grid,
                             std::size_t budget = kDenseBudget);
Eigen::MatrixXcd weyl_matrix(const SymbolField& sym, double h, const PeriodicGrid& grid,
                             std::size_t budget = kDenseBudget);

/// Phase-space cutoff: identically 1 on `inner`, supported in `outer`.
struct LocalisationCutoff {
    PhaseBox inner;
    PhaseBox outer;
    SymbolField chi;
};

/// Product of smooth plateaus, one per bounded coordinate of the boxes.
LocalisationCutoff make_cutoff(const PhaseBox& inner, const PhaseBox& outer);

/// Frequency-only cutoff, 1 for |xi_i| <= inner and 0 beyond outer.
LocalisationCutoff frequency_cutoff(int dim, double inner, double outer);

/// ||u - chi(x, hD)u||_{L^2}.
double localisation_defect(const GridFunction& u, const LocalisationCutoff& chi);

/// ||u||_p / (h^{n(1/p - 1/q)} ||u||_q) for 1 <= q <= p <= inf.
double sobolev_ratio(const GridFunction& u, ExtRational p, ExtRational q);

struct EllipticDefect {
    double chi_u = 0.0;          // ||chi(x,hD)u||, the headline
    double parametrix_u = 0.0;   // ||q(x,hD) p(x,hD) u||, q = chi/p
    double remainder = 0.0;      // ||chi u - q p u||
    double quasimode = 0.0;      // ||p(x,hD)u||
    double min_symbol = 0.0;     // min |p| sampled on the cutoff support
};

/// Elliptic inversion of sym on the support of chi. Throws EllipticityError
/// when |sym| < floor somewhere on that support.
EllipticDefect elliptic_localize_defect(const SymbolField& sym, const LocalisationCutoff& chi,
                                        const GridFunction& u, double floor = 1e-3);

}  // namespace qmr::quant
