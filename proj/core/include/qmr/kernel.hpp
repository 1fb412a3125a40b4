#pragma once

// Restricted dispersive kernels W(t)W*(s) = R_Y U(t) chi^2 U(-s) R_Y* and
// the fit of their decay exponents
//   sup |kernel|  ~ h^{-mu_inf} (h + |t-s|)^{-sigma_inf}
//   ||.||_{L2->L2} ~ h^{-mu_2}   (h + |t-s|)^{-sigma_2}.

#include <string>
#include <utility>
#include <vector>

#include "qmr/symbol.hpp"

namespace qmr::kernel {

enum class SliceKind { point, axis, diagonal };
SliceKind parse_slice(const std::string& s);
const char* to_string(SliceKind k);

struct KernelConfig {
    int n = 2;  // ambient dimension; the x-grid has d = n - 1 dimensions
    int k = 1;  // Y has k - 1 dimensions inside the grid
    SliceKind slice = SliceKind::point;
    double period = 6.283185307179586;
    double cutoff_inner = 1.0;  // chi(xi) = 1 for |xi_i| <= inner
    double cutoff_outer = 2.0;  // chi(xi) = 0 for |xi_i| >= outer
    std::size_t budget = 4096;  // max Y nodes for a dense SVD
    int steps_per_unit_time = 400;
};

struct KernelRow {
    double h = 0, t = 0, s = 0;
    double sup = 0;     // sup |K(y, y')| over Y x Y
    double opnorm = 0;  // largest singular value on L^2(Y)
    double tau() const { return std::abs(t - s); }
};

struct KernelEstimate {
    std::string hamiltonian;
    KernelConfig config;
    std::vector<KernelRow> rows;
};

/// Grid points per axis used at a given h: twice the count whose Nyquist
/// band just holds the cutoff.
int grid_points_for(const KernelConfig& cfg, double h);

/// Kernel sweep over every h and (t, s) pair. x-independent Hamiltonians use
/// the exact Fourier representation (the operator is a convolution, so its
/// norm on Y is a maximum over Fourier coefficients); others assemble the
/// dense matrix column by column from reference_propagator.
KernelEstimate restricted_kernel_decay(const SymbolField& a, const KernelConfig& cfg, const std::vector<double>& h_list,
                                       const std::vector<std::pair<double, double>>& ts_pairs);

/// (t, s) = (tau, 0) for tau = 2^{-j/2} inside [window_factor * h_min, t_max].
std::vector<std::pair<double, double>> default_time_pairs(double h_min, double t_max = 0.5, double window_factor = 8.0);

struct KernelFit {
    double mu_inf = 0, sigma_inf = 0, mu_2 = 0, sigma_2 = 0;
    double residual_inf = 0, residual_2 = 0;
    std::size_t rows_used = 0;
};

/// Least squares of log(value) = -mu log h - sigma log(h + |t-s|) + c on rows
/// with window_factor * h <= |t-s| <= t_max. Throws CollinearityError when
/// the window holds fewer than 4 distinct h or |t-s| values or the design is
/// degenerate.
KernelFit fit_kernel_exponents(const KernelEstimate& est, double window_factor = 8.0, double t_max = 0.5);

}  // namespace qmr::kernel
