#include "qmr/kernel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qmr/errors.hpp"
#include "qmr/fft.hpp"
#include "qmr/propagator.hpp"
#include "qmr/quantization.hpp"
#include "qmr/regression.hpp"

namespace qmr::kernel {

namespace {

std::array<int, 3> slice_direction(SliceKind k, int d) {
    switch (k) {
        case SliceKind::point: return {0, 0, 0};
        case SliceKind::axis: return {1, 0, 0};
        case SliceKind::diagonal: return d >= 2 ? std::array<int, 3>{1, 1, 0} : std::array<int, 3>{1, 0, 0};
    }
    return {0, 0, 0};
}

void validate(const KernelConfig& cfg) {
    const int d = cfg.n - 1;
    if (d < 1 || d > 3) throw DimensionError("kernel sweeps need 2 <= n <= 4");
    const int ydim = cfg.slice == SliceKind::point ? 0 : 1;
    if (cfg.k - 1 != ydim)
        throw DimensionError("slice '" + std::string(to_string(cfg.slice)) + "' has dimension " + std::to_string(ydim) +
                             " but k - 1 = " + std::to_string(cfg.k - 1));
    if (cfg.slice == SliceKind::diagonal && d < 2) throw DimensionError("diagonal slices need a grid of dimension >= 2");
    if (!(cfg.cutoff_outer > cfg.cutoff_inner && cfg.cutoff_inner > 0)) throw DomainError("invalid cutoff radii");
}

// Fourier path: K(y) = L^{-d} sum_m chi(h k_m)^2 e^{-i tau a(h k_m)/h} e^{i k_m y}.
// Along Y = {s dir} only q = m.dir mod N matters, so the sum collapses onto
// an N-point vector S(q) and K(s dir) is its inverse DFT.
KernelRow convolution_row(const SymbolField& a, const KernelConfig& cfg, const PeriodicGrid& grid, double h, double t,
                          double s) {
    const int d = grid.dim();
    const int N = grid.points_per_axis();
    const auto dir = slice_direction(cfg.slice, d);
    const double tau = t - s;
    const double vol = std::pow(grid.period(), d);
    // The cutoff is a product over axes; tabulate chi^2 per wavenumber bin.
    std::vector<double> chi2(static_cast<std::size_t>(N));
    std::vector<int> live;
    for (int i = 0; i < N; ++i) {
        const double c = plateau(std::abs(h * grid.wavenumber(i)), -cfg.cutoff_inner, cfg.cutoff_inner,
                                 -cfg.cutoff_outer, cfg.cutoff_outer);
        chi2[static_cast<std::size_t>(i)] = c * c;
        if (c != 0.0) live.push_back(i);
    }
    Eigen::VectorXcd S = Eigen::VectorXcd::Zero(N);
    cplx total = 0.0;
    const Vec zero = Vec::Zero(d);
    Vec xi(d);
    std::array<std::size_t, 3> pos{0, 0, 0};
    const std::size_t nl = live.size();
    if (nl == 0) throw DomainError("cutoff has no support on the grid");
    while (true) {
        double weight = 1.0;
        int q = 0;
        for (int ax = 0; ax < d; ++ax) {
            const int m = live[pos[static_cast<std::size_t>(ax)]];
            weight *= chi2[static_cast<std::size_t>(m)];
            xi[ax] = h * grid.wavenumber(m);
            q += dir[static_cast<std::size_t>(ax)] * m;
        }
        const cplx v = weight * std::polar(1.0, -tau * a.real(zero, xi) / h);
        total += v;
        S[((q % N) + N) % N] += v;
        int ax = d - 1;
        while (ax >= 0 && ++pos[static_cast<std::size_t>(ax)] == nl) pos[static_cast<std::size_t>(ax--)] = 0;
        if (ax < 0) break;
    }
    KernelRow row{h, t, s, 0.0, 0.0};
    if (cfg.slice == SliceKind::point) {
        row.sup = row.opnorm = std::abs(total) / vol;
        return row;
    }
    Eigen::VectorXcd K = S;
    fft::backward_1d(K);
    K /= vol;
    row.sup = K.cwiseAbs().maxCoeff();
    double dir_len = 0.0;
    for (int ax = 0; ax < d; ++ax) dir_len += dir[static_cast<std::size_t>(ax)] * dir[static_cast<std::size_t>(ax)];
    // Circulant on Y with node weight |dir| L / N: eigenvalues are
    // |dir| L^{1-d} S(q).
    row.opnorm = std::sqrt(dir_len) * S.cwiseAbs().maxCoeff() / std::pow(grid.period(), d - 1);
    return row;
}

KernelRow dense_row(const SymbolField& a, const KernelConfig& cfg, const PeriodicGrid& grid, double h, double t, double s,
                    const quant::LocalisationCutoff& chi) {
    const int d = grid.dim();
    const int N = grid.points_per_axis();
    const auto dir = slice_direction(cfg.slice, d);
    // Y passes through the grid point nearest the origin of coordinates.
    std::array<int, 3> anchor{0, 0, 0};
    for (int ax = 0; ax < d; ++ax) anchor[static_cast<std::size_t>(ax)] = grid.node_index(0.0, grid.period());
    const int nodes = cfg.slice == SliceKind::point ? 1 : N;
    if (static_cast<std::size_t>(nodes) > cfg.budget)
        throw BudgetError("restricted kernel on " + std::to_string(nodes) + " nodes exceeds the SVD budget of " +
                          std::to_string(cfg.budget) + "; use a coarser grid");
    double dir_len = 0.0;
    for (int ax = 0; ax < d; ++ax) dir_len += dir[static_cast<std::size_t>(ax)] * dir[static_cast<std::size_t>(ax)];
    const double weight = nodes == 1 ? 1.0 : grid.spacing() * std::sqrt(dir_len);
    auto node = [&](int i) {
        std::array<int, 3> idx = anchor;
        for (int ax = 0; ax < d; ++ax) idx[static_cast<std::size_t>(ax)] += i * dir[static_cast<std::size_t>(ax)];
        return grid.flat_index(idx);
    };
    auto steps = [&](double span) {
        return std::max(1, static_cast<int>(std::ceil(std::abs(span) * cfg.steps_per_unit_time)));
    };
    Eigen::MatrixXcd K(nodes, nodes);
    for (int j = 0; j < nodes; ++j) {
        GridFunction delta(grid, h);
        delta[node(j)] = 1.0 / grid.cell_volume();
        GridFunction v = prop::reference_propagator(a, delta, -s, steps(s));
        v = quant::quantize_left(chi.chi, h, v);
        v = quant::quantize_left(chi.chi, h, v);
        v = prop::reference_propagator(a, v, t, steps(t));
        for (int i = 0; i < nodes; ++i) K(i, j) = v[node(i)];
    }
    KernelRow row{h, t, s, 0.0, 0.0};
    row.sup = K.cwiseAbs().maxCoeff();
    if (nodes == 1) {
        row.opnorm = row.sup;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(weight * K);
        row.opnorm = svd.singularValues()[0];
    }
    return row;
}

}  // namespace

SliceKind parse_slice(const std::string& s) {
    if (s == "point") return SliceKind::point;
    if (s == "axis") return SliceKind::axis;
    if (s == "diagonal") return SliceKind::diagonal;
    throw ConfigError("unknown slice kind '" + s + "' (expected point, axis or diagonal)");
}

const char* to_string(SliceKind k) {
    switch (k) {
        case SliceKind::point: return "point";
        case SliceKind::axis: return "axis";
        case SliceKind::diagonal: return "diagonal";
    }
    return "?";
}

int grid_points_for(const KernelConfig& cfg, double h) {
    const double need = cfg.cutoff_outer * cfg.period / (std::numbers::pi * h);
    return 2 * next_pow2(static_cast<int>(std::ceil(need)));
}

KernelEstimate restricted_kernel_decay(const SymbolField& a, const KernelConfig& cfg, const std::vector<double>& h_list,
                                       const std::vector<std::pair<double, double>>& ts_pairs) {
    validate(cfg);
    const int d = cfg.n - 1;
    if (a.x_dim != d || a.xi_dim != d)
        throw DimensionError("Hamiltonian '" + a.name + "' does not act on a " + std::to_string(d) + "-dimensional slice");
    KernelEstimate est;
    est.hamiltonian = a.name;
    est.config = cfg;
    const auto chi = quant::frequency_cutoff(d, cfg.cutoff_inner, cfg.cutoff_outer);
    for (double h : h_list) {
        const int N = grid_points_for(cfg, h);
        std::size_t total = 1;
        for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
        if (!a.is_x_independent() && total > (std::size_t{1} << 22))
            throw BudgetError("grid of " + std::to_string(total) + " points is too large for propagator columns");
        const PeriodicGrid grid(d, N, cfg.period);
        for (const auto& [t, s] : ts_pairs) {
            est.rows.push_back(a.is_x_independent() ? convolution_row(a, cfg, grid, h, t, s)
                                                    : dense_row(a, cfg, grid, h, t, s, chi));
        }
    }
    return est;
}

std::vector<std::pair<double, double>> default_time_pairs(double h_min, double t_max, double window_factor) {
    std::vector<std::pair<double, double>> out;
    for (int j = 0; j < 200; ++j) {
        const double tau = std::exp2(-0.5 * j);
        if (tau > t_max * (1 + 1e-12)) continue;
        if (tau < window_factor * h_min * (1 - 1e-12)) break;
        out.emplace_back(tau, 0.0);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

KernelFit fit_kernel_exponents(const KernelEstimate& est, double window_factor, double t_max) {
    std::vector<const KernelRow*> use;
    std::set<double> hs, taus;
    for (const auto& r : est.rows) {
        if (r.tau() < window_factor * r.h * (1 - 1e-12) || r.tau() > t_max * (1 + 1e-12)) continue;
        if (!(r.sup > 0) || !(r.opnorm > 0)) throw DataError("kernel values must be positive");
        use.push_back(&r);
        hs.insert(r.h);
        taus.insert(r.tau());
    }
    if (hs.size() < 4 || taus.size() < 4)
        throw CollinearityError("fit window holds " + std::to_string(hs.size()) + " values of h and " +
                                std::to_string(taus.size()) + " values of |t-s|; at least 4 of each are needed");
    const auto n = static_cast<Eigen::Index>(use.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd ysup(n), yop(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = *use[static_cast<std::size_t>(i)];
        X(i, 0) = -std::log(r.h);
        X(i, 1) = -std::log(r.h + r.tau());
        X(i, 2) = 1.0;
        ysup[i] = std::log(r.sup);
        yop[i] = std::log(r.opnorm);
    }
    const auto fs = fit::least_squares(X, ysup);
    const auto f2 = fit::least_squares(X, yop);
    KernelFit out;
    out.mu_inf = fs.coef[0];
    out.sigma_inf = fs.coef[1];
    out.mu_2 = f2.coef[0];
    out.sigma_2 = f2.coef[1];
    out.residual_inf = fs.max_residual;
    out.residual_2 = f2.max_residual;
    out.rows_used = use.size();
    return out;
}

}  // namespace qmr::kernel
