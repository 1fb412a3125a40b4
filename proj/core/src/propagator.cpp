#include "qmr/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

#include "qmr/errors.hpp"
#include "qmr/fft.hpp"
#include "qmr/quantization.hpp"

namespace qmr::prop {

namespace {

constexpr double kPi = std::numbers::pi;

double min_singular(const Mat& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    const Eigen::MatrixXd dense = m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    return svd.singularValues().minCoeff();
}

struct Derivative {
    Vec dx, dxi;
    double dphase;
    PhaseMat djac;
};

double hermite(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

}  // namespace

Mat FlowState::dx_dx0() const {
    const auto d = x.size();
    return jacobian.topLeftCorner(d, d);
}

HamiltonianFlow::HamiltonianFlow(SymbolField a, double dt, double t_max)
    : a_(with_numeric_derivatives(std::move(a))), dt_(dt), t_max_(t_max) {
    if (a_.x_dim != a_.xi_dim) throw DimensionError("Hamiltonian needs matching x and xi dimensions");
    if (!(dt > 0)) throw DomainError("flow step must be positive");
    if (!(t_max > 0)) throw DomainError("flow horizon must be positive");
    if (!a_.is_real) throw DomainError("Hamiltonian flow needs a real symbol");
}

FlowState HamiltonianFlow::start(const Vec& x0, const Vec& eta) const {
    const auto d = a_.x_dim;
    if (x0.size() != d || eta.size() != d) throw DimensionError("initial data does not match the Hamiltonian");
    FlowState s;
    s.x = x0;
    s.xi = eta;
    s.phase = x0.dot(eta);
    s.jacobian = PhaseMat::Identity(2 * d, 2 * d);
    return s;
}

void HamiltonianFlow::rk4_step(FlowState& s, double h) const {
    const int d = a_.x_dim;
    auto deriv = [&](const Vec& x, const Vec& xi, const PhaseMat& J) {
        Derivative out;
        const Vec ax = a_.grad_x(x, xi);
        const Vec axi = a_.grad_xi(x, xi);
        out.dx = axi;
        out.dxi = -ax;
        out.dphase = xi.dot(axi) - a_.real(x, xi);
        PhaseMat M(2 * d, 2 * d);
        const Mat hxx = a_.hess_x(x, xi);
        const Mat hxixi = a_.hess_xi(x, xi);
        const Mat hxxi = a_.hess_x_xi(x, xi);
        M.topLeftCorner(d, d) = hxxi.transpose();
        M.topRightCorner(d, d) = hxixi;
        M.bottomLeftCorner(d, d) = -hxx;
        M.bottomRightCorner(d, d) = -hxxi;
        out.djac = M * J;
        return out;
    };
    const Derivative k1 = deriv(s.x, s.xi, s.jacobian);
    const Derivative k2 = deriv(s.x + 0.5 * h * k1.dx, s.xi + 0.5 * h * k1.dxi, s.jacobian + 0.5 * h * k1.djac);
    const Derivative k3 = deriv(s.x + 0.5 * h * k2.dx, s.xi + 0.5 * h * k2.dxi, s.jacobian + 0.5 * h * k2.djac);
    const Derivative k4 = deriv(s.x + h * k3.dx, s.xi + h * k3.dxi, s.jacobian + h * k3.djac);
    s.x += h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    s.xi += h / 6 * (k1.dxi + 2 * k2.dxi + 2 * k3.dxi + k4.dxi);
    s.phase += h / 6 * (k1.dphase + 2 * k2.dphase + 2 * k3.dphase + k4.dphase);
    s.jacobian += h / 6 * (k1.djac + 2 * k2.djac + 2 * k3.djac + k4.djac);
}

void HamiltonianFlow::advance(FlowState& s, double span) const {
    if (span == 0.0) return;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt_ - 1e-9)));
    for (int i = 0; i < steps; ++i) rk4_step(s, span / steps);
}

FlowState HamiltonianFlow::evolve(const Vec& x0, const Vec& eta, double t, int steps) const {
    if (std::abs(t) > t_max_ * (1 + 1e-12))
        throw DomainError("time " + std::to_string(t) + " exceeds the flow horizon " + std::to_string(t_max_));
    FlowState s = start(x0, eta);
    if (t == 0.0) return s;
    if (steps <= 0) steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt_ - 1e-9)));
    for (int i = 0; i < steps; ++i) rk4_step(s, t / steps);
    return s;
}

double HamiltonianFlow::symplectic_drift(const Vec& x0, const Vec& eta, double t) const {
    const FlowState s = evolve(x0, eta, t);
    const auto d = a_.x_dim;
    PhaseMat omega = PhaseMat::Zero(2 * d, 2 * d);
    omega.topRightCorner(d, d).setIdentity();
    omega.bottomLeftCorner(d, d) = -PhaseMat::Identity(d, d);
    return (s.jacobian.transpose() * omega * s.jacobian - omega).cwiseAbs().maxCoeff();
}

std::size_t PhaseTable::time_index(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    throw DomainError("time " + std::to_string(t) + " is not tabulated (horizon " +
                      (times.empty() ? std::string("empty") : std::to_string(times.back())) + ")");
}

std::vector<int> eta_bins_in_box(const PeriodicGrid& grid, double h, const Vec& lo, const Vec& hi) {
    std::vector<int> bins;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const Vec eta = h * grid.wavevector(m);
        bool inside = true;
        for (int a = 0; a < grid.dim(); ++a) inside = inside && eta[a] >= lo[a] && eta[a] <= hi[a];
        if (inside) bins.push_back(static_cast<int>(m));
    }
    return bins;
}

double phase_at(const HamiltonianFlow& flow, double t, const Vec& x, const Vec& eta, const Vec& seed_x0, int steps,
                Vec* x0_out) {
    Vec x0 = seed_x0;
    FlowState s = flow.evolve(x0, eta, t, steps);
    for (int it = 0; it < 50; ++it) {
        const Vec r = s.x - x;
        if (r.norm() <= 1e-13 * (1.0 + x.norm())) break;
        const Mat J = s.dx_dx0();
        x0 -= Eigen::MatrixXd(J).partialPivLu().solve(Eigen::VectorXd(r));
        s = flow.evolve(x0, eta, t, steps);
    }
    if ((s.x - x).norm() > 1e-9 * (1.0 + x.norm())) throw NoSolutionError("ray inversion did not converge");
    if (x0_out) *x0_out = x0;
    // First-order correction for the residual offset of the ray end point.
    return s.phase + s.xi.dot(x - s.x);
}

PhaseTable solve_eikonal(const SymbolField& a_in, const std::vector<double>& times, const PeriodicGrid& grid, double h,
                         const std::vector<int>& eta_bins, double dt) {
    if (times.empty()) throw DomainError("no times requested");
    if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
        throw DomainError("times must be non-negative and sorted");
    if (eta_bins.empty()) throw DomainError("no frequencies requested");
    const int d = grid.dim();
    HamiltonianFlow flow(a_in, dt, times.back() > 0 ? times.back() : 1.0);
    const auto& a = flow.hamiltonian();
    if (a.x_dim != d) throw DimensionError("Hamiltonian dimension does not match the grid");

    PhaseTable table{a, grid, h, times, {}, eta_bins, {}, {}, {}, {}, 0.0, 0.0, HUGE_VAL};
    for (int b : eta_bins) table.etas.push_back(h * grid.wavevector(static_cast<std::size_t>(b)));
    const auto ne = static_cast<Eigen::Index>(eta_bins.size());
    const auto nx = static_cast<Eigen::Index>(grid.size());
    const std::size_t nt = times.size();
    table.phase.assign(nt, Eigen::MatrixXd(ne, nx));
    table.amplitude.assign(nt, Eigen::MatrixXd(ne, nx));
    table.grad_x.assign(nt, std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(d), Eigen::MatrixXd(ne, nx)));
    table.grad_eta.assign(nt, std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(d), Eigen::MatrixXd(ne, nx)));
    const double nyq = grid.nyquist(h);
    const double L = grid.period();

    // Ray states: rays[e][j] at the current time.
    std::vector<std::vector<FlowState>> snap(nt, std::vector<FlowState>(static_cast<std::size_t>(nx)));
    for (Eigen::Index e = 0; e < ne; ++e) {
        const Vec& eta = table.etas[static_cast<std::size_t>(e)];
        for (Eigen::Index j = 0; j < nx; ++j) {
            FlowState s = flow.start(grid.point(static_cast<std::size_t>(j)), eta);
            double now = 0.0;
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const double span = times[ti] - now;
                if (span > 0) {
                    const int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
                    for (int k = 0; k < steps; ++k) {
                        flow.advance(s, span / steps);
                        const double sv = min_singular(s.dx_dx0());
                        table.min_singular_value = std::min(table.min_singular_value, sv);
                        if (sv < kCausticThreshold)
                            throw CausticError("caustic at t = " + std::to_string(now + (k + 1) * span / steps) +
                                               ": smallest singular value of dx/dx0 is " + std::to_string(sv));
                        if (s.xi.cwiseAbs().maxCoeff() > nyq)
                            throw DomainEscapeError("characteristic leaves the resolved frequency box |xi| <= " +
                                                    std::to_string(nyq));
                    }
                    now = times[ti];
                }
                snap[ti][static_cast<std::size_t>(j)] = s;
            }
        }

        for (std::size_t ti = 0; ti < nt; ++ti) {
            const auto& rays = snap[ti];
            if (d == 1) {
                // Rays from the grid points form a monotone lift of the circle;
                // extend by whole periods and Hermite-interpolate in x.
                double shift_lo = HUGE_VAL, shift_hi = -HUGE_VAL;
                for (Eigen::Index j = 0; j < nx; ++j) {
                    const double disp = rays[static_cast<std::size_t>(j)].x[0] - grid.point(static_cast<std::size_t>(j))[0];
                    shift_lo = std::min(shift_lo, disp);
                    shift_hi = std::max(shift_hi, disp);
                }
                const int kmin = static_cast<int>(std::floor(-shift_hi / L)) - 1;
                const int kmax = static_cast<int>(std::ceil(-shift_lo / L)) + 1;
                struct Node { double x, phi, xi, x0, jac, dxi; };
                std::vector<Node> nodes;
                for (int k = kmin; k <= kmax; ++k)
                    for (Eigen::Index j = 0; j < nx; ++j) {
                        const auto& r = rays[static_cast<std::size_t>(j)];
                        nodes.push_back({r.x[0] + k * L, r.phase + k * L * eta[0], r.xi[0],
                                         grid.point(static_cast<std::size_t>(j))[0] + k * L, r.jacobian(0, 0),
                                         r.jacobian(1, 0)});
                    }
                for (std::size_t i = 1; i < nodes.size(); ++i)
                    if (!(nodes[i].x > nodes[i - 1].x)) throw CausticError("ray ordering lost: caustic inside the horizon");
                for (Eigen::Index j = 0; j < nx; ++j) {
                    const double x = grid.point(static_cast<std::size_t>(j))[0];
                    auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                                               [](double v, const Node& n) { return v < n.x; });
                    if (it == nodes.begin() || it == nodes.end()) throw DomainEscapeError("ray lift does not cover the grid");
                    const Node& n1 = *it;
                    const Node& n0 = *(it - 1);
                    const double span = n1.x - n0.x;
                    const double s = (x - n0.x) / span;
                    const double phi = hermite(s, span, n0.phi, n1.phi, n0.xi, n1.xi);
                    const double xi = hermite(s, span, n0.xi, n1.xi, n0.dxi / n0.jac, n1.dxi / n1.jac);
                    const double x0 = hermite(s, span, n0.x0, n1.x0, 1.0 / n0.jac, 1.0 / n1.jac);
                    const double jac = (1 - s) * n0.jac + s * n1.jac;
                    table.phase[ti](e, j) = phi;
                    table.grad_x[ti][0](e, j) = xi;
                    table.grad_eta[ti][0](e, j) = x0;
                    table.amplitude[ti](e, j) = 1.0 / std::sqrt(std::abs(jac));
                }
            } else {
                for (Eigen::Index j = 0; j < nx; ++j) {
                    const Vec x = grid.point(static_cast<std::size_t>(j));
                    // Seed with the ray that ended nearest to x.
                    Vec seed = x;
                    double best = HUGE_VAL;
                    for (Eigen::Index i = 0; i < nx; ++i) {
                        const double dist = (rays[static_cast<std::size_t>(i)].x - x).norm();
                        if (dist < best) {
                            best = dist;
                            seed = grid.point(static_cast<std::size_t>(i));
                        }
                    }
                    Vec x0;
                    const double phi = phase_at(flow, times[ti], x, eta, seed, 0, &x0);
                    const FlowState r = flow.evolve(x0, eta, times[ti]);
                    table.phase[ti](e, j) = phi;
                    for (int c = 0; c < d; ++c) {
                        table.grad_x[ti][static_cast<std::size_t>(c)](e, j) = r.xi[c];
                        table.grad_eta[ti][static_cast<std::size_t>(c)](e, j) = x0[c];
                    }
                    table.amplitude[ti](e, j) = 1.0 / std::sqrt(std::abs(Eigen::MatrixXd(r.dx_dx0()).determinant()));
                }
            }
        }
    }

    // Eikonal residual at a deterministic sample of lattice points: d_t phi
    // by a five-point difference of direct ray inversions, d_x phi from the
    // table.
    const int samples = 6;
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double t = times[ti];
        if (t <= 0.0) continue;
        const double delta = std::min(1e-3, 0.25 * t);
        const int steps = std::max(1, static_cast<int>(std::ceil((t + 2 * delta) / dt)));
        HamiltonianFlow probe(a, dt, t + 2 * delta);
        for (int si = 0; si < samples; ++si) {
            const auto e = static_cast<Eigen::Index>((si * 7919L) % ne);
            const auto j = static_cast<Eigen::Index>((si * 104729L + nx / 3) % nx);
            const Vec x = grid.point(static_cast<std::size_t>(j));
            const Vec& eta = table.etas[static_cast<std::size_t>(e)];
            Vec seed(d);
            for (int c = 0; c < d; ++c) seed[c] = table.grad_eta[ti][static_cast<std::size_t>(c)](e, j);
            double ph[5];
            for (int k = -2; k <= 2; ++k) ph[k + 2] = phase_at(probe, t + k * delta, x, eta, seed, steps);
            const double dphi = (ph[0] - 8 * ph[1] + 8 * ph[3] - ph[4]) / (12 * delta);
            Vec xi(d);
            for (int c = 0; c < d; ++c) xi[c] = table.grad_x[ti][static_cast<std::size_t>(c)](e, j);
            table.eikonal_residual = std::max(table.eikonal_residual, std::abs(dphi + a.real(x, xi)));
            table.resample_error = std::max(table.resample_error, std::abs(ph[2] - table.phase[ti](e, j)));
        }
    }
    return table;
}

GridFunction apply_parametrix(const PhaseTable& table, const GridFunction& u0, double t) {
    const auto& grid = u0.grid();
    if (!(grid == table.grid)) throw DimensionError("parametrix table and data live on different grids");
    if (std::abs(u0.h() - table.h) > 1e-14 * table.h) throw DimensionError("parametrix table was built for another h");
    const std::size_t ti = table.time_index(t);
    const double h = u0.h();
    const int d = grid.dim();

    Eigen::VectorXcd spec = u0.values();
    fft::forward(grid, spec);
    // u-hat(k_m) = dx^d sum_j u_j e^{-i k_m x_j}.
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const Vec k = grid.wavevector(m);
        spec[static_cast<Eigen::Index>(m)] *= grid.cell_volume() * std::polar(1.0, -k.sum() * grid.origin());
    }
    double covered = 0.0;
    for (int b : table.eta_bins) covered += std::norm(spec[b]);
    const double total = spec.squaredNorm();
    if (total > 0 && (total - covered) > 1e-20 * total + 1e-24)
        if (std::sqrt((total - covered) / total) > 1e-8)
            throw DomainError("data has frequency content outside the tabulated eta lattice (relative " +
                              std::to_string(std::sqrt((total - covered) / total)) + ")");

    const double vol = std::pow(grid.period(), d);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()));
    const auto& phase = table.phase[ti];
    const auto& amp = table.amplitude[ti];
    for (Eigen::Index e = 0; e < phase.rows(); ++e) {
        const cplx c = spec[table.eta_bins[static_cast<std::size_t>(e)]] / vol;
        if (c == 0.0) continue;
        for (Eigen::Index j = 0; j < phase.cols(); ++j) out[j] += c * amp(e, j) * std::polar(1.0, phase(e, j) / h);
    }
    return GridFunction(grid, h, std::move(out));
}

GridFunction reference_propagator(const SymbolField& a, const GridFunction& u0, double t, int steps) {
    const auto& grid = u0.grid();
    const double h = u0.h();
    quant::check_resolution(a, grid, h);
    if (!a.is_real) {
        static bool warned = false;
        if (!warned) {
            std::clog << "warning: reference_propagator with a non-real symbol is not unitary\n";
            warned = true;
        }
    }
    if (t == 0.0) return u0;
    if (a.is_split()) {
        std::vector<std::function<cplx(const Vec&)>> kinetic, potential;
        for (const auto& term : a.terms) {
            if (term.frequency)
                kinetic.push_back(term.frequency);
            else if (term.spatial)
                potential.push_back(term.spatial);
            else
                kinetic.push_back([](const Vec&) { return cplx(1.0); });
        }
        const auto M = static_cast<Eigen::Index>(grid.size());
        Eigen::VectorXcd kin(M), pot = Eigen::VectorXcd::Zero(M);
        for (Eigen::Index m = 0; m < M; ++m) {
            const Vec xi = h * grid.wavevector(static_cast<std::size_t>(m));
            cplx v = 0.0;
            for (const auto& k : kinetic) v += k(xi);
            kin[m] = v;
        }
        for (Eigen::Index j = 0; j < M; ++j) {
            const Vec x = grid.point(static_cast<std::size_t>(j));
            for (const auto& p : potential) pot[j] += p(x);
        }
        Eigen::VectorXcd u = u0.values();
        const cplx I(0.0, 1.0);
        if (potential.empty()) {
            fft::forward(grid, u);
            for (Eigen::Index m = 0; m < M; ++m) u[m] *= std::exp(-I * t * kin[m] / h);
            fft::backward(grid, u);
            u /= static_cast<double>(M);
            return GridFunction(grid, h, std::move(u));
        }
        if (steps < 1) throw DomainError("split-step propagation needs at least one step");
        const double tau = t / steps;
        Eigen::VectorXcd half_pot(M), full_kin(M);
        for (Eigen::Index j = 0; j < M; ++j) half_pot[j] = std::exp(-I * 0.5 * tau * pot[j] / h);
        for (Eigen::Index m = 0; m < M; ++m) full_kin[m] = std::exp(-I * tau * kin[m] / h) / static_cast<double>(M);
        for (int s = 0; s < steps; ++s) {
            u.array() *= half_pot.array();
            fft::forward(grid, u);
            u.array() *= full_kin.array();
            fft::backward(grid, u);
            u.array() *= half_pot.array();
        }
        return GridFunction(grid, h, std::move(u));
    }
    const Eigen::MatrixXcd A = quant::weyl_matrix(a, h, grid);
    const cplx I(0.0, 1.0);
    if (a.is_real) {
        const Eigen::MatrixXcd herm = 0.5 * (A + A.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
        const Eigen::VectorXcd phases = (-I * t / h * es.eigenvalues().cast<cplx>()).array().exp();
        const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * u0.values();
        return GridFunction(grid, h, es.eigenvectors() * phases.cwiseProduct(coeffs));
    }
    const Eigen::MatrixXcd U = (-I * t / h * A).exp();
    return GridFunction(grid, h, U * u0.values());
}

GridFunction duhamel_solve(const SymbolField& a, const GridFunction& u0, const Source& f, double t, int intervals,
                           int steps_per_unit_time) {
    if (intervals < 1) throw DomainError("Duhamel quadrature needs at least one interval");
    auto steps_for = [&](double span) {
        return std::max(1, static_cast<int>(std::ceil(std::abs(span) * steps_per_unit_time)));
    };
    GridFunction u = reference_propagator(a, u0, t, steps_for(t));
    const double ds = t / intervals;
    const cplx I(0.0, 1.0);
    for (int i = 0; i < intervals; ++i) {
        const double s = (i + 0.5) * ds;
        GridFunction src = f(s);
        require_compatible(src, u0);
        u += (I * ds) * reference_propagator(a, src, t - s, steps_for(t - s));
    }
    return u;
}

}  // namespace qmr::prop
