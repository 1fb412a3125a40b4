#include "qmr/quasimodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmr/errors.hpp"
#include "qmr/quadrature.hpp"
#include "qmr/quantization.hpp"

namespace qmr::modes {

namespace {

constexpr double kPi = std::numbers::pi;

double legendre(int l, double x) {
    double prev = 1.0, cur = x;
    if (l == 0) return prev;
    for (int k = 1; k < l; ++k) {
        const double next = ((2 * k + 1) * x * cur - k * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

double chebyshev_u(int l, double x) {
    double prev = 1.0, cur = 2 * x;
    if (l == 0) return prev;
    for (int k = 1; k < l; ++k) {
        const double next = 2 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Normalized Hermite function psi_k(y), recurrence carried with an explicit
// exponent so that the Gaussian factor is applied only at the end.
double hermite_function(int k, double y) {
    double prev = 0.0;
    double cur = std::pow(kPi, -0.25);
    double log_scale = 0.0;
    for (int j = 0; j < k; ++j) {
        const double next = std::sqrt(2.0 / (j + 1)) * y * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e150) {
            cur /= mag;
            prev /= mag;
            log_scale += std::log(mag);
        }
    }
    if (cur == 0.0) return 0.0;
    const double log_mag = std::log(std::abs(cur)) + log_scale - 0.5 * y * y;
    return std::copysign(std::exp(log_mag), cur);
}

}  // namespace

const char* to_string(HarmonicKind k) { return k == HarmonicKind::zonal ? "zonal" : "highest_weight"; }

SphereHarmonic::SphereHarmonic(HarmonicKind kind, int degree, int sphere_dim)
    : kind_(kind), degree_(degree), sphere_dim_(sphere_dim) {
    if (degree < 1) throw DomainError("harmonic degree must be >= 1, got " + std::to_string(degree));
    if (sphere_dim != 2 && sphere_dim != 3) throw DomainError("sphere dimension must be 2 or 3");
    if (kind == HarmonicKind::highest_weight && sphere_dim != 2)
        throw DomainError("highest-weight harmonics are provided on S^2 only");

    double norm2 = 0.0;
    if (sphere_dim == 2) {
        const auto rule = quad::gauss_legendre(degree + 1);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = rule.nodes[i];
            const double f = kind == HarmonicKind::zonal ? std::pow(legendre(degree, x), 2)
                                                         : std::exp(degree * std::log1p(-x * x));
            norm2 += rule.weights[i] * f;
        }
        norm2 *= 2 * kPi;
    } else {
        const auto rule = quad::gauss_chebyshev_second(degree + 1);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            norm2 += rule.weights[i] * std::pow(chebyshev_u(degree, rule.nodes[i]), 2);
        norm2 *= 4 * kPi;
    }
    norm_ = 1.0 / std::sqrt(norm2);
}

double SphereHarmonic::h() const { return 1.0 / std::sqrt(static_cast<double>(degree_) * (degree_ + sphere_dim_ - 1)); }

double SphereHarmonic::eigen_defect() const {
    const double hh = h();
    return std::abs(hh * hh * degree_ * (degree_ + sphere_dim_ - 1) - 1.0);
}

double SphereHarmonic::zonal_profile(double c) const {
    c = std::clamp(c, -1.0, 1.0);
    return sphere_dim_ == 2 ? legendre(degree_, c) : chebyshev_u(degree_, c);
}

cplx SphereHarmonic::operator()(const Eigen::VectorXd& p) const {
    if (p.size() != sphere_dim_ + 1) throw DimensionError("point does not live in R^" + std::to_string(sphere_dim_ + 1));
    if (kind_ == HarmonicKind::zonal) return norm_ * zonal_profile(p[p.size() - 1]);
    const double r = std::hypot(p[0], p[1]);
    if (r == 0.0) return 0.0;
    const double log_mag = std::log(norm_) + degree_ * std::log(r);
    const double phase = degree_ * std::atan2(p[1], p[0]);
    return std::polar(std::exp(log_mag), phase);
}

double SphereHarmonic::quadrature_l2_norm() const {
    const int nt = 2 * degree_ + 16;
    const auto rule = quad::gauss_legendre(nt);
    const int nphi = kind_ == HarmonicKind::zonal ? 1 : 4;
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double theta = 0.5 * kPi * (rule.nodes[i] + 1.0);
        const double w = 0.5 * kPi * rule.weights[i];
        double ring = 0.0;
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2 * kPi * j / nphi;
            Eigen::VectorXd p(sphere_dim_ + 1);
            if (sphere_dim_ == 2) {
                p << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
            } else {
                p << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), 0.0, std::cos(theta);
            }
            ring += std::norm((*this)(p)) / nphi;
        }
        // Surface measure of the latitude sphere at polar angle theta.
        const double fiber = sphere_dim_ == 2 ? 2 * kPi * std::sin(theta) : 4 * kPi * std::pow(std::sin(theta), 2);
        total += w * fiber * ring;
    }
    return std::sqrt(total);
}

HLadder HLadder::from_degrees(const std::vector<int>& degrees, int sphere_dim) {
    HLadder ladder;
    ladder.degrees = degrees;
    for (int l : degrees) {
        if (l < 1) throw DomainError("ladder degrees must be >= 1");
        ladder.values.push_back(1.0 / std::sqrt(static_cast<double>(l) * (l + sphere_dim - 1)));
    }
    ladder.provenance = "degrees on S^" + std::to_string(sphere_dim);
    ladder.validate();
    return ladder;
}

HLadder HLadder::doubling_degrees(int first, int last, int sphere_dim) {
    if (first < 1 || last < first) throw DomainError("invalid degree range");
    std::vector<int> d;
    for (int l = first; l <= last; l *= 2) d.push_back(l);
    return from_degrees(d, sphere_dim);
}

HLadder HLadder::dyadic(double j_min, double j_max, double step) {
    if (!(step > 0) || j_max < j_min) throw DomainError("invalid dyadic ladder range");
    HLadder ladder;
    const int count = static_cast<int>(std::floor((j_max - j_min) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) ladder.values.push_back(std::exp2(-(j_min + i * step)));
    ladder.provenance = "dyadic";
    ladder.validate();
    return ladder;
}

HLadder HLadder::geometric(double h_max, double ratio, int count) {
    if (!(h_max > 0) || !(ratio > 0 && ratio < 1) || count < 1) throw DomainError("invalid geometric ladder");
    HLadder ladder;
    for (int i = 0; i < count; ++i) ladder.values.push_back(h_max * std::pow(ratio, i));
    ladder.provenance = "geometric";
    return ladder;
}

void HLadder::validate() const {
    if (values.empty()) throw DomainError("empty h-ladder");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw DomainError("h-ladder values must be positive");
        if (i > 0 && !(values[i] < values[i - 1])) throw DomainError("h-ladder must be strictly decreasing");
    }
}

void HLadder::validate_for_fit(std::size_t min_rungs) const {
    validate();
    if (values.size() < min_rungs)
        throw DomainError("h-ladder has " + std::to_string(values.size()) + " rungs; fits need at least " +
                          std::to_string(min_rungs));
}

int oscillator_index(double energy, double h) {
    return std::max(0, static_cast<int>(std::lround((energy / h - 1.0) / 2.0)));
}

GridFunction oscillator_mode(int k, double h, const PeriodicGrid& grid) {
    if (grid.dim() != 1) throw DimensionError("oscillator modes live on 1D grids");
    if (k < 0) throw DomainError("Hermite index must be >= 0");
    const double sh = std::sqrt(h);
    GridFunction u(grid, h);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.point(i)[0];
        u[i] = hermite_function(k, x / sh) / std::sqrt(sh);
    }
    // Mass near the seam means the grid truncates the mode.
    const double band = 0.05 * grid.period();
    double tail = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.point(i)[0];
        if (x - grid.origin() < band || grid.origin() + grid.period() - x < band) tail = std::max(tail, std::abs(u[i]));
    }
    if (tail > 1e-8)
        throw DomainError("grid of period " + std::to_string(grid.period()) + " truncates the oscillator mode k = " +
                          std::to_string(k) + " (tail " + std::to_string(tail) + "); enlarge the domain");
    u.normalize();
    return u;
}

GridFunction coherent_state(const Vec& x0, const Vec& xi0, double h, const PeriodicGrid& grid) {
    const int n = grid.dim();
    if (x0.size() != n || xi0.size() != n) throw DimensionError("coherent state centre does not match the grid");
    double inside = 1.0;
    for (int a = 0; a < n; ++a) {
        const double lo = x0[a] - grid.origin();
        const double hi = grid.origin() + grid.period() - x0[a];
        if (lo <= 0 || hi <= 0) throw PlacementError("coherent state centre lies outside the grid cell");
        inside *= 1.0 - 0.5 * std::erfc(lo / std::sqrt(h)) - 0.5 * std::erfc(hi / std::sqrt(h));
    }
    if (1.0 - inside > 1e-10)
        throw PlacementError("coherent state leaks " + std::to_string(1.0 - inside) + " of its mass past the seam");
    const double nyq = grid.nyquist(h);
    for (int a = 0; a < n; ++a)
        if (std::abs(xi0[a]) + 8 * std::sqrt(h) > nyq)
            throw PlacementError("coherent state frequency lies outside the resolved band |xi| <= " + std::to_string(nyq));

    const double amp = std::pow(kPi * h, -0.25 * n);
    GridFunction u = sample(grid, h, [&](const Vec& x) {
        return amp * std::exp(cplx(-(x - x0).squaredNorm() / (2 * h), x.dot(xi0) / h));
    });
    u.normalize();
    return u;
}

double quasimode_defect(const SymbolField& sym, const GridFunction& u) {
    return quant::quantize_weyl(sym, u.h(), u).l2_norm();
}

}  // namespace qmr::modes
