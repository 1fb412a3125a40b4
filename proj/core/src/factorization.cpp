#include "qmr/factorization.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "qmr/errors.hpp"

namespace qmr::quant {

namespace {

constexpr int kNewtonIterations = 50;
constexpr double kCharTol = 1e-8;
constexpr double kA1Tol = 1e-6;
constexpr double kDefiniteTol = 1e-6;

struct RootSolver {
    SymbolField sym;
    int axis;
    double scale;

    double f(const Vec& x, const Vec& rest, double t) const { return sym.real(x, insert_axis(rest, axis, t)); }
    double df(const Vec& x, const Vec& rest, double t) const {
        return sym.grad_xi(x, insert_axis(rest, axis, t))[axis];
    }

    std::optional<double> newton(const Vec& x, const Vec& rest, double seed) const {
        double t = seed;
        for (int it = 0; it < kNewtonIterations; ++it) {
            const double v = f(x, rest, t);
            if (std::abs(v) <= 1e-14 * scale) return t;
            const double d = df(x, rest, t);
            if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
            const double step = v / d;
            t -= step;
            if (!std::isfinite(t)) return std::nullopt;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
        }
        if (std::abs(f(x, rest, t)) <= 1e-10 * scale) return t;
        return std::nullopt;
    }

    std::optional<double> bisect(const Vec& x, const Vec& rest, double seed, double radius) const {
        const double f0 = f(x, rest, seed);
        if (f0 == 0.0) return seed;
        constexpr int scan = 64;
        for (int k = 1; k <= scan; ++k) {
            const double r = radius * k / scan;
            for (double sgn : {1.0, -1.0}) {
                const double prev = seed + sgn * radius * (k - 1) / scan;
                const double cur = seed + sgn * r;
                double lo = prev, hi = cur;
                double flo = f(x, rest, lo), fhi = f(x, rest, hi);
                if (flo == 0.0) return lo;
                if ((flo < 0) == (fhi < 0)) continue;
                for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * (1 + std::abs(lo)); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(x, rest, mid);
                    if ((fm < 0) == (flo < 0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        return std::nullopt;
    }
};

// First-order prediction of the root from the base point, so that Newton
// stays on the branch through (x0, xi0).
double predict(const SymbolField& sym, const Vec& x0, const Vec& xi0, int axis, const Vec& x, const Vec& rest) {
    const Vec gx = sym.grad_x(x0, xi0);
    const Vec gxi = sym.grad_xi(x0, xi0);
    const Vec rest0 = drop_axis(xi0, axis);
    const Vec grest = drop_axis(gxi, axis);
    double shift = gx.dot(x - x0);
    if (rest.size() > 0) shift += grest.dot(rest - rest0);
    return xi0[axis] - shift / gxi[axis];
}

}  // namespace

Vec drop_axis(const Vec& xi, int axis) {
    Vec out(xi.size() - 1);
    for (Eigen::Index i = 0, j = 0; i < xi.size(); ++i)
        if (i != axis) out[j++] = xi[i];
    return out;
}

Vec insert_axis(const Vec& xi_rest, int axis, double value) {
    Vec out(xi_rest.size() + 1);
    for (Eigen::Index i = 0, j = 0; i < out.size(); ++i) out[i] = i == axis ? value : xi_rest[j++];
    return out;
}

double symbol_scale(const SymbolField& sym, const Vec& x, const Vec& xi) {
    return std::max(1.0, sym.grad_xi(x, xi).norm() * xi.norm());
}

FactorizationResult symbol_factor(const SymbolField& sym_in, const Vec& x0, const Vec& xi0, int axis) {
    const SymbolField sym = with_numeric_derivatives(sym_in);
    if (x0.size() != sym.x_dim || xi0.size() != sym.xi_dim)
        throw DimensionError("base point shape does not match symbol '" + sym.name + "'");
    if (axis < 0 || axis >= sym.xi_dim) throw DimensionError("factorization axis out of range");
    if (!sym.is_real) throw DomainError("symbol_factor needs a real symbol");

    const double scale = symbol_scale(sym, x0, xi0);
    const double p0 = sym.real(x0, xi0);
    if (std::abs(p0) > kCharTol * scale)
        throw DomainError("base point is off the characteristic set: |p| = " + std::to_string(std::abs(p0)));
    const double d0 = sym.grad_xi(x0, xi0)[axis];
    if (std::abs(d0) < kA1Tol * scale)
        throw DegenerateError("condition (A1) fails along axis " + std::to_string(axis + 1) + " for symbol '" +
                              sym.name + "': d p / d xi = " + std::to_string(d0));

    auto solver = std::make_shared<RootSolver>(RootSolver{sym, axis, scale});
    auto solve = [solver, x0, xi0, axis](const Vec& x, const Vec& rest, double radius) -> std::optional<double> {
        const double seed = predict(solver->sym, x0, xi0, axis, x, rest);
        if (auto t = solver->newton(x, rest, seed)) return t;
        return solver->bisect(x, rest, seed, radius);
    };

    // Shrink a cube around the base point until every probe converges and
    // keeps |d p / d xi_axis| above half its base value.
    const int xd = sym.x_dim, rd = sym.xi_dim - 1;
    const int D = xd + rd;
    double r = 0.5;
    bool certified = false;
    for (int shrink = 0; shrink < 16 && !certified; ++shrink, r *= 0.5) {
        certified = true;
        int probes = 1;
        for (int i = 0; i < D; ++i) probes *= 3;
        for (int pidx = 0; pidx < probes && certified; ++pidx) {
            Vec x = x0;
            Vec rest = drop_axis(xi0, axis);
            int code = pidx;
            for (int i = 0; i < D; ++i) {
                const double off = (code % 3 - 1) * r;
                code /= 3;
                if (i < xd)
                    x[i] += off;
                else
                    rest[i - xd] += off;
            }
            const auto t = solve(x, rest, 4 * r + 1.0);
            if (!t) {
                certified = false;
                break;
            }
            const double d = solver->df(x, rest, *t);
            if (!(std::abs(d) >= 0.5 * std::abs(d0)) || (d < 0) != (d0 < 0)) certified = false;
            // e must stay away from zero across the xi_axis range.
            for (double s : {-r, r}) {
                const double v = solver->f(x, rest, *t + s) / s;
                if (!(std::abs(v) >= 0.25 * std::abs(d0))) certified = false;
            }
        }
        if (certified) break;
    }
    if (!certified) throw NoSolutionError("root finding does not converge on any box around the base point");

    FactorizationResult out;
    out.axis = axis;
    out.x0 = x0;
    out.xi0 = xi0;
    out.scale = scale;
    out.valid_box.x_lo = x0.array() - r;
    out.valid_box.x_hi = x0.array() + r;
    out.valid_box.xi_lo = xi0.array() - r;
    out.valid_box.xi_hi = xi0.array() + r;

    const double radius = 4 * r + 1.0;
    auto a_value = [solve, radius](const Vec& x, const Vec& rest) {
        const auto t = solve(x, rest, radius);
        if (!t) throw NoSolutionError("no root of the symbol along the solved axis at this point");
        return *t;
    };

    SymbolField a;
    a.name = "a[" + sym.name + "]";
    a.x_dim = xd;
    a.xi_dim = rd;
    a.support = std::nullopt;
    a.eval = [a_value](const Vec& x, const Vec& rest) { return cplx(a_value(x, rest)); };
    // Implicit differentiation of p(x, rest, a(x, rest)) = 0.
    a.grad_xi = [sym, axis, a_value](const Vec& x, const Vec& rest) {
        const Vec g = sym.grad_xi(x, insert_axis(rest, axis, a_value(x, rest)));
        return Vec(-drop_axis(g, axis) / g[axis]);
    };
    a.grad_x = [sym, axis, a_value](const Vec& x, const Vec& rest) {
        const Vec xi = insert_axis(rest, axis, a_value(x, rest));
        return Vec(-sym.grad_x(x, xi) / sym.grad_xi(x, xi)[axis]);
    };
    a.hess_xi = [sym, axis, a_value, rd](const Vec& x, const Vec& rest) {
        const Vec xi = insert_axis(rest, axis, a_value(x, rest));
        const Vec g = sym.grad_xi(x, xi);
        const Mat H = sym.hess_xi(x, xi);
        const double pi = g[axis];
        Vec da(rd);
        for (int j = 0, jj = 0; j < rd + 1; ++j)
            if (j != axis) da[jj++] = -g[j] / pi;
        Mat out(rd, rd);
        for (int j = 0, jj = 0; j < rd + 1; ++j) {
            if (j == axis) continue;
            for (int k = 0, kk = 0; k < rd + 1; ++k) {
                if (k == axis) continue;
                out(jj, kk) = -(H(j, k) + H(j, axis) * da[kk] + H(axis, k) * da[jj] + H(axis, axis) * da[jj] * da[kk]) / pi;
                ++kk;
            }
            ++jj;
        }
        return out;
    };
    out.a = with_numeric_derivatives(std::move(a));

    SymbolField e;
    e.name = "e[" + sym.name + "]";
    e.x_dim = xd;
    e.xi_dim = sym.xi_dim;
    e.eval = [sym, axis, a_value](const Vec& x, const Vec& xi) {
        const Vec rest = drop_axis(xi, axis);
        const double root = a_value(x, rest);
        const double gap = xi[axis] - root;
        if (std::abs(gap) > 1e-6 * (1.0 + std::abs(root))) return cplx(sym.real(x, xi) / gap);
        // Removable singularity: p / (xi_i - a) -> d p / d xi_i.
        return cplx(sym.grad_xi(x, insert_axis(rest, axis, 0.5 * (xi[axis] + root)))[axis]);
    };
    out.elliptic_factor = with_numeric_derivatives(std::move(e));
    return out;
}

const char* to_string(Curvature c) {
    switch (c) {
        case Curvature::positive_definite: return "positive_definite";
        case Curvature::non_degenerate: return "non_degenerate";
        case Curvature::degenerate: return "degenerate";
    }
    return "?";
}

bool AdmissibilityReport::all_a1() const {
    for (const auto& p : points)
        if (!p.a1) return false;
    return true;
}

bool AdmissibilityReport::all_positive() const {
    for (const auto& p : points)
        if (p.curvature != Curvature::positive_definite) return false;
    return !points.empty();
}

AdmissibilityReport admissibility_check(const SymbolField& sym_in, const std::vector<std::pair<Vec, Vec>>& samples) {
    const SymbolField sym = with_numeric_derivatives(sym_in);
    AdmissibilityReport report;
    for (const auto& [x, xi] : samples) {
        const double scale = symbol_scale(sym, x, xi);
        const double pv = sym.real(x, xi);
        if (std::abs(pv) > kCharTol * scale)
            throw DomainError("sample is off the characteristic set: |p| = " + std::to_string(std::abs(pv)));
        AdmissibilityPoint pt;
        pt.x = x;
        pt.xi = xi;
        const Vec g = sym.grad_xi(x, xi);
        pt.a1 = g.norm() >= kA1Tol * scale;
        g.cwiseAbs().maxCoeff(&pt.axis);
        if (!pt.a1) {
            pt.curvature = Curvature::degenerate;
            report.points.push_back(pt);
            continue;
        }
        const int rd = sym.xi_dim - 1;
        if (rd == 0) {
            // A point set has no curvature to speak of.
            pt.second_form = Mat::Zero(0, 0);
            pt.eigenvalues = Vec::Zero(0);
            pt.curvature = Curvature::positive_definite;
            report.points.push_back(pt);
            continue;
        }
        const auto fac = symbol_factor(sym, x, xi, pt.axis);
        const double orient = g[pt.axis] > 0 ? 1.0 : -1.0;
        pt.second_form = -orient * fac.a.hess_xi(x, drop_axis(xi, pt.axis));
        const Mat sym_form = 0.5 * (pt.second_form + pt.second_form.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(sym_form);
        pt.eigenvalues = es.eigenvalues();
        const double lo = pt.eigenvalues.minCoeff();
        const double smallest = pt.eigenvalues.cwiseAbs().minCoeff();
        const double tol = kDefiniteTol * scale;
        if (lo >= tol)
            pt.curvature = Curvature::positive_definite;
        else if (smallest >= tol)
            pt.curvature = Curvature::non_degenerate;
        else
            pt.curvature = Curvature::degenerate;
        report.points.push_back(pt);
    }
    return report;
}

}  // namespace qmr::quant
