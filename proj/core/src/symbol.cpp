#include "qmr/symbol.hpp"

#include <algorithm>
#include <cmath>

#include "qmr/errors.hpp"

namespace qmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec zeros(int n) { return Vec::Zero(n); }
Mat zeros(int r, int c) { return Mat::Zero(r, c); }

Vec numeric_grad(const std::function<double(const Vec&)>& f, const Vec& at, double step) {
    Vec g(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
        const double hs = step * std::max(1.0, std::abs(at[i]));
        Vec a = at, b = at;
        a[i] += hs;
        b[i] -= hs;
        g[i] = (f(a) - f(b)) / (2 * hs);
    }
    return g;
}

// Mixed second derivatives d^2 f / du_i dv_j where u and v are the two
// arguments of f(u, v).
Mat numeric_mixed(const std::function<double(const Vec&, const Vec&)>& f, const Vec& u, const Vec& v,
                  bool same, double step) {
    Mat H(u.size(), v.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            const double hi = step * std::max(1.0, std::abs(u[i]));
            const double hj = step * std::max(1.0, std::abs(v[j]));
            if (same && i == j) {
                Vec a = u, b = u;
                a[i] += hi;
                b[i] -= hi;
                H(i, j) = (f(a, v) - 2 * f(u, v) + f(b, v)) / (hi * hi);
                continue;
            }
            auto shifted = [&](double si, double sj) {
                Vec uu = u, vv = v;
                uu[i] += si * hi;
                if (same)
                    uu[j] += sj * hj;
                else
                    vv[j] += sj * hj;
                return same ? f(uu, uu) : f(uu, vv);
            };
            H(i, j) = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4 * hi * hj);
        }
    }
    return H;
}

double rel_diff(const Mat& a, const Mat& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

PhaseBox PhaseBox::unbounded(int x_dim, int xi_dim) {
    return {Vec::Constant(x_dim, -kInf), Vec::Constant(x_dim, kInf), Vec::Constant(xi_dim, -kInf),
            Vec::Constant(xi_dim, kInf)};
}

PhaseBox PhaseBox::cube(int x_dim, int xi_dim, double x_half, double xi_half) {
    return {Vec::Constant(x_dim, -x_half), Vec::Constant(x_dim, x_half), Vec::Constant(xi_dim, -xi_half),
            Vec::Constant(xi_dim, xi_half)};
}

bool PhaseBox::contains(const Vec& x, const Vec& xi) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] < x_lo[i] || x[i] > x_hi[i]) return false;
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        if (xi[i] < xi_lo[i] || xi[i] > xi_hi[i]) return false;
    return true;
}

double PhaseBox::max_frequency() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < xi_lo.size(); ++i) m = std::max({m, std::abs(xi_lo[i]), std::abs(xi_hi[i])});
    return m;
}

bool PhaseBox::xi_bounded() const { return std::isfinite(max_frequency()); }

bool SymbolField::is_x_independent() const {
    return is_separable() && std::all_of(terms.begin(), terms.end(), [](const SeparableTerm& t) { return !t.spatial; });
}

bool SymbolField::is_split() const {
    return is_separable() &&
           std::all_of(terms.begin(), terms.end(), [](const SeparableTerm& t) { return !t.spatial || !t.frequency; });
}

SymbolField with_numeric_derivatives(SymbolField s, double step) {
    if (!s.eval) throw DomainError("symbol '" + s.name + "' has no evaluation callable");
    const SymbolEval ev = s.eval;
    if (!s.grad_x)
        s.grad_x = [ev, step](const Vec& x, const Vec& xi) {
            return numeric_grad([&](const Vec& y) { return ev(y, xi).real(); }, x, step);
        };
    if (!s.grad_xi)
        s.grad_xi = [ev, step](const Vec& x, const Vec& xi) {
            return numeric_grad([&](const Vec& e) { return ev(x, e).real(); }, xi, step);
        };
    const double h2 = std::sqrt(step) * 0.3;  // second differences want a larger step
    if (!s.hess_xi)
        s.hess_xi = [ev, h2](const Vec& x, const Vec& xi) {
            return numeric_mixed([&](const Vec& a, const Vec&) { return ev(x, a).real(); }, xi, xi, true, h2);
        };
    if (!s.hess_x)
        s.hess_x = [ev, h2](const Vec& x, const Vec& xi) {
            return numeric_mixed([&](const Vec& a, const Vec&) { return ev(a, xi).real(); }, x, x, true, h2);
        };
    if (!s.hess_x_xi)
        s.hess_x_xi = [ev, h2](const Vec& x, const Vec& xi) {
            return numeric_mixed([&](const Vec& a, const Vec& b) { return ev(a, b).real(); }, x, xi, false, h2);
        };
    return s;
}

double derivative_mismatch(const SymbolField& s, const std::vector<std::pair<Vec, Vec>>& points, double step) {
    SymbolField bare;
    bare.name = s.name;
    bare.x_dim = s.x_dim;
    bare.xi_dim = s.xi_dim;
    bare.eval = s.eval;
    const SymbolField num = with_numeric_derivatives(bare, step);
    double worst = 0.0;
    for (const auto& [x, xi] : points) {
        if (s.grad_x) worst = std::max(worst, rel_diff(s.grad_x(x, xi), num.grad_x(x, xi)));
        if (s.grad_xi) worst = std::max(worst, rel_diff(s.grad_xi(x, xi), num.grad_xi(x, xi)));
        if (s.hess_xi) worst = std::max(worst, rel_diff(s.hess_xi(x, xi), num.hess_xi(x, xi)));
        if (s.hess_x) worst = std::max(worst, rel_diff(s.hess_x(x, xi), num.hess_x(x, xi)));
        if (s.hess_x_xi) worst = std::max(worst, rel_diff(s.hess_x_xi(x, xi), num.hess_x_xi(x, xi)));
    }
    return worst;
}

SymbolField product(const SymbolField& a, const SymbolField& b) {
    if (a.x_dim != b.x_dim || a.xi_dim != b.xi_dim) throw DimensionError("symbol product of mismatched shapes");
    SymbolField out;
    out.name = a.name + "*" + b.name;
    out.x_dim = a.x_dim;
    out.xi_dim = a.xi_dim;
    out.is_real = a.is_real && b.is_real;
    auto ea = a.eval, eb = b.eval;
    out.eval = [ea, eb](const Vec& x, const Vec& xi) { return ea(x, xi) * eb(x, xi); };
    if (a.support && b.support) {
        PhaseBox box = *a.support;
        box.x_lo = box.x_lo.cwiseMax(b.support->x_lo);
        box.x_hi = box.x_hi.cwiseMin(b.support->x_hi);
        box.xi_lo = box.xi_lo.cwiseMax(b.support->xi_lo);
        box.xi_hi = box.xi_hi.cwiseMin(b.support->xi_hi);
        out.support = box;
    } else if (a.support) {
        out.support = a.support;
    } else if (b.support) {
        out.support = b.support;
    }
    if (a.is_separable() && b.is_separable()) {
        auto mul = [](const std::function<cplx(const Vec&)>& f, const std::function<cplx(const Vec&)>& g)
            -> std::function<cplx(const Vec&)> {
            if (!f) return g;
            if (!g) return f;
            return [f, g](const Vec& v) { return f(v) * g(v); };
        };
        for (const auto& ta : a.terms)
            for (const auto& tb : b.terms) out.terms.push_back({mul(ta.spatial, tb.spatial), mul(ta.frequency, tb.frequency)});
    }
    return with_numeric_derivatives(std::move(out));
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_step_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    const double da = a / (t * t);
    const double db = -b / ((1.0 - t) * (1.0 - t));
    return (da * b - a * db) / ((a + b) * (a + b));
}

double plateau(double v, double inner_lo, double inner_hi, double outer_lo, double outer_hi) {
    if (v <= outer_lo || v >= outer_hi) return 0.0;
    if (v >= inner_lo && v <= inner_hi) return 1.0;
    if (v < inner_lo) return smooth_step((v - outer_lo) / (inner_lo - outer_lo));
    return smooth_step((outer_hi - v) / (outer_hi - inner_hi));
}

namespace symbols {

SymbolField kinetic(int dim, double c) {
    SymbolField s;
    s.name = "kinetic";
    s.x_dim = s.xi_dim = dim;
    s.eval = [c](const Vec&, const Vec& xi) { return cplx(c * xi.squaredNorm()); };
    s.grad_x = [dim](const Vec&, const Vec&) { return zeros(dim); };
    s.grad_xi = [c](const Vec&, const Vec& xi) { return Vec(2 * c * xi); };
    s.hess_xi = [c, dim](const Vec&, const Vec&) { return Mat(2 * c * Mat::Identity(dim, dim)); };
    s.hess_x = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.terms = {{{}, [c](const Vec& xi) { return cplx(c * xi.squaredNorm()); }}};
    return s;
}

SymbolField kinetic_plus_potential(int dim, double c, std::function<double(const Vec&)> potential,
                                   std::function<Vec(const Vec&)> grad, std::function<Mat(const Vec&)> hess) {
    SymbolField s = kinetic(dim, c);
    s.name = "kinetic+potential";
    s.eval = [c, potential](const Vec& x, const Vec& xi) { return cplx(c * xi.squaredNorm() + potential(x)); };
    if (grad)
        s.grad_x = [grad](const Vec& x, const Vec&) { return grad(x); };
    else
        s.grad_x = {};
    if (hess)
        s.hess_x = [hess](const Vec& x, const Vec&) { return hess(x); };
    else
        s.hess_x = {};
    s.terms.push_back({[potential](const Vec& x) { return cplx(potential(x)); }, {}});
    return with_numeric_derivatives(std::move(s));
}

SymbolField sphere(int dim) {
    SymbolField s = kinetic(dim, 1.0);
    s.name = "sphere";
    s.eval = [](const Vec&, const Vec& xi) { return cplx(xi.squaredNorm() - 1.0); };
    s.terms = {{{}, [](const Vec& xi) { return cplx(xi.squaredNorm() - 1.0); }}};
    return s;
}

SymbolField hyperbola() {
    SymbolField s;
    s.name = "hyperbola";
    s.x_dim = s.xi_dim = 2;
    s.eval = [](const Vec&, const Vec& xi) { return cplx(xi[0] * xi[0] - xi[1] * xi[1] - 1.0); };
    s.grad_x = [](const Vec&, const Vec&) { return zeros(2); };
    s.grad_xi = [](const Vec&, const Vec& xi) {
        Vec g(2);
        g << 2 * xi[0], -2 * xi[1];
        return g;
    };
    s.hess_xi = [](const Vec&, const Vec&) {
        Mat H = zeros(2, 2);
        H(0, 0) = 2;
        H(1, 1) = -2;
        return H;
    };
    s.hess_x = [](const Vec&, const Vec&) { return zeros(2, 2); };
    s.hess_x_xi = [](const Vec&, const Vec&) { return zeros(2, 2); };
    s.terms = {{{}, [](const Vec& xi) { return cplx(xi[0] * xi[0] - xi[1] * xi[1] - 1.0); }}};
    return s;
}

SymbolField frequency_coordinate(int dim, int axis) {
    if (axis < 0 || axis >= dim) throw DimensionError("frequency axis out of range");
    SymbolField s;
    s.name = "xi" + std::to_string(axis + 1);
    s.x_dim = s.xi_dim = dim;
    s.eval = [axis](const Vec&, const Vec& xi) { return cplx(xi[axis]); };
    s.grad_x = [dim](const Vec&, const Vec&) { return zeros(dim); };
    s.grad_xi = [dim, axis](const Vec&, const Vec&) {
        Vec g = zeros(dim);
        g[axis] = 1.0;
        return g;
    };
    s.hess_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.terms = {{{}, [axis](const Vec& xi) { return cplx(xi[axis]); }}};
    return s;
}

SymbolField flat(int dim) {
    SymbolField s = frequency_coordinate(dim, 0);
    s.name = "flat";
    return s;
}

SymbolField degenerate() {
    SymbolField s;
    s.name = "degenerate";
    s.x_dim = s.xi_dim = 2;
    s.eval = [](const Vec&, const Vec& xi) { return cplx(xi[1] * xi[1]); };
    s.grad_x = [](const Vec&, const Vec&) { return zeros(2); };
    s.grad_xi = [](const Vec&, const Vec& xi) {
        Vec g(2);
        g << 0.0, 2 * xi[1];
        return g;
    };
    s.hess_xi = [](const Vec&, const Vec&) {
        Mat H = zeros(2, 2);
        H(1, 1) = 2;
        return H;
    };
    s.hess_x = [](const Vec&, const Vec&) { return zeros(2, 2); };
    s.hess_x_xi = [](const Vec&, const Vec&) { return zeros(2, 2); };
    s.terms = {{{}, [](const Vec& xi) { return cplx(xi[1] * xi[1]); }}};
    return s;
}

SymbolField affine() {
    SymbolField s;
    s.name = "affine";
    s.x_dim = s.xi_dim = 2;
    s.eval = [](const Vec& x, const Vec& xi) { return cplx(xi[0] - 0.5 * xi[1] * xi[1] - 0.3 * std::sin(x[0])); };
    s.grad_x = [](const Vec& x, const Vec&) {
        Vec g(2);
        g << -0.3 * std::cos(x[0]), 0.0;
        return g;
    };
    s.grad_xi = [](const Vec&, const Vec& xi) {
        Vec g(2);
        g << 1.0, -xi[1];
        return g;
    };
    s.hess_xi = [](const Vec&, const Vec&) {
        Mat H = zeros(2, 2);
        H(1, 1) = -1.0;
        return H;
    };
    s.hess_x = [](const Vec& x, const Vec&) {
        Mat H = zeros(2, 2);
        H(0, 0) = 0.3 * std::sin(x[0]);
        return H;
    };
    s.hess_x_xi = [](const Vec&, const Vec&) { return zeros(2, 2); };
    s.terms = {{{}, [](const Vec& xi) { return cplx(xi[0] - 0.5 * xi[1] * xi[1]); }},
               {[](const Vec& x) { return cplx(-0.3 * std::sin(x[0])); }, {}}};
    return s;
}

SymbolField transport(const Vec& velocity) {
    const int dim = static_cast<int>(velocity.size());
    SymbolField s;
    s.name = "transport";
    s.x_dim = s.xi_dim = dim;
    s.eval = [velocity](const Vec&, const Vec& xi) { return cplx(velocity.dot(xi)); };
    s.grad_x = [dim](const Vec&, const Vec&) { return zeros(dim); };
    s.grad_xi = [velocity](const Vec&, const Vec&) { return velocity; };
    s.hess_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.terms = {{{}, [velocity](const Vec& xi) { return cplx(velocity.dot(xi)); }}};
    return s;
}

SymbolField free_particle(int dim) {
    SymbolField s = kinetic(dim, 0.5);
    s.name = "free";
    return s;
}

SymbolField pendulum() {
    SymbolField s = kinetic(1, 0.5);
    s.name = "pendulum";
    s.eval = [](const Vec& x, const Vec& xi) { return cplx(0.5 * xi[0] * xi[0] + std::cos(x[0])); };
    s.grad_x = [](const Vec& x, const Vec&) { return Vec(Vec::Constant(1, -std::sin(x[0]))); };
    s.hess_x = [](const Vec& x, const Vec&) { return Mat(Mat::Constant(1, 1, -std::cos(x[0]))); };
    s.terms.push_back({[](const Vec& x) { return cplx(std::cos(x[0])); }, {}});
    return s;
}

SymbolField saddle() {
    SymbolField s = hyperbola();
    s.name = "saddle";
    s.eval = [](const Vec&, const Vec& xi) { return cplx(xi[0] * xi[0] - xi[1] * xi[1]); };
    s.terms = {{{}, [](const Vec& xi) { return cplx(xi[0] * xi[0] - xi[1] * xi[1]); }}};
    return s;
}

SymbolField oscillator(double energy) {
    SymbolField s = kinetic(1, 1.0);
    s.name = "oscillator";
    s.eval = [energy](const Vec& x, const Vec& xi) { return cplx(xi[0] * xi[0] + x[0] * x[0] - energy); };
    s.grad_x = [](const Vec& x, const Vec&) { return Vec(2 * x); };
    s.hess_x = [](const Vec&, const Vec&) { return Mat(Mat::Constant(1, 1, 2.0)); };
    s.terms = {{{}, [energy](const Vec& xi) { return cplx(xi[0] * xi[0] - energy); }},
               {[](const Vec& x) { return cplx(x[0] * x[0]); }, {}}};
    return s;
}

SymbolField potential(int dim, std::function<double(const Vec&)> v) {
    SymbolField s;
    s.name = "potential";
    s.x_dim = s.xi_dim = dim;
    s.eval = [v](const Vec& x, const Vec&) { return cplx(v(x)); };
    s.grad_xi = [dim](const Vec&, const Vec&) { return zeros(dim); };
    s.hess_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.hess_x_xi = [dim](const Vec&, const Vec&) { return zeros(dim, dim); };
    s.terms = {{[v](const Vec& x) { return cplx(v(x)); }, {}}};
    return with_numeric_derivatives(std::move(s));
}

SymbolField constant(int x_dim, int xi_dim, cplx value) {
    SymbolField s;
    s.name = "constant";
    s.x_dim = x_dim;
    s.xi_dim = xi_dim;
    s.is_real = value.imag() == 0.0;
    s.eval = [value](const Vec&, const Vec&) { return value; };
    s.grad_x = [x_dim](const Vec&, const Vec&) { return zeros(x_dim); };
    s.grad_xi = [xi_dim](const Vec&, const Vec&) { return zeros(xi_dim); };
    s.hess_xi = [xi_dim](const Vec&, const Vec&) { return zeros(xi_dim, xi_dim); };
    s.hess_x = [x_dim](const Vec&, const Vec&) { return zeros(x_dim, x_dim); };
    s.hess_x_xi = [x_dim, xi_dim](const Vec&, const Vec&) { return zeros(x_dim, xi_dim); };
    s.terms = {{{}, [value](const Vec&) { return value; }}};
    return s;
}

SymbolField by_name(const std::string& name) {
    if (name == "sphere") return sphere(2);
    if (name == "hyperbola") return hyperbola();
    if (name == "flat") return flat(2);
    if (name == "degenerate") return degenerate();
    if (name == "affine") return affine();
    if (name == "free") return free_particle(1);
    if (name == "free2") return free_particle(2);
    if (name == "pendulum") return pendulum();
    if (name == "saddle") return saddle();
    if (name == "oscillator") return oscillator(1.0);
    throw DomainError("unknown symbol '" + name + "'");
}

std::vector<std::string> builtin_names() {
    return {"sphere", "hyperbola", "flat", "degenerate", "affine", "free", "free2", "pendulum", "saddle", "oscillator"};
}

}  // namespace symbols

}  // namespace qmr
