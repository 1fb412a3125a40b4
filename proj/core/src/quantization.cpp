#include "qmr/quantization.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qmr/errors.hpp"
#include "qmr/fft.hpp"

namespace qmr::quant {

namespace {

void check_shapes(const SymbolField& sym, const PeriodicGrid& grid) {
    if (sym.x_dim != grid.dim() || sym.xi_dim != grid.dim())
        throw DimensionError("symbol '" + sym.name + "' has shape (" + std::to_string(sym.x_dim) + ", " +
                             std::to_string(sym.xi_dim) + ") but the grid has dimension " +
                             std::to_string(grid.dim()));
}

void check_budget(const PeriodicGrid& grid, std::size_t budget, const char* what) {
    if (grid.size() > budget)
        throw BudgetError(std::string(what) + " on " + std::to_string(grid.size()) + " points exceeds the budget of " +
                          std::to_string(budget) + "; use a coarser grid");
}

std::vector<cplx> roots_of_unity(int n) {
    std::vector<cplx> w(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) w[static_cast<std::size_t>(r)] = std::polar(1.0, 2.0 * std::numbers::pi * r / n);
    return w;
}

std::vector<Vec> frequency_table(const PeriodicGrid& grid, double h) {
    std::vector<Vec> xi(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) xi[m] = h * grid.wavevector(m);
    return xi;
}

GridFunction left_separable(const SymbolField& sym, double h, const GridFunction& u) {
    const auto& grid = u.grid();
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXcd spectrum = u.values();
    fft::forward(grid, spectrum);
    const auto xi = frequency_table(grid, h);
    std::vector<Vec> x(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) x[j] = grid.point(j);

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd buf(n);
    for (const auto& term : sym.terms) {
        if (term.frequency) {
            for (Eigen::Index m = 0; m < n; ++m) buf[m] = spectrum[m] * term.frequency(xi[static_cast<std::size_t>(m)]);
            fft::backward(grid, buf);
            buf /= static_cast<double>(n);
        } else {
            buf = u.values();
        }
        if (term.spatial)
            for (Eigen::Index j = 0; j < n; ++j) buf[j] *= term.spatial(x[static_cast<std::size_t>(j)]);
        out += buf;
    }
    return GridFunction(grid, h, std::move(out));
}

GridFunction left_dense(const SymbolField& sym, double h, const GridFunction& u) {
    const auto& grid = u.grid();
    const int N = grid.points_per_axis();
    const int dim = grid.dim();
    const auto M = grid.size();
    Eigen::VectorXcd spectrum = u.values();
    fft::forward(grid, spectrum);
    const auto xi = frequency_table(grid, h);
    const auto w = roots_of_unity(N);
    std::vector<std::array<int, 3>> idx(M);
    for (std::size_t m = 0; m < M; ++m) idx[m] = grid.multi_index(m);

    Eigen::VectorXcd out(static_cast<Eigen::Index>(M));
    for (std::size_t j = 0; j < M; ++j) {
        const Vec x = grid.point(j);
        cplx acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            int phase = 0;
            for (int a = 0; a < dim; ++a) phase += idx[m][static_cast<std::size_t>(a)] * idx[j][static_cast<std::size_t>(a)];
            acc += sym.eval(x, xi[m]) * w[static_cast<std::size_t>(phase % N)] * spectrum[static_cast<Eigen::Index>(m)];
        }
        out[static_cast<Eigen::Index>(j)] = acc / static_cast<double>(M);
    }
    return GridFunction(grid, h, std::move(out));
}

}  // namespace

void check_resolution(const SymbolField& sym, const PeriodicGrid& grid, double h) {
    check_shapes(sym, grid);
    if (!(h > 0.0)) throw DomainError("h must be positive");
    if (sym.support && sym.support->xi_bounded()) {
        const double need = sym.support->max_frequency();
        const double have = grid.nyquist(h);
        if (need > have * (1.0 + 1e-12))
            throw AliasingError("symbol '" + sym.name + "' reaches |xi| = " + std::to_string(need) +
                                " beyond the grid Nyquist frequency " + std::to_string(have) + " at h = " +
                                std::to_string(h));
    }
}

GridFunction quantize_left(const SymbolField& sym, double h, const GridFunction& u) {
    if (std::abs(u.h() - h) > 1e-14 * h) throw DimensionError("h does not match the grid function's h");
    check_resolution(sym, u.grid(), h);
    if (sym.is_separable()) return left_separable(sym, h, u);
    return left_dense(sym, h, u);
}

GridFunction quantize_weyl(const SymbolField& sym, double h, const GridFunction& u, std::size_t budget) {
    if (std::abs(u.h() - h) > 1e-14 * h) throw DimensionError("h does not match the grid function's h");
    check_resolution(sym, u.grid(), h);
    if (sym.is_split()) return left_separable(sym, h, u);
    const Eigen::MatrixXcd W = weyl_matrix(sym, h, u.grid(), budget);
    return GridFunction(u.grid(), h, W * u.values());
}

Eigen::MatrixXcd left_matrix(const SymbolField& sym, double h, const PeriodicGrid& grid, std::size_t budget) {
    check_resolution(sym, grid, h);
    check_budget(grid, budget, "dense left quantization");
    const auto M = static_cast<Eigen::Index>(grid.size());
    const auto xi = frequency_table(grid, h);
    Eigen::MatrixXcd L(M, M);
    Eigen::VectorXcd row(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        const Vec x = grid.point(static_cast<std::size_t>(j));
        for (Eigen::Index m = 0; m < M; ++m) row[m] = sym.eval(x, xi[static_cast<std::size_t>(m)]);
        fft::backward(grid, row);
        const auto jj = grid.multi_index(static_cast<std::size_t>(j));
        for (Eigen::Index l = 0; l < M; ++l) {
            const auto ll = grid.multi_index(static_cast<std::size_t>(l));
            std::array<int, 3> d{0, 0, 0};
            for (int a = 0; a < grid.dim(); ++a) d[static_cast<std::size_t>(a)] = jj[static_cast<std::size_t>(a)] - ll[static_cast<std::size_t>(a)];
            L(j, l) = row[static_cast<Eigen::Index>(grid.flat_index(d))] / static_cast<double>(M);
        }
    }
    return L;
}

// For a fixed midpoint c the Weyl entries depend on (j - l) only through
//   G_c(d) = N^{-dim} sum_m p(c, h k_m) exp(2 pi i m.d / N),
// one inverse FFT. Midpoints of wrapped pairs live on the half grid, so we
// sweep all (2N)^dim half-grid points and scatter each G_c into the entries
// whose midpoint it is. Antipodal pairs (d = N/2) have two midpoints and get
// the average, which keeps the matrix exactly Hermitian for real symbols.
Eigen::MatrixXcd weyl_matrix(const SymbolField& sym, double h, const PeriodicGrid& grid, std::size_t budget) {
    check_resolution(sym, grid, h);
    check_budget(grid, budget, "dense Weyl quantization");
    const int N = grid.points_per_axis();
    const int dim = grid.dim();
    const int twoN = 2 * N;
    const auto M = static_cast<Eigen::Index>(grid.size());
    const auto xi = frequency_table(grid, h);
    const double half = 0.5 * grid.spacing();

    std::size_t half_points = 1;
    for (int a = 0; a < dim; ++a) half_points *= static_cast<std::size_t>(twoN);

    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(M, M);
    Eigen::VectorXcd g(M);
    std::vector<std::array<int, 3>> didx(static_cast<std::size_t>(M));
    for (Eigen::Index d = 0; d < M; ++d) didx[static_cast<std::size_t>(d)] = grid.multi_index(static_cast<std::size_t>(d));

    for (std::size_t s = 0; s < half_points; ++s) {
        std::array<int, 3> sidx{0, 0, 0};
        std::size_t rest = s;
        for (int a = dim - 1; a >= 0; --a) {
            sidx[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(twoN));
            rest /= static_cast<std::size_t>(twoN);
        }
        Vec c(dim);
        for (int a = 0; a < dim; ++a) c[a] = grid.origin() + sidx[static_cast<std::size_t>(a)] * half;
        for (Eigen::Index m = 0; m < M; ++m) g[m] = sym.eval(c, xi[static_cast<std::size_t>(m)]);
        fft::backward(grid, g);
        g /= static_cast<double>(M);

        for (Eigen::Index d = 0; d < M; ++d) {
            const auto& dd = didx[static_cast<std::size_t>(d)];
            bool parity_ok = true;
            for (int a = 0; a < dim; ++a)
                if ((dd[static_cast<std::size_t>(a)] - sidx[static_cast<std::size_t>(a)]) % 2 != 0) parity_ok = false;
            if (!parity_ok) continue;

            // Enumerate the wrapped offsets; antipodal axes contribute two.
            std::array<std::array<int, 2>, 3> options{};
            std::array<int, 3> count{1, 1, 1};
            double weight = 1.0;
            for (int a = 0; a < dim; ++a) {
                const int da = dd[static_cast<std::size_t>(a)];
                auto& opt = options[static_cast<std::size_t>(a)];
                if (2 * da < N) {
                    opt[0] = da;
                } else if (2 * da > N) {
                    opt[0] = da - N;
                } else {
                    opt = {da, da - N};
                    count[static_cast<std::size_t>(a)] = 2;
                    weight *= 0.5;
                }
            }
            const cplx value = weight * g[d];
            for (int c0 = 0; c0 < count[0]; ++c0)
                for (int c1 = 0; c1 < count[1]; ++c1)
                    for (int c2 = 0; c2 < count[2]; ++c2) {
                        const std::array<int, 3> choice{c0, c1, c2};
                        std::array<int, 3> l{0, 0, 0}, j{0, 0, 0};
                        for (int a = 0; a < dim; ++a) {
                            const auto ua = static_cast<std::size_t>(a);
                            const int dw = options[ua][static_cast<std::size_t>(choice[ua])];
                            const int la = (((sidx[ua] - dw) / 2) % N + N) % N;
                            l[ua] = la;
                            j[ua] = (la + dd[ua]) % N;
                        }
                        W(static_cast<Eigen::Index>(grid.flat_index(j)), static_cast<Eigen::Index>(grid.flat_index(l))) +=
                            value;
                    }
        }
    }
    return W;
}

LocalisationCutoff make_cutoff(const PhaseBox& inner, const PhaseBox& outer) {
    const int xd = static_cast<int>(inner.x_lo.size());
    const int fd = static_cast<int>(inner.xi_lo.size());
    if (outer.x_lo.size() != xd || outer.xi_lo.size() != fd)
        throw DimensionError("cutoff boxes have different shapes");
    auto check = [](double ilo, double ihi, double olo, double ohi) {
        if (std::isinf(ilo) != std::isinf(olo) || std::isinf(ihi) != std::isinf(ohi))
            throw DomainError("cutoff inner and outer boxes must be bounded in the same coordinates");
        if (!(ilo <= ihi)) throw DomainError("cutoff inner box is empty");
        if (std::isfinite(olo) && !(olo < ilo)) throw DomainError("cutoff outer box must strictly contain the inner box");
        if (std::isfinite(ohi) && !(ohi > ihi)) throw DomainError("cutoff outer box must strictly contain the inner box");
    };
    for (int i = 0; i < xd; ++i) check(inner.x_lo[i], inner.x_hi[i], outer.x_lo[i], outer.x_hi[i]);
    for (int i = 0; i < fd; ++i) check(inner.xi_lo[i], inner.xi_hi[i], outer.xi_lo[i], outer.xi_hi[i]);

    auto factor = [](const Vec& ilo, const Vec& ihi, const Vec& olo, const Vec& ohi) -> std::function<cplx(const Vec&)> {
        bool any = false;
        for (Eigen::Index i = 0; i < olo.size(); ++i) any = any || std::isfinite(olo[i]) || std::isfinite(ohi[i]);
        if (!any) return {};
        return [ilo, ihi, olo, ohi](const Vec& v) {
            double prod = 1.0;
            for (Eigen::Index i = 0; i < v.size() && prod != 0.0; ++i) {
                const double lo_in = ilo[i], hi_in = ihi[i], lo_out = olo[i], hi_out = ohi[i];
                if (std::isinf(lo_out) && std::isinf(hi_out)) continue;
                const double lo_o = std::isinf(lo_out) ? -1e300 : lo_out;
                const double hi_o = std::isinf(hi_out) ? 1e300 : hi_out;
                const double lo_i = std::isinf(lo_in) ? -1e299 : lo_in;
                const double hi_i = std::isinf(hi_in) ? 1e299 : hi_in;
                prod *= plateau(v[i], lo_i, hi_i, lo_o, hi_o);
            }
            return cplx(prod);
        };
    };
    auto fx = factor(inner.x_lo, inner.x_hi, outer.x_lo, outer.x_hi);
    auto fxi = factor(inner.xi_lo, inner.xi_hi, outer.xi_lo, outer.xi_hi);

    SymbolField chi;
    chi.name = "cutoff";
    chi.x_dim = xd;
    chi.xi_dim = fd;
    chi.eval = [fx, fxi](const Vec& x, const Vec& xi) {
        cplx v = 1.0;
        if (fx) v *= fx(x);
        if (fxi && v != 0.0) v *= fxi(xi);
        return v;
    };
    chi.support = outer;
    chi.terms = {{fx, fxi}};
    return {inner, outer, with_numeric_derivatives(std::move(chi))};
}

LocalisationCutoff frequency_cutoff(int dim, double inner, double outer) {
    PhaseBox in = PhaseBox::unbounded(dim, dim), out = PhaseBox::unbounded(dim, dim);
    in.xi_lo.setConstant(-inner);
    in.xi_hi.setConstant(inner);
    out.xi_lo.setConstant(-outer);
    out.xi_hi.setConstant(outer);
    return make_cutoff(in, out);
}

double localisation_defect(const GridFunction& u, const LocalisationCutoff& chi) {
    return (u - quantize_left(chi.chi, u.h(), u)).l2_norm();
}

double sobolev_ratio(const GridFunction& u, ExtRational p, ExtRational q) {
    if (q < ExtRational(1)) throw DomainError("sobolev_ratio requires q >= 1");
    if (q > p) throw DomainError("sobolev_ratio requires q <= p, got q = " + q.str() + ", p = " + p.str());
    const double pd = p.to_double(), qd = q.to_double();
    const double expo = u.grid().dim() * (to_double(p.reciprocal()) - to_double(q.reciprocal()));
    const double denom = std::pow(u.h(), expo) * u.lp_norm(qd);
    if (!(denom > 0.0)) throw DataError("sobolev_ratio of the zero function");
    return u.lp_norm(pd) / denom;
}

EllipticDefect elliptic_localize_defect(const SymbolField& sym, const LocalisationCutoff& chi, const GridFunction& u,
                                        double floor) {
    const auto& grid = u.grid();
    const double h = u.h();
    check_resolution(sym, grid, h);
    check_resolution(chi.chi, grid, h);
    const int dim = grid.dim();

    // Sample |sym| on the part of the cutoff's support that the grid sees.
    const int per_axis = dim == 1 ? 81 : dim == 2 ? 21 : 9;
    const double nyq = grid.nyquist(h);
    auto axis_samples = [&](double lo, double hi, double clamp_lo, double clamp_hi) {
        lo = std::max(lo, clamp_lo);
        hi = std::min(hi, clamp_hi);
        std::vector<double> v(static_cast<std::size_t>(per_axis));
        for (int i = 0; i < per_axis; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (per_axis - 1);
        return v;
    };
    std::vector<std::vector<double>> coords;
    for (int a = 0; a < dim; ++a)
        coords.push_back(axis_samples(chi.outer.x_lo[a], chi.outer.x_hi[a], grid.origin(),
                                      grid.origin() + grid.period()));
    for (int a = 0; a < dim; ++a)
        coords.push_back(axis_samples(chi.outer.xi_lo[a], chi.outer.xi_hi[a], -nyq, nyq));

    double min_symbol = std::numeric_limits<double>::infinity();
    std::size_t total = 1;
    for (const auto& c : coords) total *= c.size();
    Vec x(dim), xi(dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int a = 2 * dim - 1; a >= 0; --a) {
            const auto& c = coords[static_cast<std::size_t>(a)];
            const double v = c[rest % c.size()];
            rest /= c.size();
            if (a < dim)
                x[a] = v;
            else
                xi[a - dim] = v;
        }
        if (std::abs(chi.chi(x, xi)) == 0.0) continue;
        min_symbol = std::min(min_symbol, std::abs(sym(x, xi)));
    }
    if (min_symbol < floor)
        throw EllipticityError("symbol '" + sym.name + "' drops to |p| = " + std::to_string(min_symbol) +
                               " on the cutoff support (floor " + std::to_string(floor) + ")");

    SymbolField q;
    q.name = "cutoff/" + sym.name;
    q.x_dim = q.xi_dim = dim;
    q.is_real = chi.chi.is_real && sym.is_real;
    q.support = chi.outer;
    auto chi_eval = chi.chi.eval;
    auto p_eval = sym.eval;
    q.eval = [chi_eval, p_eval](const Vec& x, const Vec& xi) {
        const cplx c = chi_eval(x, xi);
        return c == 0.0 ? cplx(0.0) : c / p_eval(x, xi);
    };

    const GridFunction pu = quantize_left(sym, h, u);
    const GridFunction qpu = quantize_left(q, h, pu);
    const GridFunction chiu = quantize_left(chi.chi, h, u);
    EllipticDefect out;
    out.chi_u = chiu.l2_norm();
    out.parametrix_u = qpu.l2_norm();
    out.remainder = (chiu - qpu).l2_norm();
    out.quasimode = pu.l2_norm();
    out.min_symbol = min_symbol;
    return out;
}

}  // namespace qmr::quant
