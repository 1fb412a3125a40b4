#include "qmr/exponents.hpp"

#include <algorithm>

#include "qmr/errors.hpp"

namespace qmr::theory {

namespace {

void check_dims(int n, int k) {
    if (n < 2) throw DomainError("ambient dimension n = " + std::to_string(n) + " violates n >= 2");
    if (k < 1) throw DomainError("submanifold dimension k = " + std::to_string(k) + " violates k >= 1");
    if (k > n - 1)
        throw DomainError("submanifold dimension k = " + std::to_string(k) + " violates k <= n-1 = " +
                          std::to_string(n - 1));
}

void check_p(const ExtRational& p) {
    if (p < ExtRational(2)) throw DomainError("Lebesgue exponent p = " + p.str() + " violates p >= 2");
}

}  // namespace

void ExponentQuery::validate() const {
    check_dims(n, k);
    check_p(p);
}

std::string DeltaResult::str() const {
    std::string s = to_string(power);
    if (log_half_power) s += " (× log^{1/2}(1/h))";
    return s;
}

DeltaResult delta(const ExponentQuery& q) {
    q.validate();
    const Rational n(q.n), k(q.k);
    const Rational inv_p = q.p.reciprocal();

    if (q.k == q.n - 1) {
        // Breakpoint p = 2n/(n-1), i.e. 1/p = (n-1)/(2n).
        const Rational inv_break = (n - 1) / (2 * n);
        if (inv_p <= inv_break) return {(n - 1) / 2 - (n - 1) * inv_p, false};
        return {(n - 1) / 4 - (n - 2) * inv_p / 2, false};
    }
    if (q.k == q.n - 2 && q.p == ExtRational(2)) return {Rational(1, 2), true};
    return {(n - 1) / 2 - k * inv_p, false};
}

Rational full_manifold_delta(int n, ExtRational p) {
    if (n < 1) throw DomainError("ambient dimension must be positive");
    check_p(p);
    const Rational nn(n);
    const Rational inv_p = p.reciprocal();
    const Rational inv_break = (nn - 1) / (2 * (nn + 1));
    if (inv_p <= inv_break) return (nn - 1) / 2 - nn * inv_p;
    return (nn - 1) / 2 * (Rational(1, 2) - inv_p);
}

Rational beta(ExtRational p, Rational sigma_inf, Rational sigma_2) {
    check_p(p);
    return 2 * (sigma_2 - sigma_inf) * p.reciprocal() + sigma_inf;
}

void StrichartzAssumptions::validate() const {
    if (sigma_2 < 0) throw DomainError("sigma_2 = " + to_string(sigma_2) + " violates sigma_2 >= 0");
    if (!(sigma_inf > sigma_2))
        throw DegenerateError("sigma_inf = " + to_string(sigma_inf) + " must exceed sigma_2 = " +
                              to_string(sigma_2));
}

StrichartzAssumptions restricted_kernel_assumptions(int n, int k) {
    check_dims(n, k);
    const Rational s_inf(n - 1, 2), s_2(n - k, 2);
    return {s_inf, s_inf, s_2, s_2};
}

bool satisfies_governing(const StrichartzAssumptions& a, const StrichartzPair& pair) {
    return 2 * pair.r.reciprocal() + 2 * (a.sigma_inf - a.sigma_2) * pair.p.reciprocal() == a.sigma_inf;
}

ExtRational solve_governing(const StrichartzAssumptions& a, ExtRational p) {
    a.validate();
    const Rational b = beta(p, a.sigma_inf, a.sigma_2);
    if (b < 0) throw NoSolutionError("no Strichartz pair for p = " + p.str() + ": beta = " + to_string(b) + " < 0");
    if (b == Rational(0)) return ExtRational::infinity();
    const Rational r = 2 / b;
    if (r <= 2)
        throw EndpointError("pair (r, p) = (" + to_string(r) + ", " + p.str() + ") violates r > 2");
    return r;
}

Rational solve_diagonal(const StrichartzAssumptions& a) {
    // Equal decay rates are allowed here: the diagonal formula stays finite
    // even though solve_governing rejects them.
    if (a.sigma_2 < 0) throw DomainError("sigma_2 = " + to_string(a.sigma_2) + " violates sigma_2 >= 0");
    if (a.sigma_inf < a.sigma_2)
        throw DegenerateError("sigma_inf = " + to_string(a.sigma_inf) + " is below sigma_2 = " + to_string(a.sigma_2));
    if (a.sigma_inf == Rational(0)) throw NoSolutionError("sigma_inf = 0 admits no diagonal pair");
    // 2/p + 2(sigma_inf - sigma_2)/p = sigma_inf.
    return 2 * (1 + a.sigma_inf - a.sigma_2) / a.sigma_inf;
}

Rational strichartz_h_exponent(const StrichartzAssumptions& a, ExtRational r) {
    if (a.sigma_inf == a.sigma_2)
        throw DegenerateError("degenerate assumptions: sigma_inf == sigma_2 = " + to_string(a.sigma_2));
    const Rational gap = a.sigma_inf - a.sigma_2;
    return (a.mu_inf - a.mu_2) * r.reciprocal() / gap + (a.sigma_inf * a.mu_2 - a.sigma_2 * a.mu_inf) / (2 * gap);
}

DiagonalPair diagonal_pair(int n, int k) {
    check_dims(n, k);
    const Rational p = solve_diagonal(restricted_kernel_assumptions(n, k));
    if (p > 2) return {DiagonalKind::value, p};
    if (p == Rational(2)) return {DiagonalKind::endpoint, p};
    return {DiagonalKind::none, p};
}

std::vector<Anchor> anchor_points(int n, int k) {
    check_dims(n, k);
    const Rational nn(n), kk(k);
    std::vector<Anchor> out;
    out.push_back({Rational(0), (nn - 1) / 2, false});
    if (k == n - 1) {
        const Rational inv_strichartz = (nn - 1) / (2 * nn);
        out.push_back({inv_strichartz, inv_strichartz, false});
        out.push_back({Rational(1, 2), Rational(1, 4), false});
    } else if (k == n - 2) {
        out.push_back({Rational(1, 2), Rational(1, 2), true});
    } else {
        out.push_back({Rational(1, 2), (nn - kk - 1) / 2, false});
    }
    return out;
}

Rational interpolate_delta(std::span<const Anchor> anchors, ExtRational p) {
    check_p(p);
    if (anchors.empty()) throw DomainError("no interpolation anchors");
    if (!std::is_sorted(anchors.begin(), anchors.end(),
                        [](const Anchor& a, const Anchor& b) { return a.inv_p < b.inv_p; }))
        throw DomainError("anchors must be sorted by 1/p");
    const Rational s = p.reciprocal();
    if (s < anchors.front().inv_p || s > anchors.back().inv_p)
        throw DomainError("1/p = " + to_string(s) + " lies outside the anchor range");
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const Anchor& lo = anchors[i];
        const Anchor& hi = anchors[i + 1];
        if (s >= lo.inv_p && s <= hi.inv_p) {
            if (hi.inv_p == lo.inv_p) return lo.delta;
            return lo.delta + (hi.delta - lo.delta) * (s - lo.inv_p) / (hi.inv_p - lo.inv_p);
        }
    }
    return anchors.back().delta;  // single anchor
}

bool weak_a2_region(int n, int k, ExtRational p) {
    check_dims(n, k);
    check_p(p);
    const Rational twice_k(2 * k);
    const Rational threshold(4 * k, n - 1);
    if (twice_k < n - 1) return true;
    if (p.is_infinite()) return true;
    if (twice_k > n - 1) return p.value() >= threshold;
    return p.value() > threshold;
}

}  // namespace qmr::theory
