#include "qmr/scaling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "qmr/errors.hpp"
#include "qmr/regression.hpp"
#include "qmr/restriction.hpp"

namespace qmr::scaling {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_sphere_family(const std::string& name) { return name == "zonal" || name == "highest_weight"; }

modes::HarmonicKind harmonic_kind(const std::string& name) {
    return name == "zonal" ? modes::HarmonicKind::zonal : modes::HarmonicKind::highest_weight;
}

restriction::Submanifold make_submanifold(const SubmanifoldSpec& s, int degree) {
    const int nodes = static_cast<int>(planned_nodes(s, degree));
    if (s.kind == "great_circle") return restriction::Submanifold::great_circle(s.inclination, nodes);
    return restriction::Submanifold::geodesic_s3(nodes);
}

std::vector<TableRow> run_rung(const ExperimentSpec& spec, std::size_t rung) {
    const double h = spec.ladder.values[rung];
    const int degree = spec.ladder.degrees.empty() ? 0 : spec.ladder.degrees[rung];
    std::vector<TableRow> out;
    if (spec.family.name == "constant") {
        for (const auto& p : spec.p_list) out.push_back({rung, degree, h, p, 1.0, 0});
        return out;
    }
    try {
        const modes::SphereHarmonic u(harmonic_kind(spec.family.name), degree, spec.family.sphere_dim);
        const auto y = make_submanifold(spec.submanifold, degree);
        const auto sample = restriction::restrict_to(u, y);
        for (const auto& p : spec.p_list) out.push_back({rung, degree, u.h(), p, sample.lp_norm(p), y.node_count()});
    } catch (const Error& e) {
        throw std::runtime_error("rung " + std::to_string(rung) + " (degree " + std::to_string(degree) +
                                 "): " + e.what());
    }
    return out;
}

}  // namespace

std::size_t planned_nodes(const SubmanifoldSpec& s, int degree) {
    int nodes = std::max(256, s.samples_per_degree * degree);
    nodes = (nodes + 3) / 4 * 4;  // poles and equator crossings land on nodes
    return static_cast<std::size_t>(nodes);
}

void ExperimentSpec::validate() const {
    if (family.name != "zonal" && family.name != "highest_weight" && family.name != "constant")
        throw ConfigError("family.name: unknown family '" + family.name + "'");
    if (is_sphere_family(family.name)) {
        if (family.sphere_dim != 2 && family.sphere_dim != 3)
            throw ConfigError("family.sphere_dim: must be 2 or 3, got " + std::to_string(family.sphere_dim));
        if (family.name == "highest_weight" && family.sphere_dim != 2)
            throw ConfigError("family.sphere_dim: highest_weight is available on S^2 only");
        if (ladder.degrees.size() != ladder.values.size())
            throw ConfigError("ladder: sphere families need a degree ladder");
        if (submanifold.kind == "great_circle" && family.sphere_dim != 2)
            throw ConfigError("submanifold.kind: great_circle lives on S^2");
        if (submanifold.kind == "geodesic_s3" && family.sphere_dim != 3)
            throw ConfigError("submanifold.kind: geodesic_s3 lives on S^3");
    }
    if (submanifold.kind != "great_circle" && submanifold.kind != "geodesic_s3")
        throw ConfigError("submanifold.kind: unknown submanifold '" + submanifold.kind + "'");
    if (submanifold.samples_per_degree < 10)
        throw ConfigError("submanifold.samples_per_degree: at least 10 samples per degree are required");
    if (!(tolerance > 0)) throw ConfigError("tolerance: must be positive");
    if (p_list.empty()) throw ConfigError("p: at least one exponent is required");
    for (const auto& p : p_list)
        if (p < ExtRational(2)) throw ConfigError("p: exponent " + p.str() + " is below 2");
    try {
        ladder.validate_for_fit(6);
    } catch (const Error& e) {
        throw ConfigError(std::string("ladder: ") + e.what());
    }
}

std::string ExperimentSpec::canonical() const {
    std::ostringstream os;
    os << "name=" << name << ";family=" << family.name << ";sphere_dim=" << family.sphere_dim
       << ";submanifold=" << submanifold.kind << ";inclination=" << fmt(submanifold.inclination)
       << ";samples_per_degree=" << submanifold.samples_per_degree << ";p=";
    for (std::size_t i = 0; i < p_list.size(); ++i) os << (i ? "," : "") << p_list[i].str();
    os << ";ladder=";
    for (std::size_t i = 0; i < ladder.values.size(); ++i) os << (i ? "," : "") << fmt(ladder.values[i]);
    os << ";degrees=";
    for (std::size_t i = 0; i < ladder.degrees.size(); ++i) os << (i ? "," : "") << ladder.degrees[i];
    os << ";tolerance=" << fmt(tolerance) << ";seed=" << seed << ";probe_log=" << (probe_log ? 1 : 0);
    return os.str();
}

std::string ExperimentSpec::hash() const {
    std::uint64_t v = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        v ^= c;
        v *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int ExperimentSpec::ambient_dim() const { return family.name == "constant" ? 2 : family.sphere_dim; }

std::vector<TableRow> ExperimentTable::for_p(const ExtRational& p) const {
    std::vector<TableRow> out;
    for (const auto& r : rows)
        if (r.p == p) out.push_back(r);
    return out;
}

ExperimentTable run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::future<std::vector<TableRow>>> jobs;
    for (std::size_t r = 0; r < spec.ladder.size(); ++r)
        jobs.push_back(std::async(std::launch::async, run_rung, std::cref(spec), r));
    ExperimentTable table;
    table.spec_hash = spec.hash();
    for (auto& j : jobs) {
        auto rows = j.get();
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

namespace {

struct RawFit {
    double slope = 0, gamma = 0, intercept = 0, residual = 0;
};

RawFit raw_fit(const std::vector<TableRow>& rows, bool with_log) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd X(n, with_log ? 3 : 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        X(i, 0) = -std::log(r.h);
        if (with_log) {
            X(i, 1) = 0.5 * std::log(std::log(1.0 / r.h));
            X(i, 2) = 1.0;
        } else {
            X(i, 1) = 1.0;
        }
        y[i] = std::log(r.norm);
    }
    const auto f = fit::least_squares(X, y);
    RawFit out;
    out.slope = f.coef[0];
    out.gamma = with_log ? f.coef[1] : 0.0;
    out.intercept = f.coef[with_log ? 2 : 1];
    out.residual = f.max_residual;
    return out;
}

}  // namespace

ScalingFit fit_power_law(const std::vector<TableRow>& rows_in, bool with_log) {
    if (rows_in.size() < 6)
        throw DataError("power-law fit needs at least 6 rungs, got " + std::to_string(rows_in.size()));
    std::vector<TableRow> rows = rows_in;
    for (const auto& r : rows) {
        if (!(r.norm > 0) || !std::isfinite(r.norm))
            throw DataError("non-positive norm " + std::to_string(r.norm) + " at h = " + std::to_string(r.h));
        if (!(r.h > 0)) throw DataError("non-positive h in table");
    }
    // Coarsest rungs (largest h) first.
    std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) { return a.h > b.h; });

    ScalingFit out;
    out.with_log = with_log;
    const RawFit full = raw_fit(rows, false);
    const std::vector<TableRow> tail(rows.begin() + 2, rows.end());
    const RawFit trimmed = raw_fit(tail, false);
    const bool trim = full.residual > 3.0 * trimmed.residual;
    const auto& used = trim ? tail : rows;
    out.rungs_used = used.size();
    out.rungs_trimmed = trim ? 2 : 0;

    const RawFit plain = trim ? trimmed : full;
    out.slope_without_log = plain.slope;
    out.residual_without_log = plain.residual;
    const bool log_ok = std::all_of(used.begin(), used.end(), [](const TableRow& r) { return r.h < 1.0 / M_E; });
    if (log_ok) {
        const RawFit lg = raw_fit(used, true);
        out.slope_with_log = lg.slope;
        out.log_coefficient_with_log = lg.gamma;
        out.residual_with_log = lg.residual;
        out.log_variant_available = true;
    } else if (with_log) {
        throw DataError("log-corrected fit needs every h below 1/e");
    }
    if (with_log) {
        out.slope = out.slope_with_log;
        out.log_coefficient = out.log_coefficient_with_log;
        out.residual = out.residual_with_log;
        out.intercept = raw_fit(used, true).intercept;
    } else {
        out.slope = plain.slope;
        out.intercept = plain.intercept;
        out.residual = plain.residual;
    }
    return out;
}

ScalingFit fit_power_law(const ExperimentTable& table, const ExtRational& p, bool with_log) {
    return fit_power_law(table.for_p(p), with_log);
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::pass: return "pass";
        case Outcome::fail: return "fail";
        case Outcome::inconclusive: return "inconclusive";
    }
    return "?";
}

Verdict verdict(const ScalingFit& fit, const theory::DeltaResult& theory, double tol) {
    Verdict v;
    v.expected = to_double(theory.power);
    v.tol = tol;
    v.log_case = theory.log_half_power;
    v.residual_without_log = fit.residual_without_log;
    v.residual_with_log = fit.residual_with_log;
    char buf[256];
    if (!theory.log_half_power) {
        v.slope = fit.slope;
        const bool ok = std::abs(v.slope - v.expected) <= tol;
        v.outcome = ok ? Outcome::pass : Outcome::fail;
        std::snprintf(buf, sizeof buf, "slope %.6f vs %.6f (tol %.3g)", v.slope, v.expected, tol);
        v.detail = buf;
        return v;
    }
    // Log case: the slope tested is the plain power-law slope; the log
    // factor is judged only through the residual comparison.
    v.slope = fit.slope_without_log;
    const bool band = std::abs(v.slope - v.expected) <= tol;
    const double lo = std::min(fit.residual_with_log, fit.residual_without_log);
    const double hi = std::max(fit.residual_with_log, fit.residual_without_log);
    const bool close = !fit.log_variant_available || hi <= 1.1 * lo || hi == 0.0;
    if (!band) {
        v.outcome = Outcome::fail;
    } else if (close) {
        v.outcome = Outcome::inconclusive;
    } else {
        v.outcome = fit.residual_with_log < fit.residual_without_log ? Outcome::pass : Outcome::fail;
    }
    std::snprintf(buf, sizeof buf, "slope %.6f vs %.6f (tol %.3g); residual plain %.3e, with log %.3e", v.slope,
                  v.expected, tol, fit.residual_without_log, fit.residual_with_log);
    v.detail = buf;
    return v;
}

}  // namespace qmr::scaling
