#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "config.hpp"
#include "qmr/errors.hpp"
#include "qmr/exponents.hpp"
#include "qmr/factorization.hpp"
#include "qmr/kernel.hpp"
#include "qmr/scaling.hpp"
#include "results.hpp"

namespace qmr::cli {

namespace {

std::string num(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string vec_str(const Vec& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + ")";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

// ---- delta ---------------------------------------------------------------

std::vector<Rational> sweep_points(int n, int k) {
    std::set<Rational> pts;
    for (int j = 0; j <= 40; ++j) pts.insert(Rational(j, 80));
    for (const auto& a : theory::anchor_points(n, k)) pts.insert(a.inv_p);
    pts.insert(Rational(n - 1, 2 * (n + 1)));  // whole-manifold breakpoint
    return {pts.begin(), pts.end()};
}

ExtRational from_inverse(const Rational& inv) {
    if (inv == Rational(0)) return ExtRational::infinity();
    return ExtRational(1 / inv);
}

std::string sweep_text(const DeltaOptions& o) {
    std::ostringstream s;
    s << "# delta(n=" << o.n << ", k=" << o.k << ", p) against 1/p\n";
    s << "# columns: 1/p delta\n";
    bool log_point = false;
    for (const auto& inv : sweep_points(o.n, o.k)) {
        const auto d = theory::delta(o.n, o.k, from_inverse(inv));
        log_point = log_point || d.log_half_power;
        s << num(to_double(inv), 12) << " " << num(to_double(d.power), 12) << "\n";
    }
    if (log_point) s << "# the point 1/p = 1/2 carries an extra log^{1/2}(1/h) factor\n";
    if (o.full_manifold) {
        s << "\n\n# whole manifold, n=" << o.n << ": comparison curve\n# columns: 1/p delta\n";
        for (const auto& inv : sweep_points(o.n, o.k))
            s << num(to_double(inv), 12) << " " << num(to_double(theory::full_manifold_delta(o.n, from_inverse(inv))), 12)
              << "\n";
    }
    return s.str();
}

// ---- pairs ---------------------------------------------------------------

Rational parse_rational(const std::string& text, const char* what) {
    const auto v = ExtRational::parse(text);
    if (v.is_infinite()) throw DomainError(std::string(what) + " must be finite");
    return v.value();
}

void pair_row(const theory::StrichartzAssumptions& a, const ExtRational& p, std::ostream& out) {
    out << "  " << pad(p.str(), 8) << pad(to_string(p.reciprocal()), 8);
    try {
        const auto r = theory::solve_governing(a, p);
        std::string h = "-";
        try {
            h = to_string(theory::strichartz_h_exponent(a, r));
        } catch (const DegenerateError&) {
        }
        out << pad(r.str(), 10) << h << "\n";
    } catch (const EndpointError& e) {
        out << "endpoint excluded: " << e.what() << "\n";
    } catch (const NoSolutionError& e) {
        out << "no solution: " << e.what() << "\n";
    }
}

// ---- run -----------------------------------------------------------------

struct PlannedRung {
    std::size_t rung;
    int degree;
    double h;
    std::size_t nodes;
};

std::vector<PlannedRung> plan(const scaling::ExperimentSpec& spec) {
    std::vector<PlannedRung> out;
    for (std::size_t r = 0; r < spec.ladder.size(); ++r) {
        const int degree = spec.ladder.degrees.empty() ? 0 : spec.ladder.degrees[r];
        const std::size_t nodes = spec.family.name == "constant" ? 0 : scaling::planned_nodes(spec.submanifold, degree);
        out.push_back({r, degree, spec.ladder.values[r], nodes});
    }
    return out;
}

}  // namespace

int cmd_delta(const DeltaOptions& o, std::ostream& out) {
    if (o.sweep) {
        const std::string text = sweep_text(o);
        if (o.out.empty()) {
            out << text;
        } else {
            write_file_atomic(o.out, text);
            out << "wrote " << o.out << "\n";
        }
        return kExitPass;
    }
    if (!o.p.empty()) {
        const auto d = theory::delta(o.n, o.k, ExtRational::parse(o.p));
        out << d.str() << "\n";
        out << "delta(n=" << o.n << ", k=" << o.k << ", p=" << ExtRational::parse(o.p).str()
            << ") ~ " << num(to_double(d.power), 10) << "\n";
        return kExitPass;
    }
    std::set<ExtRational> ps{ExtRational(2), ExtRational(2 * o.n, o.n - 1), ExtRational(4), ExtRational(6),
                             ExtRational::infinity()};
    out << "n = " << o.n << ", k = " << o.k << "\n";
    out << "  " << pad("p", 8) << pad("delta", 30) << "decimal\n";
    for (const auto& p : ps) {
        const auto d = theory::delta(o.n, o.k, p);
        out << "  " << pad(p.str(), 8) << pad(d.str(), 30) << num(to_double(d.power), 10) << "\n";
    }
    return kExitPass;
}

int cmd_pairs(const PairsOptions& o, std::ostream& out) {
    const bool geometric = o.n.has_value() || o.k.has_value();
    const bool raw = !o.sigma_inf.empty() || !o.sigma_2.empty() || !o.mu_inf.empty() || !o.mu_2.empty();
    if (geometric == raw) throw DomainError("give either --n/--k or the raw exponents --sigma-inf [--sigma-2 --mu-inf --mu-2]");

    theory::StrichartzAssumptions a;
    if (geometric) {
        if (!o.n || !o.k) throw DomainError("--n and --k must be given together");
        a = theory::restricted_kernel_assumptions(*o.n, *o.k);
    } else {
        if (o.sigma_inf.empty()) throw DomainError("--sigma-inf is required with raw exponents");
        a.sigma_inf = parse_rational(o.sigma_inf, "sigma_inf");
        a.sigma_2 = o.sigma_2.empty() ? Rational(0) : parse_rational(o.sigma_2, "sigma_2");
        a.mu_inf = o.mu_inf.empty() ? Rational(0) : parse_rational(o.mu_inf, "mu_inf");
        a.mu_2 = o.mu_2.empty() ? Rational(0) : parse_rational(o.mu_2, "mu_2");
    }
    out << "kernel exponents: mu_inf = " << to_string(a.mu_inf) << ", sigma_inf = " << to_string(a.sigma_inf)
        << ", mu_2 = " << to_string(a.mu_2) << ", sigma_2 = " << to_string(a.sigma_2) << "\n";
    const Rational gap = a.sigma_inf - a.sigma_2;
    out << "governing relation: 2/r + " << to_string(2 * gap) << "/p = " << to_string(a.sigma_inf) << "\n";

    bool degenerate = false;
    try {
        a.validate();
    } catch (const DegenerateError& e) {
        degenerate = true;
        out << "degenerate: " << e.what() << "; no (r, p) curve\n";
    }

    // Diagonal point.
    std::optional<ExtRational> diagonal;
    try {
        const Rational p = theory::solve_diagonal(a);
        if (p > 2) {
            diagonal = ExtRational(p);
            std::string h = "-";
            if (!degenerate) h = to_string(theory::strichartz_h_exponent(a, ExtRational(p)));
            out << "diagonal pair: (" << to_string(p) << ", " << to_string(p) << "), h-exponent " << h << "\n";
        } else if (p == Rational(2)) {
            out << "diagonal pair: endpoint (2, 2), excluded by r > 2\n";
        } else {
            out << "no diagonal pair (p = " << to_string(p) << " < 2)\n";
        }
    } catch (const Error& e) {
        out << "no diagonal pair: " << e.what() << "\n";
    }

    if (degenerate) return kExitPass;
    std::set<ExtRational> ps;
    if (!o.p.empty()) {
        ps.insert(ExtRational::parse(o.p));
    } else {
        for (const auto& p : {ExtRational(2), ExtRational(5, 2), ExtRational(3), ExtRational(4), ExtRational(6),
                              ExtRational(8), ExtRational::infinity()})
            ps.insert(p);
        if (diagonal) ps.insert(*diagonal);
    }
    out << "  " << pad("p", 8) << pad("1/p", 8) << pad("r", 10) << "h-exponent\n";
    for (const auto& p : ps) pair_row(a, p, out);
    return kExitPass;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
    const auto t_start = std::chrono::steady_clock::now();
    const auto ini = IniFile::load(o.config);
    auto spec = load_experiment(ini);
    if (o.tol) {
        if (!(*o.tol > 0)) throw ConfigError("--tol: must be positive");
        spec.tolerance = *o.tol;
    }
    if (!o.ladder.empty()) {
        try {
            if (spec.family.name == "constant") {
                spec.ladder = modes::HLadder{};
                spec.ladder.values = parse_h_list(o.ladder);
                spec.ladder.provenance = "explicit";
            } else {
                spec.ladder = parse_degree_ladder(o.ladder, spec.family.sphere_dim);
            }
            spec.validate();
        } catch (const Error& e) {
            std::string msg = e.what();
            if (msg.rfind("ladder: ", 0) == 0) msg.erase(0, 8);
            throw ConfigError("--ladder: " + msg);
        }
    }
    const int n = spec.ambient_dim(), k = spec.submanifold_dim();
    const auto rungs = plan(spec);
    for (const auto& r : rungs)
        if (o.budget > 0 && r.nodes > o.budget)
            throw BudgetError("rung " + std::to_string(r.rung) + " (degree " + std::to_string(r.degree) + ") needs " +
                              std::to_string(r.nodes) + " quadrature nodes, budget is " + std::to_string(o.budget));

    const fs::path root = results_root(o.out);
    const std::string stem = spec.name + "-" + spec.hash();
    out << "experiment " << spec.name << " (spec " << spec.hash() << "): " << spec.family.name << " on "
        << spec.submanifold.kind << ", n = " << n << ", k = " << k << ", tol " << num(spec.tolerance) << "\n";
    out << "  " << pad("rung", 6) << pad("degree", 8) << pad("h", 14) << "nodes\n";
    for (const auto& r : rungs)
        out << "  " << pad(std::to_string(r.rung), 6) << pad(std::to_string(r.degree), 8) << pad(num(r.h), 14)
            << r.nodes << "\n";
    if (o.dry_run) {
        out << "dry run: " << rungs.size() << " rungs x " << spec.p_list.size() << " exponents planned, would write "
            << (root / stem).string() << "; nothing written\n";
        return kExitPass;
    }

    const auto t_run = std::chrono::steady_clock::now();
    const auto table = scaling::run_experiment(spec);
    const double run_seconds = seconds_since(t_run);

    const auto t_fit = std::chrono::steady_clock::now();
    std::vector<VerdictRecord> verdicts;
    bool all_pass = true;
    for (const auto& p : spec.p_list) {
        VerdictRecord v;
        v.p = p;
        v.theory = theory::delta(n, k, p);
        v.fit = scaling::fit_power_law(table, p, spec.probe_log || v.theory.log_half_power);
        v.verdict = scaling::verdict(v.fit, v.theory, spec.tolerance);
        all_pass = all_pass && v.verdict.passed();
        verdicts.push_back(v);
    }
    const double fit_seconds = seconds_since(t_fit);

    out << "  " << pad("p", 6) << pad("delta", 28) << pad("slope", 10) << pad("|diff|", 10) << "outcome\n";
    for (const auto& v : verdicts) {
        out << "  " << pad(v.p.str(), 6) << pad(v.theory.str(), 28) << pad(num(v.verdict.slope, 4), 10)
            << pad(num(std::abs(v.verdict.slope - v.verdict.expected), 3), 10) << scaling::to_string(v.verdict.outcome)
            << "\n";
        if (!v.verdict.detail.empty()) out << "      " << v.verdict.detail << "\n";
    }

    const auto t_write = std::chrono::steady_clock::now();
    ResultSet files;
    files.add("results.csv", scaling_csv(table));
    files.add("results.jsonl", scaling_jsonl(table));
    files.add("verdicts.csv", verdicts_csv(verdicts));
    files.add("verdicts.jsonl", verdicts_jsonl(verdicts));
    for (auto& [rel, content] : scaling_plots(table.rows, n, k)) files.add(rel, content);

    Manifest m;
    m.kind = "scaling";
    m.name = spec.name;
    m.config_file = o.config;
    m.config_sha256 = sha256_hex(ini.text());
    m.spec_hash = spec.hash();
    m.timestamp = utc_timestamp();
    m.version = artifact_version();
    m.command = o.command;
    m.status = all_pass ? "pass" : "fail";
    m.n = n;
    m.k = k;
    m.config_text = ini.text();
    m.timings = {{"run_experiment", run_seconds}, {"fit_and_verdict", fit_seconds},
                 {"write", seconds_since(t_write)}, {"total", seconds_since(t_start)}};
    const auto dir = files.commit(root, stem, m);
    out << "results: " << dir.string() << "\n";
    out << (all_pass ? "all verdicts pass" : "some verdicts FAIL") << "\n";
    return all_pass ? kExitPass : kExitFail;
}

int cmd_kernel(const KernelOptions& o, std::ostream& out) {
    const auto t_start = std::chrono::steady_clock::now();
    const auto ini = IniFile::load(o.config);
    auto job = load_kernel(ini);
    if (o.budget > 0) job.config.budget = o.budget;
    const auto a = symbols::by_name(job.hamiltonian);
    const auto pairs = job.resolved_pairs();
    const std::string hash = sha256_hex(job.canonical()).substr(0, 16);
    const fs::path root = results_root(o.out);

    out << "kernel " << job.name << ": hamiltonian " << job.hamiltonian << ", n = " << job.config.n
        << ", k = " << job.config.k << ", slice " << kernel::to_string(job.config.slice) << ", "
        << (a.is_x_independent() ? "Fourier path" : "dense path, budget " + std::to_string(job.config.budget))
        << "\n";
    for (double h : job.h_list)
        out << "  h = " << pad(num(h), 12) << "grid " << kernel::grid_points_for(job.config, h) << " points per axis\n";
    out << "  " << pairs.size() << " time pairs\n";
    if (o.dry_run) {
        out << "dry run: would write " << (root / (job.name + "-" + hash)).string() << "; nothing written\n";
        return kExitPass;
    }

    const auto t_run = std::chrono::steady_clock::now();
    kernel::KernelEstimate est = kernel::restricted_kernel_decay(a, job.config, job.h_list, pairs);
    const double run_seconds = seconds_since(t_run);
    out << "  " << pad("h", 12) << pad("|t-s|", 12) << pad("sup", 14) << "opnorm\n";
    for (const auto& r : est.rows)
        out << "  " << pad(num(r.h), 12) << pad(num(r.tau()), 12) << pad(num(r.sup), 14) << num(r.opnorm) << "\n";

    const auto fit = kernel::fit_kernel_exponents(est, job.window, job.t_max);
    out << "fit over " << fit.rows_used << " rows: mu_inf " << num(fit.mu_inf, 4) << ", sigma_inf "
        << num(fit.sigma_inf, 4) << ", mu_2 " << num(fit.mu_2, 4) << ", sigma_2 " << num(fit.sigma_2, 4)
        << " (max log residual " << num(fit.residual_inf, 3) << " / " << num(fit.residual_2, 3) << ")\n";

    bool pass = true;
    ojson checks = ojson::array();
    auto check = [&](const char* label, const std::optional<double>& want, double got) {
        if (!want) return;
        const double rel = std::abs(got - *want) / std::abs(*want);
        const bool ok = rel <= job.expect.rel_tol;
        pass = pass && ok;
        out << "  expect " << label << " = " << num(*want) << ": measured " << num(got, 4) << ", relative error "
            << num(100 * rel, 3) << "% -> " << (ok ? "pass" : "FAIL") << "\n";
        checks.push_back({{"exponent", label}, {"expected", *want}, {"measured", got}, {"relative_error", rel},
                          {"pass", ok}});
    };
    check("mu_inf", job.expect.mu_inf, fit.mu_inf);
    check("sigma_inf", job.expect.sigma_inf, fit.sigma_inf);
    check("mu_2", job.expect.mu_2, fit.mu_2);
    check("sigma_2", job.expect.sigma_2, fit.sigma_2);

    ojson fj;
    fj["mu_inf"] = fit.mu_inf;
    fj["sigma_inf"] = fit.sigma_inf;
    fj["mu_2"] = fit.mu_2;
    fj["sigma_2"] = fit.sigma_2;
    fj["residual_inf"] = fit.residual_inf;
    fj["residual_2"] = fit.residual_2;
    fj["rows_used"] = fit.rows_used;
    fj["window_factor"] = job.window;
    fj["t_max"] = job.t_max;
    fj["rel_tol"] = job.expect.rel_tol;
    fj["checks"] = checks;

    const auto t_write = std::chrono::steady_clock::now();
    ResultSet files;
    files.add("results.csv", kernel_csv(est));
    files.add("results.jsonl", kernel_jsonl(est));
    files.add("fit.json", fj.dump(2) + "\n");
    for (auto& [rel, content] : kernel_plots(est.rows)) files.add(rel, content);

    Manifest m;
    m.kind = "kernel";
    m.name = job.name;
    m.config_file = o.config;
    m.config_sha256 = sha256_hex(ini.text());
    m.spec_hash = hash;
    m.timestamp = utc_timestamp();
    m.version = artifact_version();
    m.command = o.command;
    m.status = pass ? "pass" : "fail";
    m.n = job.config.n;
    m.k = job.config.k;
    m.config_text = ini.text();
    m.timings = {{"restricted_kernel_decay", run_seconds}, {"write", seconds_since(t_write)},
                 {"total", seconds_since(t_start)}};
    const auto dir = files.commit(root, job.name + "-" + hash, m);
    out << "results: " << dir.string() << "\n";
    if (job.expect.any()) out << (pass ? "all expectations met" : "some expectations FAIL") << "\n";
    return pass ? kExitPass : kExitFail;
}

int cmd_factor(const FactorOptions& o, std::ostream& out) {
    const auto sym = with_numeric_derivatives(symbols::by_name(o.symbol));
    Vec x = Vec::Zero(sym.x_dim);
    if (!o.x.empty()) {
        const auto v = parse_reals(o.x);
        if (static_cast<int>(v.size()) != sym.x_dim)
            throw DimensionError("--x needs " + std::to_string(sym.x_dim) + " components for " + o.symbol);
        for (int i = 0; i < sym.x_dim; ++i) x[i] = v[static_cast<std::size_t>(i)];
    }
    const auto v = parse_reals(o.xi);
    if (static_cast<int>(v.size()) != sym.xi_dim)
        throw DimensionError("--xi needs " + std::to_string(sym.xi_dim) + " components for " + o.symbol);
    Vec xi(sym.xi_dim);
    for (int i = 0; i < sym.xi_dim; ++i) xi[i] = v[static_cast<std::size_t>(i)];
    if (o.axis < 1 || o.axis > sym.xi_dim)
        throw DimensionError("--axis must lie in 1.." + std::to_string(sym.xi_dim));
    const int axis = o.axis - 1;

    out << "symbol " << sym.name << " at x0 = " << vec_str(x) << ", xi0 = " << vec_str(xi) << ", solving for xi_"
        << o.axis << "\n";
    out << "p(x0, xi0) = " << num(sym.real(x, xi), 6) << "\n";
    const auto f = quant::symbol_factor(sym, x, xi, axis);

    const Vec rest0 = quant::drop_axis(xi, axis);
    out << "a(x0, xi') samples:\n";
    if (rest0.size() == 0) {
        out << "  a(x0) = " << num(f.a.real(x, rest0), 10) << "\n";
    } else {
        for (double d : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
            Vec r = rest0;
            r[0] += d;
            if (!f.valid_box.contains(x, quant::insert_axis(r, axis, xi[axis]))) continue;
            out << "  xi' = " << pad(vec_str(r), 18) << "a = " << num(f.a.real(x, r), 10) << "\n";
        }
    }
    out << "e(x0, xi) samples along xi_" << o.axis << ":\n";
    for (double d : {-0.1, 0.0, 0.1}) {
        Vec q = xi;
        q[axis] += d;
        out << "  xi = " << pad(vec_str(q), 20) << "e = " << num(f.elliptic_factor.real(x, q), 10) << "\n";
    }
    const auto& b = f.valid_box;
    out << "valid_box: x in [" << vec_str(b.x_lo) << ", " << vec_str(b.x_hi) << "], xi in [" << vec_str(b.xi_lo)
        << ", " << vec_str(b.xi_hi) << "]\n";

    const auto report = quant::admissibility_check(sym, {{x, xi}});
    const auto& pt = report.points.front();
    out << "(A1) grad_xi p nonzero: " << (pt.a1 ? "holds" : "fails") << "\n";
    out << "(A2) second fundamental form eigenvalues " << vec_str(pt.eigenvalues) << ": "
        << quant::to_string(pt.curvature) << " -> "
        << (pt.curvature == quant::Curvature::positive_definite ? "holds" : "fails") << "\n";
    return kExitPass;
}

int cmd_render(const RenderOptions& o, std::ostream& out) {
    const fs::path dir = o.dir;
    const auto manifest = Manifest::from_json(ojson::parse(read_file(dir / "manifest.json")));
    const auto plots = render_plots(dir, manifest);
    std::vector<std::string> listed;
    for (const auto& f : manifest.files)
        if (f.rfind("plot/", 0) == 0) listed.push_back(f);

    if (!o.check) {
        for (const auto& [rel, content] : plots) write_file_atomic(dir / rel, content);
        out << "rendered " << plots.size() << " plot files into " << (dir / "plot").string() << "\n";
        return kExitPass;
    }
    std::size_t bad = 0;
    for (const auto& rel : listed) {
        auto it = plots.find(rel);
        if (it == plots.end()) {
            out << "missing from render: " << rel << "\n";
            ++bad;
        } else if (!fs::exists(dir / rel) || read_file(dir / rel) != it->second) {
            out << "differs: " << rel << "\n";
            ++bad;
        }
    }
    for (const auto& [rel, content] : plots)
        if (std::find(listed.begin(), listed.end(), rel) == listed.end()) {
            out << "not in manifest: " << rel << "\n";
            ++bad;
        }
    if (bad) {
        out << bad << " plot files do not round-trip\n";
        return kExitFail;
    }
    out << "all " << listed.size() << " plot files re-render byte-identically\n";
    return kExitPass;
}

}  // namespace qmr::cli
