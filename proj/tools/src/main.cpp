#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qmr/errors.hpp"

using namespace qmr::cli;

namespace {

const std::map<std::string, std::string> kHints{
    {"delta", "qmrlab delta --n N --k K [--p P | --sweep [--full-manifold] [--out FILE]]  (n >= 2, 1 <= k <= n-1, p >= 2 or inf)"},
    {"pairs", "qmrlab pairs --n N --k K | --sigma-inf S [--sigma-2 S2 --mu-inf M --mu-2 M2] [--p P]"},
    {"run", "qmrlab run CONFIG [--dry-run] [--tol T] [--ladder FIRST:LAST|L1,L2,...] [--budget NODES] [--out DIR]"},
    {"kernel", "qmrlab kernel CONFIG [--dry-run] [--budget NODES] [--out DIR]"},
    {"factor", "qmrlab factor SYMBOL --xi XI1,XI2 [--x X1,X2] [--axis I]"},
    {"render", "qmrlab render RUN_DIR [--check]"},
};

std::string joined(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmrlab: restriction estimates for semiclassical quasimodes"};
    app.require_subcommand(1);

    DeltaOptions delta;
    auto* d = app.add_subcommand("delta", "exponent delta(n, k, p) as an exact rational, or a 1/p sweep");
    d->add_option("--n", delta.n, "ambient dimension")->required();
    d->add_option("--k", delta.k, "submanifold dimension")->required();
    d->add_option("--p", delta.p, "Lebesgue exponent (integer, a/b, decimal or inf)");
    d->add_flag("--sweep", delta.sweep, "two-column (1/p, delta) polyline over 1/p in [0, 1/2]");
    d->add_flag("--full-manifold", delta.full_manifold, "append the whole-manifold comparison curve to the sweep");
    d->add_option("--out", delta.out, "write the sweep here instead of stdout");

    PairsOptions pairs;
    auto* p = app.add_subcommand("pairs", "admissible (r, p) curve, diagonal pair and h-exponents");
    p->add_option("--n", pairs.n, "ambient dimension");
    p->add_option("--k", pairs.k, "submanifold dimension");
    p->add_option("--sigma-inf", pairs.sigma_inf, "L1 -> Linf decay rate");
    p->add_option("--sigma-2", pairs.sigma_2, "L2 -> L2 decay rate (default 0)");
    p->add_option("--mu-inf", pairs.mu_inf, "L1 -> Linf h-power (default 0)");
    p->add_option("--mu-2", pairs.mu_2, "L2 -> L2 h-power (default 0)");
    p->add_option("--p", pairs.p, "single exponent instead of the default list");

    RunOptions run;
    auto* r = app.add_subcommand("run", "run an h-ladder scaling experiment from a config file");
    r->add_option("config", run.config, "experiment config (INI)")->required();
    r->add_flag("--dry-run", run.dry_run, "print the planned rungs and write nothing");
    r->add_option("--tol", run.tol, "override the verdict tolerance");
    r->add_option("--ladder", run.ladder, "override the ladder: FIRST:LAST doubling degrees or a list");
    r->add_option("--budget", run.budget, "max quadrature nodes per rung");
    r->add_option("--out", run.out, "results root (default $QMRLAB_RESULTS or ./results)");

    KernelOptions kern;
    auto* k = app.add_subcommand("kernel", "restricted kernel decay sweep and exponent fit");
    k->add_option("config", kern.config, "kernel config (INI)")->required();
    k->add_flag("--dry-run", kern.dry_run, "print the planned sweep and write nothing");
    k->add_option("--budget", kern.budget, "max submanifold nodes for dense kernels");
    k->add_option("--out", kern.out, "results root (default $QMRLAB_RESULTS or ./results)");

    FactorOptions factor;
    auto* f = app.add_subcommand("factor", "factor a built-in symbol near a characteristic point");
    f->add_option("symbol", factor.symbol, "sphere, hyperbola, flat, degenerate, affine, free, free2, pendulum, saddle, oscillator")
        ->required();
    f->add_option("--x", factor.x, "base point x0 (comma list, default origin)");
    f->add_option("--xi", factor.xi, "frequency xi0 (comma list)")->required();
    f->add_option("--axis", factor.axis, "frequency axis to solve for (1-based)");

    RenderOptions render;
    auto* g = app.add_subcommand("render", "re-render plot data of a results directory");
    g->add_option("dir", render.dir, "run directory containing manifest.json")->required();
    g->add_flag("--check", render.check, "compare with the files on disk instead of writing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    const std::string command = joined(argc, argv);
    run.command = command;
    kern.command = command;
    std::string name;
    try {
        if (d->parsed()) {
            name = "delta";
            return cmd_delta(delta, std::cout);
        }
        if (p->parsed()) {
            name = "pairs";
            return cmd_pairs(pairs, std::cout);
        }
        if (r->parsed()) {
            name = "run";
            return cmd_run(run, std::cout);
        }
        if (k->parsed()) {
            name = "kernel";
            return cmd_kernel(kern, std::cout);
        }
        if (f->parsed()) {
            name = "factor";
            return cmd_factor(factor, std::cout);
        }
        if (g->parsed()) {
            name = "render";
            return cmd_render(render, std::cout);
        }
    } catch (const qmr::ConfigError& e) {
        std::cout.flush();
        std::cerr << "config error: " << e.what() << "\n";
        return kExitError;
    } catch (const qmr::Error& e) {
        std::cout.flush();
        std::cerr << "error: " << e.what() << "\n";
        if (auto it = kHints.find(name); it != kHints.end()) std::cerr << "usage: " << it->second << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
