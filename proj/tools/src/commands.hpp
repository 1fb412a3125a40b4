#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace qmr::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

struct DeltaOptions {
    int n = 2;
    int k = 1;
    std::string p;  // empty: the standard exponent list
    bool sweep = false;
    bool full_manifold = false;
    std::string out;  // sweep destination; empty -> stdout
};
int cmd_delta(const DeltaOptions& o, std::ostream& out);

struct PairsOptions {
    std::optional<int> n, k;
    std::string sigma_inf, sigma_2, mu_inf, mu_2, p;
};
int cmd_pairs(const PairsOptions& o, std::ostream& out);

struct RunOptions {
    std::string config;
    bool dry_run = false;
    std::optional<double> tol;
    std::string ladder;
    std::size_t budget = 0;  // max quadrature nodes per rung, 0 = unlimited
    std::string out;         // results root override
    std::string command;     // recorded in the manifest
};
int cmd_run(const RunOptions& o, std::ostream& out);

struct KernelOptions {
    std::string config;
    bool dry_run = false;
    std::size_t budget = 0;  // overrides the config's dense budget when > 0
    std::string out;
    std::string command;
};
int cmd_kernel(const KernelOptions& o, std::ostream& out);

struct FactorOptions {
    std::string symbol;
    std::string x;   // comma list; empty -> origin
    std::string xi;  // comma list
    int axis = 1;    // 1-based frequency axis
};
int cmd_factor(const FactorOptions& o, std::ostream& out);

struct RenderOptions {
    std::string dir;
    bool check = false;
};
int cmd_render(const RenderOptions& o, std::ostream& out);

}  // namespace qmr::cli
