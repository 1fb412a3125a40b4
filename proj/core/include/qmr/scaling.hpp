#pragma once

// h-ladder experiments: generate a quasimode family, restrict it to a
// submanifold, take L^p norms, fit log N = -delta log h (+ log term) + c
// and compare the slope with the exponent table.

#include <cstdint>
#include <string>
#include <vector>

#include "qmr/exponents.hpp"
#include "qmr/quasimodes.hpp"
#include "qmr/rational.hpp"

namespace qmr::scaling {

struct FamilySpec {
    std::string name = "zonal";  // zonal | highest_weight | constant
    int sphere_dim = 2;
};

struct SubmanifoldSpec {
    std::string kind = "great_circle";  // great_circle | geodesic_s3
    double inclination = 1.5707963267948966;
    int samples_per_degree = 16;  // quadrature nodes per unit of degree
};

struct ExperimentSpec {
    std::string name = "experiment";
    FamilySpec family;
    SubmanifoldSpec submanifold;
    std::vector<ExtRational> p_list;
    modes::HLadder ladder;
    double tolerance = 0.05;
    std::uint64_t seed = 0;
    bool probe_log = false;

    /// Throws ConfigError on a malformed spec (ladder < 6 rungs, tol <= 0, p < 2).
    void validate() const;
    /// Stable text form; equal specs give equal strings.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string hash() const;
    /// Ambient and submanifold dimension of the geometry.
    int ambient_dim() const;
    int submanifold_dim() const { return 1; }
};

/// Quadrature nodes a rung of the given degree samples on the submanifold.
std::size_t planned_nodes(const SubmanifoldSpec& s, int degree);

struct TableRow {
    std::size_t rung = 0;
    int degree = 0;
    double h = 0;
    ExtRational p{2};
    double norm = 0;
    std::size_t nodes = 0;
};

struct ExperimentTable {
    std::string spec_hash;
    std::vector<TableRow> rows;
    double seconds = 0;

    std::vector<TableRow> for_p(const ExtRational& p) const;
};

/// Deterministic: rungs run concurrently but rows are ordered by (rung, p).
ExperimentTable run_experiment(const ExperimentSpec& spec);

struct ScalingFit {
    double slope = 0;
    double log_coefficient = 0;  // 0 unless with_log
    double intercept = 0;
    double residual = 0;  // of the variant requested
    double slope_without_log = 0;
    double residual_without_log = 0;
    double slope_with_log = 0;
    double log_coefficient_with_log = 0;
    double residual_with_log = 0;
    bool with_log = false;
    bool log_variant_available = false;
    std::size_t rungs_used = 0;
    std::size_t rungs_trimmed = 0;
};

/// Least squares of log N = -delta log h [+ gamma/2 log log(1/h)] + c on the
/// rows of one p. The two coarsest rungs are dropped when the full residual
/// exceeds three times the residual without them.
ScalingFit fit_power_law(const std::vector<TableRow>& rows, bool with_log);
ScalingFit fit_power_law(const ExperimentTable& table, const ExtRational& p, bool with_log);

enum class Outcome { pass, fail, inconclusive };
const char* to_string(Outcome o);

struct Verdict {
    Outcome outcome = Outcome::fail;
    double slope = 0;
    double expected = 0;
    double tol = 0;
    bool log_case = false;
    double residual_without_log = 0;
    double residual_with_log = 0;
    std::string detail;

    /// Inconclusive log probes pass on the slope band alone.
    bool passed() const { return outcome != Outcome::fail; }
};

/// Pass iff |slope - power| <= tol. In the log case the with-log fit must
/// also have the smaller residual; residuals within 10% of each other give
/// "inconclusive" (decided by the slope band).
Verdict verdict(const ScalingFit& fit, const theory::DeltaResult& theory, double tol);

}  // namespace qmr::scaling
