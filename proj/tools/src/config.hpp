#pragma once

// INI configuration for `run` and `kernel`. Parsing goes through
// boost::property_tree; a side index of key -> line number lets errors
// point at the offending line.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "qmr/kernel.hpp"
#include "qmr/rational.hpp"
#include "qmr/scaling.hpp"

namespace qmr::cli {

class IniFile {
public:
    /// Throws ConfigError("<origin>:<line>: ...") on syntax errors.
    static IniFile parse(const std::string& text, const std::string& origin);
    static IniFile load(const std::string& path);

    const std::string& origin() const { return origin_; }
    const std::string& text() const { return text_; }

    bool has_section(const std::string& section) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string require(const std::string& section, const std::string& key) const;
    /// 0 when the key is absent.
    int line_of(const std::string& section, const std::string& key) const;

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const;

    /// Rejects sections and keys outside the schema.
    void check_schema(const std::map<std::string, std::vector<std::string>>& schema) const;

    double get_real(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

private:
    boost::property_tree::ptree tree_;
    std::map<std::string, int> lines_;  // "section.key" and "[section]"
    std::string origin_;
    std::string text_;
};

/// "0.25", "1/4", "2^-5", "pi/2".
double parse_real(const std::string& token);
std::vector<double> parse_reals(const std::string& list);
std::vector<ExtRational> parse_exponents(const std::string& list);

/// "64:2048" (doubling degrees), "64,128,256" or "64 128 256".
modes::HLadder parse_degree_ladder(const std::string& text, int sphere_dim);
/// "5:9" (h = 2^-5 .. 2^-9) or an explicit list of h values.
std::vector<double> parse_h_list(const std::string& text);

scaling::ExperimentSpec load_experiment(const IniFile& ini);

struct KernelExpectation {
    std::optional<double> mu_inf, sigma_inf, mu_2, sigma_2;
    double rel_tol = 0.1;
    bool any() const { return mu_inf || sigma_inf || mu_2 || sigma_2; }
};

struct KernelJob {
    std::string name = "kernel";
    std::string hamiltonian = "free";
    kernel::KernelConfig config;
    std::vector<double> h_list;
    std::vector<std::pair<double, double>> time_pairs;  // empty: default_time_pairs
    double window = 8.0;
    double t_max = 0.5;
    KernelExpectation expect;

    std::vector<std::pair<double, double>> resolved_pairs() const;
    std::string canonical() const;
};

KernelJob load_kernel(const IniFile& ini);

}  // namespace qmr::cli
