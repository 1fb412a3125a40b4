#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "qmr/errors.hpp"

namespace qmr::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    boost::algorithm::trim(s);
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(", \t"), boost::algorithm::token_compress_on);
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const std::string& s) { return s.empty(); }),
                parts.end());
    return parts;
}

double parse_plain(const std::string& s) {
    if (s == "pi") return std::numbers::pi;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("cannot parse number '" + s + "'");
    }
    if (used != s.size()) throw DomainError("cannot parse number '" + s + "'");
    return v;
}

}  // namespace

double parse_real(const std::string& token) {
    const std::string s = trim(token);
    if (s.empty()) throw DomainError("empty number");
    if (auto caret = s.find('^'); caret != std::string::npos)
        return std::pow(parse_plain(s.substr(0, caret)), parse_plain(s.substr(caret + 1)));
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const double den = parse_plain(s.substr(slash + 1));
        if (den == 0.0) throw DomainError("zero denominator in '" + s + "'");
        return parse_plain(s.substr(0, slash)) / den;
    }
    return parse_plain(s);
}

std::vector<double> parse_reals(const std::string& list) {
    std::vector<double> out;
    for (const auto& t : split_list(list)) out.push_back(parse_real(t));
    return out;
}

std::vector<ExtRational> parse_exponents(const std::string& list) {
    std::vector<ExtRational> out;
    for (const auto& t : split_list(list)) out.push_back(ExtRational::parse(t));
    if (out.empty()) throw DomainError("empty exponent list");
    return out;
}

modes::HLadder parse_degree_ladder(const std::string& text, int sphere_dim) {
    const std::string s = trim(text);
    if (auto colon = s.find(':'); colon != std::string::npos) {
        const int first = static_cast<int>(parse_plain(trim(s.substr(0, colon))));
        const int last = static_cast<int>(parse_plain(trim(s.substr(colon + 1))));
        return modes::HLadder::doubling_degrees(first, last, sphere_dim);
    }
    std::vector<int> degrees;
    for (const auto& t : split_list(s)) {
        const double v = parse_plain(t);
        if (v != std::floor(v)) throw DomainError("degree '" + t + "' is not an integer");
        degrees.push_back(static_cast<int>(v));
    }
    return modes::HLadder::from_degrees(degrees, sphere_dim);
}

std::vector<double> parse_h_list(const std::string& text) {
    const std::string s = trim(text);
    if (auto colon = s.find(':'); colon != std::string::npos) {
        const auto ladder = modes::HLadder::dyadic(parse_plain(trim(s.substr(0, colon))),
                                                   parse_plain(trim(s.substr(colon + 1))));
        return ladder.values;
    }
    auto hs = parse_reals(s);
    if (hs.empty()) throw DomainError("empty h list");
    for (double h : hs)
        if (!(h > 0 && h < 1)) throw DomainError("h = " + std::to_string(h) + " must lie in (0, 1)");
    return hs;
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    ini.text_ = text;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, ini.tree_);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    std::istringstream lines(text);
    std::string line, section;
    for (int no = 1; std::getline(lines, line); ++no) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            ini.lines_["[" + section + "]"] = no;
            continue;
        }
        if (auto eq = t.find('='); eq != std::string::npos) ini.lines_[section + "." + trim(t.substr(0, eq))] = no;
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

bool IniFile::has_section(const std::string& section) const { return tree_.get_child_optional(section).has_value(); }

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    auto child = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!child) return std::nullopt;
    return trim(child->data());
}

std::string IniFile::require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v || v->empty()) {
        const int line = lines_.count("[" + section + "]") ? lines_.at("[" + section + "]") : 0;
        throw ConfigError(origin_ + (line ? ":" + std::to_string(line) : std::string()) + ": [" + section + "] " +
                          key + ": required field is missing");
    }
    return *v;
}

int IniFile::line_of(const std::string& section, const std::string& key) const {
    auto it = lines_.find(section + "." + key);
    return it == lines_.end() ? 0 : it->second;
}

void IniFile::fail(const std::string& section, const std::string& key, const std::string& msg) const {
    const int line = line_of(section, key);
    throw ConfigError(origin_ + (line ? ":" + std::to_string(line) : std::string()) + ": [" + section + "] " + key +
                      ": " + msg);
}

void IniFile::check_schema(const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, child] : tree_) {
        auto it = schema.find(section);
        if (it == schema.end()) {
            if (child.empty()) fail("", section, "key outside any section");
            const int line = lines_.count("[" + section + "]") ? lines_.at("[" + section + "]") : 0;
            throw ConfigError(origin_ + ":" + std::to_string(line) + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : child) {
            (void)value;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                fail(section, key, "unknown field");
        }
    }
}

double IniFile::get_real(const std::string& section, const std::string& key, double fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
        return parse_real(*v);
    } catch (const Error& e) {
        fail(section, key, e.what());
    }
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
        const double d = parse_plain(*v);
        if (d != std::floor(d)) throw DomainError("'" + *v + "' is not an integer");
        return static_cast<int>(d);
    } catch (const Error& e) {
        fail(section, key, e.what());
    }
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    const std::string s = boost::algorithm::to_lower_copy(*v);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
}

scaling::ExperimentSpec load_experiment(const IniFile& ini) {
    ini.check_schema({{"experiment", {"name", "seed", "tolerance", "probe_log"}},
                      {"family", {"name", "sphere_dim"}},
                      {"submanifold", {"kind", "inclination", "samples_per_degree"}},
                      {"exponents", {"p"}},
                      {"ladder", {"degrees", "h"}}});
    scaling::ExperimentSpec spec;
    spec.name = ini.get("experiment", "name").value_or("experiment");
    if (spec.name.empty() || spec.name.find_first_of("/\\ ") != std::string::npos)
        ini.fail("experiment", "name", "must be a non-empty name without spaces or slashes");
    spec.seed = static_cast<std::uint64_t>(ini.get_int("experiment", "seed", 0));
    spec.tolerance = ini.get_real("experiment", "tolerance", 0.05);
    spec.probe_log = ini.get_bool("experiment", "probe_log", false);

    spec.family.name = ini.require("family", "name");
    spec.family.sphere_dim = ini.get_int("family", "sphere_dim", 2);

    spec.submanifold.kind = ini.get("submanifold", "kind").value_or(spec.family.sphere_dim == 3 ? "geodesic_s3"
                                                                                                : "great_circle");
    if (auto inc = ini.get("submanifold", "inclination")) {
        if (*inc == "polar")
            spec.submanifold.inclination = std::numbers::pi / 2;
        else if (*inc == "equator")
            spec.submanifold.inclination = 0.0;
        else
            spec.submanifold.inclination = ini.get_real("submanifold", "inclination", 0.0);
    }
    spec.submanifold.samples_per_degree = ini.get_int("submanifold", "samples_per_degree", 16);

    try {
        spec.p_list = parse_exponents(ini.require("exponents", "p"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        ini.fail("exponents", "p", e.what());
    }

    const auto degrees = ini.get("ladder", "degrees");
    const auto hs = ini.get("ladder", "h");
    if (degrees && hs) ini.fail("ladder", "h", "give either degrees or h, not both");
    try {
        if (degrees) {
            spec.ladder = parse_degree_ladder(*degrees, spec.family.sphere_dim);
        } else if (hs) {
            spec.ladder.values = parse_h_list(*hs);
            spec.ladder.provenance = "explicit";
        } else {
            ini.require("ladder", "degrees");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        ini.fail("ladder", degrees ? "degrees" : "h", e.what());
    }

    // Map the library's "field: message" errors back to a line.
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        static const std::map<std::string, std::pair<std::string, std::string>> where{
            {"family.name", {"family", "name"}},
            {"family.sphere_dim", {"family", "sphere_dim"}},
            {"submanifold.kind", {"submanifold", "kind"}},
            {"submanifold.samples_per_degree", {"submanifold", "samples_per_degree"}},
            {"tolerance", {"experiment", "tolerance"}},
            {"p", {"exponents", "p"}},
            {"ladder", {"ladder", degrees ? "degrees" : "h"}}};
        const auto colon = msg.find(": ");
        if (colon != std::string::npos) {
            auto it = where.find(msg.substr(0, colon));
            if (it != where.end()) ini.fail(it->second.first, it->second.second, msg.substr(colon + 2));
        }
        throw ConfigError(ini.origin() + ": " + msg);
    }
    return spec;
}

std::vector<std::pair<double, double>> KernelJob::resolved_pairs() const {
    if (!time_pairs.empty()) return time_pairs;
    return kernel::default_time_pairs(*std::min_element(h_list.begin(), h_list.end()), t_max, window);
}

std::string KernelJob::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "name=" << name << ";hamiltonian=" << hamiltonian << ";n=" << config.n << ";k=" << config.k
       << ";slice=" << kernel::to_string(config.slice) << ";period=" << config.period
       << ";cutoff=" << config.cutoff_inner << "," << config.cutoff_outer << ";budget=" << config.budget
       << ";steps=" << config.steps_per_unit_time << ";h=";
    for (std::size_t i = 0; i < h_list.size(); ++i) os << (i ? "," : "") << h_list[i];
    os << ";pairs=";
    for (std::size_t i = 0; i < time_pairs.size(); ++i)
        os << (i ? "," : "") << time_pairs[i].first << ":" << time_pairs[i].second;
    os << ";window=" << window << ";t_max=" << t_max;
    return os.str();
}

KernelJob load_kernel(const IniFile& ini) {
    ini.check_schema({{"kernel", {"name", "hamiltonian", "n", "k", "slice", "period", "cutoff_inner", "cutoff_outer",
                                  "budget", "steps_per_unit_time"}},
                      {"ladder", {"h"}},
                      {"times", {"pairs", "window", "t_max"}},
                      {"expect", {"mu_inf", "sigma_inf", "mu_2", "sigma_2", "rel_tol"}}});
    KernelJob job;
    job.name = ini.get("kernel", "name").value_or("kernel");
    job.hamiltonian = ini.require("kernel", "hamiltonian");
    try {
        (void)symbols::by_name(job.hamiltonian);
    } catch (const Error& e) {
        ini.fail("kernel", "hamiltonian", e.what());
    }
    auto& c = job.config;
    c.n = ini.get_int("kernel", "n", 2);
    c.k = ini.get_int("kernel", "k", 1);
    if (c.n < 2 || c.n > 4) ini.fail("kernel", "n", "must be 2, 3 or 4");
    if (c.k < 1 || c.k > c.n - 1) ini.fail("kernel", "k", "must satisfy 1 <= k <= n-1");
    if (auto s = ini.get("kernel", "slice")) {
        try {
            c.slice = kernel::parse_slice(*s);
        } catch (const Error& e) {
            ini.fail("kernel", "slice", e.what());
        }
    }
    c.period = ini.get_real("kernel", "period", c.period);
    c.cutoff_inner = ini.get_real("kernel", "cutoff_inner", c.cutoff_inner);
    c.cutoff_outer = ini.get_real("kernel", "cutoff_outer", c.cutoff_outer);
    if (!(c.period > 0)) ini.fail("kernel", "period", "must be positive");
    if (!(c.cutoff_inner > 0 && c.cutoff_outer > c.cutoff_inner))
        ini.fail("kernel", "cutoff_outer", "need 0 < cutoff_inner < cutoff_outer");
    const int budget = ini.get_int("kernel", "budget", static_cast<int>(c.budget));
    if (budget < 1) ini.fail("kernel", "budget", "must be positive");
    c.budget = static_cast<std::size_t>(budget);
    c.steps_per_unit_time = ini.get_int("kernel", "steps_per_unit_time", c.steps_per_unit_time);
    if (c.steps_per_unit_time < 1) ini.fail("kernel", "steps_per_unit_time", "must be positive");

    try {
        job.h_list = parse_h_list(ini.require("ladder", "h"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        ini.fail("ladder", "h", e.what());
    }

    job.window = ini.get_real("times", "window", job.window);
    job.t_max = ini.get_real("times", "t_max", job.t_max);
    if (!(job.window > 0)) ini.fail("times", "window", "must be positive");
    if (!(job.t_max > 0)) ini.fail("times", "t_max", "must be positive");
    const std::string pairs = ini.get("times", "pairs").value_or("auto");
    if (pairs != "auto") {
        try {
            std::vector<std::string> items;
            boost::algorithm::split(items, pairs, boost::algorithm::is_any_of(","));
            for (auto item : items) {
                item = trim(item);
                if (item.empty()) continue;
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw DomainError("pair '" + item + "' is not of the form t:s");
                job.time_pairs.emplace_back(parse_real(item.substr(0, colon)), parse_real(item.substr(colon + 1)));
            }
            if (job.time_pairs.empty()) throw DomainError("no time pairs");
        } catch (const Error& e) {
            ini.fail("times", "pairs", e.what());
        }
    }

    auto opt = [&](const char* key) -> std::optional<double> {
        if (!ini.get("expect", key)) return std::nullopt;
        return ini.get_real("expect", key, 0.0);
    };
    job.expect.mu_inf = opt("mu_inf");
    job.expect.sigma_inf = opt("sigma_inf");
    job.expect.mu_2 = opt("mu_2");
    job.expect.sigma_2 = opt("sigma_2");
    job.expect.rel_tol = ini.get_real("expect", "rel_tol", 0.1);
    if (!(job.expect.rel_tol > 0)) ini.fail("expect", "rel_tol", "must be positive");
    return job;
}

}  // namespace qmr::cli
