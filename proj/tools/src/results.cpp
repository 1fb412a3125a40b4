#include "results.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <openssl/evp.h>

#include "qmr/errors.hpp"

#ifndef QMR_VERSION
#define QMR_VERSION "0.0.0"
#endif

namespace qmr::cli {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::vector<std::string>> csv_records(const std::string& text, const std::string& expected_header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != expected_header)
        throw DataError("unexpected table header '" + line + "', wanted '" + expected_header + "'");
    std::vector<std::string> cols;
    boost::algorithm::split(cols, expected_header, boost::algorithm::is_any_of(","));
    std::vector<std::vector<std::string>> out;
    for (int no = 2; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        boost::algorithm::split(f, line, boost::algorithm::is_any_of(","));
        if (f.size() != cols.size()) throw DataError("table line " + std::to_string(no) + " has the wrong field count");
        out.push_back(std::move(f));
    }
    return out;
}

double to_num(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DataError("bad number '" + s + "' in table");
    return v;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* artifact_version() { return QMR_VERSION; }

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

void append_line(const fs::path& path, const std::string& line) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    const std::string buf = line + "\n";
    const auto n = ::write(fd, buf.data(), buf.size());
    ::close(fd);
    if (n != static_cast<ssize_t>(buf.size())) throw std::runtime_error("short write to " + path.string());
}

fs::path results_root(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("QMRLAB_RESULTS"); env && *env) return env;
    return "results";
}

ojson Manifest::to_json() const {
    ojson j;
    j["kind"] = kind;
    j["name"] = name;
    j["directory"] = directory;
    j["config_file"] = config_file;
    j["config_sha256"] = config_sha256;
    j["spec_hash"] = spec_hash;
    j["timestamp"] = timestamp;
    j["version"] = version;
    j["command"] = command;
    ojson t = ojson::object();
    for (const auto& [k, v] : timings) t[k] = v;
    j["timings_seconds"] = t;
    j["files"] = files;
    j["status"] = status;
    j["n"] = n;
    j["k"] = k;
    j["config"] = config_text;
    return j;
}

Manifest Manifest::from_json(const ojson& j) {
    Manifest m;
    m.kind = j.at("kind").get<std::string>();
    m.name = j.at("name").get<std::string>();
    m.directory = j.value("directory", "");
    m.config_file = j.value("config_file", "");
    m.config_sha256 = j.value("config_sha256", "");
    m.spec_hash = j.value("spec_hash", "");
    m.timestamp = j.value("timestamp", "");
    m.version = j.value("version", "");
    m.command = j.value("command", "");
    if (j.contains("timings_seconds"))
        for (const auto& [k, v] : j.at("timings_seconds").items()) m.timings.emplace_back(k, v.get<double>());
    m.files = j.at("files").get<std::vector<std::string>>();
    m.status = j.value("status", "");
    m.n = j.value("n", 0);
    m.k = j.value("k", 0);
    m.config_text = j.value("config", "");
    return m;
}

void ResultSet::add(const std::string& relpath, std::string content) { files_[relpath] = std::move(content); }

fs::path ResultSet::commit(const fs::path& root, const std::string& stem, Manifest& manifest) const {
    fs::create_directories(root);
    std::string name = stem;
    for (int i = 2; fs::exists(root / name); ++i) name = stem + "-" + std::to_string(i);
    const fs::path final_dir = root / name;
    const fs::path staging = root / ("." + name + ".tmp-" + std::to_string(::getpid()));
    fs::remove_all(staging);
    manifest.directory = name;
    manifest.files.clear();
    for (const auto& [rel, content] : files_) {
        manifest.files.push_back(rel);
        const fs::path p = staging / rel;
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + p.string());
    }
    {
        std::ofstream out(staging / "manifest.json", std::ios::binary);
        out << manifest.to_json().dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write manifest in " + staging.string());
    }
    fs::rename(staging, final_dir);
    append_line(root / "manifests.jsonl", manifest.to_json().dump());
    return final_dir;
}

std::string exponent_tag(const ExtRational& p) {
    std::string s = p.str();
    std::replace(s.begin(), s.end(), '/', '_');
    return s;
}

std::string scaling_csv(const scaling::ExperimentTable& table) {
    std::string out = "rung,degree,h,p,norm,nodes\n";
    for (const auto& r : table.rows)
        out += std::to_string(r.rung) + "," + std::to_string(r.degree) + "," + g17(r.h) + "," + r.p.str() + "," +
               g17(r.norm) + "," + std::to_string(r.nodes) + "\n";
    return out;
}

std::string scaling_jsonl(const scaling::ExperimentTable& table) {
    std::string out;
    for (const auto& r : table.rows) {
        ojson j;
        j["rung"] = r.rung;
        j["degree"] = r.degree;
        j["h"] = r.h;
        j["p"] = r.p.str();
        j["norm"] = r.norm;
        j["nodes"] = r.nodes;
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<scaling::TableRow> parse_scaling_csv(const std::string& text) {
    std::vector<scaling::TableRow> rows;
    for (const auto& f : csv_records(text, "rung,degree,h,p,norm,nodes")) {
        scaling::TableRow r;
        r.rung = static_cast<std::size_t>(std::stoull(f[0]));
        r.degree = std::stoi(f[1]);
        r.h = to_num(f[2]);
        r.p = ExtRational::parse(f[3]);
        r.norm = to_num(f[4]);
        r.nodes = static_cast<std::size_t>(std::stoull(f[5]));
        rows.push_back(r);
    }
    return rows;
}

std::string verdicts_csv(const std::vector<VerdictRecord>& v) {
    std::string out =
        "p,delta,log_case,expected,slope,tol,outcome,slope_without_log,residual_without_log,slope_with_log,"
        "log_coefficient_with_log,residual_with_log,rungs_used,rungs_trimmed\n";
    for (const auto& r : v) {
        out += r.p.str() + "," + to_string(r.theory.power) + "," + (r.theory.log_half_power ? "true" : "false") + "," +
               g17(r.verdict.expected) + "," + g17(r.verdict.slope) + "," + g17(r.verdict.tol) + "," +
               scaling::to_string(r.verdict.outcome) + "," + g17(r.fit.slope_without_log) + "," +
               g17(r.fit.residual_without_log) + "," + g17(r.fit.slope_with_log) + "," +
               g17(r.fit.log_coefficient_with_log) + "," + g17(r.fit.residual_with_log) + "," +
               std::to_string(r.fit.rungs_used) + "," + std::to_string(r.fit.rungs_trimmed) + "\n";
    }
    return out;
}

std::string verdicts_jsonl(const std::vector<VerdictRecord>& v) {
    std::string out;
    for (const auto& r : v) {
        ojson j;
        j["p"] = r.p.str();
        j["delta"] = to_string(r.theory.power);
        j["log_case"] = r.theory.log_half_power;
        j["expected"] = r.verdict.expected;
        j["slope"] = r.verdict.slope;
        j["tol"] = r.verdict.tol;
        j["outcome"] = scaling::to_string(r.verdict.outcome);
        j["slope_without_log"] = r.fit.slope_without_log;
        j["residual_without_log"] = r.fit.residual_without_log;
        j["slope_with_log"] = r.fit.slope_with_log;
        j["log_coefficient_with_log"] = r.fit.log_coefficient_with_log;
        j["residual_with_log"] = r.fit.residual_with_log;
        j["rungs_used"] = r.fit.rungs_used;
        j["rungs_trimmed"] = r.fit.rungs_trimmed;
        out += j.dump() + "\n";
    }
    return out;
}

std::map<std::string, std::string> scaling_plots(const std::vector<scaling::TableRow>& rows, int n, int k) {
    std::vector<ExtRational> ps;
    for (const auto& r : rows)
        if (std::find(ps.begin(), ps.end(), r.p) == ps.end()) ps.push_back(r.p);
    std::map<std::string, std::string> out;
    for (const auto& p : ps) {
        std::vector<scaling::TableRow> sel;
        for (const auto& r : rows)
            if (r.p == p) sel.push_back(r);
        std::string s = "# log(1/h) log(norm) at p = " + p.str() + "\n";
        try {
            const auto fit = scaling::fit_power_law(sel, false);
            s += "# fitted slope " + g10(fit.slope) + " intercept " + g10(fit.intercept) + " over " +
                 std::to_string(fit.rungs_used) + " rungs\n";
        } catch (const Error& e) {
            s += std::string("# no fit: ") + e.what() + "\n";
        }
        try {
            s += "# theory delta(" + std::to_string(n) + "," + std::to_string(k) + "," + p.str() +
                 ") = " + theory::delta(n, k, p).str() + "\n";
        } catch (const Error&) {
        }
        for (const auto& r : sel) s += g10(std::log(1.0 / r.h)) + " " + g10(std::log(r.norm)) + "\n";
        out["plot/loglog_p" + exponent_tag(p) + ".dat"] = s;
    }
    return out;
}

std::string kernel_csv(const kernel::KernelEstimate& est) {
    std::string out = "h,t,s,tau,sup,opnorm\n";
    for (const auto& r : est.rows)
        out += g17(r.h) + "," + g17(r.t) + "," + g17(r.s) + "," + g17(r.tau()) + "," + g17(r.sup) + "," +
               g17(r.opnorm) + "\n";
    return out;
}

std::string kernel_jsonl(const kernel::KernelEstimate& est) {
    std::string out;
    for (const auto& r : est.rows) {
        ojson j;
        j["h"] = r.h;
        j["t"] = r.t;
        j["s"] = r.s;
        j["tau"] = r.tau();
        j["sup"] = r.sup;
        j["opnorm"] = r.opnorm;
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<kernel::KernelRow> parse_kernel_csv(const std::string& text) {
    std::vector<kernel::KernelRow> rows;
    for (const auto& f : csv_records(text, "h,t,s,tau,sup,opnorm")) {
        kernel::KernelRow r;
        r.h = to_num(f[0]);
        r.t = to_num(f[1]);
        r.s = to_num(f[2]);
        r.sup = to_num(f[4]);
        r.opnorm = to_num(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::map<std::string, std::string> kernel_plots(const std::vector<kernel::KernelRow>& rows) {
    std::vector<double> hs;
    for (const auto& r : rows)
        if (std::find(hs.begin(), hs.end(), r.h) == hs.end()) hs.push_back(r.h);
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        std::string sup = "# log(|t-s|) log(sup |kernel|) at h = " + g10(hs[i]) + "\n";
        std::string op = "# log(|t-s|) log(L2 operator norm) at h = " + g10(hs[i]) + "\n";
        for (const auto& r : rows) {
            if (r.h != hs[i] || !(r.tau() > 0)) continue;
            sup += g10(std::log(r.tau())) + " " + g10(std::log(r.sup)) + "\n";
            op += g10(std::log(r.tau())) + " " + g10(std::log(r.opnorm)) + "\n";
        }
        out["plot/sup_h" + std::to_string(i) + ".dat"] = sup;
        out["plot/opnorm_h" + std::to_string(i) + ".dat"] = op;
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> render_plots(const fs::path& dir, const Manifest& manifest) {
    const std::string table = read_file(dir / "results.csv");
    if (manifest.kind == "scaling") return scaling_plots(parse_scaling_csv(table), manifest.n, manifest.k);
    if (manifest.kind == "kernel") return kernel_plots(parse_kernel_csv(table));
    throw DataError("manifest kind '" + manifest.kind + "' has no plot data");
}

}  // namespace qmr::cli
