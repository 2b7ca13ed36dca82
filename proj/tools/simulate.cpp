// simulate: runs bundled or user scenarios and writes summary.json, per-job CSV tables and Wigner grids.
#include "fockopt/core.hpp"
#include "fockopt/metrics.hpp"
#include "fockopt/protocols.hpp"
#include "fockopt/targets.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#ifndef SIM_SCENARIO_DIR
#define SIM_SCENARIO_DIR "tools/scenarios"
#endif

namespace fs = std::filesystem;
using namespace fockopt;

namespace {

enum Exit { kOk = 0, kValidation = 2, kZeroProb = 3, kStrict = 4 };

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string at_line(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return "";
    return "line " + std::to_string(m.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw ScenarioError(at_line(n) + what); }

using Params = std::map<std::string, double>;

struct Schema {
    std::set<std::string> required;
    std::set<std::string> optional;
    bool seed_r = false;  // exactly one of r_seed, r_seed_db
};

const std::set<std::string> kDetectorKeys{"eta", "dark_rate_cps", "window_s"};

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> s = [] {
        std::map<std::string, Schema> m;
        m["fock_prep"] = {{"n", "kappa"}, {}, false};
        m["photon_add_opa"] = {{"n", "kappa"}, {"eta", "dark_rate_cps", "window_s", "target_r"}, true};
        m["photon_add_fock"] = {{"n", "kappa_fock", "tau"}, {"eta", "dark_rate_cps", "window_s", "target_r"}, true};
        m["cubic_opa"] = {{"n", "kappa", "alpha_im"}, {"alpha_re", "gamma", "fit_r", "fit_b"}, false};
        m["cubic_fock"] = {{"n", "kappa_fock", "alpha_im"}, {"alpha_re", "gamma", "fit_r", "fit_b"}, false};
        const std::set<std::string> cat_opt{"switch_loss", "loss_every_round", "eta", "dark_rate_cps", "window_s", "clock_rate_hz"};
        m["cat_breed"] = {{"n", "k", "kappa"}, cat_opt, true};
        m["cat_breed"].optional.insert({"fit_alpha", "fit_r2"});
        m["gkp_pipeline"] = {{"n", "k", "kappa"}, cat_opt, true};
        return m;
    }();
    return s;
}

// keys each analysis block needs in the resolved parameters
const std::map<std::string, std::set<std::string>> kTargetKeys{
    {"photon_added", {"target_r"}}, {"cubic", {"gamma", "fit_r", "fit_b"}}, {"cat", {"fit_alpha", "fit_r2"}}};
const std::map<std::string, std::string> kTargetScheme{
    {"photon_added", "photon_add"}, {"cubic", "cubic"}, {"cat", "cat_breed"}};

struct Range {
    double lo, hi, step;
};

struct Job {
    std::string id;
    std::string scheme;
    Params params;
    std::vector<std::string> sweep_keys;  // output column order
    std::vector<Params> points;           // resolved overrides, cartesian over axes
    std::string target;                   // empty: none
    std::optional<std::pair<double, double>> alpha_range, r2_range;
    std::string threshold;  // "", "loss", "efficiency"
    double floor_db = 9.75;
    double threshold_tol = 0.0;
    std::optional<Range> wx, wp;
};

struct Scenario {
    std::string name;
    std::string description;
    double runtime_budget_s = 0.0;
    int dim = 0;
    std::vector<Job> jobs;
};

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

double as_number(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
        const double v = n.as<double>();
        if (!std::isfinite(v)) fail(n, what + " must be finite");
        return v;
    } catch (const YAML::BadConversion&) {
        fail(n, what + " must be a number");
    }
}

std::string as_string(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.as<std::string>();
}

std::pair<double, double> as_pair(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be [lo, hi]");
    return {as_number(n[0], what), as_number(n[1], what)};
}

Range as_range(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 3) fail(n, what + " must be [lo, hi, step]");
    Range r{as_number(n[0], what), as_number(n[1], what), as_number(n[2], what)};
    if (!(r.step > 0.0) || r.hi < r.lo) fail(n, what + " needs lo <= hi and step > 0");
    return r;
}

std::set<std::string> allowed_keys(const std::string& scheme) {
    const auto& sc = schemas().at(scheme);
    std::set<std::string> k = sc.required;
    k.insert(sc.optional.begin(), sc.optional.end());
    if (sc.seed_r) k.insert({"r_seed", "r_seed_db"});
    return k;
}

void check_params(const YAML::Node& where, const Job& job, const Params& p) {
    const auto& sc = schemas().at(job.scheme);
    for (const auto& key : sc.required)
        if (!p.count(key)) fail(where, "job '" + job.id + "' (" + job.scheme + ") is missing parameter '" + key + "'");
    if (sc.seed_r && (p.count("r_seed") + p.count("r_seed_db")) != 1)
        fail(where, "job '" + job.id + "' needs exactly one of r_seed, r_seed_db");
    if (!job.target.empty())
        for (const auto& key : kTargetKeys.at(job.target))
            if (!p.count(key)) fail(where, "job '" + job.id + "' target '" + job.target + "' needs parameter '" + key + "'");
    auto integer = [&](const char* key, int lo) {
        auto it = p.find(key);
        if (it == p.end()) return;
        if (it->second != std::floor(it->second) || it->second < lo)
            fail(where, "job '" + job.id + "': " + key + " must be an integer >= " + std::to_string(lo));
    };
    integer("n", 0);
    integer("k", 1);
    if (p.count("switch_loss") && !(p.at("switch_loss") >= 0.0 && p.at("switch_loss") < 1.0))
        fail(where, "job '" + job.id + "': switch_loss must be in [0, 1)");
}

Params read_params(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) {
    reject_unknown(n, allowed, where);
    Params p;
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        p[key] = as_number(kv.second, key);
    }
    return p;
}

Job read_job(const YAML::Node& jn) {
    reject_unknown(jn, {"id", "scheme", "params", "sweep", "target", "threshold", "wigner"}, "job");
    Job job;
    if (!jn["id"]) fail(jn, "job needs an id");
    if (!jn["scheme"]) fail(jn, "job needs a scheme");
    job.id = as_string(jn["id"], "id");
    for (char c : job.id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) fail(jn["id"], "job id may contain letters, digits, '_' and '-'");
    job.scheme = as_string(jn["scheme"], "scheme");
    if (!schemas().count(job.scheme)) fail(jn["scheme"], "unknown scheme '" + job.scheme + "'");
    const auto allowed = allowed_keys(job.scheme);
    if (jn["params"]) job.params = read_params(jn["params"], allowed, "params of job '" + job.id + "'");

    if (const auto t = jn["target"]) {
        reject_unknown(t, {"kind", "alpha_range", "r2_range"}, "target");
        if (!t["kind"]) fail(t, "target needs a kind");
        job.target = as_string(t["kind"], "target kind");
        if (!kTargetKeys.count(job.target)) fail(t["kind"], "unknown target kind '" + job.target + "'");
        if (job.scheme.rfind(kTargetScheme.at(job.target), 0) != 0)
            fail(t["kind"], "target '" + job.target + "' does not apply to scheme " + job.scheme);
        if (t["alpha_range"]) job.alpha_range = as_pair(t["alpha_range"], "alpha_range");
        if (t["r2_range"]) job.r2_range = as_pair(t["r2_range"], "r2_range");
    }
    if (const auto t = jn["threshold"]) {
        reject_unknown(t, {"kind", "floor_db", "tol"}, "threshold");
        if (job.scheme != "gkp_pipeline") fail(t, "thresholds apply to gkp_pipeline jobs only");
        if (!t["kind"]) fail(t, "threshold needs a kind");
        job.threshold = as_string(t["kind"], "threshold kind");
        if (job.threshold != "loss" && job.threshold != "efficiency") fail(t["kind"], "threshold kind must be loss or efficiency");
        job.threshold_tol = job.threshold == "loss" ? 1e-4 : 1e-3;
        if (t["floor_db"]) job.floor_db = as_number(t["floor_db"], "floor_db");
        if (t["tol"]) job.threshold_tol = as_number(t["tol"], "tol");
        if (!(job.threshold_tol > 0.0)) fail(t, "threshold tol must be positive");
    }
    if (const auto w = jn["wigner"]) {
        reject_unknown(w, {"x", "p"}, "wigner");
        if (!w["x"] || !w["p"]) fail(w, "wigner needs x and p ranges");
        job.wx = as_range(w["x"], "wigner x");
        job.wp = as_range(w["p"], "wigner p");
    }

    std::vector<std::vector<Params>> axes;
    if (const auto s = jn["sweep"]) {
        if (!s.IsSequence()) fail(s, "sweep must be a list of axes");
        for (const auto& ax : s) {
            reject_unknown(ax, {"param", "values", "range", "points"}, "sweep axis");
            std::vector<Params> pts;
            if (ax["points"]) {
                if (ax["param"] || ax["values"] || ax["range"]) fail(ax, "a points axis takes no param, values or range");
                if (!ax["points"].IsSequence() || ax["points"].size() == 0) fail(ax["points"], "points must be a non-empty list");
                for (const auto& pt : ax["points"]) {
                    pts.push_back(read_params(pt, allowed, "sweep point"));
                    for (const auto& kv : pt) {
                        const auto key = kv.first.as<std::string>();
                        if (std::find(job.sweep_keys.begin(), job.sweep_keys.end(), key) == job.sweep_keys.end())
                            job.sweep_keys.push_back(key);
                    }
                }
            } else {
                if (!ax["param"]) fail(ax, "sweep axis needs param");
                const auto key = as_string(ax["param"], "param");
                if (!allowed.count(key)) fail(ax["param"], "parameter '" + key + "' does not apply to scheme " + job.scheme);
                if (!!ax["values"] == !!ax["range"]) fail(ax, "sweep axis needs exactly one of values, range");
                std::vector<double> vals;
                if (ax["values"]) {
                    if (!ax["values"].IsSequence() || ax["values"].size() == 0) fail(ax["values"], "values must be a non-empty list");
                    for (const auto& v : ax["values"]) vals.push_back(as_number(v, key));
                } else {
                    const Range r = as_range(ax["range"], "range");
                    vals = metrics::linspace(r.lo, r.hi, r.step);
                }
                for (double v : vals) pts.push_back(Params{{key, v}});
                if (std::find(job.sweep_keys.begin(), job.sweep_keys.end(), key) != job.sweep_keys.end())
                    fail(ax, "parameter '" + key + "' swept twice");
                job.sweep_keys.push_back(key);
            }
            axes.push_back(std::move(pts));
        }
    }
    job.points = {Params{}};
    for (const auto& ax : axes) {
        std::vector<Params> next;
        for (const auto& base : job.points)
            for (const auto& over : ax) {
                Params q = base;
                for (const auto& kv : over) q[kv.first] = kv.second;
                next.push_back(std::move(q));
            }
        job.points = std::move(next);
    }
    for (auto& pt : job.points) {
        Params full = job.params;
        for (const auto& kv : pt) full[kv.first] = kv.second;
        // a sweep point overriding the seed in the other unit replaces it
        if (pt.count("r_seed_db")) full.erase("r_seed");
        if (pt.count("r_seed")) full.erase("r_seed_db");
        check_params(jn, job, full);
        pt = std::move(full);
    }
    return job;
}

Scenario parse_scenario(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ScenarioError("cannot read scenario file " + path);
    } catch (const YAML::ParserException& e) {
        throw ScenarioError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    reject_unknown(root, {"name", "description", "runtime_budget_s", "trunc", "jobs"}, "scenario");
    Scenario sc;
    if (!root["name"]) fail(root, "scenario needs a name");
    sc.name = as_string(root["name"], "name");
    if (root["description"]) sc.description = as_string(root["description"], "description");
    if (root["runtime_budget_s"]) sc.runtime_budget_s = as_number(root["runtime_budget_s"], "runtime_budget_s");
    if (!root["trunc"]) fail(root, "scenario needs trunc");
    reject_unknown(root["trunc"], {"dim"}, "trunc");
    if (!root["trunc"]["dim"]) fail(root["trunc"], "trunc needs dim");
    const double d = as_number(root["trunc"]["dim"], "dim");
    if (d != std::floor(d) || d < 2) fail(root["trunc"]["dim"], "dim must be an integer >= 2");
    sc.dim = static_cast<int>(d);
    if (!root["jobs"] || !root["jobs"].IsSequence() || root["jobs"].size() == 0) fail(root, "scenario needs a non-empty jobs list");
    std::set<std::string> ids;
    for (const auto& jn : root["jobs"]) {
        sc.jobs.push_back(read_job(jn));
        if (!ids.insert(sc.jobs.back().id).second) fail(jn, "duplicate job id '" + sc.jobs.back().id + "'");
    }
    return sc;
}

// ---------- execution ----------

using Value = std::variant<double, std::string>;
using Row = std::vector<std::pair<std::string, Value>>;

struct PointResult {
    Row row;
    bool healthy = true;
    std::vector<std::string> warnings;
    std::optional<metrics::WignerGrid> wigner;
    std::string error;  // zero-probability message
};

double seed_r(const Params& p) { return p.count("r_seed") ? p.at("r_seed") : metrics::db_to_r(p.at("r_seed_db")); }

std::optional<chan::DetectorModel> detector(const Params& p) {
    bool any = false;
    for (const auto& k : kDetectorKeys) any = any || p.count(k);
    if (!any) return std::nullopt;
    chan::DetectorModel m;
    if (p.count("eta")) m.eta = p.at("eta");
    if (p.count("dark_rate_cps")) m.dark_rate = p.at("dark_rate_cps");
    if (p.count("window_s")) m.window = p.at("window_s");
    return m;
}

proto::GkpPipeline pipeline(const Params& p, const Truncation& t) {
    proto::GkpPipeline g;
    g.r_seed = seed_r(p);
    g.kappa = p.at("kappa");
    g.n = static_cast<int>(p.at("n"));
    g.k = static_cast<int>(p.at("k"));
    g.trunc = t;
    g.cat.switch_tau = 1.0 - (p.count("switch_loss") ? p.at("switch_loss") : 0.0);
    g.cat.loss_every_round = p.count("loss_every_round") && p.at("loss_every_round") != 0.0;
    g.cat.detector = detector(p);
    return g;
}

const char* status_name(proto::Threshold::Status s) {
    switch (s) {
        case proto::Threshold::Status::Found: return "found";
        case proto::Threshold::Status::NeverAbove: return "never_above";
        default: return "not_applicable";
    }
}

PointResult run_point(const Job& job, const Params& p, const Truncation& t) {
    PointResult out;
    Row& row = out.row;
    for (const auto& k : job.sweep_keys) row.emplace_back(k, p.count(k) ? p.at(k) : std::nan(""));
    const int n = static_cast<int>(p.at("n"));
    auto absorb = [&](const proto::Report& rep) {
        out.healthy = rep.healthy;
        out.warnings = rep.warnings;
        row.emplace_back("P_tot", rep.total_probability);
        row.emplace_back("healthy", rep.healthy ? 1.0 : 0.0);
        row.emplace_back("guard_population", rep.guard_population);
    };
    State final_state;
    if (job.scheme == "fock_prep") {
        auto h = proto::fock_prep(n, p.at("kappa"), t);
        const auto health = truncation_health(h.normalized);
        out.healthy = health.healthy;
        row.emplace_back("P_tot", h.probability);
        row.emplace_back("healthy", health.healthy ? 1.0 : 0.0);
        row.emplace_back("guard_population", health.guard_population);
        final_state = h.normalized;
    } else if (job.scheme == "photon_add_opa" || job.scheme == "photon_add_fock") {
        const auto rep = job.scheme == "photon_add_opa"
                             ? proto::photon_add_opa(seed_r(p), p.at("kappa"), n, t, detector(p))
                             : proto::photon_add_fock(seed_r(p), n, p.at("kappa_fock"), p.at("tau"), t, detector(p));
        absorb(rep);
        if (!job.target.empty())
            row.emplace_back("fidelity", metrics::fidelity(rep.state, State(targets::ideal_photon_added_squeezed(p.at("target_r"), n, t))));
        final_state = rep.state;
    } else if (job.scheme == "cubic_opa" || job.scheme == "cubic_fock") {
        const cplx alpha(p.count("alpha_re") ? p.at("alpha_re") : 0.0, p.at("alpha_im"));
        const auto rep = job.scheme == "cubic_opa" ? proto::cubic_opa(alpha, p.at("kappa"), n, t)
                                                   : proto::cubic_fock(alpha, n, p.at("kappa_fock"), t);
        absorb(rep);
        final_state = rep.state;
        if (!job.target.empty()) {
            const auto& psi = std::get<PureState>(rep.state);
            const auto target = targets::ideal_cubic(p.at("gamma"), t);
            const double r0 = p.at("fit_r"), b0 = p.at("fit_b");
            const auto fit = proto::fit_cubic(psi, target, {{r0, b0}, {r0 + 0.05, b0 + 0.1}});
            row.emplace_back("fidelity", fit.fidelity);
            row.emplace_back("r_corr", fit.params[0]);
            row.emplace_back("b_corr", fit.params[1]);
            final_state = normalize(proto::gaussian_correct(psi, fit.params[0], cplx(0, fit.params[1]))).first;
        }
    } else if (job.scheme == "cat_breed") {
        const auto g = pipeline(p, t);
        const auto rep = proto::cat_breed(g.r_seed, g.kappa, g.n, g.k, t, g.cat);
        absorb(rep);
        const double clock = p.count("clock_rate_hz") ? p.at("clock_rate_hz") : 5e4;
        row.emplace_back("rate_hz", proto::generation_rate(rep.total_probability, clock));
        final_state = g.r_seed > 0.0 ? proto::rotate_state(rep.state, 0.5 * M_PI) : rep.state;
        if (!job.target.empty()) {
            const auto parity = (g.n * g.k) % 2 ? targets::Parity::Odd : targets::Parity::Even;
            const auto ar = job.alpha_range.value_or(std::pair{0.5, 10.0});
            const auto rr = job.r2_range.value_or(std::pair{0.0, 1.0});
            const double a0 = p.at("fit_alpha"), r0 = p.at("fit_r2");
            const auto fit = proto::fit_cat(rep.state, parity, {{a0, r0}, {a0 - 0.2, r0 + 0.05}}, ar.first, ar.second, rr.first,
                                            rr.second, g.r_seed > 0.0);
            row.emplace_back("fidelity", fit.fidelity);
            row.emplace_back("alpha", fit.params[0]);
            row.emplace_back("r2", fit.params[1]);
        }
    } else {  // gkp_pipeline
        const auto g = pipeline(p, t);
        const auto rep = proto::run_gkp_pipeline(g);
        absorb(rep);
        const double clock = p.count("clock_rate_hz") ? p.at("clock_rate_hz") : 5e4;
        row.emplace_back("cat_rate_hz", proto::generation_rate(rep.total_probability, clock));
        row.emplace_back("correction_db", metrics::squeezing_db(rep.r_corr));
        row.emplace_back("db_x", rep.squeezing->db_x);
        row.emplace_back("db_p", rep.squeezing->db_p);
        row.emplace_back("db_sym", rep.squeezing->symmetric_db);
        row.emplace_back("homodyne_density", rep.homodyne_density.value_or(0.0));
        final_state = rep.state;
        if (job.threshold == "loss") {
            const auto th = proto::find_loss_threshold(g, job.floor_db, job.threshold_tol);
            row.emplace_back("max_loss_pct", 100.0 * th.value);
            row.emplace_back("threshold_status", std::string(status_name(th.status)));
        } else if (job.threshold == "efficiency") {
            const auto det = g.cat.detector.value_or(chan::DetectorModel{});
            const auto th = proto::find_efficiency_threshold(g, det.dark_rate, det.window, job.floor_db, job.threshold_tol);
            row.emplace_back("min_eta_pct", 100.0 * th.value);
            row.emplace_back("threshold_status", std::string(status_name(th.status)));
        }
    }
    if (job.wx) {
        const auto xs = metrics::linspace(job.wx->lo, job.wx->hi, job.wx->step);
        const auto ps = metrics::linspace(job.wp->lo, job.wp->hi, job.wp->step);
        out.wigner = std::visit([&](const auto& s) { return metrics::wigner(s, xs, ps, 1); }, final_state);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string cell(const Value& v) { return std::holds_alternative<double>(v) ? fmt(std::get<double>(v)) : std::get<std::string>(v); }

void write_csv(const fs::path& path, const std::vector<PointResult>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    if (rows.empty()) return;
    for (size_t i = 0; i < rows[0].row.size(); ++i) f << (i ? "," : "") << rows[0].row[i].first;
    f << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.row.size(); ++i) f << (i ? "," : "") << cell(r.row[i].second);
        f << "\n";
    }
}

void write_wigner(const fs::path& path, const metrics::WignerGrid& g) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "x,p,W\n";
    for (size_t ip = 0; ip < g.p.size(); ++ip)
        for (size_t ix = 0; ix < g.x.size(); ++ix) f << fmt(g.x[ix]) << "," << fmt(g.p[ip]) << "," << fmt(g.w[ip * g.x.size() + ix]) << "\n";
}

std::string resolve_scenario(const std::string& arg) {
    if (fs::exists(arg) && fs::is_regular_file(arg)) return arg;
    const fs::path bundled = fs::path(SIM_SCENARIO_DIR) / (arg + ".yaml");
    if (fs::exists(bundled)) return bundled.string();
    throw ScenarioError("no scenario file or bundled scenario named '" + arg + "'");
}

std::vector<std::string> bundled_names() {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(SIM_SCENARIO_DIR))
        if (e.path().extension() == ".yaml") names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

int run(const std::string& which, const std::string& out_dir, bool strict, int workers, int dim_flag) {
    Scenario sc = parse_scenario(resolve_scenario(which));
    if (const char* env = std::getenv("SIM_DIM_OVERRIDE"); env && *env) {
        char* end = nullptr;
        const long d = std::strtol(env, &end, 10);
        if (*end != '\0' || d < 2) throw ScenarioError("SIM_DIM_OVERRIDE must be an integer >= 2");
        sc.dim = static_cast<int>(d);
    }
    if (dim_flag > 0) sc.dim = dim_flag;
    const Truncation t(sc.dim);

    struct Task {
        size_t job, point;
    };
    std::vector<Task> tasks;
    std::vector<std::vector<PointResult>> results(sc.jobs.size());
    for (size_t j = 0; j < sc.jobs.size(); ++j) {
        results[j].resize(sc.jobs[j].points.size());
        for (size_t i = 0; i < sc.jobs[j].points.size(); ++i) tasks.push_back({j, i});
    }
    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr validation;
    auto worker = [&] {
        for (size_t k; (k = next.fetch_add(1)) < tasks.size();) {
            const auto [j, i] = tasks[k];
            auto& slot = results[j][i];
            try {
                slot = run_point(sc.jobs[j], sc.jobs[j].points[i], t);
            } catch (const ZeroProbabilityError& e) {
                slot.error = e.what();
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!validation) validation = std::current_exception();
            }
        }
    };
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (validation) std::rethrow_exception(validation);

    // zero-probability heralds are reported in sweep order
    for (size_t j = 0; j < sc.jobs.size(); ++j)
        for (size_t i = 0; i < results[j].size(); ++i)
            if (!results[j][i].error.empty()) {
                std::cerr << "error: job '" << sc.jobs[j].id << "' point " << i << ": " << results[j][i].error << "\n";
                return kZeroProb;
            }

    fs::create_directories(out_dir);
    nlohmann::ordered_json summary;
    summary["scenario"] = sc.name;
    summary["description"] = sc.description;
    summary["dim"] = sc.dim;
    summary["strict"] = strict;
    summary["runtime_budget_s"] = sc.runtime_budget_s;
    bool all_healthy = true;
    nlohmann::ordered_json jobs = nlohmann::ordered_json::array();
    for (size_t j = 0; j < sc.jobs.size(); ++j) {
        const Job& job = sc.jobs[j];
        const std::string table = job.id + ".csv";
        write_csv(fs::path(out_dir) / table, results[j]);
        nlohmann::ordered_json jj;
        jj["id"] = job.id;
        jj["scheme"] = job.scheme;
        jj["table"] = table;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
        nlohmann::ordered_json wig = nlohmann::ordered_json::array();
        for (size_t i = 0; i < results[j].size(); ++i) {
            const auto& r = results[j][i];
            nlohmann::ordered_json row;
            for (const auto& [k, v] : r.row) {
                if (std::holds_alternative<double>(v))
                    row[k] = std::get<double>(v);
                else
                    row[k] = std::get<std::string>(v);
            }
            rows.push_back(row);
            all_healthy = all_healthy && r.healthy;
            for (const auto& w : r.warnings) warnings.push_back("point " + std::to_string(i) + ": " + w);
            if (r.wigner) {
                const std::string name = job.id + "_" + std::to_string(i) + "_wigner.csv";
                write_wigner(fs::path(out_dir) / name, *r.wigner);
                wig.push_back(name);
            }
        }
        jj["rows"] = rows;
        jj["warnings"] = warnings;
        if (!wig.empty()) jj["wigner"] = wig;
        jobs.push_back(jj);
    }
    summary["jobs"] = jobs;
    summary["truncation_healthy"] = all_healthy;
    std::ofstream(fs::path(out_dir) / "summary.json") << summary.dump(2) << "\n";
    if (!all_healthy) {
        std::cerr << (strict ? "error" : "warning") << ": truncation health check failed at dim " << sc.dim
                  << "; see warnings in summary.json\n";
        if (strict) return kStrict;
    }
    return kOk;
}

void emit_params(YAML::Emitter& e, const Params& p) {
    e << YAML::BeginMap;
    for (const auto& [k, v] : p) e << YAML::Key << k << YAML::Value << v;
    e << YAML::EndMap;
}

// Prints the configuration with defaults filled in and sweeps expanded.
void describe(const std::string& which) {
    const Scenario sc = parse_scenario(resolve_scenario(which));
    YAML::Emitter e;
    e.SetDoublePrecision(12);
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << sc.name;
    e << YAML::Key << "description" << YAML::Value << sc.description;
    e << YAML::Key << "runtime_budget_s" << YAML::Value << sc.runtime_budget_s;
    e << YAML::Key << "dim" << YAML::Value << sc.dim;
    e << YAML::Key << "jobs" << YAML::Value << YAML::BeginSeq;
    for (const auto& job : sc.jobs) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << job.id;
        e << YAML::Key << "scheme" << YAML::Value << job.scheme;
        if (!job.target.empty()) e << YAML::Key << "target" << YAML::Value << job.target;
        if (!job.threshold.empty()) {
            e << YAML::Key << "threshold" << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "kind" << YAML::Value << job.threshold;
            e << YAML::Key << "floor_db" << YAML::Value << job.floor_db;
            e << YAML::Key << "tol" << YAML::Value << job.threshold_tol;
            e << YAML::EndMap;
        }
        e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
        for (auto p : job.points) {
            if (p.count("r_seed_db")) p["r_seed"] = metrics::db_to_r(p.at("r_seed_db"));
            if (auto d = detector(p)) {
                p["eta"] = d->eta;
                p["dark_rate_cps"] = d->dark_rate;
                p["window_s"] = d->window;
            }
            if (job.scheme == "cat_breed" || job.scheme == "gkp_pipeline") {
                p.emplace("switch_loss", 0.0);
                p.emplace("loss_every_round", 0.0);
                p.emplace("clock_rate_hz", 5e4);
            }
            emit_params(e, p);
        }
        e << YAML::EndSeq << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
    std::cout << e.c_str() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated-Fock-space simulator: runs protocol scenarios and writes data files"};
    app.require_subcommand(1);

    std::string scenario, out_dir;
    bool strict = false;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    int dim = 0;
    auto* run_cmd = app.add_subcommand("run", "run a scenario (bundled name or YAML path)");
    run_cmd->add_option("scenario", scenario, "scenario name or file")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_flag("--strict", strict, "fail with exit code 4 when a truncation-health check fails");
    run_cmd->add_option("--workers", workers, "worker threads for sweep points")->check(CLI::PositiveNumber);
    run_cmd->add_option("--dim", dim, "override the truncation dimension")->check(CLI::Range(2, 1 << 16));

    auto* list_cmd = app.add_subcommand("list", "list bundled scenarios");
    std::string name;
    auto* desc_cmd = app.add_subcommand("describe", "print a scenario with defaults resolved");
    desc_cmd->add_option("name", name, "scenario name or file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*list_cmd) {
            for (const auto& n : bundled_names()) std::cout << n << "\n";
            return kOk;
        }
        if (*desc_cmd) {
            describe(name);
            return kOk;
        }
        return run(scenario, out_dir, strict, workers, dim);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ZeroProbabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kZeroProb;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
