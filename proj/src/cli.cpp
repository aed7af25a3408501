#include "trisbf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trisbf/error.hpp"
#include "trisbf/expdamp.hpp"
#include "trisbf/gridscan.hpp"
#include "trisbf/hankelbowman.hpp"
#include "trisbf/oracle.hpp"
#include "trisbf/paramdiff.hpp"
#include "trisbf/recursion.hpp"

namespace trisbf {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string ell = "0,0,0";
    std::string r, r1, r2, r3;
    std::string damping = "exp";
    std::string method;
    std::string format = "json";
    std::string output;
    std::string mode = "exact";
    double p = 1;
    int n = 2;
    double tol = 1e-10;
    double agree = 1e-6;
    int threads = 0;
    bool no_timings = false;
    int repetitions = 3;
    int oracle_samples = 8;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::usage, what + ": '" + s + "' is not a number");
    }
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::usage, what + ": '" + s + "' is not an integer");
    }
}

OrderTriple parse_ell(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 3) fail(ErrorKind::usage, "--ell needs three comma-separated orders, got '" + s + "'");
    OrderTriple e;
    for (int i = 0; i < 3; ++i) e[i] = parse_int(parts[i], "--ell");
    return e;
}

RadiiTriple parse_r(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 3) fail(ErrorKind::usage, "--r needs three comma-separated radii, got '" + s + "'");
    RadiiTriple r;
    for (int i = 0; i < 3; ++i) r[i] = parse_double(parts[i], "--r");
    return r;
}

// "start:stop:count" or a single radius
AxisGrid parse_axis(const std::string& s, const std::string& flag) {
    auto parts = split(s, ':');
    if (parts.size() == 1) {
        double v = parse_double(parts[0], flag);
        return {v, v, 1};
    }
    if (parts.size() != 3) fail(ErrorKind::usage, flag + " expects start:stop:count or a single radius, got '" + s + "'");
    return {parse_double(parts[0], flag), parse_double(parts[1], flag), parse_int(parts[2], flag)};
}

DampingKind parse_damping(const std::string& s) {
    if (s == "exp" || s == "exponential") return DampingKind::exponential;
    if (s == "gauss" || s == "gaussian") return DampingKind::gaussian;
    fail(ErrorKind::usage, "--damping must be exp or gauss, got '" + s + "'");
}

int thread_count(const Options& o) { return o.threads > 0 ? o.threads : default_thread_count(); }

WeightedIntegralSpec point_spec(const Options& o) {
    WeightedIntegralSpec s;
    s.ell = parse_ell(o.ell);
    if (o.r.empty()) fail(ErrorKind::usage, "--r is required");
    s.r = parse_r(o.r);
    s.damping = {parse_damping(o.damping), o.p};
    s.n = o.n;
    validate(s);
    return s;
}

GridSpec grid_spec(const Options& o) {
    GridSpec g;
    if (o.r1.empty() || o.r2.empty() || o.r3.empty()) fail(ErrorKind::usage, "--r1, --r2 and --r3 are required");
    g.axes = {parse_axis(o.r1, "--r1"), parse_axis(o.r2, "--r2"), parse_axis(o.r3, "--r3")};
    g.ell = parse_ell(o.ell);
    g.damping = {parse_damping(o.damping), o.p};
    g.n = o.n;
    validate(g);
    return g;
}

void check_tolerance(double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-4)) fail(ErrorKind::usage, "--tol must lie in [1e-12, 1e-4]");
}

// one evaluation by one method
struct Record {
    WeightedIntegralSpec spec;
    std::string method;
    double value = 0;
    double im_residual = 0;
    std::optional<double> error_estimate;  // oracle only
    std::int64_t kernel_calls = 0;
    double wall_ms = 0;
    bool quality_ok = true;
    std::optional<Diagnostics> diag;
    int intervals = 0;
    double truncation_point = 0;
};

Record run_method(const WeightedIntegralSpec& s, const std::string& method, double tol) {
    Record rec;
    rec.spec = s;
    auto t0 = std::chrono::steady_clock::now();
    if (method == "quadrature") {
        QuadratureReport q = quadrature_eval(s, tol);
        rec.method = "quadrature";
        rec.value = q.value;
        rec.error_estimate = q.error_estimate;
        rec.intervals = q.intervals_used;
        rec.truncation_point = q.truncation_point;
    } else {
        EvalResult e;
        if (method == "recursion")
            e = evaluate_weighted(s);
        else if (method == "hankel-bowman")
            e = evaluate_hb(s);
        else
            fail(ErrorKind::usage, "unknown method '" + method + "'");
        rec.method = e.method;
        rec.value = e.value;
        rec.im_residual = e.im_residual;
        rec.kernel_calls = e.diag.kernel_calls;
        rec.quality_ok = e.diag.quality_ok && reality_bound_ok(e.value, e.im_residual);
        rec.diag = e.diag;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json diag_json(const Diagnostics& d) {
    json j;
    j["tier"] = tier_name(d.tier);
    j["escalations"] = d.escalations;
    j["base_cases"] = d.base_cases;
    j["kernel_calls"] = d.kernel_calls;
    j["amplification"] = num(d.amplification);
    j["quality_ok"] = d.quality_ok;
    j["low_confidence"] = d.low_confidence;
    j["conditioning_warning"] = d.conditioning_warning;
    j["notes"] = d.notes;
    return j;
}

json record_json(const Record& r, bool timings) {
    json j;
    j["ell"] = {r.spec.ell[0], r.spec.ell[1], r.spec.ell[2]};
    j["r"] = {r.spec.r[0], r.spec.r[1], r.spec.r[2]};
    j["damping"] = damping_name(r.spec.damping.kind);
    j["p"] = r.spec.damping.p;
    j["n"] = r.spec.n;
    j["method"] = r.method;
    j["value"] = num(r.value);
    j["im_residual"] = num(r.im_residual);
    j["error_estimate"] = r.error_estimate ? num(*r.error_estimate) : json(nullptr);
    j["kernel_calls"] = r.kernel_calls;
    if (timings) j["wall_ms"] = r.wall_ms;
    if (r.diag) {
        j["diagnostics"] = diag_json(*r.diag);
    } else {
        json d;
        d["intervals_used"] = r.intervals;
        d["truncation_point"] = r.truncation_point;
        j["diagnostics"] = d;
    }
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_field(fields[i]);
    }
    return line + "\r\n";
}

const std::vector<std::string> record_columns = {"ell",    "r",           "damping",        "p",
                                                 "n",      "method",      "value",          "im_residual",
                                                 "error_estimate", "kernel_calls", "wall_ms"};

std::vector<std::string> record_fields(const Record& r, bool timings) {
    auto triple = [](auto a) { return format17(a[0]) + "," + format17(a[1]) + "," + format17(a[2]); };
    std::array<double, 3> ell{double(r.spec.ell[0]), double(r.spec.ell[1]), double(r.spec.ell[2])};
    return {triple(ell),
            triple(r.spec.r),
            damping_name(r.spec.damping.kind),
            format17(r.spec.damping.p),
            std::to_string(r.spec.n),
            r.method,
            format17(r.value),
            format17(r.im_residual),
            r.error_estimate ? format17(*r.error_estimate) : "",
            std::to_string(r.kernel_calls),
            timings ? format17(r.wall_ms) : ""};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) fail(ErrorKind::io, "cannot open output file '" + o.output + "'");
    f << text;
    if (!f) fail(ErrorKind::io, "write failed for '" + o.output + "'");
}

void check_format(const Options& o) {
    if (o.format != "json" && o.format != "csv") fail(ErrorKind::usage, "--format must be json or csv");
}

int cmd_eval(const Options& o, std::ostream& out) {
    check_format(o);
    check_tolerance(o.tol);
    std::string method = o.method.empty() ? "recursion" : o.method;
    if (method == "all") fail(ErrorKind::usage, "eval runs one method; use compare for --method all");
    WeightedIntegralSpec s = point_spec(o);
    Record r = run_method(s, method, o.tol);
    bool timings = !o.no_timings;
    if (o.format == "json")
        emit(o, record_json(r, timings).dump(2) + "\n", out);
    else
        emit(o, csv_row(record_columns) + csv_row(record_fields(r, timings)), out);
    return r.quality_ok ? 0 : 3;
}

int cmd_grid(const Options& o, std::ostream& out) {
    check_format(o);
    check_tolerance(o.tol);
    GridSpec g = grid_spec(o);
    GridOptions go;
    go.threads = thread_count(o);
    if (o.mode == "interpolated") {
        go.mode = GridMode::interpolated;
        go.policy.tolerance = o.tol;
    } else if (o.mode != "exact") {
        fail(ErrorKind::usage, "--mode must be exact or interpolated");
    }
    auto t0 = std::chrono::steady_clock::now();
    GridResult res = evaluate_grid(g, go);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const int npts = g.size();
    if (o.format == "json") {
        json j;
        j["ell"] = {g.ell[0], g.ell[1], g.ell[2]};
        j["damping"] = damping_name(g.damping.kind);
        j["p"] = g.damping.p;
        j["n"] = g.n;
        j["method"] = "recursion-grid";
        j["mode"] = o.mode;
        j["shape"] = {res.shape[0], res.shape[1], res.shape[2]};
        json pts = json::array();
        for (int i = 0; i < npts; ++i) {
            RadiiTriple r = g.radii(i);
            json pj;
            pj["r"] = {r[0], r[1], r[2]};
            pj["value"] = num(res.values[i]);
            pj["im_residual"] = num(res.im_residual[i]);
            pj["tier"] = tier_name(res.tiers[i]);
            pts.push_back(pj);
        }
        j["points"] = pts;
        json d;
        d["kernel_calls"] = res.diag.kernel_calls;
        d["kernel_arguments"] = res.diag.kernel_arguments;
        d["escalated_points"] = res.diag.escalated_points;
        d["quality_failures"] = res.diag.quality_failures;
        if (go.mode == GridMode::interpolated) d["interpolation_max_rel_error"] = res.diag.interpolation_max_rel_error;
        j["diagnostics"] = d;
        if (!o.no_timings) j["wall_ms"] = ms;
        emit(o, j.dump(2) + "\n", out);
    } else {
        std::string text = csv_row({"i", "j", "k", "r1", "r2", "r3", "value", "im_residual", "tier"});
        for (int i = 0; i < npts; ++i) {
            RadiiTriple r = g.radii(i);
            int k = i % res.shape[2], jj = (i / res.shape[2]) % res.shape[1], ii = i / (res.shape[2] * res.shape[1]);
            text += csv_row({std::to_string(ii), std::to_string(jj), std::to_string(k), format17(r[0]), format17(r[1]),
                             format17(r[2]), format17(res.values[i]), format17(res.im_residual[i]),
                             tier_name(res.tiers[i])});
        }
        emit(o, text, out);
    }
    return res.diag.quality_failures == 0 ? 0 : 3;
}

bool skippable(ErrorKind k) {
    return k == ErrorKind::unsupported_power || k == ErrorKind::derivative_order_limit ||
           k == ErrorKind::cost_limit || k == ErrorKind::order_limit || k == ErrorKind::domain;
}

struct PointComparison {
    std::vector<Record> records;
    std::vector<std::pair<std::string, std::string>> skipped;  // method, reason
    bool deviation = false;
    bool quality = true;
};

double rel_diff(double a, double b) {
    double s = std::max(std::fabs(a), std::fabs(b));
    return s > 0 ? std::fabs(a - b) / s : 0.0;
}

int cmd_compare(const Options& o, std::ostream& out) {
    check_format(o);
    check_tolerance(o.tol);
    std::vector<WeightedIntegralSpec> specs;
    if (!o.r.empty()) {
        specs.push_back(point_spec(o));
    } else {
        GridSpec g = grid_spec(o);
        for (int i = 0; i < g.size(); ++i) {
            WeightedIntegralSpec s;
            s.ell = g.ell;
            s.r = g.radii(i);
            s.damping = g.damping;
            s.n = g.n;
            specs.push_back(s);
        }
    }
    std::string sel = o.method.empty() ? "all" : o.method;
    std::vector<std::string> methods;
    if (sel == "all")
        methods = {"recursion", "hankel-bowman"};
    else if (sel == "recursion" || sel == "hankel-bowman")
        methods = {sel};
    else if (sel != "quadrature")
        fail(ErrorKind::usage, "--method must be recursion, hankel-bowman, quadrature or all");

    std::vector<PointComparison> rows(specs.size());
    parallel_for(static_cast<int>(specs.size()), thread_count(o), [&](int i) {
        PointComparison& pc = rows[i];
        for (const std::string& m : methods) {
            try {
                pc.records.push_back(run_method(specs[i], m, o.tol));
            } catch (const Error& e) {
                if (sel != "all" || !skippable(e.kind())) throw;
                pc.skipped.emplace_back(m, e.what());
            }
        }
        Record oracle = run_method(specs[i], "quadrature", o.tol);
        for (const Record& r : pc.records) {
            pc.quality = pc.quality && r.quality_ok;
            double allowed = o.agree * std::fabs(oracle.value) + *oracle.error_estimate;
            if (!(std::fabs(r.value - oracle.value) <= allowed)) pc.deviation = true;
        }
        pc.records.push_back(oracle);
    });

    bool bad = false;
    for (const auto& pc : rows) bad = bad || pc.deviation || !pc.quality;
    const bool timings = !o.no_timings;
    if (o.format == "json") {
        json pts = json::array();
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto& pc = rows[i];
            json pj;
            const auto& s = specs[i];
            pj["ell"] = {s.ell[0], s.ell[1], s.ell[2]};
            pj["r"] = {s.r[0], s.r[1], s.r[2]};
            pj["damping"] = damping_name(s.damping.kind);
            pj["p"] = s.damping.p;
            pj["n"] = s.n;
            json res = json::array();
            for (const Record& r : pc.records) res.push_back(record_json(r, timings));
            pj["results"] = res;
            json pw = json::array();
            for (size_t a = 0; a < pc.records.size(); ++a)
                for (size_t b = a + 1; b < pc.records.size(); ++b)
                    pw.push_back({{"a", pc.records[a].method},
                                  {"b", pc.records[b].method},
                                  {"rel_diff", num(rel_diff(pc.records[a].value, pc.records[b].value))}});
            pj["pairwise"] = pw;
            json sk = json::array();
            for (const auto& [m, why] : pc.skipped) sk.push_back({{"method", m}, {"reason", why}});
            pj["skipped"] = sk;
            pj["agrees_with_oracle"] = !pc.deviation;
            pts.push_back(pj);
        }
        json j;
        j["points"] = pts;
        j["status"] = bad ? "deviation" : "ok";
        emit(o, j.dump(2) + "\n", out);
    } else {
        auto cols = record_columns;
        cols.push_back("rel_diff_vs_quadrature");
        std::string text = csv_row(cols);
        for (const auto& pc : rows) {
            const double q = pc.records.back().value;
            for (const Record& r : pc.records) {
                auto f = record_fields(r, timings);
                f.push_back(format17(rel_diff(r.value, q)));
                text += csv_row(f);
            }
        }
        emit(o, text, out);
    }
    return bad ? 3 : 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
    check_format(o);
    check_tolerance(o.tol);
    if (o.repetitions < 1) fail(ErrorKind::usage, "--repetitions must be >= 1");
    if (o.oracle_samples < 1) fail(ErrorKind::usage, "--oracle-samples must be >= 1");
    GridSpec g = grid_spec(o);
    GridOptions go;
    go.threads = thread_count(o);
    BenchmarkReport b = benchmark(g, o.repetitions, go, o.oracle_samples, o.tol);
    const bool t = !o.no_timings;
    std::vector<std::pair<std::string, json>> fields = {
        {"points", b.points},
        {"repetitions", b.repetitions},
        {"grid_kernel_calls", b.grid_kernel_calls},
        {"pointwise_kernel_calls", b.pointwise_kernel_calls},
        {"oracle_sampled_points", b.oracle_sampled_points},
    };
    if (t) {
        fields.push_back({"grid_ms", b.grid_ms});
        fields.push_back({"pointwise_ms", b.pointwise_ms});
        fields.push_back({"oracle_ms_extrapolated", b.oracle_ms});
        fields.push_back({"speedup", b.speedup});
    }
    if (o.format == "json") {
        json j;
        for (auto& [k, v] : fields) j[k] = v;
        emit(o, j.dump(2) + "\n", out);
    } else {
        std::vector<std::string> head, vals;
        for (auto& [k, v] : fields) {
            head.push_back(k);
            vals.push_back(v.is_number_float() ? format17(v.get<double>()) : v.dump());
        }
        emit(o, csv_row(head) + csv_row(vals), out);
    }
    return 0;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::io: return 1;
        case ErrorKind::reality_violation:
        case ErrorKind::tolerance_unreachable:
        case ErrorKind::nonconvergence:
        case ErrorKind::overflow: return 3;
        default: return 2;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Damped triple spherical-Bessel integrals"};
    app.require_subcommand(1);
    Options o;

    auto spec_flags = [&](CLI::App* c, bool point, bool axes) {
        c->add_option("--ell", o.ell, "orders l1,l2,l3");
        if (point) c->add_option("--r", o.r, "radii r1,r2,r3");
        if (axes) {
            c->add_option("--r1", o.r1, "axis start:stop:count (or one radius)");
            c->add_option("--r2", o.r2, "axis start:stop:count (or one radius)");
            c->add_option("--r3", o.r3, "axis start:stop:count (or one radius)");
        }
        c->add_option("--damping", o.damping, "exp or gauss");
        c->add_option("--p", o.p, "damping parameter");
        c->add_option("--n", o.n, "power of k in the weight");
        c->add_option("--tol", o.tol, "quadrature tolerance, relative");
        c->add_option("--format", o.format, "json or csv");
        c->add_option("--output", o.output, "output file (default stdout)");
        c->add_option("--threads", o.threads, "worker threads (overrides TRISBF_THREADS)");
        c->add_flag("--no-timings", o.no_timings, "leave wall-clock fields out");
    };
    CLI::App* eval = app.add_subcommand("eval", "one integral by one method");
    spec_flags(eval, true, false);
    eval->add_option("--method", o.method, "recursion, hankel-bowman or quadrature");
    CLI::App* grid = app.add_subcommand("grid", "tensor over a radii grid");
    spec_flags(grid, false, true);
    grid->add_option("--mode", o.mode, "exact or interpolated");
    CLI::App* compare = app.add_subcommand("compare", "analytic methods against the quadrature oracle");
    spec_flags(compare, true, true);
    compare->add_option("--method", o.method, "recursion, hankel-bowman, quadrature or all");
    compare->add_option("--agree", o.agree, "relative agreement required against the oracle");
    CLI::App* bench = app.add_subcommand("bench", "grid path vs pointwise path vs oracle");
    spec_flags(bench, false, true);
    bench->add_option("--repetitions", o.repetitions, "timed repetitions");
    bench->add_option("--oracle-samples", o.oracle_samples, "grid points timed with the oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*eval) return cmd_eval(o, out);
        if (*grid) return cmd_grid(o, out);
        if (*compare) return cmd_compare(o, out);
        return cmd_bench(o, out);
    } catch (const Error& e) {
        err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace trisbf
