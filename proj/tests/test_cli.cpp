#include <json.hpp>

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "trisbf/cli.hpp"
#include "trisbf/paramdiff.hpp"

using namespace trisbf;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"trisbf"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t e = text.find("\r\n", pos);
        REQUIRE(e != std::string::npos);
        out.push_back(text.substr(pos, e - pos));
        pos = e + 2;
    }
    return out;
}

}  // namespace

TEST_CASE("eval emits one JSON record") {
    Run r = cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--damping", "exp", "--p", "1.0", "--format", "json"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    for (const char* key : {"ell", "r", "damping", "p", "n", "method", "value", "im_residual", "error_estimate",
                            "kernel_calls", "wall_ms", "diagnostics"})
        CHECK(j.contains(key));
    CHECK(j["method"] == "recursion");
    CHECK(j["damping"] == "exp");
    CHECK(j["ell"] == json({1, 1, 0}));
    CHECK(j["error_estimate"].is_null());
    CHECK(testing::rel_diff(j["value"].get<double>(), -0.00611204338236753) <= 1e-12);
    CHECK(j["diagnostics"].contains("tier"));
}

TEST_CASE("JSON values round-trip bit-exactly") {
    Run r = cli({"eval", "--ell", "2,1,1", "--r", "0.7,2.5,1.3", "--damping", "gauss", "--p", "0.8", "--n", "4"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    WeightedIntegralSpec s;
    s.ell = {2, 1, 1};
    s.r = {0.7, 2.5, 1.3};
    s.damping = {DampingKind::gaussian, 0.8};
    s.n = 4;
    CHECK(j["value"].get<double>() == evaluate_weighted(s).value);
    CHECK(j["r"][0].get<double>() == 0.7);
}

TEST_CASE("eval CSV has a header, quoted triples and CRLF rows") {
    Run r = cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--format", "csv", "--no-timings"});
    REQUIRE(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "ell,r,damping,p,n,method,value,im_residual,error_estimate,kernel_calls,wall_ms");
    CHECK(rows[1].rfind("\"1,1,0\",\"1,2,3\",exp,1,2,recursion,", 0) == 0);
    // value printed with 17 significant digits parses back to the same double
    std::string tail = rows[1].substr(std::string("\"1,1,0\",\"1,2,3\",exp,1,2,recursion,").size());
    double v = std::stod(tail.substr(0, tail.find(',')));
    json j = json::parse(cli({"eval", "--ell", "1,1,0", "--r", "1,2,3"}).out);
    CHECK(v == j["value"].get<double>());
}

TEST_CASE("quadrature method reports an error estimate") {
    Run r = cli({"eval", "--ell", "0,0,0", "--r", "1,1,1", "--damping", "gauss", "--n", "0", "--method", "quadrature"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["method"] == "quadrature");
    CHECK(j["error_estimate"].get<double>() >= 0);
    CHECK(testing::rel_diff(j["value"].get<double>(), 0.719248168367542) <= 1e-10);
}

TEST_CASE("compare runs every method against the oracle") {
    Run r = cli({"compare", "--ell", "0,0,0", "--r", "1,1,1", "--damping", "gauss", "--p", "1", "--n", "2", "--method",
                 "all"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["status"] == "ok");
    REQUIRE(j["points"].size() == 1);
    const json& pt = j["points"][0];
    std::vector<std::string> methods;
    for (const auto& rec : pt["results"]) methods.push_back(rec["method"]);
    CHECK(methods == std::vector<std::string>{"recursion", "hankel-bowman", "quadrature"});
    CHECK(pt["pairwise"].size() == 3);
    for (const auto& pw : pt["pairwise"]) CHECK(pw["rel_diff"].get<double>() <= 1e-6);
    CHECK(pt["agrees_with_oracle"] == true);
}

TEST_CASE("compare skips methods that cannot handle the spec") {
    Run r = cli({"compare", "--ell", "1,0,0", "--r", "1,2,1.5", "--damping", "gauss", "--n", "1", "--no-timings"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    const json& pt = j["points"][0];
    REQUIRE(pt["skipped"].size() == 1);
    CHECK(pt["skipped"][0]["method"] == "recursion");
    CHECK(pt["results"].size() == 2);
}

TEST_CASE("validation failures exit with 2") {
    Run r = cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--damping", "gauss", "--p", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("p != 0") != std::string::npos);
    CHECK(cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--n", "1"}).code == 2);
    CHECK(cli({"eval", "--ell", "1,1", "--r", "1,2,3"}).code == 2);
    CHECK(cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--tol", "1e-3"}).code == 2);
    CHECK(cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--format", "xml"}).code == 2);
    CHECK(cli({"eval", "--ell", "1,1,0", "--r", "1,2,3", "--damping", "exp", "--method", "hankel-bowman"}).code == 2);
    CHECK(cli({"eval", "--bogus"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("unwritable output path exits with 1") {
    Run r = cli({"eval", "--ell", "0,0,0", "--r", "1,1,1", "--output", "/nonexistent-dir/x.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("/nonexistent-dir/x.json") != std::string::npos);
}

TEST_CASE("grid CSV is row-major with r1 outermost") {
    Run r = cli({"grid", "--ell", "1,1,0", "--r1", "1:2:2", "--r2", "1:3:3", "--r3", "0.5", "--damping", "gauss",
                 "--format", "csv"});
    REQUIRE(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "i,j,k,r1,r2,r3,value,im_residual,tier");
    CHECK(rows[1].rfind("0,0,0,1,1,0.5,", 0) == 0);
    CHECK(rows[2].rfind("0,1,0,1,2,0.5,", 0) == 0);
    CHECK(rows[3].rfind("0,2,0,1,3,0.5,", 0) == 0);
    CHECK(rows[4].rfind("1,0,0,2,1,0.5,", 0) == 0);
    CHECK(rows[6].rfind("1,2,0,2,3,0.5,", 0) == 0);
}

TEST_CASE("output is byte-identical across runs and thread counts") {
    auto a = cli({"grid", "--ell", "2,1,1", "--r1", "0.75:2.390625:4", "--r2", "0.75:2.390625:4", "--r3",
                  "0.75:2.390625:4", "--damping", "exp", "--no-timings", "--threads", "1"});
    auto b = cli({"grid", "--ell", "2,1,1", "--r1", "0.75:2.390625:4", "--r2", "0.75:2.390625:4", "--r3",
                  "0.75:2.390625:4", "--damping", "exp", "--no-timings", "--threads", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto c = cli({"compare", "--ell", "1,0,0", "--r1", "1:2:3", "--r2", "1.5", "--r3", "0.5:1:2", "--damping", "gauss",
                  "--no-timings", "--threads", "1"});
    auto d = cli({"compare", "--ell", "1,0,0", "--r1", "1:2:3", "--r2", "1.5", "--r3", "0.5:1:2", "--damping", "gauss",
                  "--no-timings", "--threads", "3"});
    REQUIRE(c.code == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("bench reports both paths") {
    Run r = cli({"bench", "--ell", "1,1,0", "--r1", "0.75:2.390625:4", "--r2", "0.75:2.390625:4", "--r3",
                 "0.75:2.390625:4", "--damping", "gauss", "--repetitions", "1", "--oracle-samples", "2"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["points"] == 64);
    CHECK(j["grid_kernel_calls"].get<long>() < j["pointwise_kernel_calls"].get<long>());
    CHECK(j.contains("speedup"));
}
