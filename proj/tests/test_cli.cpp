#include "doctest.h"

#include "vbpbb/cli.hpp"
#include "vbpbb/report.hpp"
#include "vbpbb/series.hpp"
#include "vbpbb/synth.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace vbpbb;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "vbpbb");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

class Workdir {
public:
    Workdir()
        : path_(fs::temp_directory_path() /
                ("vbpbb_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++)))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~Workdir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const fs::path& path() const { return path_; }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write(const std::string& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::string synthetic_series(std::int64_t n)
{
    SynthSpec spec;
    spec.components = {{365, 1.0, 0.0, Waveform::Sinusoid}, {7, 0.3, 0.0, Waveform::Sinusoid}};
    spec.noise_sd = 1.0;
    spec.trend_slope = 0.001;
    spec.length = n;
    spec.seed = 42;
    const TimeSeries s = generate(spec);
    return series_to_json(TimeSeries(s.values(), 0, Date::parse("2020-01-22")));
}

} // namespace

TEST_CASE("analyze is byte-identical across runs and worker counts")
{
    Workdir dir;
    write(dir / "series.json", synthetic_series(1460));
    auto analyze = [&](const std::string& out, const std::string& workers) {
        return run({"analyze", "--series", dir / "series.json", "--period", "365", "--harmonics",
                    "5", "--period", "7", "--method", "both", "--seed", "42", "--B", "300",
                    "--workers", workers, "--out", dir / out});
    };
    REQUIRE(analyze("a.json", "1").code == 0);
    REQUIRE(analyze("b.json", "1").code == 0);
    REQUIRE(analyze("c.json", "4").code == 0);
    const std::string a = slurp(dir / "a.json");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b.json"));
    CHECK(a == slurp(dir / "c.json"));

    const auto doc = nlohmann::json::parse(a);
    CHECK(doc.at("dataset_digest") == sha256_hex(slurp(dir / "series.json")));
    CHECK(doc.at("seed") == 42);
    CHECK(doc.at("B") == 300);
    CHECK(doc.at("components").size() == 16); // 365:1..5 and 7:1..3, both methods
}

TEST_CASE("analyze reports the minimum n for an infeasible seasonal passband")
{
    Workdir dir;
    write(dir / "short.json", synthetic_series(400));
    const Run r = run({"analyze", "--series", dir / "short.json", "--period", "365", "--method",
                       "vbpbb", "--B", "50", "--out", dir / "r.json"});
    CHECK(r.code == 3);
    CHECK(r.err.find("731") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "r.json"));
    for (const auto& entry : fs::directory_iterator(dir.path())) {
        CHECK(entry.path().filename() == "short.json");
    }
}

TEST_CASE("analyze writes band CSVs")
{
    Workdir dir;
    write(dir / "series.json", synthetic_series(1460));
    const Run r = run({"analyze", "--series", dir / "series.json", "--period", "365", "--B", "200",
                       "--bands-dir", dir / "bands", "--out", dir / "r.json"});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / "bands/band_365_1_VBPBB.csv");
    CHECK(csv.rfind("phase,calendar_label,lower,median,upper\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 366);
    CHECK(csv.find("\n0,2020-01-22,") != std::string::npos);
    CHECK(fs::exists(dir / "bands/band_365_1_PBB.csv"));
}

TEST_CASE("exit codes for bad flags and missing files")
{
    Workdir dir;
    CHECK(run({"analyze", "--series", dir / "nope.json", "--period", "7"}).code == 2);
    CHECK(run({"analyze", "--period", "7"}).code == 3);
    CHECK(run({"analyze", "--series", "x", "--period", "7", "--bogus"}).code == 3);
    write(dir / "s.json", synthetic_series(400));
    CHECK(run({"analyze", "--series", dir / "s.json", "--period", "7", "--alpha", "2"}).code == 3);
    CHECK(run({"analyze", "--series", dir / "s.json", "--period", "7", "--method", "x"}).code == 3);
    CHECK(run({"analyze", "--series", dir / "s.json", "--period", "0"}).code == 3);
    write(dir / "bad.json", "{\"values\": [1, ");
    CHECK(run({"analyze", "--series", dir / "bad.json", "--period", "7"}).code == 2);
    CHECK(run({"filter", "--series", dir / "s.json", "--m", "4"}).code == 3);
    CHECK(run({"frobnicate"}).code == 3);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("ingest then analyze never mutates the series file")
{
    Workdir dir;
    std::string csv = "date,deaths\n";
    Date d = *Date::parse("2020-01-22");
    double cumulative = 0;
    for (int i = 0; i < 60; ++i) {
        cumulative += 10 + (i % 7) * 3;
        csv += d.plus_days(i).iso() + "," + std::to_string(static_cast<int>(cumulative)) + "\n";
    }
    write(dir / "in.csv", csv);
    const Run ing = run({"ingest", "--input", dir / "in.csv", "--value-col", "deaths",
                         "--cumulative", "--population", "1000000", "--out", dir / "s.json"});
    REQUIRE(ing.code == 0);
    const TimeSeries s = load_series(dir / "s.json");
    CHECK(s.size() == 60);
    CHECK(s[0] == doctest::Approx(10 * 100000.0 / 1e6));
    CHECK(s[1] == doctest::Approx(13 * 100000.0 / 1e6));
    CHECK(s.origin_label()->iso() == "2020-01-22");

    const std::string before = slurp(dir / "s.json");
    REQUIRE(run({"analyze", "--series", dir / "s.json", "--period", "7", "--B", "100", "--out",
                 dir / "r.json"})
                .code == 0);
    CHECK(slurp(dir / "s.json") == before);
    CHECK(nlohmann::json::parse(slurp(dir / "r.json")).at("dataset_digest") == sha256_hex(before));

    for (const char* fmt : {"csv", "json", "markdown"}) {
        const Run rep = run({"report", "--in", dir / "r.json", "--format", fmt});
        CHECK(rep.code == 0);
        CHECK(rep.out.find("7:1") != std::string::npos);
    }
    CHECK(run({"report", "--in", dir / "r.json", "--format", "pdf"}).code == 3);

    write(dir / "gap.csv", "date,value\n2020-01-22,1\n2020-01-24,2\n");
    const Run gap = run({"ingest", "--input", dir / "gap.csv", "--out", dir / "g.json"});
    CHECK(gap.code == 2);
    CHECK(gap.err.find("2020-01-23") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "g.json"));
}

TEST_CASE("filter and synth subcommands")
{
    Workdir dir;
    write(dir / "spec.json", R"({"n": 60, "components": [{"period": 12}]})");
    REQUIRE(run({"synth", "--spec", dir / "spec.json", "--out", dir / "s.json"}).code == 0);
    const Run f = run({"filter", "--series", dir / "s.json", "--nu", "1/12", "--m", "25"});
    REQUIRE(f.code == 0);
    const TimeSeries out = series_from_json(f.out);
    CHECK(out.size() == 36);
    CHECK(out.origin_index() == 12);

    const Run cov = run({"coverage", "--spec", dir / "spec.json", "--component", "12",
                         "--replications", "2", "--B", "20"});
    REQUIRE(cov.code == 0);
    CHECK(nlohmann::json::parse(cov.out).at("coverage_fraction") == 1.0);
}

TEST_CASE("the installed binary maps errors to exit codes")
{
    Workdir dir;
    const std::string bin = VBPBB_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == 0);
    CHECK(status("analyze --series " + (dir / "missing.json") + " --period 7") == 2);
    CHECK(status("analyze --period 7 --nonsense") == 3);
}
