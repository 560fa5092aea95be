#include "vbpbb/cli.hpp"

#include "vbpbb/bootstrap.hpp"
#include "vbpbb/errors.hpp"
#include "vbpbb/inference.hpp"
#include "vbpbb/ingest.hpp"
#include "vbpbb/kz.hpp"
#include "vbpbb/report.hpp"
#include "vbpbb/synth.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace vbpbb {

namespace {

namespace fs = std::filesystem;

struct IngestArgs {
    std::string input, date_col = "date", value_col = "value", gap_policy = "reject", out;
    bool cumulative = false;
    std::optional<double> population;
    double per = 100000.0;
};

struct AnalyzeArgs {
    std::string series, method = "both", resample_mode = "block", edge = "valid", out, bands_dir;
    std::vector<std::int64_t> periods;
    std::int64_t harmonics = 1;
    std::int64_t resamples = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::vector<std::string> m_overrides;
};

struct FilterArgs {
    std::string series, nu = "0", edge = "valid", out;
    std::int64_t m = 1;
    std::int64_t k = 1;
};

struct SynthArgs {
    std::string spec, out;
};

struct CoverageArgs {
    std::string spec, component = "1", resample_mode = "block", edge = "valid", out;
    std::int64_t replications = 100;
    std::int64_t resamples = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

struct ReportArgs {
    std::string in, format = "markdown", out;
};

void emit(const std::string& path, const std::string& contents, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << contents;
    } else {
        write_file_atomic(path, contents);
    }
}

void run_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err)
{
    IngestConfig cfg;
    cfg.input_path = a.input;
    cfg.date_column = a.date_col;
    cfg.value_column = a.value_col;
    cfg.cumulative = a.cumulative;
    cfg.gap_policy = parse_gap_policy(a.gap_policy);
    cfg.per = a.per;
    if (a.population) {
        cfg.population = *a.population;
        cfg.normalize = true;
    }
    cfg.validate();
    TimeSeries series = load_csv(cfg);
    if (cfg.cumulative) {
        IncidentSeries incident = cumulative_to_incident(series);
        if (incident.negative_increments > 0) {
            err << "warning: " << incident.negative_increments
                << " negative daily increment(s) kept as reported\n";
        }
        series = std::move(incident.series);
    }
    if (cfg.normalize) {
        series = normalize_per_capita(series, cfg.population, cfg.per);
    }
    emit(a.out, series_to_json(series), out);
}

std::map<std::string, std::int64_t> parse_overrides(const std::vector<std::string>& specs)
{
    std::map<std::string, std::int64_t> out;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw InvalidParameter("--m-override expects PERIOD:HARMONIC=M, got '" + s + "'");
        }
        const ComponentSpec c = ComponentSpec::parse(s.substr(0, eq));
        std::int64_t m = 0;
        try {
            std::size_t used = 0;
            m = std::stoll(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) {
                throw std::invalid_argument(s);
            }
        } catch (const std::exception&) {
            throw InvalidParameter("--m-override window in '" + s + "' is not an integer");
        }
        if (m < 1 || m % 2 == 0) {
            throw InvalidParameter("--m-override window must be a positive odd integer, got " +
                                   std::to_string(m));
        }
        out[c.label()] = m;
    }
    return out;
}

void run_analyze(const AnalyzeArgs& a, std::ostream& out)
{
    AnalysisOptions opt;
    opt.periods = a.periods;
    opt.harmonics = a.harmonics;
    opt.methods = parse_method_selection(a.method);
    opt.bootstrap.resamples = a.resamples;
    opt.bootstrap.alpha = a.alpha;
    opt.bootstrap.seed = a.seed;
    opt.bootstrap.mode = parse_resample_mode(a.resample_mode);
    opt.bootstrap.workers = a.workers;
    opt.edge = parse_edge_mode(a.edge);
    opt.window_overrides = parse_overrides(a.m_overrides);
    opt.bootstrap.validate();

    const std::string bytes = read_file(a.series);
    const TimeSeries series = series_from_json(bytes);
    const AnalysisReport report = analyze(series, opt, sha256_hex(bytes));

    // Everything is computed before the first file is written.
    std::vector<std::pair<fs::path, std::string>> files;
    if (!a.bands_dir.empty()) {
        const fs::path dir(a.bands_dir);
        for (const auto& r : report.components) {
            if (r.band) {
                files.emplace_back(dir / ("band_" + std::to_string(r.component.period()) + "_" +
                                          std::to_string(r.component.harmonic()) + "_" +
                                          std::string(to_string(r.method)) + ".csv"),
                                   band_to_csv(*r.band));
            }
        }
        for (const auto& [period, band] : report.combined_bands) {
            files.emplace_back(dir / ("band_" + period + "_combined_VBPBB.csv"), band_to_csv(band));
        }
        fs::create_directories(dir);
    }
    for (const auto& [path, contents] : files) {
        write_file_atomic(path, contents);
    }
    emit(a.out, report_to_json(report), out);
}

void run_filter(const FilterArgs& a, std::ostream& out)
{
    const KZFTPlan plan(a.m, a.k, Frequency::parse(a.nu));
    const EdgeMode edge = parse_edge_mode(a.edge);
    const TimeSeries series = load_series(a.series);
    emit(a.out, series_to_json(kzft_apply(series, plan, edge).real_series), out);
}

void run_synth(const SynthArgs& a, std::ostream& out)
{
    const SynthSpec spec = synth_spec_from_json(read_file(a.spec));
    emit(a.out, series_to_json(generate(spec)), out);
}

void run_coverage(const CoverageArgs& a, std::ostream& out)
{
    BootstrapConfig cfg;
    cfg.resamples = a.resamples;
    cfg.alpha = a.alpha;
    cfg.seed = a.seed;
    cfg.mode = parse_resample_mode(a.resample_mode);
    cfg.workers = a.workers;
    cfg.validate();
    FilterOverrides ov;
    ov.edge = parse_edge_mode(a.edge);
    const ComponentSpec component = ComponentSpec::parse(a.component);
    const SynthSpec spec = synth_spec_from_json(read_file(a.spec));
    const CoverageResult result = coverage_experiment(spec, component, cfg, a.replications, ov);
    emit(a.out, coverage_to_json(result), out);
}

void run_report(const ReportArgs& a, std::ostream& out)
{
    const SummaryFormat format = parse_summary_format(a.format);
    emit(a.out, summarize_report(read_file(a.in), format), out);
}

} // namespace

int cli_dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variable bandpass periodic block bootstrap for periodically correlated series",
                 "vbpbb"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Daily CSV -> series JSON");
    ingest_cmd->add_option("--input", ingest.input, "CSV file with a header row")->required();
    ingest_cmd->add_option("--date-col", ingest.date_col, "date column (YYYY-MM-DD)");
    ingest_cmd->add_option("--value-col", ingest.value_col, "value column");
    ingest_cmd->add_flag("--cumulative", ingest.cumulative, "difference cumulative counts");
    ingest_cmd->add_option("--population", ingest.population, "divide by this population");
    ingest_cmd->add_option("--per", ingest.per, "normalization base (default 100000)");
    ingest_cmd->add_option("--gap-policy", ingest.gap_policy, "reject | zero-fill");
    ingest_cmd->add_option("--out", ingest.out, "series JSON output (stdout if omitted)");

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "PBB/VBPBB bands and significance");
    analyze_cmd->add_option("--series", analyze_args.series, "series JSON")->required();
    analyze_cmd->add_option("--period", analyze_args.periods, "fundamental period (repeatable)")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    analyze_cmd->add_option("--harmonics", analyze_args.harmonics, "harmonics scanned per period");
    analyze_cmd->add_option("--B", analyze_args.resamples, "bootstrap resamples (default 10000)");
    analyze_cmd->add_option("--alpha", analyze_args.alpha, "1 - confidence level (default 0.05)");
    analyze_cmd->add_option("--seed", analyze_args.seed, "master seed");
    analyze_cmd->add_option("--method", analyze_args.method, "pbb | vbpbb | both");
    analyze_cmd->add_option("--resample-mode", analyze_args.resample_mode, "block | phasewise");
    analyze_cmd->add_option("--m-override", analyze_args.m_overrides,
                            "PERIOD:HARMONIC=M window override (repeatable)");
    analyze_cmd->add_option("--edge", analyze_args.edge, "valid | renormalized filter ends");
    analyze_cmd->add_option("--workers", analyze_args.workers, "bootstrap threads (0 = all cores)");
    analyze_cmd->add_option("--out", analyze_args.out, "report JSON (stdout if omitted)");
    analyze_cmd->add_option("--bands-dir", analyze_args.bands_dir, "directory for band CSVs");

    FilterArgs filter;
    auto* filter_cmd = app.add_subcommand("filter", "Apply a KZFT filter");
    filter_cmd->add_option("--series", filter.series, "series JSON")->required();
    filter_cmd->add_option("--nu", filter.nu, "center frequency NUM/DEN (0 = KZ low-pass)");
    filter_cmd->add_option("--m", filter.m, "odd window length")->required();
    filter_cmd->add_option("--k", filter.k, "iterations (default 1)");
    filter_cmd->add_option("--edge", filter.edge, "valid | renormalized");
    filter_cmd->add_option("--out", filter.out, "filtered series JSON (stdout if omitted)");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic series");
    synth_cmd->add_option("--spec", synth.spec, "synth spec JSON")->required();
    synth_cmd->add_option("--out", synth.out, "series JSON (stdout if omitted)");

    CoverageArgs coverage;
    auto* coverage_cmd = app.add_subcommand("coverage", "Monte-Carlo band coverage experiment");
    coverage_cmd->add_option("--spec", coverage.spec, "synth spec JSON")->required();
    coverage_cmd->add_option("--component", coverage.component, "PERIOD or PERIOD:HARMONIC")
        ->required();
    coverage_cmd->add_option("--replications", coverage.replications, "replications (default 100)");
    coverage_cmd->add_option("--B", coverage.resamples, "bootstrap resamples (default 2000)");
    coverage_cmd->add_option("--alpha", coverage.alpha, "1 - confidence level");
    coverage_cmd->add_option("--seed", coverage.seed, "bootstrap master seed");
    coverage_cmd->add_option("--resample-mode", coverage.resample_mode, "block | phasewise");
    coverage_cmd->add_option("--edge", coverage.edge, "valid | renormalized");
    coverage_cmd->add_option("--workers", coverage.workers, "bootstrap threads (0 = all cores)");
    coverage_cmd->add_option("--out", coverage.out, "result JSON (stdout if omitted)");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Summary tables from a report JSON");
    report_cmd->add_option("--in", report.in, "report JSON")->required();
    report_cmd->add_option("--format", report.format, "csv | json | markdown");
    report_cmd->add_option("--out", report.out, "output file (stdout if omitted)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (*ingest_cmd) {
            run_ingest(ingest, out, err);
        } else if (*analyze_cmd) {
            run_analyze(analyze_args, out);
        } else if (*filter_cmd) {
            run_filter(filter, out);
        } else if (*synth_cmd) {
            run_synth(synth, out);
        } else if (*coverage_cmd) {
            run_coverage(coverage, out);
        } else if (*report_cmd) {
            run_report(report, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitOk;
}

} // namespace vbpbb
