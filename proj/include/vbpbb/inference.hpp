#pragma once

#include "vbpbb/bootstrap.hpp"
#include "vbpbb/series.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vbpbb {

struct LineTest {
    bool significant = false;
    double max_lower = 0.0;
    double min_upper = 0.0;
};

/// A component is significant when no constant fits inside its band, i.e.
/// max_phase lower > min_phase upper.
LineTest horizontal_line_test(const CIBand& band);

/// Median over phases of upper - lower (interpolated-rank median).
double median_band_width(const CIBand& band);

/// median_band_width(pbb) / median_band_width(vbpbb); +inf for x/0 with
/// x > 0 and 1 for 0/0. Throws InvalidParameter if the bands describe
/// different components or phase grids.
double width_ratio(const CIBand& pbb, const CIBand& vbpbb);

enum class ScanStatus { Tested, Untestable };

struct SignificanceReport {
    explicit SignificanceReport(ComponentSpec c) : component(c) {}

    ComponentSpec component;
    Method method = Method::VBPBB;
    ScanStatus status = ScanStatus::Tested;
    std::string note; ///< reason when untestable
    bool significant = false;
    double max_lower = 0.0;
    double min_upper = 0.0;
    double median_width = 0.0;
    std::int64_t window = 1; ///< KZFT m; 1 for PBB
    std::int64_t iterations = 1;
    std::optional<CIBand> band;
    std::optional<PhaseMeanEnsemble> ensemble;
};

/// Summarise a pipeline run as a significance report.
SignificanceReport assess(const PipelineResult& result, Method method);

/// Bootstrap seed used for one component, derived from the master seed so
/// components are bootstrapped independently.
std::uint64_t component_seed(std::uint64_t seed, const ComponentSpec& component);

/// VBPBB significance for harmonics j = 1..max_harmonic of `period`. Each
/// passband excludes the other scanned harmonics, `other_components` and 0.
/// Harmonics whose passband does not fit are reported Untestable.
std::vector<SignificanceReport> harmonic_scan(const TimeSeries& series, std::int64_t period,
                                              std::int64_t max_harmonic,
                                              const BootstrapConfig& cfg,
                                              std::span<const ComponentSpec> other_components = {},
                                              const FilterOverrides& overrides = {});

/// Squared Pearson correlation over the common absolute-index support.
/// Throws UndefinedCorrelation if either side is constant there.
double r_squared(const TimeSeries& original, const TimeSeries& reconstruction);

/// A periodic curve indexed by absolute phase.
struct PeriodicCurve {
    std::int64_t period;
    Eigen::VectorXd values;
};

/// Sum of `curves`, each extended periodically over the support of `like`.
TimeSeries periodic_extension(const TimeSeries& like, std::span<const PeriodicCurve> curves);

// ---------------------------------------------------------------------------
// Full analysis

enum class MethodSelection { PBB, VBPBB, Both };

MethodSelection parse_method_selection(std::string_view text);

struct AnalysisOptions {
    std::vector<std::int64_t> periods;
    std::int64_t harmonics = 1; ///< scanned per period, capped at floor(P/2)
    MethodSelection methods = MethodSelection::Both;
    BootstrapConfig bootstrap;
    EdgeMode edge = EdgeMode::Valid;
    std::map<std::string, std::int64_t> window_overrides; ///< "P:j" -> m
};

struct RSquaredEntry {
    double value = 0.0;
    std::vector<std::string> components; ///< "P:j" labels of the curves summed
};

struct AnalysisReport {
    std::string dataset_digest;
    std::uint64_t seed = 0;
    std::int64_t resamples = 0;
    double alpha = 0.05;
    std::vector<SignificanceReport> components; ///< sorted by (P, j, method)
    std::map<std::string, double> width_ratios; ///< "P:j" -> PBB/VBPBB
    std::map<std::string, RSquaredEntry> r_squared;
    std::map<std::string, CIBand> combined_bands; ///< "P" -> significant VBPBB components summed
};

AnalysisReport analyze(const TimeSeries& series, const AnalysisOptions& options,
                       std::string dataset_digest = {});

} // namespace vbpbb
