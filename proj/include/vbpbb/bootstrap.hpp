#pragma once

#include "vbpbb/kz.hpp"
#include "vbpbb/rng.hpp"
#include "vbpbb/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vbpbb {

enum class ResampleMode {
    Block,     ///< whole phase-aligned cycles drawn with replacement
    Phasewise, ///< each position drawn from the samples sharing its phase
};

std::string_view to_string(ResampleMode mode);
ResampleMode parse_resample_mode(std::string_view text);

struct BootstrapConfig {
    std::int64_t resamples = 10000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    ResampleMode mode = ResampleMode::Block;
    unsigned workers = 1; ///< 0 selects std::thread::hardware_concurrency()

    void validate() const;
};

/// Row-major so each bootstrap row is one contiguous curve.
using CurveMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// B bootstrapped periodic-mean curves over one block period.
struct PhaseMeanEnsemble {
    CurveMatrix curves;
    ComponentSpec component;
    Eigen::VectorXi phase_counts;
    std::optional<Date> phase_zero_date;

    Eigen::Index resamples() const { return curves.rows(); }
    Eigen::Index period() const { return curves.cols(); }
};

/// Samples per phase of a cycle of `period`.
Eigen::VectorXi phase_counts(const TimeSeries& series, std::int64_t period);

/// Per-phase mean over all cycles; throws IncompleteCycle if a phase never occurs.
Eigen::VectorXd periodic_mean(const TimeSeries& series, std::int64_t period);

/// One periodic block bootstrap resample, same length and phase alignment as
/// `series`. Block mode keeps the partial cycles before the first phase-0
/// sample and after the last full cycle fixed.
TimeSeries pbb_resample(const TimeSeries& series, std::int64_t block_period, CounterRng& rng,
                        ResampleMode mode = ResampleMode::Block);

/// Row b is periodic_mean(pbb_resample(series, P, CounterRng(seed, b)), P).
PhaseMeanEnsemble bootstrap_ensemble(const TimeSeries& series, const ComponentSpec& component,
                                     const BootstrapConfig& cfg);

/// Order-statistic quantile with linear interpolation at rank (N-1)q.
/// `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double q);

/// Median of arbitrary values under the same rule.
double median_of(std::vector<double> values);

CIBand ci_band(const PhaseMeanEnsemble& ensemble, double alpha, Method method = Method::PBB);

struct FilterOverrides {
    std::optional<std::int64_t> window; ///< skips bandwidth selection when set
    std::int64_t iterations = 1;
    EdgeMode edge = EdgeMode::Valid;
};

struct PipelineResult {
    CIBand band;
    Eigen::VectorXd median_curve;
    std::optional<KZFTPlan> plan; ///< empty for PBB
    PhaseMeanEnsemble ensemble;
    TimeSeries bootstrapped; ///< the series that was resampled
};

PipelineResult pbb_pipeline(const TimeSeries& series, const ComponentSpec& component,
                            const BootstrapConfig& cfg);

/// Band-pass `series` around `component` with a KZFT whose width excludes
/// every other frequency in `all_components` (and 0), then run the periodic
/// block bootstrap on the reconstructed component.
PipelineResult vbpbb_pipeline(const TimeSeries& series, const ComponentSpec& component,
                              std::span<const ComponentSpec> all_components,
                              const BootstrapConfig& cfg, const FilterOverrides& overrides = {});

/// Sum resample b of every ensemble and take per-phase quantiles.
CIBand combine_components(std::span<const PhaseMeanEnsemble> ensembles, double alpha,
                          Method method = Method::VBPBB);

} // namespace vbpbb
