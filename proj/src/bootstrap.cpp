#include "vbpbb/bootstrap.hpp"

#include "vbpbb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace vbpbb {

std::string_view to_string(ResampleMode mode)
{
    return mode == ResampleMode::Block ? "block" : "phasewise";
}

ResampleMode parse_resample_mode(std::string_view text)
{
    if (text == "block") {
        return ResampleMode::Block;
    }
    if (text == "phasewise") {
        return ResampleMode::Phasewise;
    }
    throw InvalidParameter("unknown resample mode '" + std::string(text) +
                           "' (expected block or phasewise)");
}

void BootstrapConfig::validate() const
{
    if (resamples < 1) {
        throw InvalidParameter("number of resamples B must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidParameter("alpha must lie strictly between 0 and 1");
    }
}

Eigen::VectorXi phase_counts(const TimeSeries& series, std::int64_t period)
{
    if (period <= 0) {
        throw InvalidPeriod("period must be a positive integer");
    }
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(period);
    for (Eigen::Index t = 0; t < series.size(); ++t) {
        ++counts[phase_of_absolute(series.origin_index() + t, period)];
    }
    return counts;
}

namespace {

void require_complete(const Eigen::VectorXi& counts)
{
    for (Eigen::Index p = 0; p < counts.size(); ++p) {
        if (counts[p] == 0) {
            throw IncompleteCycle("phase " + std::to_string(p) + " of period " +
                                  std::to_string(counts.size()) + " has no samples");
        }
    }
}

/// Accumulates per-phase sums in sample order into `out` (length P).
void periodic_mean_into(std::span<const double> values, std::int64_t first_phase,
                        const Eigen::VectorXi& counts, double* out)
{
    const auto period = static_cast<std::int64_t>(counts.size());
    std::fill(out, out + period, 0.0);
    std::int64_t phase = first_phase;
    for (double v : values) {
        out[phase] += v;
        if (++phase == period) {
            phase = 0;
        }
    }
    for (std::int64_t p = 0; p < period; ++p) {
        out[p] /= counts[p];
    }
}

/// Precomputed resampling pools for one (series, P, mode).
class Resampler {
public:
    Resampler(const TimeSeries& series, std::int64_t period, ResampleMode mode)
        : series_(series), period_(period), mode_(mode)
    {
        if (period <= 0) {
            throw InvalidPeriod("block period must be a positive integer");
        }
        const auto n = series.size();
        if (n < period) {
            throw InsufficientCycles("series of length " + std::to_string(n) +
                                     " is shorter than one period of " + std::to_string(period));
        }
        first_phase_ = phase_of_absolute(series.origin_index(), period);
        if (mode == ResampleMode::Block) {
            first_block_ = (period - first_phase_) % period;
            blocks_ = (n - first_block_) / period;
            if (blocks_ < 1) {
                throw InsufficientCycles("no complete phase-aligned cycle of " +
                                         std::to_string(period) + " samples in a series of length " +
                                         std::to_string(n));
            }
        } else {
            by_phase_.assign(static_cast<std::size_t>(period), {});
            for (Eigen::Index t = 0; t < n; ++t) {
                by_phase_[static_cast<std::size_t>(series.phase_of(t, period))].push_back(t);
            }
        }
    }

    std::int64_t first_phase() const { return first_phase_; }

    /// Overwrites `out` (length n) with one resample.
    void draw(CounterRng& rng, double* out) const
    {
        const double* src = series_.values().data();
        const auto n = series_.size();
        if (mode_ == ResampleMode::Block) {
            std::copy(src, src + n, out);
            for (std::int64_t slot = 0; slot < blocks_; ++slot) {
                const auto pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(blocks_)));
                const double* from = src + first_block_ + pick * period_;
                std::copy(from, from + period_, out + first_block_ + slot * period_);
            }
            return;
        }
        std::int64_t phase = first_phase_;
        for (Eigen::Index t = 0; t < n; ++t) {
            const auto& pool = by_phase_[static_cast<std::size_t>(phase)];
            out[t] = src[pool[rng.below(pool.size())]];
            if (++phase == period_) {
                phase = 0;
            }
        }
    }

private:
    const TimeSeries& series_;
    std::int64_t period_;
    ResampleMode mode_;
    std::int64_t first_phase_ = 0;
    std::int64_t first_block_ = 0;
    std::int64_t blocks_ = 0;
    std::vector<std::vector<Eigen::Index>> by_phase_;
};

unsigned resolve_workers(unsigned requested)
{
    if (requested == 0) {
        requested = std::max(1u, std::thread::hardware_concurrency());
    }
    return requested;
}

} // namespace

Eigen::VectorXd periodic_mean(const TimeSeries& series, std::int64_t period)
{
    const Eigen::VectorXi counts = phase_counts(series, period);
    require_complete(counts);
    Eigen::VectorXd out(period);
    periodic_mean_into({series.values().data(), static_cast<std::size_t>(series.size())},
                       phase_of_absolute(series.origin_index(), period), counts, out.data());
    return out;
}

TimeSeries pbb_resample(const TimeSeries& series, std::int64_t block_period, CounterRng& rng,
                        ResampleMode mode)
{
    const Resampler resampler(series, block_period, mode);
    Eigen::VectorXd out(series.size());
    resampler.draw(rng, out.data());
    return TimeSeries(std::move(out), series.origin_index(), series.origin_label());
}

PhaseMeanEnsemble bootstrap_ensemble(const TimeSeries& series, const ComponentSpec& component,
                                     const BootstrapConfig& cfg)
{
    cfg.validate();
    const std::int64_t period = component.block_period();
    const Resampler resampler(series, period, cfg.mode);
    const Eigen::VectorXi counts = phase_counts(series, period);
    require_complete(counts);

    CurveMatrix curves(cfg.resamples, period);
    const auto n = static_cast<std::size_t>(series.size());
    auto run_rows = [&](std::int64_t begin, std::int64_t end) {
        std::vector<double> buffer(n);
        for (std::int64_t b = begin; b < end; ++b) {
            CounterRng rng(cfg.seed, static_cast<std::uint64_t>(b));
            resampler.draw(rng, buffer.data());
            periodic_mean_into(buffer, resampler.first_phase(), counts, curves.row(b).data());
        }
    };

    const auto workers = static_cast<std::int64_t>(
        std::min<std::int64_t>(resolve_workers(cfg.workers), cfg.resamples));
    if (workers <= 1) {
        run_rows(0, cfg.resamples);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const std::int64_t chunk = (cfg.resamples + workers - 1) / workers;
        for (std::int64_t w = 0; w < workers; ++w) {
            const std::int64_t begin = w * chunk;
            const std::int64_t end = std::min(cfg.resamples, begin + chunk);
            if (begin < end) {
                pool.emplace_back(run_rows, begin, end);
            }
        }
    }

    return PhaseMeanEnsemble{std::move(curves), component, counts, series.anchor_date()};
}

double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty()) {
        throw InvalidParameter("quantile of an empty sample");
    }
    const double pos = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return std::lerp(sorted[lo], sorted[lo + 1], pos - static_cast<double>(lo));
}

double median_of(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

CIBand ci_band(const PhaseMeanEnsemble& ensemble, double alpha, Method method)
{
    if (ensemble.resamples() == 0 || ensemble.period() == 0) {
        throw InvalidParameter("cannot form a band from an empty ensemble");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidParameter("alpha must lie strictly between 0 and 1");
    }
    const Eigen::Index period = ensemble.period();
    CIBand band{Eigen::VectorXd(period), Eigen::VectorXd(period), Eigen::VectorXd(period),
                alpha, ensemble.component, method, ensemble.phase_zero_date};
    std::vector<double> column(static_cast<std::size_t>(ensemble.resamples()));
    for (Eigen::Index p = 0; p < period; ++p) {
        for (Eigen::Index b = 0; b < ensemble.resamples(); ++b) {
            column[static_cast<std::size_t>(b)] = ensemble.curves(b, p);
        }
        std::sort(column.begin(), column.end());
        band.lower[p] = quantile_sorted(column, alpha / 2.0);
        band.median[p] = quantile_sorted(column, 0.5);
        band.upper[p] = quantile_sorted(column, 1.0 - alpha / 2.0);
    }
    return band;
}

PipelineResult pbb_pipeline(const TimeSeries& series, const ComponentSpec& component,
                            const BootstrapConfig& cfg)
{
    PhaseMeanEnsemble ensemble = bootstrap_ensemble(series, component, cfg);
    CIBand band = ci_band(ensemble, cfg.alpha, Method::PBB);
    Eigen::VectorXd median = band.median;
    return PipelineResult{std::move(band), std::move(median), std::nullopt, std::move(ensemble),
                          series};
}

PipelineResult vbpbb_pipeline(const TimeSeries& series, const ComponentSpec& component,
                              std::span<const ComponentSpec> all_components,
                              const BootstrapConfig& cfg, const FilterOverrides& overrides)
{
    std::int64_t window = 0;
    if (overrides.window) {
        window = *overrides.window;
    } else {
        std::vector<Frequency> others;
        for (const auto& c : all_components) {
            if (c != component) {
                others.push_back(c.frequency());
            }
        }
        window = select_bandwidth(component.frequency(), others, series.size(),
                                  overrides.iterations);
    }
    KZFTPlan plan(window, overrides.iterations, component.frequency());
    FilteredComponent filtered = kzft_apply(series, plan, overrides.edge);

    PhaseMeanEnsemble ensemble = bootstrap_ensemble(filtered.real_series, component, cfg);
    // Report phases on the raw series' calendar even though the support was trimmed.
    ensemble.phase_zero_date = series.anchor_date();
    CIBand band = ci_band(ensemble, cfg.alpha, Method::VBPBB);
    Eigen::VectorXd median = band.median;
    return PipelineResult{std::move(band), std::move(median), std::move(plan), std::move(ensemble),
                          std::move(filtered.real_series)};
}

CIBand combine_components(std::span<const PhaseMeanEnsemble> ensembles, double alpha,
                          Method method)
{
    if (ensembles.empty()) {
        throw IncompatibleEnsembles("no ensembles to combine");
    }
    const auto& first = ensembles.front();
    CurveMatrix total = first.curves;
    for (const auto& e : ensembles.subspan(1)) {
        if (e.resamples() != first.resamples()) {
            throw IncompatibleEnsembles("ensembles have different resample counts (" +
                                        std::to_string(e.resamples()) + " vs " +
                                        std::to_string(first.resamples()) + ")");
        }
        if (e.period() != first.period() || e.component.period() != first.component.period()) {
            throw IncompatibleEnsembles("ensembles cover different cycle lengths (" +
                                        std::to_string(e.period()) + " vs " +
                                        std::to_string(first.period()) + ")");
        }
        total += e.curves;
    }
    PhaseMeanEnsemble combined{std::move(total),
                               ensembles.size() == 1 ? first.component
                                                     : ComponentSpec(first.component.period()),
                               first.phase_counts, first.phase_zero_date};
    return ci_band(combined, alpha, method);
}

} // namespace vbpbb
