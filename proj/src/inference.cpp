#include "vbpbb/inference.hpp"

#include "vbpbb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vbpbb {

LineTest horizontal_line_test(const CIBand& band)
{
    LineTest out;
    out.max_lower = band.lower.maxCoeff();
    out.min_upper = band.upper.minCoeff();
    out.significant = out.max_lower > out.min_upper;
    return out;
}

double median_band_width(const CIBand& band)
{
    const Eigen::VectorXd widths = band.upper - band.lower;
    return median_of(std::vector<double>(widths.data(), widths.data() + widths.size()));
}

double width_ratio(const CIBand& pbb, const CIBand& vbpbb)
{
    if (pbb.component != vbpbb.component || pbb.size() != vbpbb.size()) {
        throw InvalidParameter("width ratio needs bands for the same component and phase grid (" +
                               pbb.component.label() + " vs " + vbpbb.component.label() + ")");
    }
    const double num = median_band_width(pbb);
    const double den = median_band_width(vbpbb);
    if (den == 0.0) {
        return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return num / den;
}

SignificanceReport assess(const PipelineResult& result, Method method)
{
    const LineTest test = horizontal_line_test(result.band);
    SignificanceReport report{result.band.component};
    report.method = method;
    report.significant = test.significant;
    report.max_lower = test.max_lower;
    report.min_upper = test.min_upper;
    report.median_width = median_band_width(result.band);
    if (result.plan) {
        report.window = result.plan->window();
        report.iterations = result.plan->iterations();
    }
    report.band = result.band;
    report.ensemble = result.ensemble;
    return report;
}

std::uint64_t component_seed(std::uint64_t seed, const ComponentSpec& component)
{
    const auto tag = (static_cast<std::uint64_t>(component.period()) << 20) ^
                     static_cast<std::uint64_t>(component.harmonic());
    return derive_key(seed, tag);
}

namespace {

SignificanceReport untestable(const ComponentSpec& component, const std::string& why)
{
    SignificanceReport report{component};
    report.status = ScanStatus::Untestable;
    report.note = why;
    return report;
}

SignificanceReport run_vbpbb(const TimeSeries& series, const ComponentSpec& component,
                             std::span<const ComponentSpec> all, const BootstrapConfig& cfg,
                             const FilterOverrides& overrides)
{
    BootstrapConfig own = cfg;
    own.seed = component_seed(cfg.seed, component);
    return assess(vbpbb_pipeline(series, component, all, own, overrides), Method::VBPBB);
}

} // namespace

std::vector<SignificanceReport> harmonic_scan(const TimeSeries& series, std::int64_t period,
                                              std::int64_t max_harmonic,
                                              const BootstrapConfig& cfg,
                                              std::span<const ComponentSpec> other_components,
                                              const FilterOverrides& overrides)
{
    if (max_harmonic < 1) {
        throw InvalidParameter("harmonic scan needs max harmonic >= 1");
    }
    if (2 * max_harmonic > period) {
        throw InvalidParameter("harmonic " + std::to_string(max_harmonic) + " of period " +
                               std::to_string(period) + " lies above the Nyquist frequency");
    }
    std::vector<ComponentSpec> all(other_components.begin(), other_components.end());
    for (std::int64_t j = 1; j <= max_harmonic; ++j) {
        all.emplace_back(period, j);
    }

    std::vector<SignificanceReport> out;
    for (std::int64_t j = 1; j <= max_harmonic; ++j) {
        const ComponentSpec component(period, j);
        try {
            out.push_back(run_vbpbb(series, component, all, cfg, overrides));
        } catch (const InfeasibleBandwidth& e) {
            out.push_back(untestable(component, std::string("untestable at this n: ") + e.what()));
        } catch (const InsufficientCycles& e) {
            out.push_back(untestable(component, std::string("untestable at this n: ") + e.what()));
        }
    }
    return out;
}

double r_squared(const TimeSeries& original, const TimeSeries& reconstruction)
{
    const std::int64_t begin = std::max(original.origin_index(), reconstruction.origin_index());
    const std::int64_t end = std::min(original.origin_index() + original.size(),
                                      reconstruction.origin_index() + reconstruction.size());
    if (end - begin < 2) {
        throw UndefinedCorrelation("series share fewer than two samples");
    }
    const Eigen::Index len = end - begin;
    const Eigen::VectorXd x = original.values().segment(begin - original.origin_index(), len);
    const Eigen::VectorXd y =
        reconstruction.values().segment(begin - reconstruction.origin_index(), len);
    const Eigen::VectorXd dx = x.array() - x.mean();
    const Eigen::VectorXd dy = y.array() - y.mean();
    const double sxx = dx.squaredNorm();
    const double syy = dy.squaredNorm();
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedCorrelation("correlation undefined for a constant series");
    }
    const double sxy = dx.dot(dy);
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

TimeSeries periodic_extension(const TimeSeries& like, std::span<const PeriodicCurve> curves)
{
    Eigen::VectorXd values = Eigen::VectorXd::Zero(like.size());
    for (const auto& curve : curves) {
        if (curve.values.size() != curve.period) {
            throw InvalidParameter("periodic curve length does not match its period");
        }
        for (Eigen::Index t = 0; t < like.size(); ++t) {
            values[t] += curve.values[like.phase_of(t, curve.period)];
        }
    }
    return TimeSeries(std::move(values), like.origin_index(), like.origin_label());
}

MethodSelection parse_method_selection(std::string_view text)
{
    if (text == "pbb") {
        return MethodSelection::PBB;
    }
    if (text == "vbpbb") {
        return MethodSelection::VBPBB;
    }
    if (text == "both") {
        return MethodSelection::Both;
    }
    throw InvalidParameter("unknown method '" + std::string(text) + "' (expected pbb, vbpbb or both)");
}

AnalysisReport analyze(const TimeSeries& series, const AnalysisOptions& options,
                       std::string dataset_digest)
{
    options.bootstrap.validate();
    if (options.periods.empty()) {
        throw InvalidParameter("at least one --period is required");
    }
    if (options.harmonics < 1) {
        throw InvalidParameter("--harmonics must be at least 1");
    }
    const std::set<std::int64_t> periods(options.periods.begin(), options.periods.end());
    std::vector<ComponentSpec> all;
    for (std::int64_t p : periods) {
        if (p < 2) {
            throw InvalidPeriod("period must be at least 2 samples, got " + std::to_string(p));
        }
        const std::int64_t top = std::min(options.harmonics, p / 2);
        for (std::int64_t j = 1; j <= top; ++j) {
            all.emplace_back(p, j);
        }
    }
    for (const auto& [label, m] : options.window_overrides) {
        const ComponentSpec c = ComponentSpec::parse(label);
        if (std::find(all.begin(), all.end(), c) == all.end()) {
            throw InvalidParameter("--m-override names component " + label +
                                   " which is not being analysed");
        }
        (void)m;
    }

    const bool want_pbb = options.methods != MethodSelection::VBPBB;
    const bool want_vbpbb = options.methods != MethodSelection::PBB;

    AnalysisReport report;
    report.dataset_digest = std::move(dataset_digest);
    report.seed = options.bootstrap.seed;
    report.resamples = options.bootstrap.resamples;
    report.alpha = options.bootstrap.alpha;

    for (const auto& c : all) {
        BootstrapConfig cfg = options.bootstrap;
        cfg.seed = component_seed(options.bootstrap.seed, c);
        if (want_pbb) {
            SignificanceReport r = assess(pbb_pipeline(series, c, cfg), Method::PBB);
            r.ensemble.reset();
            report.components.push_back(std::move(r));
        }
        if (want_vbpbb) {
            FilterOverrides ov;
            ov.edge = options.edge;
            if (auto it = options.window_overrides.find(c.label()); it != options.window_overrides.end()) {
                ov.window = it->second;
            }
            try {
                report.components.push_back(run_vbpbb(series, c, all, options.bootstrap, ov));
            } catch (const InfeasibleBandwidth&) {
                if (c.harmonic() == 1) {
                    throw;
                }
                // Harmonics share the fundamental's constraint, so this is rare.
                report.components.push_back(untestable(c, "passband infeasible at this n"));
            } catch (const InsufficientCycles& e) {
                if (c.harmonic() == 1) {
                    throw;
                }
                report.components.push_back(untestable(c, e.what()));
            }
        }
    }

    // Width ratios need both methods on the same component.
    for (const auto& c : all) {
        const SignificanceReport* pbb = nullptr;
        const SignificanceReport* vb = nullptr;
        for (const auto& r : report.components) {
            if (r.component == c && r.band) {
                (r.method == Method::PBB ? pbb : vb) = &r;
            }
        }
        if (pbb && vb) {
            report.width_ratios[c.label()] = width_ratio(*pbb->band, *vb->band);
        }
    }

    // Combined bands and R^2 over significant VBPBB components.
    std::vector<PeriodicCurve> significant_curves;
    std::vector<std::string> significant_labels;
    for (std::int64_t p : periods) {
        std::vector<PhaseMeanEnsemble> ensembles;
        for (const auto& r : report.components) {
            if (r.method == Method::VBPBB && r.component.period() == p && r.significant &&
                r.ensemble) {
                ensembles.push_back(*r.ensemble);
                significant_curves.push_back({r.component.block_period(), r.band->median});
                significant_labels.push_back(r.component.label());
            }
        }
        if (!ensembles.empty()) {
            report.combined_bands.emplace(std::to_string(p),
                                          combine_components(ensembles, options.bootstrap.alpha));
        }
        for (const auto& r : report.components) {
            if (r.method == Method::VBPBB && r.component == ComponentSpec(p) && r.band) {
                const PeriodicCurve alone{r.component.block_period(), r.band->median};
                try {
                    const double value =
                        r_squared(series, periodic_extension(series, std::span(&alone, 1)));
                    report.r_squared[r.component.label()] = RSquaredEntry{value, {r.component.label()}};
                } catch (const UndefinedCorrelation&) {
                }
            }
        }
    }
    if (!significant_curves.empty()) {
        try {
            const double value = r_squared(series, periodic_extension(series, significant_curves));
            report.r_squared["all_significant"] = RSquaredEntry{value, significant_labels};
        } catch (const UndefinedCorrelation&) {
        }
    }

    for (auto& r : report.components) {
        r.ensemble.reset();
    }
    std::stable_sort(report.components.begin(), report.components.end(),
                     [](const SignificanceReport& a, const SignificanceReport& b) {
                         if (a.component != b.component) {
                             return a.component < b.component;
                         }
                         return a.method < b.method;
                     });
    return report;
}

} // namespace vbpbb
