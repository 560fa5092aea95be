#include "vbpbb/kz.hpp"

#include "vbpbb/errors.hpp"

#include <numbers>

namespace vbpbb {

std::string_view to_string(EdgeMode mode)
{
    return mode == EdgeMode::Valid ? "valid" : "renormalized";
}

EdgeMode parse_edge_mode(std::string_view text)
{
    if (text == "valid") {
        return EdgeMode::Valid;
    }
    if (text == "renormalized") {
        return EdgeMode::Renormalized;
    }
    throw InvalidParameter("unknown edge mode '" + std::string(text) +
                           "' (expected valid or renormalized)");
}

std::vector<std::int64_t> kz_coefficients(std::int64_t window, std::int64_t iterations)
{
    if (window < 1 || window % 2 == 0) {
        throw InvalidParameter("KZ window m must be a positive odd integer, got " +
                               std::to_string(window));
    }
    if (iterations < 1) {
        throw InvalidParameter("KZ iterations k must be positive, got " +
                               std::to_string(iterations));
    }
    std::int64_t normalizer = 1;
    for (std::int64_t i = 0; i < iterations; ++i) {
        if (__builtin_mul_overflow(normalizer, window, &normalizer)) {
            throw InvalidParameter("m^k overflows 64-bit integers for m=" +
                                   std::to_string(window) + ", k=" + std::to_string(iterations));
        }
    }

    // Running sum of width m over the previous pass is one convolution with
    // the all-ones vector. Every partial sum is bounded by m^k, checked above.
    std::vector<std::int64_t> coef{1};
    for (std::int64_t pass = 0; pass < iterations; ++pass) {
        std::vector<std::int64_t> next(coef.size() + static_cast<std::size_t>(window - 1), 0);
        std::int64_t running = 0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (i < coef.size()) {
                running += coef[i];
            }
            if (i >= static_cast<std::size_t>(window) && i - static_cast<std::size_t>(window) < coef.size()) {
                running -= coef[i - static_cast<std::size_t>(window)];
            }
            next[i] = running;
        }
        coef = std::move(next);
    }
    return coef;
}

KZFTPlan::KZFTPlan(std::int64_t window, std::int64_t iterations, Frequency center)
    : window_(window), iterations_(iterations), center_(center),
      coefficients_(kz_coefficients(window, iterations)), normalizer_(1)
{
    if (2 * center_.numerator() > center_.denominator()) {
        throw InvalidParameter("KZFT center frequency " + center_.str() + " exceeds 1/2");
    }
    for (std::int64_t i = 0; i < iterations_; ++i) {
        normalizer_ *= window_;
    }

    const std::int64_t h = half_width();
    const std::int64_t p = center_.numerator();
    const std::int64_t q = center_.denominator();
    const double scale = static_cast<double>(normalizer_);
    weights_.resize(static_cast<Eigen::Index>(coefficients_.size()));
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(coefficients_.size()); ++i) {
        const std::int64_t u = i - h;
        // Reduce nu*u modulo 1 in integers so the phase carries no drift.
        std::int64_t r = (p * u) % q;
        if (r < 0) {
            r += q;
        }
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
        const double a = static_cast<double>(coefficients_[static_cast<std::size_t>(i)]) / scale;
        weights_[i] = r == 0 ? std::complex<double>(a, 0.0) : std::polar(a, angle);
    }
}

namespace {

TimeSeries real_part(const Eigen::VectorXcd& complex_series, const KZFTPlan& plan,
                     std::int64_t origin_index, const std::optional<Date>& origin_label)
{
    Eigen::VectorXd values = complex_series.real();
    if (plan.window() > 1 && plan.center().numerator() != 0) {
        values *= 2.0;
    }
    return TimeSeries(std::move(values), origin_index, origin_label);
}

} // namespace

FilteredComponent kzft_apply(const TimeSeries& series, const KZFTPlan& plan, EdgeMode edge)
{
    const Eigen::Index n = series.size();
    if (plan.length() > n) {
        throw InsufficientData("KZFT(m=" + std::to_string(plan.window()) +
                               ", k=" + std::to_string(plan.iterations()) + ") needs at least " +
                               std::to_string(plan.length()) + " samples, series has " +
                               std::to_string(n));
    }
    const Eigen::Index h = plan.half_width();
    Eigen::VectorXcd out;
    Eigen::Index from = 0;
    Eigen::Index to = n - 1;
    if (edge == EdgeMode::Valid) {
        out = kzft_window_sum(series.values(), plan.weights());
        from = h;
        to = n - 1 - h;
    } else {
        const auto& w = plan.weights();
        const auto& a = plan.coefficients();
        const double scale = static_cast<double>(plan.normalizer());
        out.resize(n);
        for (Eigen::Index t = 0; t < n; ++t) {
            const Eigen::Index lo = std::max<Eigen::Index>(0, t - h);
            const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + h);
            std::complex<double> acc(0.0, 0.0);
            std::int64_t weight = 0;
            for (Eigen::Index s = lo; s <= hi; ++s) {
                const Eigen::Index u = s - t + h;
                acc += w[u] * series[s];
                weight += a[static_cast<std::size_t>(u)];
            }
            out[t] = acc * (scale / static_cast<double>(weight));
        }
    }

    std::optional<Date> label;
    if (series.origin_label()) {
        label = series.origin_label()->plus_days(from);
    }
    const std::int64_t origin = series.origin_index() + from;
    TimeSeries real = real_part(out, plan, origin, label);
    return FilteredComponent{std::move(out), from, to, plan, edge, std::move(real)};
}

TimeSeries reconstruct_real(const FilteredComponent& filtered)
{
    return real_part(filtered.complex_series, filtered.plan, filtered.real_series.origin_index(),
                     filtered.real_series.origin_label());
}

std::int64_t select_bandwidth(const Frequency& target, std::span<const Frequency> others,
                              Eigen::Index length, std::int64_t iterations)
{
    if (iterations < 1) {
        throw InvalidParameter("KZ iterations k must be positive");
    }
    Frequency gap = target; // distance to frequency 0
    for (const auto& f : others) {
        const Frequency d = abs_difference(target, f);
        if (d < gap) {
            gap = d;
        }
    }
    if (gap.numerator() == 0) {
        throw DuplicateFrequency("frequency " + target.str() +
                                 " coincides with another component (or 0); cannot separate it");
    }
    // 2 / (p/q) = 2q/p; smallest odd integer strictly above it.
    std::int64_t m = (2 * gap.denominator()) / gap.numerator() + 1;
    if (m % 2 == 0) {
        ++m;
    }
    const std::int64_t needed = iterations * (m - 1) + 1;
    if (needed > length) {
        throw InfeasibleBandwidth("isolating frequency " + target.str() + " needs KZFT window m=" +
                                      std::to_string(m) + ", which requires minimum n = " +
                                      std::to_string(needed) + " samples (series has " +
                                      std::to_string(length) + ")",
                                  needed);
    }
    return m;
}

TimeSeries kz_lowpass(const TimeSeries& series, std::int64_t window, std::int64_t iterations,
                      EdgeMode edge)
{
    return kzft_apply(series, KZFTPlan(window, iterations), edge).real_series;
}

} // namespace vbpbb
