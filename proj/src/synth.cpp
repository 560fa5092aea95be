#include "vbpbb/synth.hpp"

#include "vbpbb/errors.hpp"
#include "vbpbb/inference.hpp"
#include "vbpbb/rng.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vbpbb {

using json = nlohmann::json;

std::string_view to_string(Waveform waveform)
{
    switch (waveform) {
    case Waveform::Sinusoid:
        return "sinusoid";
    case Waveform::Square:
        return "square";
    case Waveform::Sawtooth:
        return "sawtooth";
    }
    return "sinusoid";
}

Waveform parse_waveform(std::string_view text)
{
    if (text == "sinusoid") {
        return Waveform::Sinusoid;
    }
    if (text == "square") {
        return Waveform::Square;
    }
    if (text == "sawtooth") {
        return Waveform::Sawtooth;
    }
    throw InvalidParameter("unknown waveform '" + std::string(text) + "'");
}

double waveform_value(Waveform waveform, double x)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double cycles = x / two_pi;
    const double frac = cycles - std::floor(cycles);
    switch (waveform) {
    case Waveform::Sinusoid:
        return std::sin(x);
    case Waveform::Square:
        return frac < 0.5 ? 1.0 : -1.0;
    case Waveform::Sawtooth:
        return 2.0 * frac - 1.0;
    }
    return 0.0;
}

void SynthSpec::validate() const
{
    if (length < 1) {
        throw InvalidParameter("synthetic series length n must be positive");
    }
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw InvalidParameter("noise_sd must be a finite nonnegative number");
    }
    for (const auto& c : components) {
        if (c.period < 1) {
            throw InvalidPeriod("waveform periods must be positive integers");
        }
        if (c.period > length) {
            throw InvalidParameter("n must be at least every component period");
        }
    }
}

SynthSpec synth_spec_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed synth spec JSON: ") + e.what());
    }
    SynthSpec spec;
    try {
        spec.length = doc.at("n").get<std::int64_t>();
        spec.seed = doc.value("seed", std::uint64_t{0});
        spec.trend_slope = doc.value("trend_slope", 0.0);
        spec.noise_sd = doc.value("noise_sd", 0.0);
        for (const auto& c : doc.value("components", json::array())) {
            SynthComponent comp;
            comp.period = c.at("period").get<std::int64_t>();
            comp.amplitude = c.value("amplitude", 1.0);
            comp.phase_offset = c.value("phase_offset", 0.0);
            comp.waveform = parse_waveform(c.value("waveform", std::string("sinusoid")));
            spec.components.push_back(comp);
        }
        for (const auto& s : doc.value("level_shifts", json::array())) {
            spec.level_shifts.push_back({s.at("at_index").get<std::int64_t>(),
                                         s.at("delta").get<double>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string synth_spec_to_json(const SynthSpec& spec)
{
    json doc;
    doc["n"] = spec.length;
    doc["seed"] = spec.seed;
    doc["trend_slope"] = spec.trend_slope;
    doc["noise_sd"] = spec.noise_sd;
    doc["components"] = json::array();
    for (const auto& c : spec.components) {
        doc["components"].push_back({{"period", c.period},
                                     {"amplitude", c.amplitude},
                                     {"phase_offset", c.phase_offset},
                                     {"waveform", std::string(to_string(c.waveform))}});
    }
    doc["level_shifts"] = json::array();
    for (const auto& s : spec.level_shifts) {
        doc["level_shifts"].push_back({{"at_index", s.at_index}, {"delta", s.delta}});
    }
    return doc.dump(2) + "\n";
}

Eigen::VectorXd deterministic_part(const SynthSpec& spec)
{
    spec.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.length);
    for (const auto& c : spec.components) {
        for (std::int64_t t = 0; t < spec.length; ++t) {
            // Reduce t mod P first so long series keep full angular precision.
            const double angle =
                two_pi * static_cast<double>(t % c.period) / static_cast<double>(c.period) +
                c.phase_offset;
            x[t] += c.amplitude * waveform_value(c.waveform, angle);
        }
    }
    for (std::int64_t t = 0; t < spec.length; ++t) {
        x[t] += spec.trend_slope * static_cast<double>(t);
    }
    for (const auto& s : spec.level_shifts) {
        for (std::int64_t t = std::max<std::int64_t>(0, s.at_index); t < spec.length; ++t) {
            x[t] += s.delta;
        }
    }
    return x;
}

TimeSeries generate(const SynthSpec& spec)
{
    Eigen::VectorXd x = deterministic_part(spec);
    if (spec.noise_sd > 0.0) {
        CounterRng rng(spec.seed, 0);
        std::normal_distribution<double> noise(0.0, spec.noise_sd);
        for (Eigen::Index t = 0; t < x.size(); ++t) {
            x[t] += noise(rng);
        }
    }
    return TimeSeries(std::move(x));
}

Eigen::VectorXd true_periodic_mean(const SynthSpec& spec, std::int64_t period)
{
    return periodic_mean(TimeSeries(deterministic_part(spec)), period);
}

CoverageResult coverage_experiment(const SynthSpec& spec, const ComponentSpec& component,
                                   const BootstrapConfig& cfg, std::int64_t replications,
                                   const FilterOverrides& overrides)
{
    if (replications < 1) {
        throw InvalidParameter("replications must be at least 1");
    }
    cfg.validate();
    const Eigen::VectorXd truth = true_periodic_mean(spec, component.block_period());
    const ComponentSpec only[] = {component};

    CoverageResult out;
    out.replications = replications;
    std::int64_t covered = 0;
    std::int64_t cells = 0;
    double width_pbb = 0.0;
    double width_vbpbb = 0.0;
    for (std::int64_t r = 0; r < replications; ++r) {
        SynthSpec rep = spec;
        rep.seed = derive_key(spec.seed, static_cast<std::uint64_t>(r));
        const TimeSeries x = generate(rep);
        BootstrapConfig rc = cfg;
        rc.seed = derive_key(cfg.seed, static_cast<std::uint64_t>(r));

        const CIBand pbb = pbb_pipeline(x, component, rc).band;
        for (Eigen::Index p = 0; p < pbb.size(); ++p) {
            covered += (pbb.lower[p] <= truth[p] && truth[p] <= pbb.upper[p]) ? 1 : 0;
        }
        cells += pbb.size();
        const double wp = median_band_width(pbb);
        width_pbb += wp;

        try {
            const CIBand vb = vbpbb_pipeline(x, component, only, rc, overrides).band;
            const double wv = median_band_width(vb);
            width_vbpbb += wv;
            out.vbpbb_narrower += wv < wp ? 1 : 0;
        } catch (const InfeasibleBandwidth&) {
            ++out.vbpbb_untestable;
        } catch (const InsufficientCycles&) {
            ++out.vbpbb_untestable;
        }
    }
    out.coverage_fraction = static_cast<double>(covered) / static_cast<double>(cells);
    out.mean_width_pbb = width_pbb / static_cast<double>(replications);
    const std::int64_t tested = replications - out.vbpbb_untestable;
    out.mean_width_vbpbb = tested > 0 ? width_vbpbb / static_cast<double>(tested) : 0.0;
    return out;
}

std::string coverage_to_json(const CoverageResult& result)
{
    json doc{{"coverage_fraction", result.coverage_fraction},
             {"mean_width_pbb", result.mean_width_pbb},
             {"mean_width_vbpbb", result.mean_width_vbpbb},
             {"replications", result.replications},
             {"vbpbb_narrower", result.vbpbb_narrower},
             {"vbpbb_untestable", result.vbpbb_untestable}};
    return doc.dump(2) + "\n";
}

} // namespace vbpbb
