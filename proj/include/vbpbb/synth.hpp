#pragma once

#include "vbpbb/bootstrap.hpp"
#include "vbpbb/series.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vbpbb {

enum class Waveform { Sinusoid, Square, Sawtooth };

std::string_view to_string(Waveform waveform);
Waveform parse_waveform(std::string_view text);

/// Unit-amplitude waveform at angle `x`: sin(x), sign of sin(x), or a ramp
/// from -1 to 1 over each 2 pi.
double waveform_value(Waveform waveform, double x);

struct SynthComponent {
    std::int64_t period = 1;
    double amplitude = 1.0;
    double phase_offset = 0.0; ///< radians
    Waveform waveform = Waveform::Sinusoid;
};

struct LevelShift {
    std::int64_t at_index = 0;
    double delta = 0.0;
};

/// X(t) = sum_i A_i w_i(2 pi t / P_i + theta_i) + slope t + steps + N(0, sd^2).
struct SynthSpec {
    std::vector<SynthComponent> components;
    double trend_slope = 0.0;
    double noise_sd = 0.0;
    std::vector<LevelShift> level_shifts;
    std::int64_t length = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

SynthSpec synth_spec_from_json(std::string_view text);
std::string synth_spec_to_json(const SynthSpec& spec);

TimeSeries generate(const SynthSpec& spec);

/// Noise-free signal: the expectation of generate(spec) at every t.
Eigen::VectorXd deterministic_part(const SynthSpec& spec);

/// Exact E[periodic_mean(generate(spec), P)].
Eigen::VectorXd true_periodic_mean(const SynthSpec& spec, std::int64_t period);

struct CoverageResult {
    double coverage_fraction = 0.0;  ///< PBB band covers the true periodic mean
    double mean_width_pbb = 0.0;
    double mean_width_vbpbb = 0.0;
    std::int64_t replications = 0;
    std::int64_t vbpbb_narrower = 0; ///< replications with VBPBB width < PBB width
    std::int64_t vbpbb_untestable = 0;
};

/// R fresh generations (seed of replication r derived from spec.seed and r);
/// PBB and VBPBB bands for `component` on each.
CoverageResult coverage_experiment(const SynthSpec& spec, const ComponentSpec& component,
                                   const BootstrapConfig& cfg, std::int64_t replications,
                                   const FilterOverrides& overrides = {});

std::string coverage_to_json(const CoverageResult& result);

} // namespace vbpbb
