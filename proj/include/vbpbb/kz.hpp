#pragma once

// Kolmogorov-Zurbenko low-pass (KZ) and Fourier-transform band-pass (KZFT)
// filters. KZ_{m,k} is a centered moving average of odd width m iterated k
// times; its weights are the coefficients of (1 + z + ... + z^{m-1})^k over
// m^k. KZFT_{m,k,nu} modulates those weights by exp(-i 2 pi nu u), moving the
// passband to nu:
//
//   KZFT(t) = sum_{u=-k(m-1)/2}^{k(m-1)/2} a_u / m^k * exp(-i 2 pi nu u) * X(t+u)
//
// For k = 1 the transfer function has exact zeros at offsets q/m from nu.

#include "vbpbb/series.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace vbpbb {

enum class EdgeMode {
    Valid,        ///< outputs only where the full window fits
    Renormalized, ///< full-length output, partial windows rescaled by their in-range weight
};

std::string_view to_string(EdgeMode mode);
EdgeMode parse_edge_mode(std::string_view text);

/// Exact integer coefficients of (1 + z + ... + z^{m-1})^k, length k(m-1)+1.
/// Throws InvalidParameter for even/nonpositive m or nonpositive k, and when
/// m^k leaves the exact int64 range.
std::vector<std::int64_t> kz_coefficients(std::int64_t window, std::int64_t iterations);

class KZFTPlan {
public:
    KZFTPlan(std::int64_t window, std::int64_t iterations, Frequency center = Frequency());

    std::int64_t window() const { return window_; }
    std::int64_t iterations() const { return iterations_; }
    const Frequency& center() const { return center_; }
    const std::vector<std::int64_t>& coefficients() const { return coefficients_; }
    std::int64_t normalizer() const { return normalizer_; }

    /// k(m-1)/2: samples lost on each side in valid mode.
    std::int64_t half_width() const { return iterations_ * (window_ - 1) / 2; }
    std::int64_t length() const { return iterations_ * (window_ - 1) + 1; }

    /// Complex filter weights for u = -half_width .. half_width.
    const Eigen::VectorXcd& weights() const { return weights_; }

private:
    std::int64_t window_;
    std::int64_t iterations_;
    Frequency center_;
    std::vector<std::int64_t> coefficients_;
    std::int64_t normalizer_;
    Eigen::VectorXcd weights_;
};

/// Full-window KZFT sum over a real or complex input; output index i holds
/// the value centred on input index i + (weights.size() - 1) / 2.
template <typename Derived>
Eigen::VectorXcd kzft_window_sum(const Eigen::MatrixBase<Derived>& input,
                                 const Eigen::VectorXcd& weights)
{
    const Eigen::Index len = weights.size();
    const Eigen::Index count = input.size() - len + 1;
    Eigen::VectorXcd out(count > 0 ? count : 0);
    for (Eigen::Index i = 0; i < count; ++i) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index u = 0; u < len; ++u) {
            acc += weights[u] * std::complex<double>(input(i + u));
        }
        out[i] = acc;
    }
    return out;
}

struct FilteredComponent {
    Eigen::VectorXcd complex_series;
    Eigen::Index valid_from = 0; ///< input index of complex_series[0]
    Eigen::Index valid_to = 0;   ///< input index of the last output
    KZFTPlan plan;
    EdgeMode edge = EdgeMode::Valid;
    TimeSeries real_series;
};

/// Throws InsufficientData naming the minimum length when the series is
/// shorter than the filter.
FilteredComponent kzft_apply(const TimeSeries& series, const KZFTPlan& plan,
                             EdgeMode edge = EdgeMode::Valid);

/// Real component carried by the filter output: 2 Re(KZFT) for nu > 0
/// (the negative-frequency twin is stopped), Re(KZFT) for nu = 0 or the
/// identity filter m = 1.
TimeSeries reconstruct_real(const FilteredComponent& filtered);

/// Smallest odd m with m > 2 / delta, delta the gap from `target` to the
/// nearest of `others` and 0. Throws DuplicateFrequency if delta = 0 and
/// InfeasibleBandwidth if k(m-1)+1 exceeds `length`.
std::int64_t select_bandwidth(const Frequency& target, std::span<const Frequency> others,
                              Eigen::Index length, std::int64_t iterations = 1);

/// KZ_{m,k}: kzft_apply at nu = 0 followed by reconstruct_real.
TimeSeries kz_lowpass(const TimeSeries& series, std::int64_t window, std::int64_t iterations,
                      EdgeMode edge = EdgeMode::Valid);

} // namespace vbpbb
