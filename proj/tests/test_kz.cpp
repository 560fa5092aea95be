#include "doctest.h"

#include "vbpbb/errors.hpp"
#include "vbpbb/kz.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace vbpbb;

namespace {

// Naive polynomial product, independent of the running-sum implementation.
std::vector<std::int64_t> expand_oracle(std::int64_t m, std::int64_t k)
{
    std::vector<std::int64_t> poly{1};
    const std::vector<std::int64_t> ones(static_cast<std::size_t>(m), 1);
    for (std::int64_t i = 0; i < k; ++i) {
        std::vector<std::int64_t> next(poly.size() + ones.size() - 1, 0);
        for (std::size_t a = 0; a < poly.size(); ++a) {
            for (std::size_t b = 0; b < ones.size(); ++b) {
                next[a + b] += poly[a] * ones[b];
            }
        }
        poly = std::move(next);
    }
    return poly;
}

// Eq.-level direct summation in long double; returns the real component
// estimate (2 Re for nu > 0).
std::vector<long double> direct_kzft(const std::vector<double>& x, std::int64_t m, std::int64_t k,
                                     long double nu)
{
    const auto a = expand_oracle(m, k);
    long double norm = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        norm *= static_cast<long double>(m);
    }
    const auto h = static_cast<std::int64_t>(a.size() - 1) / 2;
    std::vector<long double> out;
    for (std::int64_t t = h; t + h < static_cast<std::int64_t>(x.size()); ++t) {
        long double re = 0;
        for (std::int64_t u = -h; u <= h; ++u) {
            const long double w = static_cast<long double>(a[static_cast<std::size_t>(u + h)]) / norm;
            re += w * std::cos(2.0L * std::numbers::pi_v<long double> * nu * static_cast<long double>(u)) *
                  static_cast<long double>(x[static_cast<std::size_t>(t + u)]);
        }
        out.push_back(nu > 0 && m > 1 ? 2 * re : re);
    }
    return out;
}

TimeSeries tone(Eigen::Index n, double freq, double amp = 1.0, double phase = 0.0)
{
    Eigen::VectorXd x(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        x[t] = amp * std::cos(2.0 * std::numbers::pi * freq * static_cast<double>(t) + phase);
    }
    return TimeSeries(x);
}

} // namespace

TEST_CASE("kz coefficients: worked examples")
{
    CHECK(kz_coefficients(3, 1) == std::vector<std::int64_t>{1, 1, 1});
    CHECK(kz_coefficients(1, 5) == std::vector<std::int64_t>{1});
    CHECK(kz_coefficients(3, 2) == std::vector<std::int64_t>{1, 2, 3, 2, 1});
    CHECK(KZFTPlan(3, 1).normalizer() == 3);
    CHECK(KZFTPlan(3, 2).normalizer() == 9);
    CHECK(KZFTPlan(1, 5).normalizer() == 1);
}

TEST_CASE("kz coefficients match polynomial expansion, are symmetric and sum to m^k")
{
    for (std::int64_t m = 1; m <= 101; m += 2) {
        for (std::int64_t k = 1; k <= 3; ++k) {
            const auto c = kz_coefficients(m, k);
            REQUIRE(c == expand_oracle(m, k));
            REQUIRE(static_cast<std::int64_t>(c.size()) == k * (m - 1) + 1);
            std::int64_t sum = 0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                REQUIRE(c[i] == c[c.size() - 1 - i]);
                sum += c[i];
            }
            REQUIRE(sum == KZFTPlan(m, k).normalizer());
        }
    }
    // Large windows only for symmetry and sum; the naive oracle is quadratic.
    for (std::int64_t m : {731, 1001}) {
        const auto c = kz_coefficients(m, 3);
        std::int64_t sum = 0;
        for (auto v : c) {
            sum += v;
        }
        CHECK(sum == m * m * m);
        CHECK(c.front() == 1);
        CHECK(c[c.size() / 2] == expand_oracle(m, 3)[c.size() / 2]);
    }
}

TEST_CASE("kz coefficients: invalid arguments")
{
    CHECK_THROWS_AS(kz_coefficients(4, 1), InvalidParameter);
    CHECK_THROWS_AS(kz_coefficients(-3, 1), InvalidParameter);
    CHECK_THROWS_AS(kz_coefficients(3, 0), InvalidParameter);
    CHECK_THROWS_AS(kz_coefficients(1001, 7), InvalidParameter); // 1001^7 > 2^63
    CHECK_THROWS_AS(KZFTPlan(5, 1, Frequency(3, 5)), InvalidParameter);
}

TEST_CASE("kzft: constant input, unit-frequency null and identity")
{
    const TimeSeries c(Eigen::VectorXd::Constant(50, 3.25));
    for (std::int64_t m : {1, 3, 7}) {
        for (std::int64_t k : {1, 2, 3}) {
            const auto fc = kzft_apply(c, KZFTPlan(m, k));
            CHECK(fc.complex_series.real().isApproxToConstant(3.25, 1e-14));
            CHECK(fc.complex_series.imag().cwiseAbs().maxCoeff() == 0.0);
            CHECK(reconstruct_real(fc).values().isApproxToConstant(3.25, 1e-14));
        }
    }

    const TimeSeries ones(Eigen::VectorXd::Ones(40));
    for (std::int64_t m : {3, 5, 7, 13}) {
        const auto fc = kzft_apply(ones, KZFTPlan(m, 1, Frequency(1, m)));
        CHECK(fc.complex_series.cwiseAbs().maxCoeff() < 1e-14);
    }

    const TimeSeries x(Eigen::VectorXd::Random(20));
    const auto id = kzft_apply(x, KZFTPlan(1, 1, Frequency(1, 7)));
    CHECK(id.complex_series.real() == x.values());
    CHECK(reconstruct_real(id).values() == x.values());
    CHECK(kz_lowpass(x, 1, 4).values() == x.values());
}

TEST_CASE("kzft: short series error names the minimum length")
{
    const TimeSeries x(Eigen::VectorXd::Zero(10));
    try {
        kzft_apply(x, KZFTPlan(5, 3));
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(std::string(e.what()).find("13") != std::string::npos);
    }
}

TEST_CASE("kzft: valid support and origin bookkeeping")
{
    const TimeSeries x(Eigen::VectorXd::Random(30), 100, Date::parse("2020-01-01"));
    const auto fc = kzft_apply(x, KZFTPlan(5, 2));
    CHECK(fc.valid_from == 4);
    CHECK(fc.valid_to == 25);
    CHECK(fc.complex_series.size() == 22);
    CHECK(fc.real_series.origin_index() == 104);
    CHECK(fc.real_series.origin_label()->iso() == "2020-01-05");
    CHECK(fc.real_series.anchor_date() == x.anchor_date());
}

TEST_CASE("reconstruct_real: center tone is recovered and offset tones vanish")
{
    const TimeSeries x = tone(365, 1.0 / 73.0);
    const auto fc = kzft_apply(x, KZFTPlan(73, 1, Frequency(1, 73)));
    const TimeSeries r = reconstruct_real(fc);
    const Eigen::VectorXd expect = x.values().segment(fc.valid_from, r.size());
    CHECK((r.values() - expect).cwiseAbs().maxCoeff() < 1e-9);

    for (std::int64_t m : {7, 21, 73}) {
        // Center 1/(2m) puts the tone's conjugate 2/m away, also a zero.
        const Frequency nu(1, 2 * m);
        const TimeSeries off = tone(400, nu.value() + 1.0 / static_cast<double>(m), 2.5, 0.3);
        const auto rec = reconstruct_real(kzft_apply(off, KZFTPlan(m, 1, nu)));
        CHECK(rec.values().cwiseAbs().maxCoeff() < 1e-9 * 2.5);
    }
}

TEST_CASE("kzft agrees with direct summation")
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> g;
    std::vector<double> raw(300);
    for (auto& v : raw) {
        v = g(gen);
    }
    const TimeSeries x(Eigen::Map<Eigen::VectorXd>(raw.data(), 300));
    for (auto [m, k, p, q] : std::vector<std::array<std::int64_t, 4>>{
             {1, 1, 0, 1}, {3, 2, 1, 7}, {15, 1, 1, 10}, {21, 3, 2, 21}, {31, 2, 1, 2}}) {
        const auto rec = reconstruct_real(kzft_apply(x, KZFTPlan(m, k, Frequency(p, q))));
        const auto oracle = direct_kzft(raw, m, k, static_cast<long double>(p) / q);
        REQUIRE(static_cast<std::size_t>(rec.size()) == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            REQUIRE(std::abs(rec[static_cast<Eigen::Index>(i)] - static_cast<double>(oracle[i])) < 1e-12);
        }
    }
}

TEST_CASE("kzft: gain at the center frequency is one")
{
    for (std::int64_t m : {7, 31, 73, 365}) {
        for (std::int64_t k : {1, 2}) {
            const Frequency nu(1, m + 3);
            const Eigen::Index n = k * (m - 1) + 1 + 50;
            const KZFTPlan plan(m, k, nu);
            const auto fc = kzft_apply(tone(n, nu.value()), plan);
            const auto fs = kzft_apply(tone(n, nu.value(), 1.0, -std::numbers::pi / 2), plan);
            // cos + i sin is the analytic tone at nu; its response magnitude is the gain.
            const Eigen::VectorXcd analytic =
                fc.complex_series + std::complex<double>(0.0, 1.0) * fs.complex_series;
            CHECK(analytic.cwiseAbs().minCoeff() > 0.999);
            CHECK(analytic.cwiseAbs().maxCoeff() < 1.001);
        }
    }
}

TEST_CASE("kzft is linear")
{
    const TimeSeries a(Eigen::VectorXd::Random(120));
    const TimeSeries b(Eigen::VectorXd::Random(120));
    const TimeSeries mix(2.0 * a.values() - 0.75 * b.values());
    const KZFTPlan plan(11, 2, Frequency(1, 12));
    const auto fa = kzft_apply(a, plan).complex_series;
    const auto fb = kzft_apply(b, plan).complex_series;
    const auto fm = kzft_apply(mix, plan).complex_series;
    CHECK((fm - (2.0 * fa - 0.75 * fb)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kz lowpass: k iterations equal k passes of the moving average")
{
    const TimeSeries x(Eigen::VectorXd::Random(80));
    TimeSeries once = x;
    for (int i = 0; i < 3; ++i) {
        once = kz_lowpass(once, 5, 1);
    }
    const TimeSeries thrice = kz_lowpass(x, 5, 3);
    REQUIRE(once.size() == thrice.size());
    CHECK(once.origin_index() == thrice.origin_index());
    CHECK((once.values() - thrice.values()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kz lowpass examples")
{
    CHECK(kz_lowpass(TimeSeries(Eigen::VectorXd::Constant(20, -2.0)), 5, 2)
              .values()
              .isApproxToConstant(-2.0, 1e-14));
    const auto null = kz_lowpass(tone(100, 1.0 / 9.0, 1.0, 0.4), 9, 1);
    CHECK(null.values().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("renormalized edges keep full length and exact constants")
{
    const TimeSeries c(Eigen::VectorXd::Constant(30, 4.0), 7);
    const auto fc = kzft_apply(c, KZFTPlan(9, 2), EdgeMode::Renormalized);
    CHECK(fc.real_series.size() == 30);
    CHECK(fc.real_series.origin_index() == 7);
    CHECK(fc.real_series.values().isApproxToConstant(4.0, 1e-14));

    const TimeSeries x(Eigen::VectorXd::Random(30));
    const auto v = kzft_apply(x, KZFTPlan(9, 1, Frequency(1, 9)), EdgeMode::Valid);
    const auto r = kzft_apply(x, KZFTPlan(9, 1, Frequency(1, 9)), EdgeMode::Renormalized);
    CHECK((r.complex_series.segment(4, 22) - v.complex_series).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("select_bandwidth: worked examples")
{
    CHECK(select_bandwidth(Frequency(1, 365), {}, 2000) == 731);

    const std::vector<Frequency> annual{{1, 365}, {2, 365}, {3, 365}, {4, 365}, {5, 365}};
    CHECK(select_bandwidth(Frequency(1, 7), annual, 2000) == 17);

    const std::vector<Frequency> neighbours{{1, 365}, {3, 365}};
    CHECK(select_bandwidth(Frequency(2, 365), neighbours, 2000) == 731);
}

TEST_CASE("select_bandwidth: errors")
{
    try {
        select_bandwidth(Frequency(1, 365), {}, 400);
        FAIL("expected InfeasibleBandwidth");
    } catch (const InfeasibleBandwidth& e) {
        CHECK(e.min_length() == 731);
        CHECK(std::string(e.what()).find("731") != std::string::npos);
    }
    CHECK(select_bandwidth(Frequency(1, 365), {}, 731) == 731);
    CHECK(select_bandwidth(Frequency(1, 365), {}, 1461, 2) == 731);
    CHECK_THROWS_AS(select_bandwidth(Frequency(1, 365), {}, 1460, 2), InfeasibleBandwidth);

    const std::vector<Frequency> dup{{2, 14}};
    CHECK_THROWS_AS(select_bandwidth(Frequency(1, 7), dup, 2000), DuplicateFrequency);
    CHECK_THROWS_AS(select_bandwidth(Frequency(0, 1), {}, 2000), DuplicateFrequency);
}

TEST_CASE("select_bandwidth: the chosen window nulls every excluded frequency's neighbourhood")
{
    // delta > 2/m puts every excluded tone past the second transfer zero.
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t q = 2 + static_cast<std::int64_t>(gen() % 400);
        const std::int64_t p = 1 + static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(q / 2));
        const Frequency target(p, q);
        const std::vector<Frequency> others{Frequency(1 + static_cast<std::int64_t>(gen() % 50), 101)};
        if (abs_difference(target, others[0]).numerator() == 0) {
            continue;
        }
        const std::int64_t m = select_bandwidth(target, others, 1'000'000);
        REQUIRE(m % 2 == 1);
        long double delta = std::min(std::abs(target.value() - others[0].value()), target.value());
        REQUIRE(static_cast<long double>(m) > 2.0L / delta - 1e-9L);
        REQUIRE(static_cast<long double>(m - 2) <= 2.0L / delta + 1e-9L);
    }
}
