#include <catch2/catch_amalgamated.hpp>

#include <afcsim/grid.hpp>
#include <afcsim/rng.hpp>

using namespace afcsim;

namespace {
FrequencyGrid small_grid() { return FrequencyGrid(4.0, 1u << 12); }
}

TEST_CASE("grid invariants") {
    auto g = small_grid();
    CHECK(g.resolution_ghz() == Catch::Approx(4.0 / 4096.0));
    CHECK(g.time_window_ns() == Catch::Approx(1024.0));
    CHECK(g.detuning_at(g.n_points / 2) == Catch::Approx(0.0));
    CHECK_THROWS_AS(FrequencyGrid(4.0, 1000), std::invalid_argument); // not a power of two
    CHECK_THROWS_AS(FrequencyGrid(-1.0, 1024), std::invalid_argument);
}

TEST_CASE("transform round trip is identity and preserves energy") {
    auto g = small_grid();
    SpectralField f(g);
    Rng rng(7, "spectral.roundtrip");
    for (auto& a : f.amplitude) a = cplx(rng.gaussian(), rng.gaussian());
    const double e0 = f.energy();

    auto t = to_time_domain(f);
    CHECK(t.energy() == Catch::Approx(e0).epsilon(1e-10)); // Parseval
    auto f2 = to_frequency_domain(t);
    CHECK(f2.energy() == Catch::Approx(e0).epsilon(1e-10));

    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k)
        worst = std::max(worst, std::abs(f2.amplitude[k] - f.amplitude[k]));
    CHECK(worst < 1e-12 * std::sqrt(e0));
}

TEST_CASE("delta-like spectrum gives constant-magnitude time trace") {
    auto g = small_grid();
    SpectralField f(g);
    f.amplitude[g.index_near(0.25)] = 1.0;
    auto t = to_time_domain(f);
    const double m0 = std::abs(t.amplitude[0]);
    for (std::size_t i = 0; i < t.amplitude.size(); i += 97)
        CHECK(std::abs(t.amplitude[i]) == Catch::Approx(m0).epsilon(1e-9));
}

TEST_CASE("gaussian transform-limit relation") {
    // amplitude-spectrum fwhm W maps to amplitude-trace fwhm 4 ln2 / (pi W)
    auto g = FrequencyGrid(8.0, 1u << 14);
    const double W = 0.5; // GHz
    auto f = line_shape(LineKind::gaussian, 0.0, W, g);
    auto t = to_time_domain(f);
    // |trace| is symmetric around t=0 with the wrap at the window end
    const double peak = std::abs(t.amplitude[0]);
    double t_half = 0.0;
    for (std::size_t i = 1; i < t.amplitude.size() / 2; ++i) {
        if (std::abs(t.amplitude[i]) < peak / 2.0) {
            t_half = t.time_at(i);
            break;
        }
    }
    const double fwhm_t = 2.0 * t_half;
    const double expected = 4.0 * std::log(2.0) / (pi_v * W);
    CHECK(fwhm_t == Catch::Approx(expected).epsilon(0.02));
}

TEST_CASE("line_shape normalization and FWHM") {
    auto g = small_grid();
    const double W = 0.7;
    auto lor = line_shape(LineKind::lorentzian, 0.0, W, g);
    CHECK(std::abs(lor.amplitude[g.index_near(0.0)]) == Catch::Approx(1.0));
    CHECK(std::abs(lor.amplitude[g.index_near(W / 2.0)]) == Catch::Approx(0.5).epsilon(1e-3));
    auto gau = line_shape(LineKind::gaussian, 0.0, W, g);
    CHECK(std::abs(gau.amplitude[g.index_near(W / 2.0)]) == Catch::Approx(0.5).epsilon(1e-3));

    // symmetry about the center on the symmetric grid
    for (std::size_t k = 1; k < g.n_points / 2; k += 53) {
        const auto a = lor.amplitude[g.n_points / 2 + k];
        const auto b = lor.amplitude[g.n_points / 2 - k];
        CHECK(std::abs(a - b) < 1e-14);
    }
}

TEST_CASE("gaussian vs lorentzian integral ratio") {
    // quadrature oracle on a fine grid: equal fwhm, equal peak -> area ratio
    // sigma sqrt(2 pi) / (pi fwhm / 2) ~ 0.678
    auto g = FrequencyGrid(64.0, 1u << 16);
    const double W = 0.7;
    auto gau = line_shape(LineKind::gaussian, 0.0, W, g);
    auto lor = line_shape(LineKind::lorentzian, 0.0, W, g);
    double ig = 0.0, il = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k) {
        ig += gau.amplitude[k].real();
        il += lor.amplitude[k].real();
    }
    // lorentzian tails clipped by the finite span; compensate analytically:
    // integral outside +-S/2 of a unit lorentzian = 1 - (2/pi) atan(S/W)
    const double clipped = (pi_v * W / 2.0) * (1.0 - (2.0 / pi_v) * std::atan(64.0 / W));
    il += clipped / g.resolution_ghz();
    CHECK(ig / il == Catch::Approx(0.6778).epsilon(0.01));
}

TEST_CASE("line_shape errors and warnings") {
    auto g = small_grid();
    CHECK_THROWS_AS(line_shape(LineKind::gaussian, 5.0, 0.1, g), std::domain_error); // out of band
    CHECK_THROWS_AS(line_shape(LineKind::gaussian, 0.0, -0.1, g), std::invalid_argument);
    WarningLog log;
    line_shape(LineKind::gaussian, 0.0, g.resolution_ghz() * 0.5, g, &log);
    REQUIRE_FALSE(log.empty()); // under-resolved
}

TEST_CASE("causal spectrum reproduces the real part and is causal") {
    auto g = FrequencyGrid(4.0, 1u << 14);
    std::vector<double> depth(g.n_points, 0.0);
    const double ln2 = std::log(2.0);
    for (std::size_t k = 0; k < g.n_points; ++k) {
        const double nu = g.detuning_at(k);
        depth[k] = 2.0 * std::exp(-4.0 * ln2 * nu * nu / 0.04); // 200 MHz gaussian line
    }
    const auto Dc = causal_complex_spectrum(depth);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.n_points; ++k)
        worst = std::max(worst, std::abs(Dc[k].real() - depth[k]));
    CHECK(worst < 1e-3); // Kramers-Kronig partner consistent on the grid

    // kernel one-sided
    std::vector<cplx> kern(Dc);
    ifftshift(kern);
    detail::fft_inplace(kern, +1);
    double pre = 0.0, post = 0.0;
    for (std::size_t i = 1; i < kern.size() / 2; ++i) post += std::norm(kern[i]);
    for (std::size_t i = kern.size() / 2 + 1; i < kern.size(); ++i) pre += std::norm(kern[i]);
    CHECK(pre < 1e-12 * post);
}

TEST_CASE("exponential wavepacket has lorentzian line of natural width") {
    auto g = FrequencyGrid(8.0, 1u << 14);
    const double tau = 0.849;
    auto f = exponential_wavepacket(tau, 0.0, g);
    const double peak = std::norm(f.amplitude[g.index_near(0.0)]);
    const double gamma = 1.0 / (2.0 * pi_v * tau); // intensity fwhm in GHz
    const double at_half = std::norm(f.amplitude[g.index_near(gamma / 2.0)]);
    CHECK(at_half / peak == Catch::Approx(0.5).epsilon(0.01));
    // time trace decays with the intensity lifetime
    auto t = to_time_domain(f);
    const double i0 = std::norm(t.amplitude[4]);
    const double i1 = std::norm(t.amplitude[4 + static_cast<std::size_t>(tau / g.time_step_ns())]);
    CHECK(i1 / i0 == Catch::Approx(std::exp(-1.0)).epsilon(0.05));
}
