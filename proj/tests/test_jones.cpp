#include <catch2/catch_amalgamated.hpp>

#include <afcsim/jones.hpp>
#include <afcsim/optics.hpp>

using namespace afcsim;

TEST_CASE("waveplate identities") {
    const auto hwp45 = waveplate(WaveplateKind::half, pi_v / 4.0);
    CHECK(state_fidelity(apply_jones(hwp45, pol::H), pol::V) == Catch::Approx(1.0));
    CHECK(state_fidelity(apply_jones(hwp45, pol::V), pol::H) == Catch::Approx(1.0));

    const auto hwp22 = waveplate(WaveplateKind::half, pi_v / 8.0);
    CHECK(state_fidelity(apply_jones(hwp22, pol::H), pol::D) == Catch::Approx(1.0));

    const auto qwp45 = waveplate(WaveplateKind::quarter, pi_v / 4.0);
    const auto out = apply_jones(qwp45, pol::H);
    const double f_plus = state_fidelity(out, pol::sigma_plus);
    const double f_minus = state_fidelity(out, pol::sigma_minus);
    CHECK(std::max(f_plus, f_minus) == Catch::Approx(1.0)); // circular either handedness
}

TEST_CASE("waveplates are unitary, projectors idempotent and hermitian") {
    for (double th : {0.0, 0.2, pi_v / 8.0, pi_v / 4.0, 1.1}) {
        CHECK(half_wave_plate(th).is_unitary());
        CHECK(quarter_wave_plate(th).is_unitary());
        const auto p = polarizer(th);
        const auto pp = p * p;
        CHECK(std::abs(pp.hh - p.hh) < 1e-12);
        CHECK(std::abs(pp.hv - p.hv) < 1e-12);
        CHECK(std::abs(pp.vv - p.vv) < 1e-12);
        CHECK(std::abs(p.hv - std::conj(p.vh)) < 1e-12);
    }
}

TEST_CASE("PBS port projects D to half amplitude on H") {
    const auto out = apply_jones(pbs_h_port(), pol::D);
    CHECK(std::abs(out.h) == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(out.v) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("passive elements never grow the norm") {
    const JonesVector in = {cplx(0.3, 0.1), cplx(-0.7, 0.2)};
    for (double th : {0.0, 0.3, 0.7, 1.4}) {
        CHECK(apply_jones(half_wave_plate(th), in).norm2() <= in.norm2() * (1.0 + 1e-12));
        CHECK(apply_jones(polarizer(th), in).norm2() <= in.norm2() * (1.0 + 1e-12));
    }
}
