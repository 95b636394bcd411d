#include <catch2/catch_amalgamated.hpp>

#include <afcsim/rng.hpp>

#include <cmath>
#include <vector>

using namespace afcsim;

TEST_CASE("streams are deterministic and independent") {
    Rng a(42, "module.a");
    Rng a2(42, "module.a");
    Rng b(42, "module.b");
    std::vector<double> va, va2, vb;
    for (int i = 0; i < 64; ++i) {
        va.push_back(a.uniform());
        va2.push_back(a2.uniform());
        vb.push_back(b.uniform());
    }
    CHECK(va == va2);
    CHECK(va != vb);

    // split children differ from the parent and from each other
    Rng p(7, "parent");
    auto c1 = p.split("x");
    auto c2 = p.split("y");
    CHECK(c1.uniform() != c2.uniform());
}

TEST_CASE("uniform moments") {
    Rng r(1, "moments");
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        s += u;
        s2 += u * u;
    }
    CHECK(s / n == Catch::Approx(0.5).margin(0.003));
    CHECK(s2 / n == Catch::Approx(1.0 / 3.0).margin(0.003));
}

TEST_CASE("exponential and gaussian moments") {
    Rng r(2, "dist");
    const int n = 200000;
    double se = 0.0, sg = 0.0, sg2 = 0.0;
    for (int i = 0; i < n; ++i) {
        se += r.exponential(0.849);
        const double g = r.gaussian(1.0, 2.0);
        sg += g;
        sg2 += g * g;
    }
    CHECK(se / n == Catch::Approx(0.849).margin(0.01));
    CHECK(sg / n == Catch::Approx(1.0).margin(0.03));
    CHECK(sg2 / n - (sg / n) * (sg / n) == Catch::Approx(4.0).margin(0.1));
}

TEST_CASE("poisson mean and variance across the regime switch") {
    for (double lambda : {0.3, 4.0, 25.0, 80.0, 400.0}) {
        Rng r(3, "poisson");
        const int n = 60000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(r.poisson(lambda));
            s += k;
            s2 += k * k;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        CHECK(mean == Catch::Approx(lambda).epsilon(0.03));
        CHECK(var / mean == Catch::Approx(1.0).epsilon(0.06));
    }
}
