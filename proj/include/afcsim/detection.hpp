#pragma once

// Detection chain: SSPD thinning with jitter, dark/ambient/pump-leak noise
// as Poisson processes over the live windows, TCSPC folding, HBT splitting
// and coincidence histograms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rng.hpp"
#include "source.hpp"

namespace afcsim {

struct DetectorSpec {
    double efficiency = 0.08;
    double dark_rate_per_s = 1.5;
    double timing_jitter_sigma_ns = 0.1;
    double ambient_rate_per_s = 3.0;
    double pump_leak_rate_per_s = 1.5; // active only inside retrieval windows

    void validate() const {
        if (efficiency < 0.0 || efficiency > 1.0)
            throw std::invalid_argument("DetectorSpec: efficiency outside [0,1]");
        if (dark_rate_per_s < 0.0 || ambient_rate_per_s < 0.0 || pump_leak_rate_per_s < 0.0)
            throw std::invalid_argument("DetectorSpec: rates must be non-negative");
    }
};

enum class ClickOrigin : std::uint8_t { signal, dark, ambient, pump, background };

struct Click {
    double time_ns = 0.0;
    ClickOrigin origin = ClickOrigin::signal;
};

struct TimeWindow {
    double start_ns = 0.0;
    double end_ns = 0.0;
    bool retrieval = false; // pump leak applies only here
    double duration_ns() const { return end_ns - start_ns; }
};

// Histogram over a delay/time axis. Bin i covers
// [origin + i*bin_width, origin + (i+1)*bin_width).
struct Histogram {
    double bin_width_ns = 1.0;
    double origin_ns = 0.0;
    std::vector<std::uint64_t> counts;
    double total_integration_s = 0.0;

    double bin_start(std::size_t i) const { return origin_ns + static_cast<double>(i) * bin_width_ns; }
    double bin_center(std::size_t i) const { return bin_start(i) + 0.5 * bin_width_ns; }
    double end_ns() const { return origin_ns + bin_width_ns * static_cast<double>(counts.size()); }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    void add(double t) {
        const double x = (t - origin_ns) / bin_width_ns;
        if (x < 0.0) return;
        const auto i = static_cast<std::size_t>(x);
        if (i < counts.size()) ++counts[i];
    }
};

// Thin photons into clicks and superpose the noise processes. Photon click
// probability is the detector efficiency (upstream transmission must
// already be applied); click time gets gaussian jitter. Noise is uniform
// over each live window.
inline std::vector<Click> detect(const std::vector<PhotonRecord>& photons, const DetectorSpec& spec,
                                 const std::vector<TimeWindow>& live_windows, Rng rng) {
    spec.validate();
    std::vector<Click> clicks;
    clicks.reserve(photons.size() / 2 + 16);
    Rng rng_sig = rng.split("detect.signal");
    Rng rng_noise = rng.split("detect.noise");
    for (const auto& p : photons) {
        if (!rng_sig.bernoulli(spec.efficiency)) continue;
        Click c;
        c.time_ns = p.timestamp_ns;
        if (spec.timing_jitter_sigma_ns > 0.0)
            c.time_ns += rng_sig.gaussian(0.0, spec.timing_jitter_sigma_ns);
        c.origin = ClickOrigin::signal;
        clicks.push_back(c);
    }
    const double per_ns = 1.0e-9;
    for (const auto& w : live_windows) {
        if (!(w.end_ns > w.start_ns)) continue;
        const double dur = w.duration_ns();
        struct Src { double rate; ClickOrigin origin; bool retrieval_only; };
        const Src sources[] = {{spec.dark_rate_per_s, ClickOrigin::dark, false},
                               {spec.ambient_rate_per_s, ClickOrigin::ambient, false},
                               {spec.pump_leak_rate_per_s, ClickOrigin::pump, true}};
        for (const auto& src : sources) {
            if (src.retrieval_only && !w.retrieval) continue;
            const double lambda = src.rate * per_ns * dur;
            const std::uint64_t n = rng_noise.poisson(lambda);
            for (std::uint64_t i = 0; i < n; ++i)
                clicks.push_back({w.start_ns + rng_noise.uniform(0.0, dur), src.origin});
        }
    }
    std::sort(clicks.begin(), clicks.end(),
              [](const Click& a, const Click& b) { return a.time_ns < b.time_ns; });
    return clicks;
}

// Fold click times modulo the trigger period and accumulate.
inline Histogram tcspc(const std::vector<Click>& clicks, double trigger_period_ns, double bin_width_ns) {
    if (!(trigger_period_ns > bin_width_ns))
        throw std::invalid_argument("tcspc: trigger period must exceed the bin width");
    Histogram h;
    h.bin_width_ns = bin_width_ns;
    h.origin_ns = 0.0;
    h.counts.assign(static_cast<std::size_t>(std::ceil(trigger_period_ns / bin_width_ns)), 0);
    for (const auto& c : clicks) {
        double t = std::fmod(c.time_ns, trigger_period_ns);
        if (t < 0.0) t += trigger_period_ns;
        auto i = static_cast<std::size_t>(t / bin_width_ns);
        if (i >= h.counts.size()) i = h.counts.size() - 1;
        ++h.counts[i];
    }
    return h;
}

// HBT: route clicks through a 50:50 splitter to two virtual detectors and
// histogram the pairwise cross-detector delays t2 - t1 inside the window.
inline Histogram hbt(const std::vector<Click>& clicks, double correlation_window_ns,
                     double bin_width_ns, Rng rng) {
    if (clicks.size() < 2) throw std::invalid_argument("hbt: need at least two clicks");
    std::vector<double> t1, t2;
    Rng route = rng.split("hbt.splitter");
    for (const auto& c : clicks)
        (route.bernoulli(0.5) ? t1 : t2).push_back(c.time_ns);
    Histogram h;
    h.bin_width_ns = bin_width_ns;
    h.origin_ns = -correlation_window_ns;
    h.counts.assign(static_cast<std::size_t>(std::ceil(2.0 * correlation_window_ns / bin_width_ns)), 0);
    // both streams are time-sorted; two-pointer sweep over the window
    std::size_t j0 = 0;
    for (const double a : t1) {
        while (j0 < t2.size() && t2[j0] < a - correlation_window_ns) ++j0;
        for (std::size_t j = j0; j < t2.size() && t2[j] < a + correlation_window_ns; ++j)
            h.add(t2[j] - a);
    }
    return h;
}

// Sum of bins overlapping [center-width/2, center+width/2], fractional bins
// pro-rated.
inline double window_counts(const Histogram& h, double center_ns, double width_ns) {
    const double lo = center_ns - width_ns / 2.0;
    const double hi = center_ns + width_ns / 2.0;
    if (hi <= h.origin_ns || lo >= h.end_ns())
        throw std::domain_error("window_counts: window outside histogram range");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double b0 = h.bin_start(i);
        const double b1 = b0 + h.bin_width_ns;
        const double o0 = std::max(lo, b0);
        const double o1 = std::min(hi, b1);
        if (o1 > o0) acc += static_cast<double>(h.counts[i]) * (o1 - o0) / h.bin_width_ns;
    }
    return acc;
}

} // namespace afcsim
