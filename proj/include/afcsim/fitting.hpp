#pragma once

// Damped least squares (Levenberg-Marquardt) with analytic Jacobians for
// the handful of peak/decay models the analysis needs. Parameter counts are
// tiny, so the normal equations are solved directly.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace afcsim {

struct FitResult {
    std::string model_name;
    std::vector<double> parameters;
    std::vector<double> uncertainties;
    double residual_norm = std::numeric_limits<double>::quiet_NaN(); // chi^2
    bool converged = false;
    int iterations = 0;
};

namespace fitdetail {

// Solve A x = b for small dense symmetric systems, Gaussian elimination
// with partial pivoting. A is row-major n*n.
inline bool solve_dense(std::vector<double> A, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] / A[col * n + col];
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= A[r * n + c] * x[c];
        x[r] = acc / A[r * n + r];
    }
    return true;
}

} // namespace fitdetail

// model(x, p, grad_out) -> value; grad_out has one slot per parameter.
using FitModel = std::function<double(double, const std::vector<double>&, std::vector<double>&)>;

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w; // 1/variance; empty = unit weights
};

inline FitResult levenberg_marquardt(const FitModel& model, const FitData& data,
                                     std::vector<double> p0, const std::string& name,
                                     int max_iter = 300) {
    const std::size_t n = data.x.size();
    const std::size_t m = p0.size();
    if (n < m) throw std::invalid_argument("levenberg_marquardt: fewer points than parameters");

    auto weight = [&](std::size_t i) { return data.w.empty() ? 1.0 : data.w[i]; };
    auto chi2_of = [&](const std::vector<double>& p) {
        std::vector<double> g(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data.y[i] - model(data.x[i], p, g);
            acc += weight(i) * r * r;
        }
        return acc;
    };

    std::vector<double> p = std::move(p0);
    double chi2 = chi2_of(p);
    double lambda = 1e-3;
    FitResult out;
    out.model_name = name;
    int it = 0;
    for (; it < max_iter; ++it) {
        // build J^T W J and J^T W r
        std::vector<double> JtJ(m * m, 0.0), Jtr(m, 0.0), g(m);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = model(data.x[i], p, g);
            const double r = data.y[i] - f;
            const double wi = weight(i);
            for (std::size_t a = 0; a < m; ++a) {
                Jtr[a] += wi * g[a] * r;
                for (std::size_t b = a; b < m; ++b) JtJ[a * m + b] += wi * g[a] * g[b];
            }
        }
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < a; ++b) JtJ[a * m + b] = JtJ[b * m + a];

        bool stepped = false;
        for (int tries = 0; tries < 24; ++tries) {
            std::vector<double> A = JtJ;
            for (std::size_t a = 0; a < m; ++a) A[a * m + a] *= (1.0 + lambda);
            std::vector<double> step;
            if (fitdetail::solve_dense(A, Jtr, step)) {
                std::vector<double> trial(m);
                for (std::size_t a = 0; a < m; ++a) trial[a] = p[a] + step[a];
                const double trial_chi2 = chi2_of(trial);
                if (trial_chi2 <= chi2) {
                    double rel = 0.0;
                    for (std::size_t a = 0; a < m; ++a)
                        rel = std::max(rel, std::abs(step[a]) / (std::abs(p[a]) + 1e-30));
                    p = std::move(trial);
                    const double gain = chi2 - trial_chi2;
                    chi2 = trial_chi2;
                    lambda = std::max(lambda * 0.2, 1e-14);
                    stepped = true;
                    if (rel < 1e-13 || gain < 1e-16 * (1.0 + chi2)) {
                        out.converged = true;
                    }
                    break;
                }
            }
            lambda *= 8.0;
        }
        if (!stepped) { out.converged = chi2 < std::numeric_limits<double>::infinity(); break; }
        if (out.converged) break;
    }
    out.iterations = it;
    if (it >= max_iter) out.converged = false;
    out.parameters = p;
    out.residual_norm = chi2;

    // covariance from (J^T W J)^-1; scale by reduced chi^2 for unit weights
    std::vector<double> JtJ(m * m, 0.0), g(m);
    for (std::size_t i = 0; i < n; ++i) {
        model(data.x[i], p, g);
        const double wi = weight(i);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a; b < m; ++b) JtJ[a * m + b] += wi * g[a] * g[b];
    }
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < a; ++b) JtJ[a * m + b] = JtJ[b * m + a];
    out.uncertainties.assign(m, 0.0);
    const double scale = data.w.empty() && n > m ? chi2 / static_cast<double>(n - m) : 1.0;
    for (std::size_t a = 0; a < m; ++a) {
        std::vector<double> e(m, 0.0), col;
        e[a] = 1.0;
        if (fitdetail::solve_dense(JtJ, e, col) && col[a] > 0.0)
            out.uncertainties[a] = std::sqrt(col[a] * scale);
    }
    return out;
}

// ---- concrete models ----

// p = [A, tau, c]: A exp(-t/tau) + c
inline double model_exponential(double t, const std::vector<double>& p, std::vector<double>& g) {
    const double e = std::exp(-t / p[1]);
    g[0] = e;
    g[1] = p[0] * e * t / (p[1] * p[1]);
    g[2] = 1.0;
    return p[0] * e + p[2];
}

// p = [A, mu, sigma, c]
inline double model_gaussian(double x, const std::vector<double>& p, std::vector<double>& g) {
    const double z = (x - p[1]) / p[2];
    const double e = std::exp(-0.5 * z * z);
    g[0] = e;
    g[1] = p[0] * e * z / p[2];
    g[2] = p[0] * e * z * z / p[2];
    g[3] = 1.0;
    return p[0] * e + p[3];
}

// p = [A, x0, fwhm, c]
inline double model_lorentzian(double x, const std::vector<double>& p, std::vector<double>& g) {
    const double h = p[2] / 2.0;
    const double u = (x - p[1]) / h;
    const double den = 1.0 + u * u;
    const double f = 1.0 / den;
    g[0] = f;
    g[1] = p[0] * f * f * 2.0 * u / h;
    g[2] = p[0] * f * f * u * u / h; // d/d(fwhm) = A * 2u^2/(den^2 * fwhm) * ... (h = fwhm/2)
    g[3] = 1.0;
    return p[0] * f + p[3];
}

// p = [Cbar, V, phi]: Cbar (1 + V cos(4 theta - phi)), theta in radians
inline double model_sinusoid4(double th, const std::vector<double>& p, std::vector<double>& g) {
    const double c = std::cos(4.0 * th - p[2]);
    const double s = std::sin(4.0 * th - p[2]);
    g[0] = 1.0 + p[1] * c;
    g[1] = p[0] * c;
    g[2] = p[0] * p[1] * s;
    return p[0] * (1.0 + p[1] * c);
}

inline constexpr double fwhm_from_sigma = 2.3548200450309493;

} // namespace afcsim
