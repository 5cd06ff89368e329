#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "vascnet/errors.hpp"

namespace vascnet::num {

/// Compensated (Kahan) accumulator. Keeps discrete integrals and mass sums
/// reproducible to near machine precision independent of array length.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Trapezoid rule over cell-center samples with half-cell end caps. The end
/// caps give every node weight one, so a constant integrand integrates to
/// exactly value * n * dx and smooth integrands keep second-order accuracy.
inline double integrate_cells(std::span<const double> f, double dx) {
    KahanSum t;
    for (double v : f) t.add(v);
    return t.value() * dx;
}

/// Plain composite trapezoid over nodes spaced dx apart.
inline double trapezoid(std::span<const double> f, double dx) {
    if (f.size() < 2) return 0.0;
    KahanSum s;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s.add(f[i]);
    s.add(0.5 * (f.front() + f.back()));
    return s.value() * dx;
}

/// Right-to-left cumulative trapezoid: out[i] = integral from x_i to x_last.
inline std::vector<double> cumulative_from_right(std::span<const double> f, double dx) {
    std::vector<double> out(f.size(), 0.0);
    if (f.size() < 2) return out;
    KahanSum s;
    for (std::size_t k = f.size() - 1; k-- > 0;) {
        s.add(0.5 * dx * (f[k] + f[k + 1]));
        out[k] = s.value();
    }
    return out;
}

/// Adaptive Simpson quadrature with absolute tolerance. Deterministic
/// (fixed recursion order), suitable for the smooth integrands of the
/// pressure-law machinery.
namespace detail {

template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

template <typename F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol = 1e-12,
                          int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double r = detail::simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
    if (!std::isfinite(r)) throw NumericalFailure("adaptive quadrature produced a non-finite value");
    return r;
}

struct RootResult {
    double x;
    double residual;
    int iterations;
};

/// Find x in [lo, hi] with f(x) = 0 given f(lo), f(hi) of opposite sign.
/// Secant steps guarded by bisection; terminates on |f| <= f_tol.
template <typename F>
RootResult solve_bracketed(const F& f, double lo, double hi, double f_lo, double f_hi,
                           double f_tol = 1e-12, int max_iter = 200) {
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw InvalidInput("solve_bracketed: endpoints do not bracket a root");

    double a = lo, b = hi, fa = f_lo, fb = f_hi;
    double x = b, fx = fb;
    for (int it = 1; it <= max_iter; ++it) {
        // Secant candidate, fall back to bisection when outside or stagnant.
        double s = b - fb * (b - a) / (fb - fa);
        const double mid = 0.5 * (a + b);
        if (!(s > std::min(a, b) && s < std::max(a, b))) s = mid;
        fx = f(s);
        x = s;
        if (std::abs(fx) <= f_tol) return {x, fx, it};
        if ((fx > 0.0) == (fa > 0.0)) {
            a = s;
            fa = fx;
        } else {
            b = s;
            fb = fx;
        }
        if (std::abs(b - a) <= std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b)))
            return {0.5 * (a + b), fx, it};
    }
    return {x, fx, max_iter};
}

/// Classical fourth-order Runge-Kutta step for an autonomous scalar ODE.
template <typename F>
double rk4_step(const F& rhs, double y, double h) {
    const double k1 = rhs(y);
    const double k2 = rhs(y + 0.5 * h * k1);
    const double k3 = rhs(y + 0.5 * h * k2);
    const double k4 = rhs(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Thomas algorithm for a tridiagonal system. Diagonals are overwritten.
/// lower[0] and upper[n-1] are unused.
inline void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                              std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
        throw InvalidInput("solve_tridiagonal: inconsistent sizes");
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw NumericalFailure("tridiagonal solve: zero pivot");
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw NumericalFailure("tridiagonal solve: zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    for (double v : rhs)
        if (!std::isfinite(v)) throw NumericalFailure("tridiagonal solve: non-finite solution");
}

/// Least-squares slope of y against x.
inline double linear_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidInput("linear_slope: need at least two matched points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidInput("linear_slope: degenerate abscissae");
    return sxy / sxx;
}

/// n log-spaced samples covering [lo, hi], endpoints included.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("log_spaced: need 0 < lo < hi");
    if (n < 2) throw InvalidInput("log_spaced: need at least two samples");
    std::vector<double> out(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace vascnet::num
