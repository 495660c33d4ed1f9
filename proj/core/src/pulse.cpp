#include "qda/pulse.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qda {

namespace {

// Adaptive Simpson quadrature of a real integrand, sufficient for the
// one-off normalization check at envelope construction.
double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_abs2(const Envelope::Amplitude& amp, double t_end) {
    const std::function<double(double)> f = [&](double t) {
        return std::norm(amp(t));
    };
    // Split the range so a sharply peaked envelope is not missed by the
    // first Simpson stencil.
    double total = 0.0;
    const int pieces = 64;
    for (int i = 0; i < pieces; ++i) {
        const double a = t_end * i / pieces;
        const double b = t_end * (i + 1) / pieces;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        total += adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb),
                                  1e-10 / pieces, 40);
    }
    return total;
}

} // namespace

ExpPulse::ExpPulse(double linewidth_, double omega_l_)
    : linewidth(linewidth_), omega_l(omega_l_) {
    if (!(linewidth > 0.0) || !std::isfinite(linewidth))
        throw std::invalid_argument("ExpPulse: linewidth must be positive and finite");
    if (!std::isfinite(omega_l))
        throw std::invalid_argument("ExpPulse: omega_l must be finite");
}

Envelope::Envelope(Amplitude value, Amplitude derivative, double omega_l,
                   double t_support, double eps_env, double bandwidth_hint)
    : value_(std::move(value)), derivative_(std::move(derivative)),
      omega_l_(omega_l), t_support_(t_support), eps_env_(eps_env),
      bandwidth_hint_(bandwidth_hint) {}

Envelope Envelope::unchecked(Amplitude value, Amplitude derivative,
                             double omega_l, double t_support, double eps_env,
                             double bandwidth_hint) {
    if (!value)
        throw std::invalid_argument("Envelope: amplitude callable required");
    if (!(t_support > 0.0) || !std::isfinite(t_support))
        throw std::invalid_argument("Envelope: t_support must be positive and finite");
    if (bandwidth_hint <= 0.0)
        bandwidth_hint = 2.0 * std::log(1e8) / t_support;
    return Envelope(std::move(value), std::move(derivative), omega_l,
                    t_support, eps_env, bandwidth_hint);
}

Envelope Envelope::normalized(Amplitude value, Amplitude derivative,
                              double omega_l, double t_support, double eps_env,
                              double bandwidth_hint) {
    Envelope env = unchecked(std::move(value), std::move(derivative), omega_l,
                             t_support, eps_env, bandwidth_hint);
    const double n2 = integrate_abs2(env.value_, env.t_support_);
    if (std::abs(n2 - 1.0) > 1e-6)
        throw std::invalid_argument(
            "Envelope: |phi|^2 integrates to " + std::to_string(n2) +
            ", expected 1 within 1e-6");
    return env;
}

std::complex<double> Envelope::derivative(double t) const {
    if (!derivative_)
        throw std::invalid_argument(
            "Envelope: analytic derivative not provided (required for reactive work)");
    return t < 0.0 ? 0.0 : derivative_(t);
}

Envelope exp_envelope(const ExpPulse& pulse) {
    const double d = pulse.linewidth;
    const double root = std::sqrt(d);
    const double eps = 1e-8 * root;
    // |phi(T)| = eps  =>  T = -(2/d) log(eps / sqrt(d)) = (2/d) log(1e8).
    const double t_support = 2.0 * std::log(1e8) / d;
    auto val = [root, d](double t) {
        return std::complex<double>(root * std::exp(-0.5 * d * t), 0.0);
    };
    auto der = [root, d](double t) {
        return std::complex<double>(-0.5 * d * root * std::exp(-0.5 * d * t), 0.0);
    };
    return Envelope::normalized(val, der, pulse.omega_l, t_support, eps, d);
}

std::complex<double> source_amplitude(const Envelope& env, double t) {
    return env.value(t);
}

} // namespace qda
