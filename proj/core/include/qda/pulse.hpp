#ifndef QDA_PULSE_HPP
#define QDA_PULSE_HPP

#include <complex>
#include <functional>

namespace qda {

/// Single-photon pulse with a decaying-exponential envelope of linewidth
/// `linewidth` and carrier frequency `omega_l`.
struct ExpPulse {
    double linewidth;
    double omega_l;

    ExpPulse(double linewidth, double omega_l);
};

/// Carrier-free pulse envelope in the frame rotating at omega_l:
/// phi(t) with the normalization integral |phi|^2 dt = 1 over t >= 0.
/// The envelope declares its effective support [0, t_support] (|phi| stays
/// below eps_env beyond it) and optionally an analytic time derivative,
/// required by the reactive-work quadrature.
class Envelope {
public:
    using Amplitude = std::function<std::complex<double>(double)>;

    /// Checked factory: verifies the normalization integral equals 1 to
    /// within 1e-6 (numerical quadrature over the declared support).
    /// `derivative` may be empty.  `bandwidth_hint` is an inverse time
    /// scale of the envelope decay used for horizon caps; pass 0 to infer
    /// it from t_support.
    static Envelope normalized(Amplitude value, Amplitude derivative,
                               double omega_l, double t_support,
                               double eps_env, double bandwidth_hint = 0.0);

    /// Unchecked factory for test fixtures (e.g. the identically zero
    /// envelope, which cannot satisfy the normalization invariant).
    static Envelope unchecked(Amplitude value, Amplitude derivative,
                              double omega_l, double t_support,
                              double eps_env, double bandwidth_hint = 0.0);

    std::complex<double> value(double t) const { return t < 0.0 ? 0.0 : value_(t); }
    std::complex<double> derivative(double t) const;
    bool has_derivative() const { return static_cast<bool>(derivative_); }

    double omega_l() const { return omega_l_; }
    double t_support() const { return t_support_; }
    double eps_env() const { return eps_env_; }
    double bandwidth_hint() const { return bandwidth_hint_; }

private:
    Envelope(Amplitude value, Amplitude derivative, double omega_l,
             double t_support, double eps_env, double bandwidth_hint);

    Amplitude value_;
    Amplitude derivative_;
    double omega_l_;
    double t_support_;
    double eps_env_;
    double bandwidth_hint_;
};

/// Exponential envelope phi(t) = sqrt(linewidth) * exp(-linewidth t / 2)
/// for t >= 0, with support cut at |phi(t_support)| = eps_env,
/// eps_env = 1e-8 sqrt(linewidth).
Envelope exp_envelope(const ExpPulse& pulse);

/// Drive amplitude entering the dressed-mode equations at time t >= 0
/// (the envelope value; the sqrt(gamma_a) coupling factor is applied by
/// the consumers).
std::complex<double> source_amplitude(const Envelope& env, double t);

} // namespace qda

#endif
