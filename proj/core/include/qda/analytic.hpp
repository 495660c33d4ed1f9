#ifndef QDA_ANALYTIC_HPP
#define QDA_ANALYTIC_HPP

#include <complex>
#include <optional>

#include "qda/model.hpp"
#include "qda/pulse.hpp"

namespace qda {

/// Complex Lorentzian weight 1 / (k/2 + i delta).
struct LorentzFactor {
    double k;
    double detuning;
    std::complex<double> value;

    LorentzFactor(double k_, double detuning_)
        : k(k_), detuning(detuning_),
          value(1.0 / std::complex<double>(0.5 * k_, detuning_)) {}

    double abs2() const { return std::norm(value); }
};

/// One point of the energetics: branch transition probabilities, their
/// interference term, the work absorbed from the pulse, and (when
/// available) the reactive work and the delta_ab = 0 work split.
/// Work values are in units of hbar * omega_l for w_abs and of
/// hbar * gamma_a for w_reac.  residual_qda and residual_sum are
/// relative identity residuals (work-balance and probability-sum).
struct EnergeticsReport {
    double p_lambda_plus = 0.0;
    double p_lambda_minus = 0.0;
    double rho_pm = 0.0;
    double p_total = 0.0;
    double w_abs = 0.0;
    std::optional<double> w_reac;  // oracle engine only
    std::optional<double> w_so;    // delta_ab = 0 only
    std::optional<double> w_coh;   // delta_ab = 0 only
    double residual_qda = 0.0;
    double residual_sum = 0.0;
    bool p_total_clipped = false;
};

/// Below linewidth / min(gamma_pp, gamma_mm) = 1e-9 the finite-linewidth
/// expressions switch to their monochromatic limits.
inline constexpr double monochromatic_threshold = 1e-9;

/// Dressed-branch amplitude psi_pm(t) of the driven pair, t >= 0, full
/// carrier phase included.  The removable singularity at
/// gamma_pmpm = linewidth, detuning = 0 is evaluated with a series.
std::complex<double> psi_amplitude(const DressedFrame& frame,
                                   const ExpPulse& pulse, Branch branch,
                                   double t);

/// Closed-form observables for the exponential pulse at finite linewidth.
double w_abs_closed(const DressedFrame& frame, const ExpPulse& pulse);
double p_lambda_closed(const DressedFrame& frame, const ExpPulse& pulse,
                       Branch branch);
double rho_pm_closed(const DressedFrame& frame, const ExpPulse& pulse);
double p_total_closed(const DressedFrame& frame, const ExpPulse& pulse);

/// Monochromatic (linewidth -> 0) limits at carrier frequency omega_l.
double w_abs_monochromatic(const DressedFrame& frame, double omega_l);
double p_lambda_monochromatic(const DressedFrame& frame, double omega_l,
                              Branch branch);
double rho_pm_monochromatic(const DressedFrame& frame, double omega_l);
double p_total_monochromatic(const DressedFrame& frame, double omega_l);

/// Assemble a full closed-form report (no w_reac; that quantity is only
/// produced by the numerical route).
EnergeticsReport closed_form_report(const DressedFrame& frame,
                                    const ExpPulse& pulse);

} // namespace qda

#endif
