#ifndef QDA_ORACLE_HPP
#define QDA_ORACLE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qda/analytic.hpp"
#include "qda/model.hpp"
#include "qda/pulse.hpp"

namespace qda {

struct IntegrationOptions {
    double rel_tol = 1e-10;     // accepted range [1e-13, 1e-3]
    double abs_tol = 1e-12;
    bool include_cross = false; // keep the dressed cross-damping term
    double eps_tail = 1e-10;    // tail criterion |psi(t_end)|^2 <= eps * max
    double t_cap_override = 0.0; // 0 = use the default horizon cap
};

/// Numerical solution of the driven dressed-mode equations in the frame
/// rotating at the carrier omega_l.  Both stored amplitudes share that
/// one carrier, psi_tilde_pm(t) = psi_pm(t) e^{i omega_l t}, so branch
/// mixing observables need no phase restoration: relative phases cancel
/// identically in psi_plus^* psi_minus and |v+ psi+ + v- psi-|.
///
/// Each accepted step stores its quartic dense-output polynomial, so any
/// t in [0, t_end] can be evaluated and observables are integrated by
/// adaptive quadrature on the interpolant rather than on raw steps.
struct TrajectorySolution {
    struct Segment {
        double t0;
        double h;
        std::array<std::complex<double>, 5> cp; // dense coefficients, +
        std::array<std::complex<double>, 5> cm; // dense coefficients, -
    };

    std::vector<double> grid;
    std::vector<std::complex<double>> psi_plus;
    std::vector<std::complex<double>> psi_minus;
    std::vector<Segment> segments;
    IntegrationOptions tolerances;
    double t_end = 0.0;
    double max_abs2_plus = 0.0;
    double max_abs2_minus = 0.0;

    /// Dense-output evaluation of (psi_tilde_plus, psi_tilde_minus).
    std::pair<std::complex<double>, std::complex<double>> eval(double t) const;

    /// Conservative error bound for an observable of magnitude |value|
    /// computed from this solution (used by the convergence sanity test).
    double error_estimate(double value) const {
        return 100.0 * (tolerances.rel_tol * std::abs(value) + tolerances.abs_tol);
    }
};

/// Integrate the amplitude equations for an arbitrary envelope with an
/// adaptive Dormand-Prince 5(4) pair.  The horizon starts at
/// max(t_support, 40/min(gamma_pp, gamma_mm)) and doubles until the tail
/// criterion holds, up to a hard cap.
TrajectorySolution integrate_amplitudes(const DressedFrame& frame,
                                        const Envelope& env,
                                        const IntegrationOptions& opts = {});

/// p = gamma_b * integral |v+ psi+ + v- psi-|^2 dt.
double transition_probability(const DressedFrame& frame,
                              const TrajectorySolution& sol);

/// Branch probability gamma_b^(pm) * integral |psi_pm|^2 dt.
double p_lambda_oracle(const DressedFrame& frame, const TrajectorySolution& sol,
                       Branch branch);

/// rho_pm = 2 u+ u- gamma_b * integral Re[psi+^* psi-] dt.
double coherence(const DressedFrame& frame, const TrajectorySolution& sol);

struct WorkAbsorbed {
    double from_input_field; // -2 sqrt(gamma_a) Re[(u+ psi+^* + u- psi-^*) phi]
    double from_decay_rates; // gamma_pp int |psi+|^2 + gamma_mm int |psi-|^2
    double residual_qda;     // relative difference of the two routes
};

WorkAbsorbed work_absorbed(const DressedFrame& frame, const Envelope& env,
                           const TrajectorySolution& sol);

/// Reactive work 2 sqrt(gamma_a) int Im[(u+ psi+^* + u- psi-^*) phi_dot] dt,
/// reported in units of hbar * gamma_a.  Requires an envelope with an
/// analytic derivative on t > 0.
double work_reactive(const DressedFrame& frame, const Envelope& env,
                     const TrajectorySolution& sol);

/// Run the integration and assemble the full report (including w_reac
/// when the envelope is differentiable).
EnergeticsReport oracle_report(const DressedFrame& frame, const Envelope& env,
                               const IntegrationOptions& opts = {});

} // namespace qda

#endif
