#include "qda/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qda {

SiteSystem::SiteSystem(double omega_a_, double omega_b_, double coupling_j_,
                       double gamma_a_, double gamma_b_)
    : omega_a(omega_a_), omega_b(omega_b_), coupling_j(coupling_j_),
      gamma_a(gamma_a_), gamma_b(gamma_b_) {
    if (!(std::isfinite(omega_a) && std::isfinite(omega_b) &&
          std::isfinite(coupling_j) && std::isfinite(gamma_a) &&
          std::isfinite(gamma_b)))
        throw std::invalid_argument("SiteSystem: parameters must be finite");
    if (!(gamma_a > 0.0) || !(gamma_b > 0.0))
        throw std::invalid_argument("SiteSystem: decay rates must be positive");
    if (coupling_j == 0.0 && omega_a == omega_b)
        throw std::invalid_argument(
            "SiteSystem: J = 0 with omega_a = omega_b leaves the dressed basis undefined");
}

bool SiteSystem::qda_regime(double threshold) const {
    return std::abs(gamma_a - gamma_b) / (gamma_a + gamma_b) <= threshold;
}

DressedFrame diagonalize(const SiteSystem& s) {
    const double delta = s.omega_a - s.omega_b;
    const double aj = std::abs(s.coupling_j);
    const double gap = std::hypot(2.0 * aj, delta);

    DressedFrame f{};
    f.omega_bar = 0.5 * (s.omega_a + s.omega_b);
    f.delta_ab = delta;
    f.omega_gap = gap;
    f.omega_plus = f.omega_bar + 0.5 * gap;
    f.omega_minus = f.omega_bar - 0.5 * gap;

    if (aj == 0.0) {
        // Decoupled sites: |+> is whichever site lies higher.
        f.u_plus = delta > 0.0 ? 1.0 : 0.0;
        f.u_minus = delta > 0.0 ? 0.0 : 1.0;
    } else {
        // omega_pm - omega_a = -delta/2 +/- gap/2.  Evaluate each
        // eigenvalue shift in the branch that avoids subtracting nearly
        // equal numbers: x_plus * x_minus = -J^2 links the two.
        const double x_plus =
            delta > 0.0 ? 2.0 * aj * aj / (gap + delta) : 0.5 * (gap - delta);
        const double x_minus =
            delta < 0.0 ? -2.0 * aj * aj / (gap - delta) : -0.5 * (gap + delta);
        f.u_plus = aj / std::hypot(aj, x_plus);
        f.u_minus = aj / std::hypot(aj, x_minus);
    }
    f.v_plus = f.u_minus;
    f.v_minus = -f.u_plus;

    f.gamma_a = s.gamma_a;
    f.gamma_b = s.gamma_b;
    f.gamma_a_plus = s.gamma_a * f.u_plus * f.u_plus;
    f.gamma_a_minus = s.gamma_a * f.u_minus * f.u_minus;
    f.gamma_b_plus = s.gamma_b * f.u_minus * f.u_minus;
    f.gamma_b_minus = s.gamma_b * f.u_plus * f.u_plus;
    f.gamma_pp = f.gamma_a_plus + f.gamma_b_plus;
    f.gamma_mm = f.gamma_a_minus + f.gamma_b_minus;
    f.gamma_cross = (s.gamma_a - s.gamma_b) * f.u_plus * f.u_minus;
    return f;
}

LaserDetunings laser_detunings(const DressedFrame& frame, double omega_l) {
    const double minus = omega_l - frame.omega_minus;
    return {minus, minus - frame.omega_gap};
}

} // namespace qda
