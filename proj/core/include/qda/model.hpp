#ifndef QDA_MODEL_HPP
#define QDA_MODEL_HPP

// Two dissipative sites a, b coupled by J, each emitting into its own
// reservoir.  Units: hbar = 1, c = 1; every frequency and rate is an
// angular frequency.  Diagonalizing the coherent part gives two dressed
// modes +/- separated by the gap sqrt((2J)^2 + (omega_a - omega_b)^2);
// all energetics downstream are expressed in that dressed basis.

namespace qda {

enum class Branch { plus, minus };

/// Bare description of the coupled pair.  Validation happens at
/// construction: rates must be positive, J and the site splitting must
/// not vanish simultaneously (the dressed basis would be undefined).
struct SiteSystem {
    double omega_a;
    double omega_b;
    double coupling_j;
    double gamma_a;
    double gamma_b;

    SiteSystem(double omega_a, double omega_b, double coupling_j,
               double gamma_a, double gamma_b);

    /// Near-equal decay rates, |gamma_a - gamma_b| / (gamma_a + gamma_b)
    /// below the threshold.  In this regime the dressed cross-damping
    /// gamma_cross is negligible and the dressed modes decay independently.
    bool qda_regime(double threshold = 0.1) const;
};

/// Dressed (delocalized) basis data.  u/v are the real, positive-u
/// eigenvector components; omega_plus >= omega_minus by construction.
struct DressedFrame {
    double omega_bar;      // (omega_a + omega_b) / 2
    double delta_ab;       // omega_a - omega_b
    double omega_gap;      // omega_plus - omega_minus
    double omega_plus;
    double omega_minus;

    double u_plus;         // site-a weight of |+>, in [0, 1]
    double u_minus;        // site-a weight of |->, in [0, 1]
    double v_plus;         // site-b weight of |+>  (=  u_minus)
    double v_minus;        // site-b weight of |->  (= -u_plus)

    double gamma_a;        // bare rates carried along for convenience
    double gamma_b;

    double gamma_a_plus;   // gamma_a * u_plus^2
    double gamma_a_minus;  // gamma_a * u_minus^2
    double gamma_b_plus;   // gamma_b * u_minus^2
    double gamma_b_minus;  // gamma_b * u_plus^2

    double gamma_pp;       // gamma_a_plus  + gamma_b_plus
    double gamma_mm;       // gamma_a_minus + gamma_b_minus
    double gamma_cross;    // (gamma_a - gamma_b) * u_plus * u_minus
};

/// Diagonalize the coherent two-site Hamiltonian.  The eigenvector
/// components are computed in a cancellation-free arrangement so the
/// frame stays accurate for |delta_ab| >> J and for J >> |delta_ab|.
/// Observables are even in the sign of J; the positive-u convention is
/// obtained via |J|.
DressedFrame diagonalize(const SiteSystem& system);

/// Laser detunings from the two dressed resonances,
/// minus = omega_l - omega_minus and plus = minus - omega_gap.
struct LaserDetunings {
    double minus;
    double plus;
};

LaserDetunings laser_detunings(const DressedFrame& frame, double omega_l);

} // namespace qda

#endif
