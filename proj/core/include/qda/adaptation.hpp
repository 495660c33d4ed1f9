#ifndef QDA_ADAPTATION_HPP
#define QDA_ADAPTATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "qda/analytic.hpp"
#include "qda/model.hpp"

namespace qda {

/// Work-balance identity, branch resolved:
/// [(gamma_a^+ + gamma_b^+)/gamma_b^+] p_plus + (same for -) p_minus.
/// A branch with gamma_b^(pm) = 0 contributes nothing when its
/// probability is zero too; a nonzero probability there is inconsistent.
double generalized_qda_rhs(const DressedFrame& frame, double p_plus,
                           double p_minus);

/// Deviation of w_abs from the single-ratio relation
/// [(gamma_a + gamma_b)/gamma_b] p_total.  For delta_ab = 0 this equals
/// the coherence work w_coh exactly; for delta_ab != 0 the single ratio
/// is not defined and the deviation is taken against the branch-resolved
/// rhs instead (flagged in QdaBreakdown::branch_resolved).
double standard_qda_check(const DressedFrame& frame,
                          const EnergeticsReport& report);

/// Split w_abs into the self-organization part and the coherence part,
/// {w_so, w_coh} = [(gamma_a+gamma_b)/gamma_b] {p_total, rho_pm}.
/// Defined on the delta_ab = 0 manifold only.
std::pair<double, double> work_decomposition(const DressedFrame& frame,
                                             const EnergeticsReport& report);

struct QdaBreakdown {
    double generalized_rhs = 0.0;
    double standard_rhs = 0.0;
    std::array<double, 4> four_term{}; // branch+ work, branch- work, rho, p
    double four_term_sum = 0.0;
    double deviation = 0.0;
    bool branch_resolved = false; // deviation taken against generalized rhs
    std::optional<double> w_so;
    std::optional<double> w_coh;
};

QdaBreakdown qda_breakdown(const DressedFrame& frame,
                           const EnergeticsReport& report);

struct CascadeResult {
    std::int64_t n_photons = 0;
    double p_n = 0.0;
    double w_n = 0.0;
};

/// N independent identical pulses: p_n = 1 - (1-p)^N and the summed work
/// w_n = w (1 - (1-p)^N)/p, evaluated in log1p form so N up to 1e6 and p
/// near 0 or 1 stay accurate.
CascadeResult cascade(double p_single, double w_single, std::int64_t n_photons);

/// Sequential composition for unequal pulses: each entry is the (p, w)
/// of one pulse; round k contributes only if all previous rounds failed.
CascadeResult cascade_sequence(std::span<const std::pair<double, double>> pulses);

} // namespace qda

#endif
