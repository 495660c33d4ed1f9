#include "qda/adaptation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qda {

double generalized_qda_rhs(const DressedFrame& frame, double p_plus,
                           double p_minus) {
    if (p_plus < 0.0 || p_minus < 0.0)
        throw std::invalid_argument("generalized_qda_rhs: probabilities must be >= 0");
    double rhs = 0.0;
    if (frame.gamma_b_plus > 0.0) {
        rhs += (frame.gamma_a_plus + frame.gamma_b_plus) / frame.gamma_b_plus *
               p_plus;
    } else if (p_plus != 0.0) {
        throw std::domain_error(
            "generalized_qda_rhs: gamma_b^(+) = 0 with nonzero p_plus");
    }
    if (frame.gamma_b_minus > 0.0) {
        rhs += (frame.gamma_a_minus + frame.gamma_b_minus) /
               frame.gamma_b_minus * p_minus;
    } else if (p_minus != 0.0) {
        throw std::domain_error(
            "generalized_qda_rhs: gamma_b^(-) = 0 with nonzero p_minus");
    }
    return rhs;
}

double standard_qda_check(const DressedFrame& frame,
                          const EnergeticsReport& report) {
    if (frame.delta_ab == 0.0) {
        const double ratio = (frame.gamma_a + frame.gamma_b) / frame.gamma_b;
        return report.w_abs - ratio * report.p_total;
    }
    return report.w_abs - generalized_qda_rhs(frame, report.p_lambda_plus,
                                              report.p_lambda_minus);
}

std::pair<double, double> work_decomposition(const DressedFrame& frame,
                                             const EnergeticsReport& report) {
    if (frame.delta_ab != 0.0)
        throw std::domain_error(
            "work_decomposition: defined only for delta_ab = 0 (got delta_ab = " +
            std::to_string(frame.delta_ab) + ")");
    const double ratio = (frame.gamma_a + frame.gamma_b) / frame.gamma_b;
    return {ratio * report.p_total, ratio * report.rho_pm};
}

QdaBreakdown qda_breakdown(const DressedFrame& frame,
                           const EnergeticsReport& report) {
    QdaBreakdown b;
    b.generalized_rhs = generalized_qda_rhs(frame, report.p_lambda_plus,
                                            report.p_lambda_minus);

    // Four-addend form: per-branch a-rate work shares, the coherence
    // term, and the total probability.
    double t_plus = 0.0, t_minus = 0.0;
    if (frame.gamma_b_plus > 0.0)
        t_plus = frame.gamma_a_plus / frame.gamma_b_plus * report.p_lambda_plus;
    if (frame.gamma_b_minus > 0.0)
        t_minus = frame.gamma_a_minus / frame.gamma_b_minus * report.p_lambda_minus;
    b.four_term = {t_plus, t_minus, report.rho_pm, report.p_total};
    b.four_term_sum = t_plus + t_minus + report.rho_pm + report.p_total;

    if (frame.delta_ab == 0.0) {
        const double ratio = (frame.gamma_a + frame.gamma_b) / frame.gamma_b;
        b.standard_rhs = ratio * report.p_total;
        b.deviation = report.w_abs - b.standard_rhs;
        b.w_so = ratio * report.p_total;
        b.w_coh = ratio * report.rho_pm;
    } else {
        b.standard_rhs = b.generalized_rhs;
        b.deviation = report.w_abs - b.generalized_rhs;
        b.branch_resolved = true;
    }
    return b;
}

CascadeResult cascade(double p_single, double w_single, std::int64_t n_photons) {
    if (!(p_single >= 0.0 && p_single <= 1.0))
        throw std::invalid_argument("cascade: p_single must lie in [0, 1]");
    if (n_photons < 1)
        throw std::invalid_argument("cascade: n_photons must be >= 1");

    CascadeResult r;
    r.n_photons = n_photons;
    if (p_single == 0.0) {
        r.p_n = 0.0;
        r.w_n = static_cast<double>(n_photons) * w_single;
        return r;
    }
    // (1-p)^N = exp(N log1p(-p)); survived = fraction never transferred.
    const double survived =
        std::exp(static_cast<double>(n_photons) * std::log1p(-p_single));
    r.p_n = 1.0 - survived;
    r.w_n = w_single * r.p_n / p_single;
    return r;
}

CascadeResult cascade_sequence(
    std::span<const std::pair<double, double>> pulses) {
    if (pulses.empty())
        throw std::invalid_argument("cascade_sequence: at least one pulse required");
    double survived = 1.0; // probability that no previous round transferred
    double work = 0.0;
    for (const auto& [p, w] : pulses) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("cascade_sequence: p must lie in [0, 1]");
        work += survived * w;
        survived *= 1.0 - p;
    }
    CascadeResult r;
    r.n_photons = static_cast<std::int64_t>(pulses.size());
    r.p_n = 1.0 - survived;
    r.w_n = work;
    return r;
}

} // namespace qda
