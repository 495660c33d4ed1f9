#ifndef QDA_VERIFY_HPP
#define QDA_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qda::verify {

struct PropertyResult {
    std::string name;
    std::int64_t samples = 0;
    double max_residual = 0.0; // worst residual scaled by its tolerance units
    double tolerance = 0.0;
    bool passed = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<PropertyResult> properties;
    double elapsed_seconds = 0.0;

    bool all_passed() const {
        for (const auto& p : properties)
            if (!p.passed) return false;
        return true;
    }
};

/// Randomized closed-form identity checks: the work-balance relation, the
/// probability sum rule, the four-addend split, frame orthonormality and
/// rate sums, and cascade closed form against the explicit sum.
SuiteReport run_identity_suite(std::uint64_t seed = 12345, int n_samples = 1000);

/// Numerical-vs-analytic equivalence on the standard grid
/// (J in {0.2, 0.5, 1, 3, 5}, linewidth in {0.001, 1}, 11 detunings
/// spanning [-2, gap+2], all rates in gamma_a units).
SuiteReport run_equivalence_suite(double rel_tol = 1e-10);

/// Limit and symmetry checks: finite-linewidth convergence to the
/// monochromatic forms, mirror symmetry, the strong-coupling ratio, the
/// coherence zero and sign structure, and cascade window broadening.
SuiteReport run_limits_suite(std::uint64_t seed = 12345);

} // namespace qda::verify

#endif
