#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mmra/bounds.hpp"
#include "mmra/experiment.hpp"

namespace mmra {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  ///< measured values and the parameters they came from
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool all_passed() const noexcept;
    /// One "PASS|FAIL name: detail" line per check and a summary line. Holds
    /// no timing information, so equal seeds give byte-identical text.
    std::string to_text() const;
};

using Sinr1Fn = std::function<double(const CollisionScenario&, const SystemParams&)>;

/// Hooks that let tests swap in a faulty implementation and confirm the
/// suite notices.
struct ValidationHooks {
    Sinr1Fn sinr1 = [](const CollisionScenario& s, const SystemParams& p) { return mmra::sinr1(s, p); };
};

CheckResult check_moment_oracle();
CheckResult check_substitution_identity(const Sinr1Fn& explicit_sinr, std::size_t n_scenarios, std::uint64_t seed);
CheckResult check_s0_root();
CheckResult check_binomial_normalization(const ExperimentConfig& config);
CheckResult check_access_statistics(std::size_t n_slots, std::uint64_t seed);
CheckResult check_estimation_variances(std::size_t n_realizations, std::uint64_t seed);
CheckResult check_bound_ordering(const ExperimentConfig& config);
CheckResult check_simulator_cross_validation(std::size_t n_slots, std::size_t mc_samples, std::uint64_t seed);
CheckResult check_channel_hardening(std::uint64_t seed);
CheckResult check_heuristic_stationarity(const ExperimentConfig& config);

/// Runs every check at desk scale. The simulator checks always use
/// K = 50, M = 32, tau_u = 60, tau_p = 10, p_a = 0.2; the bound-ordering and
/// heuristic checks use the config's grid.
ValidationReport run_validate(const ExperimentConfig& config, const ValidationHooks& hooks = {});

}  // namespace mmra
