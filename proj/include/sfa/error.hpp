#pragma once

#include <stdexcept>
#include <string>

namespace sfa {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define SFA_ERROR(Name, tag)                                          \
    struct Name : Error {                                             \
        using Error::Error;                                           \
        const char* kind() const noexcept override { return tag; }   \
    };

SFA_ERROR(ConfigError, "config")
SFA_ERROR(CoincidentTimes, "coincident_times")
SFA_ERROR(DegenerateDenominator, "degenerate_denominator")
SFA_ERROR(NonConvergence, "non_convergence")
SFA_ERROR(SingularJacobian, "singular_jacobian")
SFA_ERROR(OrbitLost, "orbit_lost")
SFA_ERROR(BranchTracking, "branch_tracking")
SFA_ERROR(NoValidBranch, "no_valid_branch")
SFA_ERROR(VanishingCubic, "vanishing_cubic")
SFA_ERROR(AiryOverflow, "overflow")
SFA_ERROR(PairMismatch, "pair_mismatch")
SFA_ERROR(MissingPair, "missing_pair")

#undef SFA_ERROR

}  // namespace sfa
