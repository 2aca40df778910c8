#ifndef CONJSCAN_ERRORS_HPP
#define CONJSCAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conjscan {

/// Symbolic failure modes surfaced by the library. Names are stable and
/// appear verbatim in CLI output and reports.
enum class ErrorCode {
    ellipticity_violation,
    trivial_branch_violation,
    linearization_mismatch,
    parameter_out_of_range,
    coefficient_evaluation_failure,
    derivative_unavailable,
    inertia_breakdown,
    mode_overflow,
    eigensolver_stagnation,
    no_crossing,
    kernel_suspect,
    form_disagreement,
    theorem_violation,
    m1_nonzero,
    bracket_ambiguous,
    smale_violation,
    endpoint_singular,
    degenerate_crossing,
    isolation_unverified,
    shoot_blowup,
    converse_violation,
    config_error,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::ellipticity_violation: return "ELLIPTICITY_VIOLATION";
        case ErrorCode::trivial_branch_violation: return "TRIVIAL_BRANCH_VIOLATION";
        case ErrorCode::linearization_mismatch: return "LINEARIZATION_MISMATCH";
        case ErrorCode::parameter_out_of_range: return "PARAMETER_OUT_OF_RANGE";
        case ErrorCode::coefficient_evaluation_failure: return "COEFFICIENT_EVALUATION_FAILURE";
        case ErrorCode::derivative_unavailable: return "DERIVATIVE_UNAVAILABLE";
        case ErrorCode::inertia_breakdown: return "INERTIA_BREAKDOWN";
        case ErrorCode::mode_overflow: return "MODE_OVERFLOW";
        case ErrorCode::eigensolver_stagnation: return "EIGENSOLVER_STAGNATION";
        case ErrorCode::no_crossing: return "NO_CROSSING";
        case ErrorCode::kernel_suspect: return "KERNEL_SUSPECT";
        case ErrorCode::form_disagreement: return "FORM_DISAGREEMENT";
        case ErrorCode::theorem_violation: return "THEOREM_VIOLATION";
        case ErrorCode::m1_nonzero: return "M1_NONZERO";
        case ErrorCode::bracket_ambiguous: return "BRACKET_AMBIGUOUS";
        case ErrorCode::smale_violation: return "SMALE_VIOLATION";
        case ErrorCode::endpoint_singular: return "ENDPOINT_SINGULAR";
        case ErrorCode::degenerate_crossing: return "DEGENERATE_CROSSING";
        case ErrorCode::isolation_unverified: return "ISOLATION_UNVERIFIED";
        case ErrorCode::shoot_blowup: return "SHOOT_BLOWUP";
        case ErrorCode::converse_violation: return "CONVERSE_VIOLATION";
        case ErrorCode::config_error: return "CONFIG_ERROR";
    }
    return "UNKNOWN";
}

/// Exception carrying a symbolic code plus human-readable context.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& context)
        : std::runtime_error(std::string(to_string(code)) + ": " + context), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace conjscan

#endif
