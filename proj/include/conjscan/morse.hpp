#ifndef CONJSCAN_MORSE_HPP
#define CONJSCAN_MORSE_HPP

#include "conjscan/assembly.hpp"
#include "conjscan/spectral.hpp"

#include <cassert>
#include <vector>

namespace conjscan {

inline constexpr int kMaxAngularMode = 256;

/// Per-mode negative-eigenvalue counts at parameter r for nu = 0,1,2,...,
/// extended until two consecutive modes contribute nothing. The counts are
/// nonincreasing in nu for the problems in scope; MODE_OVERFLOW guards the
/// extension.
inline std::vector<int> mode_negative_counts(const RadialProblem& problem, double r,
                                             const Grid& grid) {
    Problem wrapped = problem;
    std::vector<int> counts;
    int trailing_zeros = 0;
    int min_cover = problem.modes.empty() ? 0 : problem.modes.back().nu;
    for (int nu = 0;; ++nu) {
        if (nu > kMaxAngularMode)
            throw Error(ErrorCode::mode_overflow,
                        "angular mode extension exceeded nu = " +
                            std::to_string(kMaxAngularMode));
        auto pencil = assemble_operator(wrapped, AngularMode{nu}, r, grid);
        int c = negative_count(pencil);
        if (!counts.empty()) assert(c <= counts.back() && "mode counts must be nonincreasing");
        counts.push_back(c);
        trailing_zeros = c == 0 ? trailing_zeros + 1 : 0;
        if (trailing_zeros >= 2 && nu >= min_cover) break;
    }
    return counts;
}

/// Morse index at parameter r: negative eigenvalue count of the pencil
/// (interval) or the multiplicity-weighted sum over angular modes (radial).
inline int morse_index(const Problem& problem, double r, const Grid& grid) {
    if (std::holds_alternative<Interval1DProblem>(problem)) {
        auto pencil = assemble_operator(problem, std::nullopt, r, grid);
        return negative_count(pencil);
    }
    const auto& radial = std::get<RadialProblem>(problem);
    auto counts = mode_negative_counts(radial, r, grid);
    int total = 0;
    for (size_t nu = 0; nu < counts.size(); ++nu)
        total += AngularMode{static_cast<int>(nu)}.multiplicity_weight() * counts[nu];
    return total;
}

} // namespace conjscan

#endif
