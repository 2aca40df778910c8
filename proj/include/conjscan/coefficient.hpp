#ifndef CONJSCAN_COEFFICIENT_HPP
#define CONJSCAN_COEFFICIENT_HPP

#include "conjscan/errors.hpp"
#include "conjscan/expression.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace conjscan {

enum class Smoothness { c0, c1, c_inf };

inline const char* to_string(Smoothness s) {
    switch (s) {
        case Smoothness::c0: return "C0";
        case Smoothness::c1: return "C1";
        case Smoothness::c_inf: return "Cinf";
    }
    return "?";
}

/// Scalar coefficient a(x) on [0,1]: either a closed-form expression or a
/// sampled table interpolated by a not-a-knot cubic spline. Immutable.
class CoefficientField {
public:
    CoefficientField() = default; // constant zero

    static CoefficientField closed_form(Expr e, Smoothness s = Smoothness::c_inf) {
        CoefficientField f;
        f.expr_ = std::move(e);
        f.is_table_ = false;
        f.smoothness_ = s;
        f.deriv_ = f.expr_.derivative_x();
        return f;
    }

    static CoefficientField closed_form(const std::string& text,
                                        Smoothness s = Smoothness::c_inf) {
        return closed_form(Expr::parse(text, /*allow_xi=*/false), s);
    }

    static CoefficientField constant(double v) { return closed_form(Expr::constant(v)); }

    /// Uniform samples on [0,1], at least 4 of them.
    static CoefficientField tabulated(std::vector<double> samples,
                                      Smoothness s = Smoothness::c1) {
        if (samples.size() < 4)
            throw Error(ErrorCode::config_error, "tabulated field needs at least 4 samples");
        for (double v : samples)
            if (!std::isfinite(v))
                throw Error(ErrorCode::coefficient_evaluation_failure,
                            "non-finite sample in tabulated field");
        CoefficientField f;
        f.is_table_ = true;
        f.smoothness_ = s;
        f.samples_ = std::move(samples);
        f.build_spline();
        return f;
    }

    double operator()(double x) const {
        if (!is_table_) return expr_.eval(x);
        return spline_eval(x, /*want_derivative=*/false);
    }

    bool differentiable() const { return smoothness_ != Smoothness::c0; }

    double derivative(double x) const {
        if (!differentiable())
            throw Error(ErrorCode::derivative_unavailable,
                        "coefficient declared C0 has no usable derivative");
        if (!is_table_) return deriv_.eval(x);
        return spline_eval(x, /*want_derivative=*/true);
    }

    bool is_tabulated() const { return is_table_; }
    Smoothness smoothness() const { return smoothness_; }

    std::string digest() const {
        if (!is_table_) return "expr:" + expr_.to_string();
        char buf[64];
        std::snprintf(buf, sizeof buf, "table:%zu:%.17g:%.17g", samples_.size(),
                      samples_.front(), samples_.back());
        return buf;
    }

private:
    void build_spline() {
        // Not-a-knot cubic spline, uniform grid. On a uniform grid the
        // end conditions decouple: m_1 and m_{n-2} equal the second
        // differences directly, leaving a strictly dominant tridiagonal
        // system for the remaining interior second derivatives.
        const int n = static_cast<int>(samples_.size());
        h_ = 1.0 / (n - 1);
        m_.assign(n, 0.0);
        const double h2 = h_ * h_;
        auto d2 = [&](int i) { return (samples_[i + 1] - 2.0 * samples_[i] + samples_[i - 1]) / h2; };
        m_[1] = d2(1);
        m_[n - 2] = d2(n - 2);
        if (n > 4) {
            const int m_count = n - 4; // unknowns m_2 .. m_{n-3}
            std::vector<double> diag(m_count, 4.0), rhs(m_count);
            for (int i = 0; i < m_count; ++i) rhs[i] = 6.0 * d2(i + 2);
            rhs[0] -= m_[1];
            rhs[m_count - 1] -= m_[n - 2];
            // Thomas algorithm with unit off-diagonals.
            for (int i = 1; i < m_count; ++i) {
                double w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            m_[m_count + 1] = rhs[m_count - 1] / diag[m_count - 1];
            for (int i = m_count - 2; i >= 0; --i)
                m_[i + 2] = (rhs[i] - m_[i + 3]) / diag[i];
        }
        m_[0] = 2.0 * m_[1] - m_[2];
        m_[n - 1] = 2.0 * m_[n - 2] - m_[n - 3];
    }

    double spline_eval(double x, bool want_derivative) const {
        const int n = static_cast<int>(samples_.size());
        double xc = std::clamp(x, 0.0, 1.0);
        int i = std::min(static_cast<int>(xc / h_), n - 2);
        double t = xc - i * h_;
        double slope = (samples_[i + 1] - samples_[i]) / h_ - h_ * (2.0 * m_[i] + m_[i + 1]) / 6.0;
        double cubic = (m_[i + 1] - m_[i]) / (6.0 * h_);
        if (want_derivative) return slope + m_[i] * t + 3.0 * cubic * t * t;
        if (t == 0.0) return samples_[i]; // nodes reproduce their samples exactly
        return samples_[i] + t * (slope + t * (0.5 * m_[i] + t * cubic));
    }

    Expr expr_;
    Expr deriv_;
    bool is_table_ = false;
    Smoothness smoothness_ = Smoothness::c_inf;
    std::vector<double> samples_;
    std::vector<double> m_; // spline second derivatives at nodes
    double h_ = 0.0;
};

} // namespace conjscan

#endif
