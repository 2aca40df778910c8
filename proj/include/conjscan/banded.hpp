#ifndef CONJSCAN_BANDED_HPP
#define CONJSCAN_BANDED_HPP

#include "conjscan/errors.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <vector>

namespace conjscan {

/// Eigenvalue sign counts of a symmetric matrix (Sylvester's law).
struct Inertia {
    int n_neg = 0;
    int n_zero = 0;
    int n_pos = 0;
};

/// Symmetric banded matrix, lower band stored: band k holds A(i+k, i).
/// Piecewise-linear Galerkin matrices have bandwidth 1.
class SymmetricBandedMatrix {
public:
    SymmetricBandedMatrix() = default;
    SymmetricBandedMatrix(int order, int bandwidth)
        : order_(order), bandwidth_(bandwidth),
          band_(static_cast<size_t>(bandwidth + 1) * order, 0.0) {}

    int order() const { return order_; }
    int bandwidth() const { return bandwidth_; }

    double& band(int k, int i) { return band_[static_cast<size_t>(k) * order_ + i]; }
    double band(int k, int i) const { return band_[static_cast<size_t>(k) * order_ + i]; }

    double at(int i, int j) const {
        if (i < j) std::swap(i, j);
        int k = i - j;
        if (k > bandwidth_) return 0.0;
        return band(k, j);
    }

    double max_abs_diag() const {
        double m = 0.0;
        for (int i = 0; i < order_; ++i) m = std::max(m, std::fabs(band(0, i)));
        return m;
    }

    /// Max absolute row sum.
    double inf_norm() const {
        double best = 0.0;
        for (int i = 0; i < order_; ++i) {
            double s = 0.0;
            for (int j = std::max(0, i - bandwidth_); j <= std::min(order_ - 1, i + bandwidth_); ++j)
                s += std::fabs(at(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    bool all_finite() const {
        for (double v : band_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// y = A x
    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(order_, 0.0);
        for (int i = 0; i < order_; ++i) {
            double s = band(0, i) * x[i];
            for (int k = 1; k <= bandwidth_; ++k) {
                if (i + k < order_) s += band(k, i) * x[i + k];
                if (i - k >= 0) s += band(k, i - k) * x[i - k];
            }
            y[i] = s;
        }
        return y;
    }

    std::vector<double> to_dense() const {
        std::vector<double> d(static_cast<size_t>(order_) * order_, 0.0);
        for (int i = 0; i < order_; ++i)
            for (int j = 0; j < order_; ++j) d[static_cast<size_t>(i) * order_ + j] = at(i, j);
        return d;
    }

    /// A - sigma * B (orders and bandwidths must agree up to max).
    static SymmetricBandedMatrix shifted(const SymmetricBandedMatrix& a,
                                         const SymmetricBandedMatrix& b, double sigma) {
        int bw = std::max(a.bandwidth_, b.bandwidth_);
        SymmetricBandedMatrix c(a.order_, bw);
        for (int k = 0; k <= bw; ++k)
            for (int i = 0; i + k < a.order_; ++i) {
                double av = k <= a.bandwidth_ ? a.band(k, i) : 0.0;
                double bv = k <= b.bandwidth_ ? b.band(k, i) : 0.0;
                c.band(k, i) = av - sigma * bv;
            }
        return c;
    }

    /// Plain-text "i j value" triplets (lower triangle), for debugging.
    void dump_triplets(std::ostream& os) const {
        char buf[64];
        for (int j = 0; j < order_; ++j)
            for (int k = 0; k <= bandwidth_ && j + k < order_; ++k) {
                std::snprintf(buf, sizeof buf, "%d %d %.12g\n", j + k, j, band(k, j));
                os << buf;
            }
    }

private:
    int order_ = 0;
    int bandwidth_ = 0;
    std::vector<double> band_;
};

/// Unpivoted banded LDL^T pivot-sign count. Returns nullopt on breakdown
/// (exactly zero or non-finite pivot); callers retry with a perturbed shift.
inline std::optional<Inertia> ldlt_inertia(const SymmetricBandedMatrix& a) {
    const int n = a.order();
    const int bw = a.bandwidth();
    // Working copy of the active band window, column-major per column.
    std::vector<std::vector<double>> col(n);
    for (int j = 0; j < n; ++j) {
        col[j].resize(bw + 1);
        for (int k = 0; k <= bw; ++k) col[j][k] = (j + k < n) ? a.band(k, j) : 0.0;
    }
    Inertia inertia;
    for (int j = 0; j < n; ++j) {
        double d = col[j][0];
        if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
        if (d > 0.0) ++inertia.n_pos;
        else ++inertia.n_neg;
        // eliminate column j from the trailing window
        for (int r = 1; r <= bw && j + r < n; ++r) {
            double l = col[j][r] / d;
            for (int c = r; c <= bw && j + c < n; ++c)
                col[j + r][c - r] -= l * col[j][c];
        }
    }
    return inertia;
}

/// LU factorization with partial pivoting of a tridiagonal matrix, for
/// shifted solves in inverse iteration. Fill-in adds one superdiagonal.
/// Exactly singular pivots are replaced by a tiny value (the usual inverse
/// iteration safeguard) and flagged.
class TridiagonalLU {
public:
    explicit TridiagonalLU(const SymmetricBandedMatrix& a) {
        if (a.bandwidth() != 1)
            throw Error(ErrorCode::parameter_out_of_range,
                        "tridiagonal solver requires bandwidth 1");
        n_ = a.order();
        dl_.assign(n_, 0.0);
        d_.assign(n_, 0.0);
        du_.assign(n_, 0.0);
        du2_.assign(n_, 0.0);
        swap_.assign(n_, false);
        double scale = 0.0;
        for (int i = 0; i < n_; ++i) {
            d_[i] = a.band(0, i);
            scale = std::max(scale, std::fabs(d_[i]));
            if (i + 1 < n_) {
                dl_[i] = a.band(1, i);
                du_[i] = a.band(1, i);
                scale = std::max(scale, std::fabs(dl_[i]));
            }
        }
        tiny_ = std::max(scale, 1.0) * 1e-300;
        factor();
    }

    bool pivot_patched() const { return pivot_patched_; }

    void solve(std::vector<double>& x) const {
        for (int i = 0; i + 1 < n_; ++i) {
            if (swap_[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= dl_[i] * x[i]; // dl_ stores the multiplier after factor()
        }
        x[n_ - 1] /= d_[n_ - 1];
        if (n_ >= 2) {
            x[n_ - 2] = (x[n_ - 2] - du_[n_ - 2] * x[n_ - 1]) / d_[n_ - 2];
            for (int i = n_ - 3; i >= 0; --i)
                x[i] = (x[i] - du_[i] * x[i + 1] - du2_[i] * x[i + 2]) / d_[i];
        }
    }

private:
    void factor() {
        for (int i = 0; i + 1 < n_; ++i) {
            if (std::fabs(d_[i]) >= std::fabs(dl_[i])) {
                swap_[i] = false;
                if (d_[i] == 0.0) { d_[i] = tiny_; pivot_patched_ = true; }
                double m = dl_[i] / d_[i];
                dl_[i] = m;
                d_[i + 1] -= m * du_[i];
            } else {
                swap_[i] = true;
                double m = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = m;
                double old_d_next = d_[i + 1];
                d_[i + 1] = du_[i] - m * old_d_next;
                du_[i] = old_d_next;
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -m * du_[i + 1];
                }
            }
        }
        if (d_[n_ - 1] == 0.0) { d_[n_ - 1] = tiny_; pivot_patched_ = true; }
    }

    int n_ = 0;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<bool> swap_;
    double tiny_ = 1e-300;
    bool pivot_patched_ = false;
};

} // namespace conjscan

#endif
