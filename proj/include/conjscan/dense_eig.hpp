#ifndef CONJSCAN_DENSE_EIG_HPP
#define CONJSCAN_DENSE_EIG_HPP

#include "conjscan/errors.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace conjscan {

/// Small dense symmetric matrix, full square storage, row-major.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), v_(static_cast<size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }

    void set_sym(int i, int j, double x) { (*this)(i, j) = x; (*this)(j, i) = x; }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    SymMatrix& add_scaled(const SymMatrix& other, double s) {
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += s * other.v_[i];
        return *this;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : v_) s += x * x;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::fabs(x));
        return m;
    }

    double symmetry_defect() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    /// q^T A q for a quadratic form evaluation.
    double quadratic(const std::vector<double>& u, const std::vector<double>& w) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
            double row = 0.0;
            for (int j = 0; j < n_; ++j) row += (*this)(i, j) * w[j];
            s += u[i] * row;
        }
        return s;
    }

private:
    int n_ = 0;
    std::vector<double> v_;
};

struct EigenDecomposition {
    int n = 0;
    std::vector<double> values;  // ascending
    std::vector<double> vectors; // row-major, column j is the eigenvector of values[j]

    double component(int vec, int row) const { return vectors[static_cast<size_t>(row) * n + vec]; }
    std::vector<double> vector(int vec) const {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = component(vec, i);
        return v;
    }
};

namespace detail {

// Householder reduction to tridiagonal form with accumulation of the
// orthogonal transformation (classic tred2).
inline void tred2(int n, std::vector<double>& z, std::vector<double>& d, std::vector<double>& e) {
    auto A = [&](int i, int j) -> double& { return z[static_cast<size_t>(i) * n + j]; };
    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    A(j, i) = A(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += A(i, k) * A(k, j);
                for (int k = 0; k <= l; ++k) A(k, j) -= g * A(k, i);
            }
        }
        d[i] = A(i, i);
        A(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) A(j, i) = A(i, j) = 0.0;
    }
}

// Implicit-shift QL on a symmetric tridiagonal, rotating the accumulated
// transformation along (classic tql2). e[0..n-2] holds the subdiagonal.
inline void tql2(int n, std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    auto Z = [&](int i, int j) -> double& { return z[static_cast<size_t>(i) * n + j]; };
    e.push_back(0.0); // sentinel so e[m] with m = n-1 is valid
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) + dd == dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw Error(ErrorCode::eigensolver_stagnation,
                                "QL iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    e[i + 1] = r = std::hypot(f, g);
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    if (!z.empty())
                        for (int k = 0; k < n; ++k) {
                            f = Z(k, i + 1);
                            Z(k, i + 1) = s * Z(k, i) + c * f;
                            Z(k, i) = c * Z(k, i) - s * f;
                        }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    e.pop_back();
}

} // namespace detail

/// Full eigendecomposition of a dense symmetric matrix, values ascending.
inline EigenDecomposition sym_eigen(const SymMatrix& a, bool with_vectors = true) {
    const int n = a.size();
    EigenDecomposition out;
    out.n = n;
    out.values.assign(n, 0.0);
    std::vector<double> e(n, 0.0);
    std::vector<double> z(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z[static_cast<size_t>(i) * n + j] = a(i, j);
    if (n == 1) {
        out.values[0] = a(0, 0);
        out.vectors.assign(1, 1.0);
        return out;
    }
    detail::tred2(n, z, out.values, e);
    // shift subdiagonal convention: tred2 fills e[1..n-1]
    for (int i = 0; i + 1 < n; ++i) e[i] = e[i + 1];
    e[n - 1] = 0.0;
    e.resize(n - 1);
    detail::tql2(n, out.values, e, z);
    // sort ascending, permuting columns with the values
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (out.values[order[j]] < out.values[order[i]]) std::swap(order[i], order[j]);
    EigenDecomposition sorted;
    sorted.n = n;
    sorted.values.resize(n);
    for (int j = 0; j < n; ++j) sorted.values[j] = out.values[order[j]];
    if (with_vectors) {
        sorted.vectors.assign(static_cast<size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                sorted.vectors[static_cast<size_t>(i) * n + j] =
                    z[static_cast<size_t>(i) * n + order[j]];
    }
    return sorted;
}

/// Smallest |eigenvalue| of a dense symmetric matrix.
inline double sym_sigma_min(const SymMatrix& a) {
    auto eig = sym_eigen(a, /*with_vectors=*/false);
    double best = std::fabs(eig.values[0]);
    for (double v : eig.values) best = std::min(best, std::fabs(v));
    return best;
}

/// Negative-eigenvalue count of a dense symmetric matrix.
inline int sym_negative_count(const SymMatrix& a) {
    auto eig = sym_eigen(a, /*with_vectors=*/false);
    int c = 0;
    for (double v : eig.values) c += v < 0.0 ? 1 : 0;
    return c;
}

} // namespace conjscan

#endif
