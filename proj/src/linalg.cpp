#include "mismatchlab/linalg.hpp"

#include "mismatchlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mismatchlab {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> SymmetricMatrix::multiply(std::span<const double> x) const {
    require(x.size() == n_, "dimension mismatch in symmetric matrix-vector product");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = packed_.data() + i * (i + 1) / 2;
        double acc = row[i] * x[i];
        for (std::size_t j = 0; j < i; ++j) {
            acc += row[j] * x[j];
            y[j] += row[j] * x[i];
        }
        y[i] += acc;
    }
    return y;
}

double SymmetricMatrix::quadratic_form(std::span<const double> x) const {
    require(x.size() == n_, "dimension mismatch in quadratic form");
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = packed_.data() + i * (i + 1) / 2;
        double off = 0.0;
        for (std::size_t j = 0; j < i; ++j) off += row[j] * x[j];
        total += x[i] * (row[i] * x[i] + 2.0 * off);
    }
    return total;
}

double SymmetricMatrix::frobenius_norm() const {
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) total += 2.0 * (*this)(i, j) * (*this)(i, j);
        total += (*this)(i, i) * (*this)(i, i);
    }
    return std::sqrt(total);
}

Matrix SymmetricMatrix::to_dense() const {
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = (*this)(i, j);
    return m;
}

namespace {

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // off[k] couples k and k+1; off[n-1] = 0
    Matrix basis_t;           // rows are the columns of Q, with A = Q T Q^T
};

// Householder reduction working on the lower triangle of a dense copy.
Tridiagonal tridiagonalize(const SymmetricMatrix& m, bool want_basis) {
    const std::size_t n = m.size();
    Matrix a = m.to_dense();
    Tridiagonal t{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), {}};
    std::vector<double> tau(n, 0.0);
    std::vector<double> v(n, 0.0), p(n, 0.0), w(n, 0.0);

    for (std::size_t k = 0; k + 1 < n; ++k) {
        t.diag[k] = a(k, k);
        const double alpha = a(k + 1, k);
        double xnorm2 = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) xnorm2 += a(i, k) * a(i, k);
        if (xnorm2 == 0.0) {
            t.off[k] = alpha;
            continue;
        }
        const double beta = -std::copysign(std::hypot(alpha, std::sqrt(xnorm2)), alpha);
        tau[k] = (beta - alpha) / beta;
        const double scale = 1.0 / (alpha - beta);
        v[k + 1] = 1.0;
        for (std::size_t i = k + 2; i < n; ++i) {
            v[i] = a(i, k) * scale;
            a(i, k) = v[i];
        }
        t.off[k] = beta;

        // p = tau * A22 v
        std::fill(p.begin() + static_cast<std::ptrdiff_t>(k + 1), p.end(), 0.0);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double* row = &a(i, 0);
            const double vi = v[i];
            double acc = row[i] * vi;
            for (std::size_t j = k + 1; j < i; ++j) {
                acc += row[j] * v[j];
                p[j] += row[j] * vi;
            }
            p[i] += acc;
        }
        double pv = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            p[i] *= tau[k];
            pv += p[i] * v[i];
        }
        const double shift = -0.5 * tau[k] * pv;
        for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] + shift * v[i];

        // A22 -= v w^T + w v^T on the lower triangle
        for (std::size_t i = k + 1; i < n; ++i) {
            double* row = &a(i, 0);
            const double vi = v[i];
            const double wi = w[i];
            for (std::size_t j = k + 1; j <= i; ++j) row[j] -= vi * w[j] + wi * v[j];
        }
    }
    if (n > 0) t.diag[n - 1] = a(n - 1, n - 1);

    if (want_basis) {
        // Q = H_0 H_1 ... H_{n-2}, accumulated from the right so each step only
        // touches the trailing block.
        Matrix q = Matrix::identity(n);
        std::vector<double> r(n, 0.0);
        for (std::size_t kk = n >= 2 ? n - 1 : 0; kk-- > 0;) {
            if (tau[kk] == 0.0) continue;
            v[kk + 1] = 1.0;
            for (std::size_t i = kk + 2; i < n; ++i) v[i] = a(i, kk);
            std::fill(r.begin() + static_cast<std::ptrdiff_t>(kk + 1), r.end(), 0.0);
            for (std::size_t i = kk + 1; i < n; ++i) {
                const double* row = &q(i, 0);
                const double vi = v[i];
                for (std::size_t j = kk + 1; j < n; ++j) r[j] += vi * row[j];
            }
            for (std::size_t i = kk + 1; i < n; ++i) {
                double* row = &q(i, 0);
                const double f = tau[kk] * v[i];
                for (std::size_t j = kk + 1; j < n; ++j) row[j] -= f * r[j];
            }
        }
        t.basis_t = q.transposed();
    }
    return t;
}

// Implicit-shift QL on the tridiagonal (d, e), after the EISPACK tql2 routine.
// Rotations are applied to rows of `vt` when it is non-empty.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& vt) {
    const std::size_t n = d.size();
    if (n == 0) return;
    const bool vectors = !vt.empty();
    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t max_iter = 30 * n;

    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            std::size_t iter = 0;
            do {
                if (++iter > max_iter) {
                    std::ostringstream os;
                    os << "QL iteration did not converge for eigenvalue " << l << " after " << max_iter
                       << " sweeps";
                    throw EigensolverFailure(os.str());
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if (vectors) {
                        double* lo = &vt(i, 0);
                        double* hi = &vt(i + 1, 0);
                        for (std::size_t k = 0; k < n; ++k) {
                            const double t = hi[k];
                            hi[k] = s * lo[k] + c * t;
                            lo[k] = c * lo[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

void check_finite(const SymmetricMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (!std::isfinite(m(i, j))) throw InvalidParameter("matrix has non-finite entries");
}

std::vector<std::size_t> descending_order(const std::vector<double>& d) {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    return idx;
}

}  // namespace

EigenDecomposition symmetric_eig(const SymmetricMatrix& m) {
    check_finite(m);
    Tridiagonal t = tridiagonalize(m, true);
    tridiagonal_ql(t.diag, t.off, t.basis_t);

    const std::size_t n = m.size();
    const auto order = descending_order(t.diag);
    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = t.diag[order[k]];
        const auto src = t.basis_t.row(order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = src[i];
    }
    return out;
}

std::vector<double> symmetric_eigvals(const SymmetricMatrix& m) {
    check_finite(m);
    Tridiagonal t = tridiagonalize(m, false);
    Matrix none;
    tridiagonal_ql(t.diag, t.off, none);
    std::sort(t.diag.begin(), t.diag.end(), std::greater<>());
    return t.diag;
}

}  // namespace mismatchlab
