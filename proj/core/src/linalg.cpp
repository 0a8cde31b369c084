#include "trigof/linalg.hpp"

#include "trigof/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trigof::linalg {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0 || rows > max_dim || cols > max_dim) {
        throw DomainError("matrix dimensions must lie in 0..3");
    }
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> values) : Matrix(rows, cols) {
    if (static_cast<int>(values.size()) != rows * cols) throw DomainError("matrix initializer has the wrong size");
    int k = 0;
    for (double v : values) {
        (*this)(k / cols, k % cols) = v;
        ++k;
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::operator==(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if ((*this)(i, j) != other(i, j)) return false;
    return true;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DomainError("matrix product dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix sum dimension mismatch");
    Matrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

Matrix select(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
    return s;
}

Matrix symmetrize(const Matrix& a) {
    Matrix s = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = m;
            s(j, i) = m;
        }
    return s;
}

namespace {

double det(const Matrix& a) {
    switch (a.rows()) {
        case 1: return a(0, 0);
        case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        case 3:
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                   a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                   a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        default: return 1.0;
    }
}

// Inverse by the adjugate; caller checks conditioning.
Matrix adjugate_inverse(const Matrix& a) {
    const int n = a.rows();
    Matrix inv(n, n);
    const double d = det(a);
    if (n == 0) return inv;
    if (n == 1) {
        inv(0, 0) = 1.0 / d;
        return inv;
    }
    if (n == 2) {
        inv(0, 0) = a(1, 1) / d;
        inv(0, 1) = -a(0, 1) / d;
        inv(1, 0) = -a(1, 0) / d;
        inv(1, 1) = a(0, 0) / d;
        return inv;
    }
    inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
    inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
    inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
    inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
    inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
    inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
    inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
    inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
    inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
    return inv;
}

double norm1(const Matrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows(); ++i) s += std::fabs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

double equilibrated_condition(const Matrix& a) {
    const double inf = std::numeric_limits<double>::infinity();
    const int n = a.rows();
    if (n != a.cols()) throw DomainError("condition number of a non-square matrix");
    if (n == 0) return 1.0;
    Matrix e(n, n);
    std::array<double, 3> d{};
    for (int i = 0; i < n; ++i) {
        if (!(a(i, i) > 0.0) || !std::isfinite(a(i, i))) return inf;
        d[i] = 1.0 / std::sqrt(a(i, i));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e(i, j) = d[i] * a(i, j) * d[j];
    const double de = det(e);
    if (!(std::fabs(de) > 0.0) || !std::isfinite(de)) return inf;
    const double c = norm1(e) * norm1(adjugate_inverse(e));
    return std::isfinite(c) ? c : inf;
}

Matrix inverse_symmetric(const Matrix& a, double max_condition) {
    const int n = a.rows();
    if (n != a.cols()) throw DomainError("inverse of a non-square matrix");
    if (n == 0) return Matrix(0, 0);
    const double cond = equilibrated_condition(a);
    if (!(cond <= max_condition)) {
        throw SingularityError("matrix is singular or ill-conditioned (equilibrated condition " +
                                   std::to_string(cond) + ")",
                               cond);
    }
    return symmetrize(adjugate_inverse(a));
}

bool is_positive_definite(const Matrix& a) {
    const int n = a.rows();
    if (n != a.cols()) return false;
    std::array<std::array<double, 3>, 3> l{};
    for (int j = 0; j < n; ++j) {
        double s = a(j, j);
        for (int k = 0; k < j; ++k) s -= l[j][k] * l[j][k];
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        l[j][j] = std::sqrt(s);
        for (int i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (int k = 0; k < j; ++k) t -= l[i][k] * l[j][k];
            l[i][j] = t / l[j][j];
        }
    }
    return true;
}

Eigen2 eigen_symmetric_2x2(const Matrix& a) {
    if (a.rows() != 2 || a.cols() != 2) throw DomainError("eigen_symmetric_2x2 needs a 2x2 matrix");
    const double p = a(0, 0);
    const double q = a(1, 1);
    const double r = 0.5 * (a(0, 1) + a(1, 0));
    const double mean = 0.5 * (p + q);
    const double half = 0.5 * (p - q);
    const double rad = std::hypot(half, r);
    Eigen2 out{};
    out.values = {mean - rad, mean + rad};
    if (r == 0.0) {
        if (p <= q) {
            out.vectors = {{{1.0, 0.0}, {0.0, 1.0}}};
        } else {
            out.values = {q, p};
            out.vectors = {{{0.0, 1.0}, {1.0, 0.0}}};
        }
        return out;
    }
    // Rotation angle of the larger eigenvector.
    const double theta = 0.5 * std::atan2(2.0 * r, p - q);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    out.vectors[1] = {c, s};
    out.vectors[0] = {-s, c};
    return out;
}

Matrix inverse_sqrt_2x2(const Matrix& a) {
    const Eigen2 e = eigen_symmetric_2x2(a);
    if (!(e.values[0] > 0.0) || !std::isfinite(e.values[1])) {
        throw SingularityError("matrix is not positive definite", std::numeric_limits<double>::infinity());
    }
    Matrix m(2, 2);
    for (int k = 0; k < 2; ++k) {
        const double w = 1.0 / std::sqrt(e.values[k]);
        const auto& v = e.vectors[k];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) += w * v[i] * v[j];
    }
    return symmetrize(m);
}

}  // namespace trigof::linalg
