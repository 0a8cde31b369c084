#pragma once

#include <array>
#include <initializer_list>
#include <vector>

namespace trigof::linalg {

// Dense row-major matrix of at most 3x3. Everything in the covariance
// assembly is 2xp, pxp or 2x2 with p <= 3.
class Matrix {
public:
    static constexpr int max_dim = 3;

    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::initializer_list<double> values);

    static Matrix identity(int n);
    static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    double& operator()(int i, int j) { return a_[i * max_dim + j]; }
    double operator()(int i, int j) const { return a_[i * max_dim + j]; }

    bool operator==(const Matrix& other) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::array<double, max_dim * max_dim> a_{};
};

Matrix transpose(const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

// Submatrix with the given row and column indices.
Matrix select(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols);

// (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

// 1-norm condition number of D A D with D = diag(|a_ii|^{-1/2}), i.e. after
// symmetric diagonal equilibration. Infinite when A is singular or has a
// non-positive diagonal.
double equilibrated_condition(const Matrix& a);

// Closed-form inverse of a symmetric 1x1, 2x2 or 3x3 matrix. Throws
// SingularityError when the equilibrated condition number exceeds max_condition.
Matrix inverse_symmetric(const Matrix& a, double max_condition = 1e12);

// Cholesky-based positive-definiteness test.
bool is_positive_definite(const Matrix& a);

struct Eigen2 {
    std::array<double, 2> values;                 // ascending
    std::array<std::array<double, 2>, 2> vectors;  // vectors[k] is the unit eigenvector of values[k]
};

// Eigen-decomposition of a symmetric 2x2 matrix.
Eigen2 eigen_symmetric_2x2(const Matrix& a);

// Symmetric M with M A M = I for positive definite 2x2 A.
Matrix inverse_sqrt_2x2(const Matrix& a);

}  // namespace trigof::linalg
