#pragma once
// Exact dense linear algebra over Q, plus the few polynomial-matrix routines the
// bundle code needs (inverses with constant determinant, unimodular column reduction).

#include "linfty/graded.hpp"

#include <optional>
#include <vector>

namespace linfty {

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<Q> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}
    Q& operator()(int i, int j) { return a[(size_t)i * cols + j]; }
    const Q& operator()(int i, int j) const { return a[(size_t)i * cols + j]; }

    static Matrix identity(int n);
    Matrix transpose() const;
    bool is_zero() const;
    bool operator==(const Matrix& o) const = default;
};

Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);

struct Echelon {
    Matrix r;                 // reduced row echelon form
    std::vector<int> pivots;  // pivot column per nonzero row
};
Echelon rref(Matrix m);
int rank(const Matrix& m);
// Columns form a basis of the kernel.
Matrix nullspace(const Matrix& m);
// Columns form a basis of the column space (a subset of the columns of m).
Matrix column_basis(const Matrix& m);
std::optional<Matrix> inverse(const Matrix& m);
// Some x with m x = b, if one exists.
std::optional<std::vector<Q>> solve(const Matrix& m, const std::vector<Q>& b);
// Horizontal concatenation.
Matrix hcat(const Matrix& x, const Matrix& y);

struct PMatrix {
    int rows = 0, cols = 0;
    std::vector<Poly> a;

    PMatrix() = default;
    PMatrix(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}
    Poly& operator()(int i, int j) { return a[(size_t)i * cols + j]; }
    const Poly& operator()(int i, int j) const { return a[(size_t)i * cols + j]; }

    static PMatrix identity(int n);
    static PMatrix from(const Matrix& m);
    Matrix at(const std::vector<Q>& point) const;
    bool is_constant() const;
    Matrix constant() const;
    bool operator==(const PMatrix& o) const = default;
};

PMatrix operator*(const PMatrix& x, const PMatrix& y);
PMatrix operator-(const PMatrix& x, const PMatrix& y);

// Determinant via Faddeev-LeVerrier (divisions by integers only).
Poly determinant(const PMatrix& m);
// Inverse when the determinant is a nonzero constant.
std::optional<PMatrix> inverse_const_det(const PMatrix& m);

// Column reduction of a surjective polynomial matrix A (r x c) using constant
// pivots only: returns C invertible over the polynomial ring with A C = [I_r | 0]
// after permuting columns, plus the inverse of C.  Empty when some row has no
// constant pivot left (rank not certified constant).
struct ColumnReduction {
    PMatrix C, Cinv;
};
std::optional<ColumnReduction> unimodular_column_reduction(const PMatrix& A);

// Block of an arity-1 family between two degrees, rows = target basis of degree td.
PMatrix block(const Family& f, int sd, int td);
Matrix const_block(const Family& f, int sd, int td);
// Full matrix of an arity-1 family in the global bases.
PMatrix full_matrix(const Family& f);
Family family_from_matrix(const GradedSpace& src, const GradedSpace& tgt, int degree, const PMatrix& m);

}  // namespace linfty
