#include "linfty/linalg.hpp"

#include <stdexcept>

namespace linfty {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Matrix::is_zero() const {
    for (auto& x : a)
        if (x != 0) return false;
    return true;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x(i, k) == 0) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
        }
    return r;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("Matrix sum: shape mismatch");
    Matrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("Matrix difference: shape mismatch");
    Matrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

Echelon rref(Matrix m) {
    Echelon e;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int piv = -1;
        for (int i = row; i < m.rows; ++i)
            if (m(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(row, j));
        Q inv = 1 / m(row, col);
        for (int j = col; j < m.cols; ++j) m(row, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == row || m(i, col) == 0) continue;
            Q f = m(i, col);
            for (int j = col; j < m.cols; ++j) m(i, j) -= f * m(row, j);
        }
        e.pivots.push_back(col);
        ++row;
    }
    e.r = std::move(m);
    return e;
}

int rank(const Matrix& m) { return (int)rref(m).pivots.size(); }

Matrix nullspace(const Matrix& m) {
    Echelon e = rref(m);
    std::vector<char> is_piv(m.cols, 0);
    for (int p : e.pivots) is_piv[p] = 1;
    int nfree = m.cols - (int)e.pivots.size();
    Matrix k(m.cols, nfree);
    int c = 0;
    for (int f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        k(f, c) = 1;
        for (size_t r = 0; r < e.pivots.size(); ++r) k(e.pivots[r], c) = -e.r((int)r, f);
        ++c;
    }
    return k;
}

Matrix column_basis(const Matrix& m) {
    Echelon e = rref(m);
    Matrix b(m.rows, (int)e.pivots.size());
    for (size_t c = 0; c < e.pivots.size(); ++c)
        for (int i = 0; i < m.rows; ++i) b(i, (int)c) = m(i, e.pivots[c]);
    return b;
}

Matrix hcat(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows && x.cols && y.cols) throw std::invalid_argument("hcat: row mismatch");
    int rows = x.cols ? x.rows : y.rows;
    Matrix r(rows, x.cols + y.cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < x.cols; ++j) r(i, j) = x(i, j);
        for (int j = 0; j < y.cols; ++j) r(i, x.cols + j) = y(i, j);
    }
    return r;
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows != m.cols) return std::nullopt;
    const int n = m.rows;
    Echelon e = rref(hcat(m, Matrix::identity(n)));
    for (int i = 0; i < n; ++i)
        if ((int)e.pivots.size() <= i || e.pivots[i] != i) return std::nullopt;
    Matrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = e.r(i, n + j);
    return inv;
}

std::optional<std::vector<Q>> solve(const Matrix& m, const std::vector<Q>& b) {
    Matrix aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = b[i];
    }
    Echelon e = rref(aug);
    std::vector<Q> x(m.cols);
    for (size_t r = 0; r < e.pivots.size(); ++r) {
        if (e.pivots[r] == m.cols) return std::nullopt;
        x[e.pivots[r]] = e.r((int)r, m.cols);
    }
    return x;
}

PMatrix PMatrix::identity(int n) {
    PMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Poly(1);
    return m;
}

PMatrix PMatrix::from(const Matrix& m) {
    PMatrix p(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) p.a[i] = Poly(m.a[i]);
    return p;
}

Matrix PMatrix::at(const std::vector<Q>& point) const {
    Matrix m(rows, cols);
    for (size_t i = 0; i < a.size(); ++i) m.a[i] = a[i].evaluate(point);
    return m;
}

bool PMatrix::is_constant() const {
    for (auto& x : a)
        if (!x.is_constant()) return false;
    return true;
}

Matrix PMatrix::constant() const {
    if (!is_constant()) throw std::invalid_argument("PMatrix::constant: entries depend on coordinates");
    Matrix m(rows, cols);
    for (size_t i = 0; i < a.size(); ++i) m.a[i] = a[i].constant_term();
    return m;
}

PMatrix operator*(const PMatrix& x, const PMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("PMatrix product: shape mismatch");
    PMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x(i, k).is_zero()) continue;
            for (int j = 0; j < y.cols; ++j)
                if (!y(k, j).is_zero()) r(i, j) += x(i, k) * y(k, j);
        }
    return r;
}

PMatrix operator-(const PMatrix& x, const PMatrix& y) {
    PMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

namespace {

// Faddeev-LeVerrier: returns (c_0, M_n) with det = (-1)^n c_0 and A M_n + c_0 I = 0.
std::pair<Poly, PMatrix> leverrier(const PMatrix& A) {
    const int n = A.rows;
    PMatrix M(n, n);
    Poly c = 1;
    for (int k = 1; k <= n; ++k) {
        PMatrix AM = A * M;
        for (int i = 0; i < n; ++i) AM(i, i) += c;
        M = AM;
        PMatrix AMk = A * M;
        Poly tr;
        for (int i = 0; i < n; ++i) tr += AMk(i, i);
        c = tr * (Q(-1) / k);
    }
    return {c, M};
}

}  // namespace

Poly determinant(const PMatrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("determinant: not square");
    if (m.rows == 0) return Poly(1);
    auto [c0, M] = leverrier(m);
    return (m.rows % 2 == 0) ? c0 : -c0;
}

std::optional<PMatrix> inverse_const_det(const PMatrix& m) {
    if (m.rows != m.cols) return std::nullopt;
    const int n = m.rows;
    if (n == 0) return PMatrix(0, 0);
    auto [c0, M] = leverrier(m);
    if (!c0.is_constant() || c0.is_zero()) return std::nullopt;
    Q s = -1 / c0.constant_term();
    PMatrix inv = M;
    for (auto& x : inv.a) x *= s;
    return inv;
}

std::optional<ColumnReduction> unimodular_column_reduction(const PMatrix& A) {
    const int r = A.rows, c = A.cols;
    PMatrix W = A;
    PMatrix C = PMatrix::identity(c), Ci = PMatrix::identity(c);
    std::vector<int> pivcol(r, -1);
    std::vector<char> used(c, 0);
    for (int i = 0; i < r; ++i) {
        int j = -1;
        for (int k = 0; k < c; ++k)
            if (!used[k] && W(i, k).is_constant() && !W(i, k).is_zero()) {
                j = k;
                break;
            }
        if (j < 0) return std::nullopt;
        used[j] = 1;
        pivcol[i] = j;
        Q inv = 1 / W(i, j).constant_term();
        // column j *= inv ; inverse: row j of Ci *= 1/inv
        for (int a = 0; a < r; ++a) W(a, j) *= inv;
        for (int a = 0; a < c; ++a) C(a, j) *= inv;
        for (int b = 0; b < c; ++b) Ci(j, b) *= 1 / inv;
        for (int k = 0; k < c; ++k) {
            if (k == j || W(i, k).is_zero()) continue;
            Poly f = W(i, k);
            // column k -= f * column j ; inverse: row j of Ci += f * row k
            for (int a = 0; a < r; ++a) W(a, k) -= f * W(a, j);
            for (int a = 0; a < c; ++a) C(a, k) -= f * C(a, j);
            for (int b = 0; b < c; ++b) Ci(j, b) += f * Ci(k, b);
        }
    }
    // Permute so pivot columns come first, in row order.
    std::vector<int> order;
    for (int i = 0; i < r; ++i) order.push_back(pivcol[i]);
    for (int k = 0; k < c; ++k)
        if (!used[k]) order.push_back(k);
    ColumnReduction out{PMatrix(c, c), PMatrix(c, c)};
    for (int a = 0; a < c; ++a)
        for (int k = 0; k < c; ++k) {
            out.C(a, k) = C(a, order[k]);
            out.Cinv(k, a) = Ci(order[k], a);
        }
    return out;
}

PMatrix block(const Family& f, int sd, int td) {
    auto sb = f.src.basis_of_degree(sd);
    auto tb = f.tgt.basis_of_degree(td);
    PMatrix m((int)tb.size(), (int)sb.size());
    for (size_t j = 0; j < sb.size(); ++j) {
        Vec v = f.eval_basis({sb[j]});
        for (size_t i = 0; i < tb.size(); ++i) {
            auto it = v.find(tb[i]);
            if (it != v.end()) m((int)i, (int)j) = it->second;
        }
    }
    return m;
}

Matrix const_block(const Family& f, int sd, int td) { return block(f, sd, td).constant(); }

PMatrix full_matrix(const Family& f) {
    PMatrix m(f.tgt.dim(), f.src.dim());
    for (int j = 0; j < f.src.dim(); ++j)
        for (auto& [i, c] : f.eval_basis({j})) m(i, j) = c;
    return m;
}

Family family_from_matrix(const GradedSpace& src, const GradedSpace& tgt, int degree, const PMatrix& m) {
    if (m.rows != tgt.dim() || m.cols != src.dim()) throw std::invalid_argument("family_from_matrix: shape mismatch");
    return linear_family(src, tgt, degree, [&](int j) {
        Vec v;
        for (int i = 0; i < m.rows; ++i)
            if (!m(i, j).is_zero()) v.emplace(i, m(i, j));
        return v;
    });
}

}  // namespace linfty
