#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ibasis/numberfield.hpp"

namespace ibasis {

template <class C>
using Vec = std::vector<C>;
template <class C>
using Mat = std::vector<std::vector<C>>;

namespace detail {

// In-place reduced row echelon form with first-nonzero pivoting (kept
// deterministic for golden tests). Returns the pivot column of each pivot
// row. Zero tests over a number field may throw SplitError.
template <class C>
std::vector<int> rref(Mat<C>& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    size_t rows = m.size(), cols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t sel = rows;
        for (size_t i = row; i < rows; ++i) {
            if (!m[i][col].is_zero()) {
                sel = i;
                break;
            }
        }
        if (sel == rows) continue;
        std::swap(m[row], m[sel]);
        C inv = m[row][col].inverse();
        for (size_t j = col; j < cols; ++j) m[row][j] = inv * m[row][j];
        for (size_t i = 0; i < rows; ++i) {
            if (i == row) continue;
            C f = m[i][col];
            if (f.definitely_zero()) continue;
            for (size_t j = col; j < cols; ++j) m[i][j] = m[i][j] - f * m[row][j];
        }
        pivots.push_back(static_cast<int>(col));
        ++row;
    }
    return pivots;
}

} // namespace detail

struct NoSolution {};

/// One exact solution of A x = b (free variables set to zero), or nullopt if
/// the system is inconsistent. SplitError propagates.
template <class C>
std::optional<Vec<C>> linsolve_opt(const Mat<C>& a, const Vec<C>& b) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    if (b.size() != rows) fail(ErrKind::ShapeMismatch, "linsolve: rhs length mismatch");
    for (const auto& r : a)
        if (r.size() != cols) fail(ErrKind::ShapeMismatch, "linsolve: ragged matrix");
    Mat<C> m(rows, Vec<C>(cols + 1));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) m[i][j] = a[i][j];
        m[i][cols] = b[i];
    }
    auto pivots = detail::rref(m);
    if (!pivots.empty() && pivots.back() == static_cast<int>(cols)) return std::nullopt;
    Vec<C> x(cols);
    for (size_t k = 0; k < pivots.size(); ++k) x[static_cast<size_t>(pivots[k])] = m[k][cols];
    return x;
}

/// Variant-returning wrapper: solution, NoSolution, or the SplitEvent met
/// during elimination.
template <class C>
std::variant<Vec<C>, NoSolution, SplitEvent> linsolve(const Mat<C>& a, const Vec<C>& b) {
    try {
        auto r = linsolve_opt(a, b);
        if (!r) return NoSolution{};
        return std::move(*r);
    } catch (const SplitError& s) {
        return s.event();
    }
}

/// Basis of the right nullspace of A, echelon-normalised.
template <class C>
std::vector<Vec<C>> nullspace(Mat<C> a) {
    if (a.empty()) return {};
    size_t cols = a[0].size();
    auto pivots = detail::rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
    std::vector<Vec<C>> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        Vec<C> v(cols);
        v[fc] = C(1);
        for (size_t k = 0; k < pivots.size(); ++k) v[static_cast<size_t>(pivots[k])] = -a[k][fc];
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class C>
int rank(Mat<C> a) {
    return static_cast<int>(detail::rref(a).size());
}

/// Determinant over a field via fraction-producing elimination.
template <class C>
C det(Mat<C> m) {
    size_t n = m.size();
    for (const auto& r : m)
        if (r.size() != n) fail(ErrKind::ShapeMismatch, "det: matrix not square");
    C result(1);
    for (size_t col = 0; col < n; ++col) {
        size_t sel = n;
        for (size_t i = col; i < n; ++i) {
            if (!m[i][col].is_zero()) {
                sel = i;
                break;
            }
        }
        if (sel == n) return C(0);
        if (sel != col) {
            std::swap(m[sel], m[col]);
            result = -result;
        }
        result = result * m[col][col];
        C inv = m[col][col].inverse();
        for (size_t i = col + 1; i < n; ++i) {
            C f = m[i][col] * inv;
            if (f.definitely_zero()) continue;
            for (size_t j = col; j < n; ++j) m[i][j] = m[i][j] - f * m[col][j];
        }
    }
    return result;
}

/// Bareiss fraction-free determinant for integral-domain entries
/// (polynomial matrices).
inline QPoly det_bareiss(Mat<QPoly> m) {
    size_t n = m.size();
    for (const auto& r : m)
        if (r.size() != n) fail(ErrKind::ShapeMismatch, "det_bareiss: matrix not square");
    if (n == 0) return QPoly(1);
    QPoly prev(1);
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            size_t sel = n;
            for (size_t i = k + 1; i < n; ++i)
                if (!m[i][k].is_zero()) {
                    sel = i;
                    break;
                }
            if (sel == n) return QPoly();
            std::swap(m[k], m[sel]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev);
        prev = m[k][k];
    }
    QPoly d = m[n - 1][n - 1];
    return sign < 0 ? -d : d;
}

} // namespace ibasis
