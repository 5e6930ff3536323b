// Polynomial matrices (maps R^cols -> R^rows on column vectors), free module
// elements, and exact linear algebra over the coefficient field.
#pragma once

#include <di/poly.hpp>

#include <functional>
#include <random>
#include <vector>

namespace di {

// Element of a free module R^m, stored as its component polynomials.
using FreeModuleElem = std::vector<Polynomial>;

inline bool elem_is_zero(const FreeModuleElem& e) {
    for (auto& p : e)
        if (!p.is_zero()) return false;
    return true;
}

inline FreeModuleElem elem_zero(const RingPtr& ring, size_t m) {
    return FreeModuleElem(m, Polynomial::zero(ring));
}

inline FreeModuleElem elem_unit(const RingPtr& ring, size_t m, size_t i) {
    FreeModuleElem e = elem_zero(ring, m);
    e[i] = Polynomial::constant(ring, 1);
    return e;
}

inline FreeModuleElem elem_add(const FreeModuleElem& a, const FreeModuleElem& b) {
    FreeModuleElem r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline FreeModuleElem elem_sub(const FreeModuleElem& a, const FreeModuleElem& b) {
    FreeModuleElem r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline FreeModuleElem elem_scaled(const FreeModuleElem& a, const Polynomial& f) {
    FreeModuleElem r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * f;
    return r;
}

class PolyMatrix {
public:
    PolyMatrix() : rows_(0), cols_(0) {}

    PolyMatrix(RingPtr ring, size_t rows, size_t cols)
        : ring_(std::move(ring)), rows_(rows), cols_(cols),
          entries_(rows * cols, Polynomial::zero(ring_)) {}

    static PolyMatrix identity(const RingPtr& ring, size_t n) {
        PolyMatrix m(ring, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = Polynomial::constant(ring, 1);
        return m;
    }

    static PolyMatrix from_columns(const RingPtr& ring, size_t rows,
                                   const std::vector<FreeModuleElem>& cols) {
        PolyMatrix m(ring, rows, cols.size());
        for (size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows)
                throw std::invalid_argument("column length mismatch");
            for (size_t i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
        }
        return m;
    }

    const RingPtr& ring() const { return ring_; }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    Polynomial& at(size_t i, size_t j) { return entries_[i * cols_ + j]; }
    const Polynomial& at(size_t i, size_t j) const { return entries_[i * cols_ + j]; }

    FreeModuleElem column(size_t j) const {
        FreeModuleElem c(rows_, Polynomial::zero(ring_));
        for (size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }

    std::vector<FreeModuleElem> columns() const {
        std::vector<FreeModuleElem> cs;
        cs.reserve(cols_);
        for (size_t j = 0; j < cols_; ++j) cs.push_back(column(j));
        return cs;
    }

    bool is_zero() const {
        for (auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

    PolyMatrix operator*(const PolyMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
        PolyMatrix r(ring_, rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < o.cols_; ++j) {
                Polynomial acc = Polynomial::zero(ring_);
                for (size_t k = 0; k < cols_; ++k)
                    if (!at(i, k).is_zero() && !o.at(k, j).is_zero())
                        acc = acc + at(i, k) * o.at(k, j);
                r.at(i, j) = acc;
            }
        return r;
    }

    FreeModuleElem apply(const FreeModuleElem& v) const {
        if (v.size() != cols_) throw std::invalid_argument("vector length mismatch");
        FreeModuleElem r(rows_, Polynomial::zero(ring_));
        for (size_t i = 0; i < rows_; ++i)
            for (size_t k = 0; k < cols_; ++k)
                if (!at(i, k).is_zero() && !v[k].is_zero())
                    r[i] = r[i] + at(i, k) * v[k];
        return r;
    }

    PolyMatrix operator+(const PolyMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shape mismatch");
        PolyMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i)
            r.entries_[i] = entries_[i] + o.entries_[i];
        return r;
    }

    PolyMatrix operator-(const PolyMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shape mismatch");
        PolyMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i)
            r.entries_[i] = entries_[i] - o.entries_[i];
        return r;
    }

    PolyMatrix negated() const {
        PolyMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = -entries_[i];
        return r;
    }

    PolyMatrix scaled(const Coeff& c) const {
        PolyMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = entries_[i].scaled(c);
        return r;
    }

    PolyMatrix map_entries(const std::function<Polynomial(const Polynomial&)>& f) const {
        PolyMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = f(entries_[i]);
        return r;
    }

    PolyMatrix hcat(const PolyMatrix& o) const {
        if (o.cols() == 0) return *this;
        if (cols_ == 0) return o;
        if (rows_ != o.rows_) throw std::invalid_argument("hcat row mismatch");
        PolyMatrix r(ring_, rows_, cols_ + o.cols_);
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
            for (size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
        }
        return r;
    }

    bool operator==(const PolyMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

private:
    RingPtr ring_;
    size_t rows_, cols_;
    std::vector<Polynomial> entries_;
};

// ---------------------------------------------------------------------------
// Exact linear algebra over the coefficient field.

// Row echelon rank of a matrix of field elements.
inline size_t field_rank(std::vector<std::vector<Coeff>> m) {
    if (m.empty() || m[0].empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pivot = rank;
        while (pivot < rows && m[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[rank], m[pivot]);
        Coeff inv = m[rank][col].inv();
        for (size_t j = col; j < cols; ++j) m[rank][j] = m[rank][j] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || m[i][col].is_zero()) continue;
            Coeff f = m[i][col];
            for (size_t j = col; j < cols; ++j)
                m[i][j] = m[i][j] - f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Solve A x = b over the field; returns false if inconsistent. On success x
// holds one solution (free variables set to 0).
inline bool field_solve(std::vector<std::vector<Coeff>> a, std::vector<Coeff> b,
                        std::vector<Coeff>& x, long characteristic) {
    size_t rows = a.size();
    size_t cols = rows == 0 ? 0 : a[0].size();
    x.assign(cols, Coeff::zero(characteristic));
    std::vector<int> pivot_col;
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pivot = rank;
        while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[rank], a[pivot]);
        std::swap(b[rank], b[pivot]);
        Coeff inv = a[rank][col].inv();
        for (size_t j = col; j < cols; ++j) a[rank][j] = a[rank][j] * inv;
        b[rank] = b[rank] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col].is_zero()) continue;
            Coeff f = a[i][col];
            for (size_t j = col; j < cols; ++j) a[i][j] = a[i][j] - f * a[rank][j];
            b[i] = b[i] - f * b[rank];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++rank;
    }
    for (size_t i = rank; i < rows; ++i)
        if (!b[i].is_zero()) return false;
    for (size_t i = 0; i < rank; ++i) x[pivot_col[i]] = b[i];
    return true;
}

// Kernel basis of A over the field (columns of the returned basis vectors).
inline std::vector<std::vector<Coeff>> field_kernel(std::vector<std::vector<Coeff>> a,
                                                    long characteristic) {
    size_t rows = a.size();
    size_t cols = rows == 0 ? 0 : a[0].size();
    std::vector<int> pivot_of_col(cols, -1);
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t pivot = rank;
        while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[rank], a[pivot]);
        Coeff inv = a[rank][col].inv();
        for (size_t j = col; j < cols; ++j) a[rank][j] = a[rank][j] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col].is_zero()) continue;
            Coeff f = a[i][col];
            for (size_t j = col; j < cols; ++j)
                a[i][j] = a[i][j] - f * a[rank][j];
        }
        pivot_of_col[col] = static_cast<int>(rank);
        ++rank;
    }
    std::vector<std::vector<Coeff>> basis;
    for (size_t free = 0; free < cols; ++free) {
        if (pivot_of_col[free] >= 0) continue;
        std::vector<Coeff> v(cols, Coeff::zero(characteristic));
        v[free] = Coeff::one(characteristic);
        for (size_t col = 0; col < cols; ++col)
            if (pivot_of_col[col] >= 0)
                v[col] = -a[pivot_of_col[col]][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Evaluate a polynomial matrix at a point and report its field rank.
inline size_t rank_at_point(const PolyMatrix& m, const std::vector<Coeff>& point) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    std::vector<std::vector<Coeff>> vals(m.rows(),
                                         std::vector<Coeff>(m.cols()));
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) vals[i][j] = m.at(i, j).eval(point);
    return field_rank(std::move(vals));
}

// Random point with prescribed variables forced to zero; deterministic in the
// seed. Used for generic-rank checks.
inline std::vector<Coeff> random_point(const RingPtr& ring,
                                       const std::vector<int>& zero_vars,
                                       uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<char> dead(ring->arity(), 0);
    for (int v : zero_vars) dead[v] = 1;
    std::vector<Coeff> pt(ring->arity(), Coeff::zero(ring->characteristic));
    long bound = ring->characteristic == 0 ? 10007 : ring->characteristic - 1;
    std::uniform_int_distribution<long> dist(1, bound);
    for (size_t i = 0; i < pt.size(); ++i)
        if (!dead[i]) pt[i] = Coeff::from_int(ring->characteristic, dist(rng));
    return pt;
}

}  // namespace di
