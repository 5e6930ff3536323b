#pragma once

// Linear intersection pairs in affine space: adapted coordinate frames,
// the excess conormal sequence with its splitting solvers, reduction of an
// inclusion X ⊂ Y to a diagonal pair, and seeded random pair generation.

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "di/complex.hpp"

namespace di {

using QRow = std::vector<mpq_class>;
using QMat = std::vector<QRow>;

// Thrown when the input equations of a cycle are linearly dependent. The
// certificate gives coefficients of a nontrivial vanishing combination.
class DegenerateInputError : public std::runtime_error {
public:
    DegenerateInputError(std::string msg, QRow cert)
        : std::runtime_error(std::move(msg)), certificate(std::move(cert)) {}
    QRow certificate;
};

namespace detail {

inline bool row_is_zero(const QRow& r) {
    for (auto& c : r)
        if (c != 0) return false;
    return true;
}

// Reduced row echelon form in place; returns pivot column per row kept.
// Rows of `m` are replaced by the echelon rows (zero rows dropped).
inline std::vector<int> rref(QMat& m, int ncols) {
    std::vector<int> pivots;
    size_t row = 0;
    for (int col = 0; col < ncols && row < m.size(); ++col) {
        size_t sel = row;
        while (sel < m.size() && m[sel][static_cast<size_t>(col)] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        mpq_class inv = 1 / m[row][static_cast<size_t>(col)];
        for (auto& c : m[row]) c *= inv;
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == row) continue;
            mpq_class f = m[i][static_cast<size_t>(col)];
            if (f == 0) continue;
            for (int j = 0; j < ncols; ++j)
                m[i][static_cast<size_t>(j)] -= f * m[row][static_cast<size_t>(j)];
        }
        pivots.push_back(col);
        ++row;
    }
    m.resize(row);
    return pivots;
}

// Nullspace basis of the matrix (rows × ncols), one basis vector per free
// column, in column order.
inline QMat nullspace(QMat m, int ncols) {
    std::vector<int> pivots = rref(m, ncols);
    std::vector<bool> is_pivot(static_cast<size_t>(ncols), false);
    for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
    QMat basis;
    for (int free = 0; free < ncols; ++free) {
        if (is_pivot[static_cast<size_t>(free)]) continue;
        QRow v(static_cast<size_t>(ncols), mpq_class(0));
        v[static_cast<size_t>(free)] = 1;
        for (size_t r = 0; r < m.size(); ++r)
            v[static_cast<size_t>(pivots[r])] = -m[r][static_cast<size_t>(free)];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline size_t q_rank(QMat m, int ncols) { return m.empty() ? 0 : rref(m, ncols).size(); }

// Scale a rational row to a primitive integer row with positive leading entry.
inline QRow primitive_row(QRow v) {
    mpz_class l(1);
    for (auto& c : v) l = [&] { mpz_class t; mpz_lcm(t.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t()); return t; }();
    mpz_class g(0);
    for (auto& c : v) {
        mpq_class scaled = c * mpq_class(l);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_num_mpz_t());
    }
    if (g == 0) return v;
    mpq_class factor(l, g);
    for (auto& c : v) { c *= factor; c.canonicalize(); }
    for (auto& c : v) {
        if (c == 0) continue;
        if (c < 0)
            for (auto& d : v) d = -d;
        break;
    }
    return v;
}

// Checks linear independence of `rows`; on failure returns a vanishing
// combination of the input rows.
inline std::optional<QRow> dependency(const QMat& rows, int ncols) {
    if (rows.empty()) return std::nullopt;
    // Augment with an identity block to track row operations.
    size_t k = rows.size();
    QMat aug = rows;
    for (size_t i = 0; i < k; ++i) {
        aug[i].resize(static_cast<size_t>(ncols) + k, mpq_class(0));
        aug[i][static_cast<size_t>(ncols) + i] = 1;
    }
    QMat work = aug;
    // Eliminate using only the first ncols columns.
    size_t row = 0;
    for (int col = 0; col < ncols && row < work.size(); ++col) {
        size_t sel = row;
        while (sel < work.size() && work[sel][static_cast<size_t>(col)] == 0) ++sel;
        if (sel == work.size()) continue;
        std::swap(work[row], work[sel]);
        mpq_class inv = 1 / work[row][static_cast<size_t>(col)];
        for (auto& c : work[row]) c *= inv;
        for (size_t i = 0; i < work.size(); ++i) {
            if (i == row) continue;
            mpq_class f = work[i][static_cast<size_t>(col)];
            if (f == 0) continue;
            for (size_t j = 0; j < work[i].size(); ++j) work[i][j] -= f * work[row][j];
        }
        ++row;
    }
    for (size_t i = row; i < work.size(); ++i) {
        bool ambient_zero = true;
        for (int j = 0; j < ncols; ++j)
            if (work[i][static_cast<size_t>(j)] != 0) ambient_zero = false;
        if (!ambient_zero) continue;
        QRow cert(work[i].begin() + ncols, work[i].end());
        return primitive_row(cert);
    }
    return std::nullopt;
}

// Extends the independent set `basis` by vectors chosen from `pool` (in
// order) until the span has dimension `target`.
inline void extend_basis(QMat& basis, const QMat& pool, int ncols, size_t target) {
    for (const QRow& cand : pool) {
        if (basis.size() >= target) return;
        QMat probe = basis;
        probe.push_back(cand);
        if (q_rank(probe, ncols) == basis.size() + 1) basis.push_back(cand);
    }
}

inline QMat standard_rows(int ncols) {
    QMat rows;
    for (int i = 0; i < ncols; ++i) {
        QRow e(static_cast<size_t>(ncols), mpq_class(0));
        e[static_cast<size_t>(i)] = 1;
        rows.push_back(std::move(e));
    }
    return rows;
}

// Basis of the intersection of the row spans of A and B.
inline QMat span_intersection(const QMat& A, const QMat& B, int ncols) {
    if (A.empty() || B.empty()) return {};
    // Combinations sum a_i A_i - sum b_j B_j = 0: nullspace of the
    // (ncols × (|A|+|B|)) coefficient matrix, read off the A-part.
    size_t da = A.size(), db = B.size();
    QMat coef(static_cast<size_t>(ncols), QRow(da + db, mpq_class(0)));
    for (size_t i = 0; i < da; ++i)
        for (int j = 0; j < ncols; ++j) coef[static_cast<size_t>(j)][i] = A[i][static_cast<size_t>(j)];
    for (size_t i = 0; i < db; ++i)
        for (int j = 0; j < ncols; ++j) coef[static_cast<size_t>(j)][da + i] = -B[i][static_cast<size_t>(j)];
    QMat null = nullspace(std::move(coef), static_cast<int>(da + db));
    QMat inter;
    for (const QRow& v : null) {
        QRow w(static_cast<size_t>(ncols), mpq_class(0));
        for (size_t i = 0; i < da; ++i)
            for (int j = 0; j < ncols; ++j)
                w[static_cast<size_t>(j)] += v[i] * A[i][static_cast<size_t>(j)];
        if (!row_is_zero(w)) inter.push_back(primitive_row(w));
    }
    // The nullspace vectors may duplicate directions; reduce to a basis.
    QMat red = inter;
    rref(red, ncols);
    QMat out;
    for (auto& r : red) out.push_back(primitive_row(r));
    return out;
}

}  // namespace detail

// A pair of linear cycles through the origin of A^n, stored together with an
// adapted frame: new coordinates grouped in blocks (x, y, t, z) of sizes
// (p, q, r, s) in which X = V(x, t) and Y = V(y, t).
struct LinearCyclePair {
    int n = 0;
    QMat equationsX, equationsY;  // original defining forms
    QMat frame;                   // rows express adapted coordinates in the old ones
    int p = 0, q = 0, r = 0, s = 0;
    RingPtr ring;  // polynomial ring in the adapted coordinates

    int codim_x_side() const { return p + r; }
    int codim_y_side() const { return q + r; }

    int x_var(int i) const { return i; }
    int y_var(int j) const { return p + j; }
    int t_var(int b) const { return p + q + b; }
    int z_var(int c) const { return p + q + r + c; }

    std::vector<Polynomial> ideal_x_side() const {
        std::vector<Polynomial> g;
        for (int i = 0; i < p; ++i) g.push_back(Polynomial::variable(ring, x_var(i)));
        for (int b = 0; b < r; ++b) g.push_back(Polynomial::variable(ring, t_var(b)));
        return g;
    }
    std::vector<Polynomial> ideal_y_side() const {
        std::vector<Polynomial> g;
        for (int j = 0; j < q; ++j) g.push_back(Polynomial::variable(ring, y_var(j)));
        for (int b = 0; b < r; ++b) g.push_back(Polynomial::variable(ring, t_var(b)));
        return g;
    }
    std::vector<Polynomial> ideal_intersection() const {
        std::vector<Polynomial> g;
        for (int i = 0; i < p; ++i) g.push_back(Polynomial::variable(ring, x_var(i)));
        for (int j = 0; j < q; ++j) g.push_back(Polynomial::variable(ring, y_var(j)));
        for (int b = 0; b < r; ++b) g.push_back(Polynomial::variable(ring, t_var(b)));
        return g;
    }

    ContextPtr context_x_side() const { return make_context(ring, ideal_x_side()); }
    ContextPtr context_y_side() const { return make_context(ring, ideal_y_side()); }
    ContextPtr context_intersection() const {
        return make_context(ring, ideal_intersection());
    }
};

namespace detail {

inline std::vector<std::string> adapted_names(int p, int q, int r, int s) {
    std::vector<std::string> names;
    for (int i = 1; i <= p; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= q; ++i) names.push_back("y" + std::to_string(i));
    for (int i = 1; i <= r; ++i) names.push_back("t" + std::to_string(i));
    for (int i = 1; i <= s; ++i) names.push_back("z" + std::to_string(i));
    return names;
}

}  // namespace detail

inline LinearCyclePair adapt_coordinates(const QMat& equationsX, const QMat& equationsY,
                                         int n, long characteristic = 0,
                                         OrderKind order = OrderKind::degrevlex) {
    for (auto* eqs : {&equationsX, &equationsY}) {
        for (auto& row : *eqs)
            if (row.size() != static_cast<size_t>(n))
                throw std::invalid_argument("equation row length does not match ambient dimension");
        if (auto cert = detail::dependency(*eqs, n))
            throw DegenerateInputError(
                eqs == &equationsX ? "dependent equations for the first cycle"
                                   : "dependent equations for the second cycle",
                *cert);
    }

    // Conormal spans at the origin and their intersection give the t-block.
    QMat t_rows = detail::span_intersection(equationsX, equationsY, n);
    int r = static_cast<int>(t_rows.size());

    QMat x_rows = t_rows;
    detail::extend_basis(x_rows, equationsX, n, equationsX.size());
    x_rows.erase(x_rows.begin(), x_rows.begin() + r);
    int p = static_cast<int>(x_rows.size());

    QMat y_rows = t_rows;
    detail::extend_basis(y_rows, equationsY, n, equationsY.size());
    y_rows.erase(y_rows.begin(), y_rows.begin() + r);
    int q = static_cast<int>(y_rows.size());

    QMat frame;
    for (auto& v : x_rows) frame.push_back(detail::primitive_row(v));
    for (auto& v : y_rows) frame.push_back(detail::primitive_row(v));
    for (auto& v : t_rows) frame.push_back(detail::primitive_row(v));
    detail::extend_basis(frame, detail::standard_rows(n), n, static_cast<size_t>(n));
    int s = n - p - q - r;
    if (static_cast<int>(frame.size()) != n)
        throw std::logic_error("adapted frame is not a basis");

    LinearCyclePair pair;
    pair.n = n;
    pair.equationsX = equationsX;
    pair.equationsY = equationsY;
    pair.frame = std::move(frame);
    pair.p = p;
    pair.q = q;
    pair.r = r;
    pair.s = s;
    pair.ring = make_ring(detail::adapted_names(p, q, r, s), characteristic, order);
    return pair;
}

// Builds an already-adapted pair directly from block sizes (identity frame).
inline LinearCyclePair coordinate_pair(int p, int q, int r, int s,
                                       long characteristic = 0,
                                       OrderKind order = OrderKind::degrevlex) {
    int n = p + q + r + s;
    LinearCyclePair pair;
    pair.n = n;
    pair.p = p;
    pair.q = q;
    pair.r = r;
    pair.s = s;
    pair.frame = detail::standard_rows(n);
    pair.ring = make_ring(detail::adapted_names(p, q, r, s), characteristic, order);
    for (int i = 0; i < p; ++i) pair.equationsX.push_back(pair.frame[static_cast<size_t>(i)]);
    for (int b = 0; b < r; ++b)
        pair.equationsX.push_back(pair.frame[static_cast<size_t>(p + q + b)]);
    for (int j = 0; j < q; ++j) pair.equationsY.push_back(pair.frame[static_cast<size_t>(p + j)]);
    for (int b = 0; b < r; ++b)
        pair.equationsY.push_back(pair.frame[static_cast<size_t>(p + q + b)]);
    return pair;
}

// The excess conormal sequence 0 → E → N̂* → N*_{T/Y} → 0 of an adapted
// pair, over functions on the intersection T. Bases: E = (dt_b), N̂* = (dx_i
// then dt_b), N*_{T/Y} = (dx_i).
struct ExcessSequence {
    RingPtr ring;
    size_t rank_excess = 0;  // r
    size_t rank_nhat = 0;    // p + r
    size_t rank_nstar = 0;   // p
    PolyMatrix alpha;        // inclusion E → N̂*
    PolyMatrix pi;           // projection N̂* → N*_{T/Y}
};

inline ExcessSequence excess_sequence(const LinearCyclePair& pair) {
    const RingPtr& R = pair.ring;
    size_t p = static_cast<size_t>(pair.p), r = static_cast<size_t>(pair.r);
    ExcessSequence ses;
    ses.ring = R;
    ses.rank_excess = r;
    ses.rank_nhat = p + r;
    ses.rank_nstar = p;
    ses.alpha = PolyMatrix(R, p + r, r);
    for (size_t b = 0; b < r; ++b) ses.alpha.at(p + b, b) = Polynomial::constant(R, 1);
    ses.pi = PolyMatrix(R, p, p + r);
    for (size_t i = 0; i < p; ++i) ses.pi.at(i, i) = Polynomial::constant(R, 1);
    return ses;
}

inline bool excess_invariants_ok(const ExcessSequence& ses) {
    if (ses.alpha.rows() != ses.rank_nhat || ses.alpha.cols() != ses.rank_excess) return false;
    if (ses.pi.rows() != ses.rank_nstar || ses.pi.cols() != ses.rank_nhat) return false;
    if (ses.rank_excess + ses.rank_nstar != ses.rank_nhat) return false;
    if (!(ses.pi * ses.alpha).is_zero()) return false;
    // Injectivity of α: its columns admit no syzygy; surjectivity of π:
    // every unit vector lifts.
    if (ses.rank_excess > 0 && LiftSolver(ses.alpha).syzygies().cols() != 0) return false;
    LiftSolver pi_solver(ses.pi);
    for (size_t i = 0; i < ses.rank_nstar; ++i)
        if (!pi_solver.lift(elem_unit(ses.ring, ses.rank_nstar, i)).in_image) return false;
    return true;
}

// A two-sided splitting of the excess sequence: section s of π and the
// retraction ρ of α it determines via ρ∘α = id, α∘ρ = id − s∘π.
struct SplittingWitness {
    bool found = false;
    PolyMatrix section;     // N*_{T/Y} → N̂*
    PolyMatrix retraction;  // N̂* → E
    size_t failing_column = 0;
};

inline SplittingWitness find_module_splitting(const ExcessSequence& ses) {
    const RingPtr& R = ses.ring;
    SplittingWitness w;
    w.section = PolyMatrix(R, ses.rank_nhat, ses.rank_nstar);
    w.retraction = PolyMatrix(R, ses.rank_excess, ses.rank_nhat);

    LiftSolver pi_solver(ses.pi);
    std::vector<FreeModuleElem> sec_cols;
    for (size_t i = 0; i < ses.rank_nstar; ++i) {
        LiftResult lr = pi_solver.lift(elem_unit(R, ses.rank_nstar, i));
        if (!lr.in_image) {
            w.failing_column = i;
            return w;
        }
        sec_cols.push_back(std::move(lr.witness));
    }
    w.section = PolyMatrix::from_columns(R, ses.rank_nhat, sec_cols);

    // id − s∘π has image inside α's image; corestrict column-by-column.
    PolyMatrix residue = PolyMatrix::identity(R, ses.rank_nhat) - w.section * ses.pi;
    LiftSolver alpha_solver(ses.alpha);
    std::vector<FreeModuleElem> ret_cols;
    for (size_t j = 0; j < ses.rank_nhat; ++j) {
        LiftResult lr = alpha_solver.lift(residue.column(j));
        if (!lr.in_image) {
            w.failing_column = j;
            return w;
        }
        ret_cols.push_back(std::move(lr.witness));
    }
    w.retraction = PolyMatrix::from_columns(R, ses.rank_excess, ret_cols);
    w.found = true;
    return w;
}

// Rewrites the inclusion X ⊂ A^m as the pair (Δ, X × X) inside A^{2m} and
// adapts coordinates. The excess rank of the result is codim(X in A^m).
inline LinearCyclePair reduction_to_diagonal(const QMat& equationsX, int m,
                                             long characteristic = 0,
                                             OrderKind order = OrderKind::degrevlex) {
    for (auto& row : equationsX)
        if (row.size() != static_cast<size_t>(m))
            throw std::invalid_argument("equation row length does not match the inner dimension");
    int n = 2 * m;
    QMat diag;
    for (int i = 0; i < m; ++i) {
        QRow v(static_cast<size_t>(n), mpq_class(0));
        v[static_cast<size_t>(i)] = 1;
        v[static_cast<size_t>(m + i)] = -1;
        diag.push_back(std::move(v));
    }
    QMat squared;
    for (auto& row : equationsX) {
        QRow u(static_cast<size_t>(n), mpq_class(0)), v(static_cast<size_t>(n), mpq_class(0));
        for (int j = 0; j < m; ++j) {
            u[static_cast<size_t>(j)] = row[static_cast<size_t>(j)];
            v[static_cast<size_t>(m + j)] = row[static_cast<size_t>(j)];
        }
        squared.push_back(std::move(u));
        squared.push_back(std::move(v));
    }
    return adapt_coordinates(diag, squared, n, characteristic, order);
}

inline LinearCyclePair random_linear_pair(uint64_t seed, int n, int max_codim,
                                          long characteristic = 0,
                                          OrderKind order = OrderKind::degrevlex) {
    if (n < 1 || max_codim < 1 || max_codim > n)
        throw std::invalid_argument("random_linear_pair: bad dimensions");
    std::mt19937_64 rng(seed);
    auto draw_eqs = [&](int codim) {
        QMat rows;
        while (static_cast<int>(rows.size()) < codim) {
            QRow v(static_cast<size_t>(n));
            for (auto& c : v)
                c = mpq_class(static_cast<long>(rng() % 7) - 3);
            QMat probe = rows;
            probe.push_back(v);
            if (detail::q_rank(probe, n) == rows.size() + 1)
                rows.push_back(detail::primitive_row(v));
        }
        return rows;
    };
    int cx = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_codim));
    int cy = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_codim));
    return adapt_coordinates(draw_eqs(cx), draw_eqs(cy), n, characteristic, order);
}

}  // namespace di
