#pragma once

// Sums of line bundles on projective space as graded modules: Hom bases,
// exact section solving for graded surjections, and the Euler-type
// non-split examples.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "di/exterior.hpp"
#include "di/groebner.hpp"

namespace di {

inline RingPtr graded_ring(int n, long characteristic = 0,
                           OrderKind ord = OrderKind::degrevlex) {
    if (n < 0) throw std::invalid_argument("projective dimension must be >= 0");
    std::vector<std::string> vars;
    for (int i = 0; i <= n; ++i) vars.push_back("x" + std::to_string(i));
    return make_ring(std::move(vars), characteristic, ord);
}

struct LineBundleSum {
    int proj_dim = 0;
    std::vector<long> twists;
    RingPtr ring;  // homogeneous coordinate ring, proj_dim + 1 variables

    size_t rank() const { return twists.size(); }
};

inline LineBundleSum line_bundle_sum(const RingPtr& ring, std::vector<long> twists) {
    LineBundleSum s;
    s.proj_dim = static_cast<int>(ring->arity()) - 1;
    s.twists = std::move(twists);
    s.ring = ring;
    return s;
}

struct GradedBundleMap {
    LineBundleSum source;
    LineBundleSum target;
    PolyMatrix matrix;  // entry (i, j): form of degree target_i − source_j
};

namespace detail {

inline bool homogeneous_of_degree(const Polynomial& f, long d) {
    for (auto& t : f.terms())
        if (total_degree(t.first) != d) return false;
    return true;
}

inline std::vector<Monomial> monomials_of_degree(size_t vars, long d) {
    std::vector<Monomial> out;
    if (d < 0) return out;
    Monomial m(vars, 0);
    std::function<void(size_t, long)> rec = [&](size_t v, long left) {
        if (v + 1 == vars) {
            m[v] = static_cast<int>(left);
            out.push_back(m);
            m[v] = 0;
            return;
        }
        for (long e = 0; e <= left; ++e) {
            m[v] = static_cast<int>(e);
            rec(v + 1, left - e);
        }
        m[v] = 0;
    };
    if (vars == 0) return out;
    rec(0, d);
    return out;
}

inline Polynomial graded_minor(const PolyMatrix& M, const IndexSet& rows,
                               const IndexSet& cols) {
    const RingPtr& R = M.ring();
    if (rows.empty()) return Polynomial::constant(R, 1);
    Polynomial acc = Polynomial::zero(R);
    for (size_t i = 0; i < rows.size(); ++i) {
        const Polynomial& e =
            M.at(static_cast<size_t>(rows[i]), static_cast<size_t>(cols[0]));
        if (e.is_zero()) continue;
        Polynomial sub = graded_minor(M, subset_without(rows, i),
                                      IndexSet(cols.begin() + 1, cols.end()));
        Polynomial term = e * sub;
        if (i % 2 == 1) term = -term;
        acc = acc + term;
    }
    return acc;
}

}  // namespace detail

inline GradedBundleMap make_graded_map(const LineBundleSum& source,
                                       const LineBundleSum& target,
                                       PolyMatrix matrix) {
    if (source.proj_dim != target.proj_dim || !same_ring(source.ring, target.ring))
        throw std::invalid_argument("graded map: incompatible projective spaces");
    if (matrix.rows() != target.rank() || matrix.cols() != source.rank())
        throw std::invalid_argument("graded map: matrix shape mismatch");
    for (size_t i = 0; i < matrix.rows(); ++i)
        for (size_t j = 0; j < matrix.cols(); ++j) {
            long d = target.twists[i] - source.twists[j];
            const Polynomial& e = matrix.at(i, j);
            if (e.is_zero()) continue;
            if (d < 0 || !detail::homogeneous_of_degree(e, d))
                throw std::invalid_argument(
                    "graded map: entry (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") is not homogeneous of degree " +
                    std::to_string(d));
        }
    return GradedBundleMap{source, target, std::move(matrix)};
}

// All monomial matrices spanning Hom(A, B).
inline std::vector<GradedBundleMap> graded_hom_basis(const LineBundleSum& A,
                                                     const LineBundleSum& B) {
    if (A.proj_dim != B.proj_dim || !same_ring(A.ring, B.ring))
        throw std::invalid_argument("graded hom: incompatible projective spaces");
    const RingPtr& R = A.ring;
    std::vector<GradedBundleMap> basis;
    for (size_t i = 0; i < B.rank(); ++i)
        for (size_t j = 0; j < A.rank(); ++j) {
            long d = B.twists[i] - A.twists[j];
            for (const Monomial& m : detail::monomials_of_degree(R->arity(), d)) {
                PolyMatrix mat(R, B.rank(), A.rank());
                mat.at(i, j) =
                    Polynomial::term(R, m, Coeff::from_int(R->characteristic, 1));
                basis.push_back(GradedBundleMap{A, B, std::move(mat)});
            }
        }
    return basis;
}

// Surjectivity of a graded map as a sheaf map: the maximal minors have no
// common projective zero, certified by radical membership of every
// coordinate in an extended ring with an inverting variable.
struct SurjectivityReport {
    bool surjective = false;
    std::string failing_variable;  // coordinate not in the radical, if any
};

inline SurjectivityReport graded_surjectivity(const GradedBundleMap& f) {
    const RingPtr& R = f.matrix.ring();
    size_t rows = f.matrix.rows(), cols = f.matrix.cols();
    SurjectivityReport rep;
    if (rows == 0) {
        rep.surjective = true;
        return rep;
    }
    if (cols < rows) return rep;
    ExteriorBasis rb(static_cast<int>(rows)), cb(static_cast<int>(cols));
    std::vector<Polynomial> minors;
    IndexSet all_rows;
    for (int i = 0; i < static_cast<int>(rows); ++i) all_rows.push_back(i);
    for (const IndexSet& cset : cb.degree(static_cast<int>(rows)))
        minors.push_back(detail::graded_minor(f.matrix, all_rows, cset));
    // extended ring with the inverting variable
    std::vector<std::string> vars = R->vars;
    vars.push_back("_w");
    RingPtr ext = make_ring(vars, R->characteristic, R->order);
    auto extend = [&](const Polynomial& p) {
        Polynomial out = Polynomial::zero(ext);
        for (auto& t : p.terms()) {
            Monomial m = t.first;
            m.push_back(0);
            out = out + Polynomial::term(ext, m, t.second);
        }
        return out;
    };
    for (size_t v = 0; v < R->arity(); ++v) {
        std::vector<FreeModuleElem> gens;
        for (auto& g : minors) gens.push_back({extend(g)});
        Polynomial wv = Polynomial::variable(ext, static_cast<int>(ext->arity()) - 1) *
                        Polynomial::variable(ext, static_cast<int>(v));
        gens.push_back({Polynomial::constant(ext, 1) - wv});
        GroebnerBasis gb = groebner_basis(gens, ModOrder{ext->order, 0});
        FreeModuleElem unit{Polynomial::constant(ext, 1)};
        if (!elem_is_zero(normal_form(unit, gb))) {
            rep.failing_variable = R->vars[v];
            return rep;
        }
    }
    rep.surjective = true;
    return rep;
}

// The exact field-linear system for π∘s = id on the Hom basis coefficients.
struct NonSplitCertificate {
    std::vector<std::vector<Coeff>> system;  // one row per form coefficient
    std::vector<Coeff> rhs;
    size_t unknowns = 0;
    size_t rank = 0;
    size_t solution_dim = 0;              // nullity when consistent
    bool consistent = false;
    std::vector<Coeff> inconsistency;     // row combination λ with λᵀA=0, λᵀb≠0
};

struct SectionSearch {
    SurjectivityReport surjectivity;
    bool found = false;
    GradedBundleMap section;
    NonSplitCertificate certificate;
};

namespace detail {

// Gaussian elimination with row-operation tracking: fills rank, a particular
// solution, the nullity, and an inconsistency certificate when unsolvable.
inline void solve_linear_system(NonSplitCertificate& cert, long characteristic,
                                std::vector<Coeff>& solution) {
    size_t rows = cert.system.size(), cols = cert.unknowns;
    std::vector<std::vector<Coeff>> a = cert.system;
    std::vector<Coeff> b = cert.rhs;
    // track row operations applied to the identity
    std::vector<std::vector<Coeff>> ops(rows, std::vector<Coeff>(rows));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < rows; ++j) ops[i][j] = Coeff::zero(characteristic);
        ops[i][i] = Coeff::from_int(characteristic, 1);
    }
    std::vector<long> pivot_of_col(cols, -1);
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t piv = row;
        while (piv < rows && a[piv][col].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);
        std::swap(ops[piv], ops[row]);
        Coeff inv = a[row][col].inv();
        for (size_t j = 0; j < cols; ++j) a[row][j] = a[row][j] * inv;
        b[row] = b[row] * inv;
        for (size_t j = 0; j < rows; ++j) ops[row][j] = ops[row][j] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == row || a[i][col].is_zero()) continue;
            Coeff c = a[i][col];
            for (size_t j = 0; j < cols; ++j) a[i][j] = a[i][j] - c * a[row][j];
            b[i] = b[i] - c * b[row];
            for (size_t j = 0; j < rows; ++j) ops[i][j] = ops[i][j] - c * ops[row][j];
        }
        pivot_of_col[col] = static_cast<long>(row);
        ++row;
    }
    cert.rank = row;
    for (size_t i = row; i < rows; ++i)
        if (!b[i].is_zero()) {
            cert.consistent = false;
            cert.inconsistency = ops[i];
            return;
        }
    cert.consistent = true;
    cert.solution_dim = cols - cert.rank;
    solution.assign(cols, Coeff::zero(characteristic));
    for (size_t col = 0; col < cols; ++col)
        if (pivot_of_col[col] >= 0)
            solution[col] = b[static_cast<size_t>(pivot_of_col[col])];
}

}  // namespace detail

inline SectionSearch find_graded_section(const GradedBundleMap& pi) {
    const RingPtr& R = pi.matrix.ring();
    SectionSearch out;
    out.surjectivity = graded_surjectivity(pi);
    if (!out.surjectivity.surjective) return out;

    std::vector<GradedBundleMap> basis = graded_hom_basis(pi.target, pi.source);
    size_t m = pi.target.rank();
    // products π·B_k and the identity, compared coefficientwise on every
    // monomial that occurs
    std::vector<PolyMatrix> prods;
    for (auto& bmap : basis) prods.push_back(pi.matrix * bmap.matrix);
    PolyMatrix id = PolyMatrix::identity(R, m);

    NonSplitCertificate& cert = out.certificate;
    cert.unknowns = basis.size();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            // collect the monomial support of this entry across the basis
            std::vector<Monomial> support;
            auto add_support = [&](const Polynomial& p) {
                for (auto& t : p.terms()) {
                    bool seen = false;
                    for (auto& s : support)
                        if (s == t.first) seen = true;
                    if (!seen) support.push_back(t.first);
                }
            };
            for (auto& pr : prods) add_support(pr.at(i, j));
            add_support(id.at(i, j));
            auto coeff_of = [&](const Polynomial& p, const Monomial& mono) {
                for (auto& t : p.terms())
                    if (t.first == mono) return t.second;
                return Coeff::zero(R->characteristic);
            };
            for (auto& mono : support) {
                std::vector<Coeff> arow;
                for (auto& pr : prods) arow.push_back(coeff_of(pr.at(i, j), mono));
                cert.system.push_back(std::move(arow));
                cert.rhs.push_back(coeff_of(id.at(i, j), mono));
            }
        }

    std::vector<Coeff> solution;
    detail::solve_linear_system(cert, R->characteristic, solution);
    if (!cert.consistent) return out;

    PolyMatrix smat(R, pi.source.rank(), pi.target.rank());
    for (size_t k = 0; k < basis.size(); ++k) {
        if (solution[k].is_zero()) continue;
        smat = smat + basis[k].matrix.map_entries([&](const Polynomial& p) {
            return p.scaled(solution[k]);
        });
    }
    out.section = make_graded_map(pi.target, pi.source, smat);
    // the solver's identity, rechecked as forms
    if (!((pi.matrix * out.section.matrix) == PolyMatrix::identity(R, m)))
        throw std::logic_error("graded section fails to satisfy the identity");
    out.found = true;
    return out;
}

// The canonical non-split surjection O(−1)^{n+1} → O on Pⁿ given by the
// coordinate forms.
inline GradedBundleMap euler_excess_example(int n, long characteristic = 0) {
    if (n < 1) throw std::invalid_argument("euler_excess_example: need n >= 1");
    RingPtr R = graded_ring(n, characteristic);
    LineBundleSum src = line_bundle_sum(R, std::vector<long>(static_cast<size_t>(n) + 1, -1));
    LineBundleSum tgt = line_bundle_sum(R, {0});
    PolyMatrix m(R, 1, static_cast<size_t>(n) + 1);
    for (size_t j = 0; j <= static_cast<size_t>(n); ++j)
        m.at(0, j) = Polynomial::variable(R, static_cast<int>(j));
    return make_graded_map(src, tgt, std::move(m));
}

}  // namespace di
