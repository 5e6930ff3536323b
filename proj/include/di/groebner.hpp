// Groebner bases for submodules of free modules, normal forms, syzygies,
// lifts with certificates, and finitely presented modules.
//
// Syzygies and lifts both come from one device: the Groebner basis of the
// graph module {(M v, v)} under a block elimination order in which the
// ambient block dominates the witness block. Elements whose ambient block
// vanishes are syzygies; reducing (b, 0) yields a membership witness.
#pragma once

#include <di/matrix.hpp>

#include <algorithm>
#include <optional>
#include <utility>

namespace di {

class DegreeCapExceeded : public std::runtime_error {
public:
    explicit DegreeCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Safety valve for runaway Groebner runs; 0 means uncapped. The CLI wires
// this to the DI_MAX_DEGREE environment variable.
inline int& groebner_degree_cap() {
    static int cap = 0;
    return cap;
}

// Order on module terms (component, monomial). Components below `split`
// form a dominant block; within a block, term-over-position with the ring's
// monomial order, ties broken by lower component index first.
struct ModOrder {
    OrderKind mono = OrderKind::degrevlex;
    size_t split = 0;

    // strictly positive if (c1,m1) > (c2,m2)
    int compare(size_t c1, const Monomial& m1, size_t c2, const Monomial& m2) const {
        int b1 = c1 < split ? 0 : 1;
        int b2 = c2 < split ? 0 : 1;
        if (b1 != b2) return b1 < b2 ? 1 : -1;
        int c = monomial_compare(m1, m2, mono);
        if (c != 0) return c;
        if (c1 != c2) return c1 < c2 ? 1 : -1;
        return 0;
    }
};

struct ModTerm {
    size_t comp;
    Monomial mono;
    Coeff coeff;
};

// Leading term of a free-module element under `ord`. Assumes every component
// polynomial is sorted by the same monomial order as ord.mono (we always use
// the ring default order for both).
inline std::optional<ModTerm> leading_term(const FreeModuleElem& f, const ModOrder& ord) {
    std::optional<ModTerm> best;
    for (size_t c = 0; c < f.size(); ++c) {
        if (f[c].is_zero()) continue;
        const auto& t = f[c].terms().front();
        if (!best || ord.compare(c, t.first, best->comp, best->mono) > 0)
            best = ModTerm{c, t.first, t.second};
    }
    return best;
}

struct GroebnerBasis {
    RingPtr ring;
    size_t ambient_rank = 0;
    ModOrder order;
    std::vector<FreeModuleElem> gens;
    std::vector<ModTerm> leads;
    bool reduced = false;
};

namespace detail {

struct WorkElem {
    FreeModuleElem value;
    ModTerm lead;
    int sugar;
};

inline int elem_degree(const FreeModuleElem& f) {
    int d = -1;
    for (auto& p : f) d = std::max(d, p.degree());
    return d;
}

inline void check_cap(int degree) {
    int cap = groebner_degree_cap();
    if (cap > 0 && degree > cap)
        throw DegreeCapExceeded("Groebner degree cap " + std::to_string(cap) +
                                " exceeded (degree " + std::to_string(degree) + ")");
}

// Full normal form of f against basis; every term of the result is
// irreducible. Deterministic.
inline FreeModuleElem reduce_full(FreeModuleElem f,
                                  const std::vector<WorkElem>& basis,
                                  const ModOrder& ord, const RingPtr& ring) {
    FreeModuleElem result = elem_zero(ring, f.size());
    while (true) {
        auto lt = leading_term(f, ord);
        if (!lt) break;
        check_cap(total_degree(lt->mono));
        bool reduced_step = false;
        for (auto& g : basis) {
            if (g.lead.comp != lt->comp) continue;
            if (!mono_divides(g.lead.mono, lt->mono)) continue;
            Monomial q = mono_div(lt->mono, g.lead.mono);
            Coeff c = lt->coeff / g.lead.coeff;
            for (size_t i = 0; i < f.size(); ++i)
                if (!g.value[i].is_zero())
                    f[i] = f[i] - g.value[i].mono_scaled(q, c);
            reduced_step = true;
            break;
        }
        if (!reduced_step) {
            // move the irreducible leading term to the result
            Polynomial t = Polynomial::term(ring, lt->mono, lt->coeff);
            result[lt->comp] = result[lt->comp] + t;
            f[lt->comp] = f[lt->comp] - t;
        }
    }
    return result;
}

}  // namespace detail

// Buchberger with sugar selection. Pair pruning: product criterion in the
// rank-one (ideal) case only; module S-pairs are all processed.
inline GroebnerBasis groebner_basis(const std::vector<FreeModuleElem>& input,
                                    const ModOrder& ord) {
    using detail::WorkElem;
    RingPtr ring;
    size_t m = 0;
    for (auto& f : input) {
        for (auto& p : f)
            if (p.ring()) { ring = p.ring(); break; }
        if (ring) { m = f.size(); break; }
    }
    GroebnerBasis out;
    out.order = ord;
    if (!ring) return out;  // no generators
    for (auto& f : input)
        if (f.size() != m)
            throw std::invalid_argument("mixed ambient ranks in groebner_basis");
    if (ord.mono != ring->order)
        throw std::invalid_argument("module order must match the ring order");
    out.ring = ring;
    out.ambient_rank = m;

    std::vector<WorkElem> basis;
    auto add_elem = [&](FreeModuleElem f, int sugar) -> bool {
        auto lt = leading_term(f, ord);
        if (!lt) return false;
        basis.push_back(WorkElem{std::move(f), *lt, sugar});
        return true;
    };
    for (auto& f : input) add_elem(f, detail::elem_degree(f));

    struct Pair {
        size_t i, j;
        Monomial lcm;
        int sugar;
    };
    std::vector<Pair> pairs;
    auto push_pairs = [&](size_t j) {
        for (size_t i = 0; i < j; ++i) {
            if (basis[i].lead.comp != basis[j].lead.comp) continue;
            if (m == 1 && mono_coprime(basis[i].lead.mono, basis[j].lead.mono))
                continue;  // product criterion (valid for ideals)
            Monomial l = mono_lcm(basis[i].lead.mono, basis[j].lead.mono);
            int sug = std::max(
                basis[i].sugar + total_degree(l) - total_degree(basis[i].lead.mono),
                basis[j].sugar + total_degree(l) - total_degree(basis[j].lead.mono));
            pairs.push_back(Pair{i, j, std::move(l), sug});
        }
    };
    for (size_t j = 0; j < basis.size(); ++j) push_pairs(j);

    while (!pairs.empty()) {
        // sugar strategy: lowest sugar first, then smallest lcm, then indices
        size_t best = 0;
        for (size_t k = 1; k < pairs.size(); ++k) {
            auto& a = pairs[k];
            auto& b = pairs[best];
            if (a.sugar != b.sugar) {
                if (a.sugar < b.sugar) best = k;
                continue;
            }
            int c = monomial_compare(a.lcm, b.lcm, ord.mono);
            if (c != 0) {
                if (c < 0) best = k;
                continue;
            }
            if (std::tie(a.i, a.j) < std::tie(b.i, b.j)) best = k;
        }
        Pair pr = std::move(pairs[best]);
        pairs.erase(pairs.begin() + static_cast<long>(best));

        detail::check_cap(total_degree(pr.lcm));
        const auto& fi = basis[pr.i];
        const auto& fj = basis[pr.j];
        Monomial ui = mono_div(pr.lcm, fi.lead.mono);
        Monomial uj = mono_div(pr.lcm, fj.lead.mono);
        FreeModuleElem s = elem_zero(ring, m);
        Coeff ci = fi.lead.coeff.inv();
        Coeff cj = fj.lead.coeff.inv();
        for (size_t c = 0; c < m; ++c) {
            Polynomial a = fi.value[c].mono_scaled(ui, ci);
            Polynomial b = fj.value[c].mono_scaled(uj, cj);
            s[c] = a - b;
        }
        FreeModuleElem r = detail::reduce_full(std::move(s), basis, ord, ring);
        if (!elem_is_zero(r)) {
            add_elem(std::move(r), pr.sugar);
            push_pairs(basis.size() - 1);
        }
    }

    // minimalize: drop elements whose lead is divisible by another lead
    std::vector<size_t> keep;
    for (size_t i = 0; i < basis.size(); ++i) {
        bool redundant = false;
        for (size_t j = 0; j < basis.size(); ++j) {
            if (i == j) continue;
            if (basis[j].lead.comp != basis[i].lead.comp) continue;
            if (!mono_divides(basis[j].lead.mono, basis[i].lead.mono)) continue;
            if (basis[j].lead.mono == basis[i].lead.mono && j > i) continue;
            redundant = true;
            break;
        }
        if (!redundant) keep.push_back(i);
    }
    std::vector<WorkElem> minimal;
    for (size_t i : keep) minimal.push_back(std::move(basis[i]));

    // inter-reduce tails and make monic
    std::vector<WorkElem> final_basis;
    for (size_t i = 0; i < minimal.size(); ++i) {
        std::vector<WorkElem> others;
        for (size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        FreeModuleElem r =
            detail::reduce_full(minimal[i].value, others, ord, ring);
        auto lt = leading_term(r, ord);
        if (!lt) continue;
        Coeff inv = lt->coeff.inv();
        for (auto& p : r) p = p.scaled(inv);
        lt->coeff = Coeff::one(ring->characteristic);
        final_basis.push_back(WorkElem{std::move(r), *lt, 0});
    }
    std::sort(final_basis.begin(), final_basis.end(),
              [&](const WorkElem& a, const WorkElem& b) {
                  return ord.compare(a.lead.comp, a.lead.mono, b.lead.comp,
                                     b.lead.mono) > 0;
              });

    for (auto& e : final_basis) {
        out.gens.push_back(std::move(e.value));
        out.leads.push_back(e.lead);
    }
    out.reduced = true;
    return out;
}

inline FreeModuleElem normal_form(const FreeModuleElem& f, const GroebnerBasis& gb) {
    if (!gb.ring) return f;
    if (f.size() != gb.ambient_rank)
        throw std::invalid_argument("normal_form: ambient rank mismatch");
    std::vector<detail::WorkElem> basis;
    basis.reserve(gb.gens.size());
    for (size_t i = 0; i < gb.gens.size(); ++i)
        basis.push_back({gb.gens[i], gb.leads[i], 0});
    return detail::reduce_full(f, basis, gb.order, gb.ring);
}

inline Polynomial normal_form(const Polynomial& f, const GroebnerBasis& gb) {
    return normal_form(FreeModuleElem{f}, gb)[0];
}

inline bool in_submodule(const FreeModuleElem& f, const GroebnerBasis& gb) {
    return elem_is_zero(normal_form(f, gb));
}

// ---------------------------------------------------------------------------
// Lifts and syzygies via the graph module.

struct LiftResult {
    bool in_image = false;
    FreeModuleElem witness;      // c with M c = b, when in_image
    FreeModuleElem certificate;  // nonzero normal form otherwise
};

class LiftSolver {
public:
    explicit LiftSolver(const PolyMatrix& m) : m_(m) {
        RingPtr ring = m.ring();
        rows_ = m.rows();
        cols_ = m.cols();
        std::vector<FreeModuleElem> graph;
        for (size_t j = 0; j < cols_; ++j) {
            FreeModuleElem g = elem_zero(ring, rows_ + cols_);
            for (size_t i = 0; i < rows_; ++i) g[i] = m.at(i, j);
            g[rows_ + j] = Polynomial::constant(ring, 1);
            graph.push_back(std::move(g));
        }
        gb_ = groebner_basis(graph, ModOrder{ring->order, rows_});
    }

    const PolyMatrix& matrix() const { return m_; }

    LiftResult lift(const FreeModuleElem& b) const {
        if (b.size() != rows_)
            throw std::invalid_argument("lift: vector length mismatch");
        RingPtr ring = m_.ring();
        FreeModuleElem aug = elem_zero(ring, rows_ + cols_);
        for (size_t i = 0; i < rows_; ++i) aug[i] = b[i];
        FreeModuleElem nf = normal_form(aug, gb_);
        LiftResult r;
        FreeModuleElem head(nf.begin(), nf.begin() + static_cast<long>(rows_));
        if (elem_is_zero(head)) {
            r.in_image = true;
            r.witness.reserve(cols_);
            for (size_t j = 0; j < cols_; ++j) r.witness.push_back(-nf[rows_ + j]);
        } else {
            r.certificate = std::move(head);
        }
        return r;
    }

    // Generators of ker(M): graph basis elements with vanishing ambient block.
    PolyMatrix syzygies() const {
        RingPtr ring = m_.ring();
        std::vector<FreeModuleElem> cols;
        for (auto& g : gb_.gens) {
            FreeModuleElem head(g.begin(), g.begin() + static_cast<long>(rows_));
            if (!elem_is_zero(head)) continue;
            cols.emplace_back(g.begin() + static_cast<long>(rows_), g.end());
        }
        return PolyMatrix::from_columns(ring, cols_, cols);
    }

private:
    PolyMatrix m_;
    size_t rows_, cols_;
    GroebnerBasis gb_;
};

inline LiftResult lift(const FreeModuleElem& b, const PolyMatrix& m) {
    return LiftSolver(m).lift(b);
}

inline PolyMatrix syzygies(const PolyMatrix& m) { return LiftSolver(m).syzygies(); }

// ---------------------------------------------------------------------------
// Finitely presented modules.

// Cokernel presentation: m generators, relation-matrix columns are relations.
struct ModulePresentation {
    RingPtr ring;
    size_t rank = 0;
    PolyMatrix relations;  // rank rows
    std::vector<std::string> labels;
};

struct ZeroCertificate {
    bool is_zero = false;
    std::vector<FreeModuleElem> lifts;  // per generator, when zero
    size_t witness_index = 0;           // offending generator otherwise
    FreeModuleElem witness_normal_form;
};

inline ZeroCertificate module_is_zero(const ModulePresentation& p) {
    ZeroCertificate cert;
    if (p.rank == 0) {
        cert.is_zero = true;
        return cert;
    }
    LiftSolver solver(p.relations);
    for (size_t i = 0; i < p.rank; ++i) {
        LiftResult r = solver.lift(elem_unit(p.ring, p.rank, i));
        if (!r.in_image) {
            cert.is_zero = false;
            cert.witness_index = i;
            cert.witness_normal_form = std::move(r.certificate);
            return cert;
        }
        cert.lifts.push_back(std::move(r.witness));
    }
    cert.is_zero = true;
    return cert;
}

class SubquotientError : public std::runtime_error {
public:
    SubquotientError(std::string what, size_t column, FreeModuleElem cert)
        : std::runtime_error(std::move(what)), column(column),
          certificate(std::move(cert)) {}
    size_t column;
    FreeModuleElem certificate;
};

// Morphism of finitely presented modules, given on generators.
struct PresentedMorphism {
    ModulePresentation source;
    ModulePresentation target;
    PolyMatrix matrix;  // target.rank x source.rank
};

// Checks that each source relation maps into the span of target relations.
inline bool morphism_is_well_defined(const PresentedMorphism& f) {
    if (f.source.rank == 0) return true;
    PolyMatrix image = f.matrix * f.source.relations;
    LiftSolver solver(f.target.relations);
    for (size_t j = 0; j < image.cols(); ++j)
        if (!solver.lift(image.column(j)).in_image) return false;
    return true;
}

inline bool morphism_cokernel_is_zero(const PresentedMorphism& f) {
    ModulePresentation coker{f.target.ring, f.target.rank,
                             f.matrix.hcat(f.target.relations), {}};
    return module_is_zero(coker).is_zero;
}

inline bool morphism_kernel_is_zero(const PresentedMorphism& f) {
    if (f.source.rank == 0) return true;
    // kernel generators: v with (matrix v) in span of target relations
    PolyMatrix aug = f.matrix.hcat(f.target.relations);
    PolyMatrix syz = LiftSolver(aug).syzygies();
    LiftSolver src_rel(f.source.relations);
    for (size_t j = 0; j < syz.cols(); ++j) {
        FreeModuleElem head(f.source.rank, Polynomial::zero(f.source.ring));
        for (size_t i = 0; i < f.source.rank; ++i) head[i] = syz.at(i, j);
        if (elem_is_zero(head)) continue;
        if (!src_rel.lift(head).in_image) return false;
    }
    return true;
}

inline bool morphism_is_iso(const PresentedMorphism& f) {
    return morphism_is_well_defined(f) && morphism_cokernel_is_zero(f) &&
           morphism_kernel_is_zero(f);
}

// Presentation of (span kerGens)/(span imGens) on the kerGens columns.
inline ModulePresentation present_subquotient(const PolyMatrix& ker_gens,
                                              const PolyMatrix& im_gens) {
    if (im_gens.cols() > 0 && im_gens.rows() != ker_gens.rows())
        throw std::invalid_argument("present_subquotient: ambient mismatch");
    ModulePresentation pres;
    pres.ring = ker_gens.ring();
    pres.rank = ker_gens.cols();
    LiftSolver solver(ker_gens);
    std::vector<FreeModuleElem> rel_cols;
    for (size_t j = 0; j < im_gens.cols(); ++j) {
        LiftResult r = solver.lift(im_gens.column(j));
        if (!r.in_image)
            throw SubquotientError("image generator does not lie in the kernel span",
                                   j, std::move(r.certificate));
        rel_cols.push_back(std::move(r.witness));
    }
    PolyMatrix rel = PolyMatrix::from_columns(pres.ring, pres.rank, rel_cols);
    pres.relations = rel.hcat(solver.syzygies());
    return pres;
}

}  // namespace di
