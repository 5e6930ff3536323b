// Bounded cohomological chain complexes of free modules, concentrated in
// degrees [lo, 0], their maps, cones, homology, tensor products and shifts.
//
// A complex may carry a quotient context: a list of ideal generators modulo
// which all entries are understood, so the complex lives over R/context
// while every computation runs in R through the Groebner machinery.
#pragma once

#include <di/groebner.hpp>

#include <memory>
#include <sstream>

namespace di {

// Quotient context R/ideal, with its Groebner basis computed once.
struct QuotientContext {
    RingPtr ring;
    std::vector<Polynomial> gens;
    GroebnerBasis gb;

    QuotientContext(RingPtr r, std::vector<Polynomial> g)
        : ring(std::move(r)), gens(std::move(g)) {
        std::vector<FreeModuleElem> wrapped;
        for (auto& p : gens) wrapped.push_back({p});
        gb = groebner_basis(wrapped, ModOrder{ring->order, 0});
    }
};

using ContextPtr = std::shared_ptr<const QuotientContext>;

inline ContextPtr make_context(const RingPtr& ring, std::vector<Polynomial> gens) {
    if (gens.empty()) return nullptr;
    return std::make_shared<const QuotientContext>(ring, std::move(gens));
}

inline bool same_context(const ContextPtr& a, const ContextPtr& b) {
    if (a == b) return true;
    if (!a || !b) return (!a || a->gens.empty()) && (!b || b->gens.empty());
    if (a->gens.size() != b->gens.size()) return false;
    for (size_t i = 0; i < a->gens.size(); ++i)
        if (a->gens[i] != b->gens[i]) return false;
    return true;
}

inline Polynomial context_reduce(const Polynomial& p, const ContextPtr& ctx) {
    if (!ctx) return p;
    return normal_form(p, ctx->gb);
}

inline PolyMatrix context_reduce(const PolyMatrix& m, const ContextPtr& ctx) {
    if (!ctx) return m;
    return m.map_entries([&](const Polynomial& p) { return normal_form(p, ctx->gb); });
}

class ChainComplex {
public:
    ChainComplex() = default;

    ChainComplex(RingPtr ring, int lo, std::vector<size_t> ranks,
                 std::vector<PolyMatrix> diffs, ContextPtr context = nullptr)
        : ring_(std::move(ring)), context_(std::move(context)), lo_(lo),
          ranks_(std::move(ranks)), diffs_(std::move(diffs)) {
        if (ranks_.empty()) { lo_ = 0; ranks_ = {0}; }
        if (diffs_.size() + 1 != ranks_.size())
            throw std::invalid_argument("chain complex: need one differential per adjacent pair");
    }

    // Complex with a single free module in degree `deg` (deg <= 0).
    static ChainComplex concentrated(const RingPtr& ring, int deg, size_t rank,
                                     ContextPtr context = nullptr) {
        std::vector<size_t> ranks(static_cast<size_t>(-deg) + 1, 0);
        ranks[0] = rank;
        std::vector<PolyMatrix> diffs;
        for (int d = deg; d < 0; ++d)
            diffs.emplace_back(ring, d + 1 == deg ? rank : 0, d == deg ? rank : 0);
        return ChainComplex(ring, deg, std::move(ranks), std::move(diffs),
                            std::move(context));
    }

    const RingPtr& ring() const { return ring_; }
    const ContextPtr& context() const { return context_; }
    int lo() const { return lo_; }
    int hi() const { return 0; }

    size_t rank(int d) const {
        if (d < lo_ || d > 0) return 0;
        return ranks_[static_cast<size_t>(d - lo_)];
    }

    size_t total_rank() const {
        size_t s = 0;
        for (auto r : ranks_) s += r;
        return s;
    }

    // d^deg : C^deg -> C^{deg+1}; zero matrix of the right shape when absent.
    PolyMatrix diff(int d) const {
        if (d < lo_ || d >= 0) return PolyMatrix(ring_, rank(d + 1), rank(d));
        return diffs_[static_cast<size_t>(d - lo_)];
    }

private:
    RingPtr ring_;
    ContextPtr context_;
    int lo_ = 0;
    std::vector<size_t> ranks_ = {0};
    std::vector<PolyMatrix> diffs_;
};

struct ComplexDefect {
    bool ok = true;
    int degree = 0;
    std::string what;
};

inline ComplexDefect validate_complex(const ChainComplex& c) {
    for (int d = c.lo(); d < 0; ++d) {
        const PolyMatrix m = c.diff(d);
        if (m.rows() != c.rank(d + 1) || m.cols() != c.rank(d))
            return {false, d, "differential shape mismatch at degree " + std::to_string(d)};
    }
    for (int d = c.lo(); d < -1; ++d) {
        PolyMatrix sq = context_reduce(c.diff(d + 1) * c.diff(d), c.context());
        if (!sq.is_zero())
            return {false, d, "d^2 != 0 starting at degree " + std::to_string(d)};
    }
    return {};
}

struct ChainMap {
    ChainComplex source;
    ChainComplex target;
    // components[d - source.lo]: rank_target(d) x rank_source(d)
    std::vector<PolyMatrix> components;

    PolyMatrix component(int d) const {
        if (d < source.lo() || d > 0 ||
            static_cast<size_t>(d - source.lo()) >= components.size())
            return PolyMatrix(target.ring(), target.rank(d), source.rank(d));
        return components[static_cast<size_t>(d - source.lo())];
    }
};

inline ChainMap identity_map(const ChainComplex& c) {
    ChainMap f{c, c, {}};
    for (int d = c.lo(); d <= 0; ++d)
        f.components.push_back(PolyMatrix::identity(c.ring(), c.rank(d)));
    return f;
}

// Verifies f d_src = d_tgt f degreewise, modulo the target context.
inline ComplexDefect validate_chain_map(const ChainMap& f) {
    const ContextPtr& ctx = f.target.context();
    int lo = std::min(f.source.lo(), f.target.lo());
    for (int d = lo; d < 0; ++d) {
        PolyMatrix lhs = f.component(d + 1) * f.source.diff(d);
        PolyMatrix rhs = f.target.diff(d) * f.component(d);
        if (!context_reduce(lhs - rhs, ctx).is_zero())
            return {false, d, "chain-map law fails from degree " + std::to_string(d)};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Homology.

struct HomologyModule {
    int degree = 0;
    ModulePresentation pres;
    PolyMatrix cycle_basis;    // generator representatives as cycles in C^degree
    PolyMatrix boundary_gens;  // boundaries plus context columns in C^degree
    std::shared_ptr<LiftSolver> coord_solver;  // graph of [cycle_basis | boundary_gens]

    // Coordinates of a cycle's class on the presentation generators.
    FreeModuleElem class_coords(const FreeModuleElem& cycle) const {
        if (pres.rank == 0) return {};
        LiftResult r = coord_solver->lift(cycle);
        if (!r.in_image)
            throw std::runtime_error("class_coords: element is not a cycle in span");
        FreeModuleElem coords(r.witness.begin(),
                              r.witness.begin() + static_cast<long>(pres.rank));
        return coords;
    }
};

namespace detail {

// Columns g*e_i for every context generator g and ambient index i.
inline PolyMatrix context_columns(const RingPtr& ring, const ContextPtr& ctx,
                                  size_t ambient) {
    if (!ctx || ambient == 0) return PolyMatrix(ring, ambient, 0);
    PolyMatrix m(ring, ambient, ctx->gens.size() * ambient);
    size_t j = 0;
    for (auto& g : ctx->gens)
        for (size_t i = 0; i < ambient; ++i) m.at(i, j++) = g;
    return m;
}

}  // namespace detail

inline HomologyModule homology(const ChainComplex& c, int degree) {
    if (degree > 0)
        throw std::invalid_argument("homology degree out of range");
    const RingPtr& ring = c.ring();
    const ContextPtr& ctx = c.context();
    size_t m = c.rank(degree);

    HomologyModule h;
    h.degree = degree;
    if (m == 0) {
        h.pres = ModulePresentation{ring, 0, PolyMatrix(ring, 0, 0), {}};
        h.cycle_basis = PolyMatrix(ring, 0, 0);
        h.boundary_gens = PolyMatrix(ring, 0, 0);
        h.coord_solver = std::make_shared<LiftSolver>(PolyMatrix(ring, 0, 0));
        return h;
    }

    // kernel generators modulo the context
    PolyMatrix d_out = c.diff(degree);
    PolyMatrix kernel;
    if (d_out.rows() == 0) {
        kernel = PolyMatrix::identity(ring, m);
    } else {
        PolyMatrix aug = d_out.hcat(detail::context_columns(ring, ctx, d_out.rows()));
        PolyMatrix syz = LiftSolver(aug).syzygies();
        std::vector<FreeModuleElem> cols;
        for (size_t j = 0; j < syz.cols(); ++j) {
            FreeModuleElem v(m, Polynomial::zero(ring));
            for (size_t i = 0; i < m; ++i) v[i] = syz.at(i, j);
            if (!elem_is_zero(v)) cols.push_back(std::move(v));
        }
        kernel = PolyMatrix::from_columns(ring, m, cols);
    }

    PolyMatrix boundaries =
        c.diff(degree - 1).hcat(detail::context_columns(ring, ctx, m));

    h.pres = present_subquotient(kernel, boundaries);
    h.cycle_basis = kernel;
    h.boundary_gens = boundaries;
    h.coord_solver = std::make_shared<LiftSolver>(kernel.hcat(boundaries));
    return h;
}

// Generic rank of a homology presentation: dimension of the specialized
// cokernel at random points with `zero_vars` forced to 0, minimized over a
// few samples (the relation matrix can only drop rank at special points).
inline size_t generic_rank(const ModulePresentation& p,
                           const std::vector<int>& zero_vars, uint64_t seed = 12345,
                           int samples = 4) {
    if (p.rank == 0) return 0;
    if (p.relations.cols() == 0) return p.rank;
    size_t best = p.rank;
    for (int s = 0; s < samples; ++s) {
        auto pt = random_point(p.ring, zero_vars, seed + static_cast<uint64_t>(s));
        size_t r = rank_at_point(p.relations, pt);
        best = std::min(best, p.rank - r);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Cones, quasi-isomorphisms.

inline ChainComplex mapping_cone(const ChainMap& f) {
    if (!same_ring(f.source.ring(), f.target.ring()))
        throw std::invalid_argument("mapping_cone: ring mismatch");
    if (!same_context(f.source.context(), f.target.context()))
        throw std::invalid_argument("mapping_cone: quotient context mismatch");
    const RingPtr& ring = f.source.ring();
    int lo = std::min(f.source.lo() - 1, f.target.lo());
    std::vector<size_t> ranks;
    for (int d = lo; d <= 0; ++d)
        ranks.push_back(f.source.rank(d + 1) + f.target.rank(d));
    std::vector<PolyMatrix> diffs;
    for (int d = lo; d < 0; ++d) {
        size_t sr1 = f.source.rank(d + 1), tr = f.target.rank(d);
        size_t sr2 = f.source.rank(d + 2), tr1 = f.target.rank(d + 1);
        PolyMatrix m(ring, sr2 + tr1, sr1 + tr);
        PolyMatrix ds = f.source.diff(d + 1);
        PolyMatrix dt = f.target.diff(d);
        PolyMatrix fc = f.component(d + 1);
        for (size_t i = 0; i < sr2; ++i)
            for (size_t j = 0; j < sr1; ++j) m.at(i, j) = -ds.at(i, j);
        for (size_t i = 0; i < tr1; ++i) {
            for (size_t j = 0; j < sr1; ++j) m.at(sr2 + i, j) = fc.at(i, j);
            for (size_t j = 0; j < tr; ++j) m.at(sr2 + i, sr1 + j) = dt.at(i, j);
        }
        diffs.push_back(std::move(m));
    }
    return ChainComplex(ring, lo, std::move(ranks), std::move(diffs),
                        f.source.context());
}

struct DegreeVerdict {
    int degree = 0;
    bool ok = true;
    std::string note;
};

struct QuasiIsoReport {
    bool ok = true;
    std::vector<DegreeVerdict> degrees;
};

// Induced map on homology in one degree, as a presented-module morphism.
inline PresentedMorphism induced_on_homology(const ChainMap& f,
                                             const HomologyModule& hs,
                                             const HomologyModule& ht) {
    const RingPtr& ring = f.target.ring();
    PolyMatrix comp = f.component(hs.degree);
    PolyMatrix mat(ring, ht.pres.rank, hs.pres.rank);
    for (size_t j = 0; j < hs.pres.rank; ++j) {
        FreeModuleElem img = comp.apply(hs.cycle_basis.column(j));
        img = context_reduce(PolyMatrix::from_columns(ring, img.size(), {img}),
                             f.target.context())
                  .column(0);
        FreeModuleElem coords = ht.class_coords(img);
        for (size_t i = 0; i < ht.pres.rank; ++i) mat.at(i, j) = coords[i];
    }
    return PresentedMorphism{hs.pres, ht.pres, std::move(mat)};
}

// Quasi-isomorphism test. For same-context maps, the operational definition:
// the mapping cone is acyclic, each degree certified by module_is_zero. When
// the target lives over a finer quotient (its context contains the source's),
// falls back to degreewise isomorphism of induced homology maps.
inline QuasiIsoReport is_quasi_iso(const ChainMap& f) {
    QuasiIsoReport rep;
    if (same_context(f.source.context(), f.target.context())) {
        ChainComplex cone = mapping_cone(f);
        for (int d = cone.lo(); d <= 0; ++d) {
            HomologyModule h = homology(cone, d);
            ZeroCertificate z = module_is_zero(h.pres);
            DegreeVerdict v{d, z.is_zero, ""};
            if (!z.is_zero)
                v.note = "nonzero cone homology class at generator " +
                         std::to_string(z.witness_index);
            rep.degrees.push_back(v);
            rep.ok = rep.ok && z.is_zero;
        }
        return rep;
    }
    int lo = std::min(f.source.lo(), f.target.lo());
    for (int d = lo; d <= 0; ++d) {
        HomologyModule hs = homology(f.source, d);
        HomologyModule ht = homology(f.target, d);
        PresentedMorphism m = induced_on_homology(f, hs, ht);
        bool ok = morphism_is_iso(m);
        rep.degrees.push_back(
            {d, ok, ok ? "" : "induced homology map not an isomorphism"});
        rep.ok = rep.ok && ok;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Tensor products and shifts.

namespace detail {

struct TensorLayout {
    // for each total degree, the list of (i, j, offset) blocks, i + j = n
    std::vector<std::vector<std::array<int, 2>>> blocks;
    int lo;

    static TensorLayout build(const ChainComplex& c, const ChainComplex& d) {
        TensorLayout l;
        l.lo = c.lo() + d.lo();
        l.blocks.resize(static_cast<size_t>(-l.lo) + 1);
        for (int n = l.lo; n <= 0; ++n)
            for (int i = c.lo(); i <= 0; ++i) {
                int j = n - i;
                if (j < d.lo() || j > 0) continue;
                if (c.rank(i) == 0 || d.rank(j) == 0) continue;
                l.blocks[static_cast<size_t>(n - l.lo)].push_back({i, j});
            }
        return l;
    }

    size_t rank(const ChainComplex& c, const ChainComplex& d, int n) const {
        size_t r = 0;
        for (auto& b : blocks[static_cast<size_t>(n - lo)])
            r += c.rank(b[0]) * d.rank(b[1]);
        return r;
    }

    // offset of block (i, j) within total degree n = i + j
    size_t offset(const ChainComplex& c, const ChainComplex& d, int i, int j) const {
        size_t off = 0;
        for (auto& b : blocks[static_cast<size_t>(i + j - lo)]) {
            if (b[0] == i && b[1] == j) return off;
            off += c.rank(b[0]) * d.rank(b[1]);
        }
        throw std::logic_error("tensor block not found");
    }
};

}  // namespace detail

// Total complex of the double complex, with Koszul signs:
// d(a (x) b) = da (x) b + (-1)^i a (x) db.
inline ChainComplex tensor_complexes(const ChainComplex& c, const ChainComplex& d) {
    if (!same_ring(c.ring(), d.ring()))
        throw std::invalid_argument("tensor_complexes: ring mismatch");
    const RingPtr& ring = c.ring();
    ContextPtr ctx;
    if (same_context(c.context(), d.context())) ctx = c.context();
    else if (!c.context()) ctx = d.context();
    else if (!d.context()) ctx = c.context();
    else {
        std::vector<Polynomial> gens = c.context()->gens;
        for (auto& g : d.context()->gens) gens.push_back(g);
        ctx = make_context(ring, std::move(gens));
    }

    auto layout = detail::TensorLayout::build(c, d);
    std::vector<size_t> ranks;
    for (int n = layout.lo; n <= 0; ++n) ranks.push_back(layout.rank(c, d, n));
    std::vector<PolyMatrix> diffs;
    for (int n = layout.lo; n < 0; ++n) {
        PolyMatrix m(ring, layout.rank(c, d, n + 1), layout.rank(c, d, n));
        for (auto& b : layout.blocks[static_cast<size_t>(n - layout.lo)]) {
            int i = b[0], j = b[1];
            size_t src_off = layout.offset(c, d, i, j);
            size_t rci = c.rank(i), rdj = d.rank(j);
            // dC (x) id into block (i+1, j)
            if (i + 1 <= 0 && c.rank(i + 1) > 0 && rdj > 0) {
                size_t tgt_off = layout.offset(c, d, i + 1, j);
                PolyMatrix dc = c.diff(i);
                for (size_t r = 0; r < dc.rows(); ++r)
                    for (size_t cc = 0; cc < dc.cols(); ++cc) {
                        if (dc.at(r, cc).is_zero()) continue;
                        for (size_t k = 0; k < rdj; ++k)
                            m.at(tgt_off + r * rdj + k, src_off + cc * rdj + k) =
                                dc.at(r, cc);
                    }
            }
            // (-1)^i id (x) dD into block (i, j+1)
            if (j + 1 <= 0 && d.rank(j + 1) > 0 && rci > 0) {
                size_t tgt_off = layout.offset(c, d, i, j + 1);
                PolyMatrix dd = d.diff(j);
                Coeff sign = Coeff::from_int(ring->characteristic, i % 2 == 0 ? 1 : -1);
                for (size_t r = 0; r < dd.rows(); ++r)
                    for (size_t cc = 0; cc < dd.cols(); ++cc) {
                        if (dd.at(r, cc).is_zero()) continue;
                        size_t tr = d.rank(j + 1);
                        for (size_t k = 0; k < rci; ++k)
                            m.at(tgt_off + k * tr + r, src_off + k * rdj + cc) =
                                dd.at(r, cc).scaled(sign);
                    }
            }
        }
        diffs.push_back(std::move(m));
    }
    return ChainComplex(ring, layout.lo, std::move(ranks), std::move(diffs), ctx);
}

// C[k]^i = C^{i+k}; differentials pick up the sign (-1)^k. Shifting must keep
// the result in nonpositive degrees.
inline ChainComplex shift(const ChainComplex& c, int k) {
    int lo = c.lo() - k;
    if (lo > 0) throw std::invalid_argument("shift would leave nonpositive degrees");
    std::vector<size_t> ranks;
    std::vector<PolyMatrix> diffs;
    Coeff sign = Coeff::from_int(c.ring()->characteristic, k % 2 == 0 ? 1 : -1);
    for (int d = lo; d <= 0; ++d) ranks.push_back(c.rank(d + k));
    for (int d = lo; d < 0; ++d) diffs.push_back(c.diff(d + k).scaled(sign));
    return ChainComplex(c.ring(), lo, std::move(ranks), std::move(diffs), c.context());
}

// Euler characteristic consistency: alternating sum of term ranks equals the
// alternating sum of generic homology ranks at a random specialization.
inline bool euler_characteristic_check(const ChainComplex& c, uint64_t seed = 999) {
    std::vector<int> zero_vars;
    if (c.context())
        for (auto& g : c.context()->gens)
            for (size_t i = 0; i < c.ring()->arity(); ++i)
                if (g == Polynomial::variable(c.ring(), static_cast<int>(i)))
                    zero_vars.push_back(static_cast<int>(i));
    long lhs = 0, rhs = 0;
    for (int d = c.lo(); d <= 0; ++d) {
        long sgn = (d % 2 == 0) ? 1 : -1;
        lhs += sgn * static_cast<long>(c.rank(d));
        HomologyModule h = homology(c, d);
        rhs += sgn * static_cast<long>(generic_rank(h.pres, zero_vars, seed));
    }
    return lhs == rhs;
}

}  // namespace di
