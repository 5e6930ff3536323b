#pragma once

// Koszul complexes and the derived restriction of a linear cycle pair:
// Tor modules, their comparison with exterior powers of the excess bundle,
// and the wedge product on Tor.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "di/cycles.hpp"
#include "di/exterior.hpp"

namespace di {

inline ChainComplex koszul_complex(const std::vector<Polynomial>& seq, const RingPtr& R,
                                   ContextPtr context = nullptr) {
    if (seq.empty()) throw std::invalid_argument("koszul_complex: empty sequence");
    int c = static_cast<int>(seq.size());
    ExteriorBasis basis(c);
    std::vector<size_t> ranks;
    for (int d = -c; d <= 0; ++d) ranks.push_back(basis.rank(-d));
    std::vector<PolyMatrix> diffs;
    for (int d = -c; d < 0; ++d) {
        int k = -d;
        auto cols = basis.degree(k);
        PolyMatrix m(R, basis.rank(k - 1), basis.rank(k));
        for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
            const IndexSet& S = cols[cidx];
            for (size_t pos = 0; pos < S.size(); ++pos) {
                size_t ridx = basis.index_of(subset_without(S, pos));
                Polynomial f = seq[static_cast<size_t>(S[pos])];
                if (pos % 2 == 1) f = -f;
                m.at(ridx, cidx) = m.at(ridx, cidx) + f;
            }
        }
        diffs.push_back(std::move(m));
    }
    return ChainComplex(R, -c, std::move(ranks), std::move(diffs), std::move(context));
}

// Coordinates of the wedge a∧b, where a lives in degree −i and b in degree
// −j of the exterior algebra on `basis`.
inline FreeModuleElem koszul_wedge_elem(const ExteriorBasis& basis, const RingPtr& R,
                                        int i, int j, const FreeModuleElem& a,
                                        const FreeModuleElem& b) {
    auto ai = basis.degree(i);
    auto bj = basis.degree(j);
    if (a.size() != ai.size() || b.size() != bj.size())
        throw std::invalid_argument("koszul_wedge_elem: coordinate length mismatch");
    FreeModuleElem out(basis.rank(i + j), Polynomial::zero(R));
    IndexSet merged;
    for (size_t s = 0; s < ai.size(); ++s) {
        if (a[s].is_zero()) continue;
        for (size_t t = 0; t < bj.size(); ++t) {
            if (b[t].is_zero()) continue;
            int sign = wedge_merge(ai[s], bj[t], merged);
            if (sign == 0) continue;
            Polynomial prod = a[s] * b[t];
            if (sign < 0) prod = -prod;
            size_t idx = basis.index_of(merged);
            out[idx] = out[idx] + prod;
        }
    }
    return out;
}

// The derived restriction of the pair: the Koszul resolution of the x-side
// cycle with coefficients restricted to the y-side cycle, plus its cached
// homology in every degree.
struct DerivedRestriction {
    LinearCyclePair pair;
    ChainComplex complex;                  // context: the y-side ideal
    std::vector<HomologyModule> homology;  // index k holds degree −k
};

inline DerivedRestriction derived_restriction(const LinearCyclePair& pair) {
    const RingPtr& R = pair.ring;
    std::vector<Polynomial> seq = pair.ideal_x_side();
    std::vector<int> kill;
    for (int j = 0; j < pair.q; ++j) kill.push_back(pair.y_var(j));
    for (int b = 0; b < pair.r; ++b) kill.push_back(pair.t_var(b));

    ChainComplex K = koszul_complex(seq, R);
    std::vector<size_t> ranks;
    for (int d = K.lo(); d <= 0; ++d) ranks.push_back(K.rank(d));
    std::vector<PolyMatrix> diffs;
    for (int d = K.lo(); d < 0; ++d)
        diffs.push_back(K.diff(d).map_entries(
            [&](const Polynomial& f) { return f.kill_variables(kill); }));

    DerivedRestriction dr;
    dr.pair = pair;
    dr.complex = ChainComplex(R, K.lo(), std::move(ranks), std::move(diffs),
                              pair.context_y_side());
    for (int k = 0; k <= -dr.complex.lo(); ++k)
        dr.homology.push_back(homology(dr.complex, -k));
    return dr;
}

inline std::vector<ModulePresentation> tor_modules(const DerivedRestriction& dr) {
    std::vector<ModulePresentation> out;
    for (auto& h : dr.homology) out.push_back(h.pres);
    return out;
}

inline std::vector<ModulePresentation> tor_modules(const LinearCyclePair& pair) {
    return tor_modules(derived_restriction(pair));
}

// Free module over functions on the intersection, presented over the ambient
// ring with one relation column per ideal generator and basis element.
inline ModulePresentation free_presentation_over(const RingPtr& R, size_t rank,
                                                 const std::vector<Polynomial>& ideal) {
    ModulePresentation pres{R, rank, PolyMatrix(R, rank, rank * ideal.size()), {}};
    size_t col = 0;
    for (const Polynomial& g : ideal)
        for (size_t i = 0; i < rank; ++i) pres.relations.at(i, col++) = g;
    return pres;
}

// Whether two coordinate vectors name the same class of a presented module.
inline bool classes_equal(const ModulePresentation& pres, const FreeModuleElem& a,
                          const FreeModuleElem& b) {
    if (pres.rank == 0) return true;
    FreeModuleElem diff = elem_sub(a, b);
    if (elem_is_zero(diff)) return true;
    return LiftSolver(pres.relations).lift(diff).in_image;
}

// The canonical Koszul cocycle dt_J of an adapted pair, as a coordinate
// vector in degree −|J| of the derived restriction. `tset` holds t-block
// indices (0-based within the t-block).
inline FreeModuleElem tor_canonical_cocycle(const LinearCyclePair& pair,
                                            const IndexSet& tset) {
    int c = pair.p + pair.r;
    ExteriorBasis basis(c);
    IndexSet S;
    for (int b : tset) S.push_back(pair.p + b);
    FreeModuleElem v(basis.rank(static_cast<int>(tset.size())),
                     Polynomial::zero(pair.ring));
    v[basis.index_of(S)] = Polynomial::constant(pair.ring, 1);
    return v;
}

struct TorExcessDegree {
    int k = 0;
    bool ok = false;
    PresentedMorphism map;  // Λ^k E → H^{−k}
    std::string note;
};

struct TorExcessReport {
    bool ok = true;
    std::vector<TorExcessDegree> degrees;
};

// Builds, degree by degree, the map Λ^k E → H^{−k} sending the basis wedge
// of t-coordinates to the class of the matching Koszul cocycle, and checks
// it is an isomorphism of presentations.
inline TorExcessReport tor_excess_compare(const DerivedRestriction& dr) {
    const LinearCyclePair& pair = dr.pair;
    const RingPtr& R = pair.ring;
    ExteriorBasis tbasis(pair.r);
    std::vector<Polynomial> ideal_t = pair.ideal_intersection();
    TorExcessReport report;
    int c = pair.p + pair.r;
    for (int k = 0; k <= c; ++k) {
        TorExcessDegree deg;
        deg.k = k;
        const HomologyModule& H = dr.homology[static_cast<size_t>(k)];
        ModulePresentation src =
            free_presentation_over(R, tbasis.rank(k), ideal_t);
        std::vector<FreeModuleElem> cols;
        bool coords_ok = true;
        for (const IndexSet& J : tbasis.degree(k)) {
            try {
                cols.push_back(H.class_coords(tor_canonical_cocycle(pair, J)));
            } catch (const std::runtime_error&) {
                coords_ok = false;
                deg.note = "canonical cocycle is not a cycle in span";
                break;
            }
        }
        if (coords_ok) {
            deg.map = PresentedMorphism{
                src, H.pres,
                PolyMatrix::from_columns(R, H.pres.rank, cols)};
            if (!morphism_is_well_defined(deg.map))
                deg.note = "not well defined on the exterior power";
            else if (!morphism_is_iso(deg.map))
                deg.note = "not an isomorphism of presentations";
            else
                deg.ok = true;
        }
        report.ok = report.ok && deg.ok;
        report.degrees.push_back(std::move(deg));
    }
    return report;
}

inline TorExcessReport tor_excess_compare(const LinearCyclePair& pair) {
    return tor_excess_compare(derived_restriction(pair));
}

struct TorWedgeReport {
    int i = 0, j = 0;
    // Exterior multiplication table: rows indexed by the Λ^{i+j} basis of
    // the excess bundle, columns by (basis of Λ^i) × (basis of Λ^j).
    PolyMatrix pairing;
    bool matches_exterior = true;
};

// The product H^{−i} ⊗ H^{−j} → H^{−(i+j)} induced by the Koszul wedge,
// checked against the exterior product on the excess bundle through the
// canonical cocycle representatives.
inline TorWedgeReport tor_wedge_product(const DerivedRestriction& dr, int i, int j) {
    const LinearCyclePair& pair = dr.pair;
    const RingPtr& R = pair.ring;
    int c = pair.p + pair.r;
    ExteriorBasis full(c), tbasis(pair.r);
    TorWedgeReport report;
    report.i = i;
    report.j = j;
    auto bi = tbasis.degree(i);
    auto bj = tbasis.degree(j);
    report.pairing = PolyMatrix(R, tbasis.rank(i + j), bi.size() * bj.size());

    bool in_range = i + j <= c;
    const HomologyModule* H = in_range ? &dr.homology[static_cast<size_t>(i + j)] : nullptr;

    IndexSet merged;
    for (size_t a = 0; a < bi.size(); ++a)
        for (size_t b = 0; b < bj.size(); ++b) {
            size_t col = a * bj.size() + b;
            int sign = wedge_merge(bi[a], bj[b], merged);
            if (sign != 0 && i + j <= pair.r) {
                report.pairing.at(tbasis.index_of(merged), col) =
                    Polynomial::constant(R, sign);
            }
            if (!in_range) continue;
            // product of the canonical representatives, as a Koszul element
            FreeModuleElem w = koszul_wedge_elem(
                full, R, i, j, tor_canonical_cocycle(pair, bi[a]),
                tor_canonical_cocycle(pair, bj[b]));
            FreeModuleElem lhs = H->class_coords(w);
            FreeModuleElem rhs(H->pres.rank, Polynomial::zero(R));
            if (sign != 0 && i + j <= pair.r) {
                rhs = H->class_coords(tor_canonical_cocycle(pair, merged));
                for (auto& e : rhs) e = sign > 0 ? e : -e;
            }
            if (!classes_equal(H->pres, lhs, rhs)) report.matches_exterior = false;
        }
    return report;
}

inline TorWedgeReport tor_wedge_product(const LinearCyclePair& pair, int i, int j) {
    return tor_wedge_product(derived_restriction(pair), i, j);
}

// The isomorphism Koszul(seq1) ⊗ Koszul(seq2) ≅ Koszul(seq1 ∪ seq2): basis
// element e_{S1} ⊗ e_{S2} goes to e_{S1 ∪ (S2 shifted past seq1)}.
inline ChainMap koszul_multiplicativity_map(const std::vector<Polynomial>& seq1,
                                            const std::vector<Polynomial>& seq2,
                                            const RingPtr& R) {
    ChainComplex K1 = koszul_complex(seq1, R);
    ChainComplex K2 = koszul_complex(seq2, R);
    ChainComplex T = tensor_complexes(K1, K2);
    std::vector<Polynomial> both = seq1;
    for (auto& f : seq2) both.push_back(f);
    ChainComplex K12 = koszul_complex(both, R);

    int c1 = static_cast<int>(seq1.size());
    ExteriorBasis b1(c1), b2(static_cast<int>(seq2.size()));
    ExteriorBasis ball(static_cast<int>(both.size()));
    auto layout = detail::TensorLayout::build(K1, K2);

    std::vector<PolyMatrix> comps;
    for (int n = T.lo(); n <= 0; ++n) {
        PolyMatrix m(R, K12.rank(n), T.rank(n));
        for (auto& blk : layout.blocks[static_cast<size_t>(n - layout.lo)]) {
            int ki = -blk[0], kj = -blk[1];
            size_t off = layout.offset(K1, K2, blk[0], blk[1]);
            auto si = b1.degree(ki);
            auto sj = b2.degree(kj);
            for (size_t a = 0; a < si.size(); ++a)
                for (size_t b = 0; b < sj.size(); ++b) {
                    IndexSet merged = si[a];
                    for (int v : sj[b]) merged.push_back(v + c1);
                    m.at(ball.index_of(merged), off + a * sj.size() + b) =
                        Polynomial::constant(R, 1);
                }
        }
        comps.push_back(std::move(m));
    }
    return ChainMap{T, K12, comps};
}

}  // namespace di
