#include <catch2/catch_amalgamated.hpp>

#include "di/ak.hpp"

using namespace di;

namespace {

LinearCyclePair running_pair(long characteristic = 0) {
    return coordinate_pair(1, 1, 1, 1, characteristic);
}

}  // namespace

TEST_CASE("two-term complex ranks, square zero, and homology") {
    LinearCyclePair pair = running_pair();
    QuantizedCycle qc = canonical_quantization(pair);
    AKComplexData ak = ak_complex(qc);
    // degree −k term is Λ^{k+1}N* ⊕ Λ^k N* for a codim-2 cycle in dim 3
    CHECK(ak.complex.rank(0) == 3);
    CHECK(ak.complex.rank(-1) == 3);
    CHECK(ak.complex.rank(-2) == 1);
    CHECK(validate_complex(ak.complex).ok);

    HomologyModule H0 = homology(ak.complex, 0);
    ModulePresentation ox = free_presentation_over(pair.ring, 1, pair.ideal_x_side());
    FreeModuleElem unit(ak.complex.rank(0), Polynomial::zero(pair.ring));
    unit[ak.complex.rank(0) - 1] = Polynomial::constant(pair.ring, 1);
    FreeModuleElem cc = H0.class_coords(unit);
    PolyMatrix mat(pair.ring, H0.pres.rank, 1);
    for (size_t i = 0; i < H0.pres.rank; ++i) mat.at(i, 0) = cc[i];
    PresentedMorphism into{ox, H0.pres, mat};
    CHECK(morphism_is_well_defined(into));
    CHECK(morphism_is_iso(into));
    CHECK(module_is_zero(homology(ak.complex, -1).pres).is_zero);
    CHECK(module_is_zero(homology(ak.complex, -2).pres).is_zero);
}

TEST_CASE("small positive characteristic is rejected, large is accepted") {
    LinearCyclePair p2 = coordinate_pair(1, 1, 1, 1, 2);
    CHECK_THROWS_AS(ak_complex(canonical_quantization(p2)), std::domain_error);
    LinearCyclePair p32003 = coordinate_pair(1, 1, 1, 1, 32003);
    AKComplexData big = ak_complex(canonical_quantization(p32003));
    CHECK(validate_complex(big.complex).ok);
    CHECK(module_is_zero(homology(big.complex, -1).pres).is_zero);
}

TEST_CASE("wedge action commutes with the differential") {
    AKComplexData ak = ak_complex(canonical_quantization(running_pair()));
    for (int m = 0; m < 2; ++m)
        for (int k = 1; k <= 2; ++k) {
            PolyMatrix lhs = ak.complex.diff(-k) * ak.action(m, k);
            PolyMatrix rhs = ak.action(m, k - 1) * ak.complex.diff(-k);
            CHECK(lhs == rhs);
        }
}

TEST_CASE("twisted scalar action respects the differential") {
    LinearCyclePair pair = running_pair();
    QuantizedCycle qc = canonical_quantization(pair);
    AKComplexData ak = ak_complex(qc);
    Polynomial f = Polynomial::variable(pair.ring, pair.z_var(0)) *
                       Polynomial::variable(pair.ring, pair.z_var(0)) +
                   Polynomial::variable(pair.ring, pair.y_var(0));
    for (int k = 1; k <= 2; ++k) {
        size_t n = ak.complex.rank(-k);
        for (size_t i = 0; i < n; ++i) {
            FreeModuleElem v(n, Polynomial::zero(pair.ring));
            v[i] = Polynomial::constant(pair.ring, 1);
            FreeModuleElem lhs = ak.complex.diff(-k).apply(ak.twisted_scalar(f, k, v));
            FreeModuleElem rhs = ak.twisted_scalar(f, k - 1, ak.complex.diff(-k).apply(v));
            CHECK(elem_is_zero(elem_sub(lhs, rhs)));
        }
    }
}

TEST_CASE("first neighborhood model squares to zero") {
    LinearCyclePair pair = running_pair();
    QuantizedCycle qc = canonical_quantization(pair);
    FirstNeighborhoodModel fn{pair.ring, qc.codim()};
    // products of two conormal directions vanish
    FirstNeighborhoodModel::Element dx{Polynomial::zero(pair.ring),
                                       FreeModuleElem(fn.codim, Polynomial::zero(pair.ring))};
    dx.second[0] = Polynomial::constant(pair.ring, 1);
    FirstNeighborhoodModel::Element dt = dx;
    dt.second[0] = Polynomial::zero(pair.ring);
    dt.second[1] = Polynomial::constant(pair.ring, 1);
    FirstNeighborhoodModel::Element prod = fn.multiply(dx, dt);
    CHECK(prod.first.is_zero());
    CHECK(elem_is_zero(prod.second));
    // scalars multiply through the first component
    FirstNeighborhoodModel::Element one{Polynomial::constant(pair.ring, 1),
                                        FreeModuleElem(fn.codim, Polynomial::zero(pair.ring))};
    FirstNeighborhoodModel::Element same = fn.multiply(one, dx);
    CHECK(same.first == dx.first);
    CHECK(elem_is_zero(elem_sub(same.second, dx.second)));
}

TEST_CASE("change of quantization shifts by the derivative pairing") {
    LinearCyclePair line = coordinate_pair(0, 0, 1, 1, 0);
    QuantizedCycle qline = canonical_quantization(line);
    PolyMatrix off(line.ring, 1, 1);
    off.at(0, 0) = Polynomial::constant(line.ring, 5);
    QuantizationChange ch = change_quantization_iso(qline, off);
    FreeModuleElem v(2, Polynomial::zero(line.ring));
    v[1] = Polynomial::variable(line.ring, line.z_var(0));
    FreeModuleElem w = ch.apply(0, v);
    CHECK(w[0] == Polynomial::constant(line.ring, 5));
    CHECK(w[1] == v[1]);
    // inverse undoes the shift even on higher-degree functions
    FreeModuleElem v2(2, Polynomial::zero(line.ring));
    v2[1] = Polynomial::variable(line.ring, line.z_var(0), 2);
    FreeModuleElem round = ch.inverse().apply(0, ch.apply(0, v2));
    CHECK(elem_is_zero(elem_sub(round, v2)));
}

TEST_CASE("opposite quantizations are isomorphic") {
    LinearCyclePair pair = running_pair();
    QuantizedCycle qc = canonical_quantization(pair);
    PolyMatrix neg = qc.phi;
    for (size_t i = 0; i < neg.rows(); ++i)
        for (size_t j = 0; j < neg.cols(); ++j) neg.at(i, j) = -neg.at(i, j);
    QuantizedCycle qneg = make_quantized(pair, neg);
    PolyMatrix delta = neg;
    for (size_t i = 0; i < delta.rows(); ++i)
        for (size_t j = 0; j < delta.cols(); ++j)
            delta.at(i, j) = qneg.phi.at(i, j) - qc.phi.at(i, j);
    QuantizationChange ch = change_quantization_iso(qc, delta);
    // roundtrip is the identity on a spread of elements
    for (int k = 0; k <= 2; ++k) {
        size_t n = ak_complex(qc).complex.rank(-k);
        for (size_t i = 0; i < n; ++i) {
            FreeModuleElem v(n, Polynomial::zero(pair.ring));
            v[i] = Polynomial::variable(pair.ring, pair.z_var(0));
            FreeModuleElem round = ch.inverse().apply(k, ch.apply(k, v));
            CHECK(elem_is_zero(elem_sub(round, v)));
        }
    }
}

TEST_CASE("restriction to the second cycle") {
    QuantizedCycle qc = canonical_quantization(running_pair());
    RestrictedAK rest = restrict_ak(qc);
    CHECK(rest.complex.rank(0) == 2);
    CHECK(rest.complex.rank(-1) == 2);
    CHECK(rest.complex.rank(-2) == 1);
    CHECK(validate_complex(rest.complex).ok);
    CHECK(restrict_ak_quotient_check(qc));
}

TEST_CASE("filtration pieces have binomial ranks") {
    LinearCyclePair pair = running_pair();
    LerayPiece lp = leray_filtration(pair, 1, 1);
    CHECK(lp.inclusion.cols() == 1);
    LerayPiece l0 = leray_filtration(pair, 1, 0);
    CHECK(l0.inclusion.cols() == 2);
}

TEST_CASE("derivation chain law for the comparison operator") {
    CHECK(gamma_chain_law_ok(gamma_chain_map(running_pair())));
    CHECK(gamma_chain_law_ok(gamma_chain_map(coordinate_pair(0, 1, 2, 1, 0))));
}

TEST_CASE("comparison maps are quasi-isomorphisms across pair shapes") {
    PsiTheta pt = psi_theta(running_pair());
    CHECK(pt.ok);
    CHECK(pt.tilde_verdict.ok);
    CHECK(pt.theta_verdict.ok);
    CHECK(pt.gamma_law_ok);
    CHECK(pt.psi_law_ok);
    CHECK(psi_theta(coordinate_pair(1, 1, 0, 1, 0)).ok);
    CHECK(psi_theta(coordinate_pair(0, 1, 2, 1, 0)).ok);
}

TEST_CASE("normal bundle comparison is an isomorphism") {
    DerivedRestriction dr = derived_restriction(running_pair());
    CHECK(atiyah_morphism(dr).iso);
}

TEST_CASE("double model is isomorphic to the tensor square") {
    DerivedRestriction dr = derived_restriction(running_pair());
    DoubleModel mm = double_koszul_model(dr);
    CHECK(validate_complex(mm.complex).ok);
    ChainMap xi = double_model_map(dr, mm);
    CHECK(validate_chain_map(xi).ok);
    CHECK(is_quasi_iso(xi).ok);
}

TEST_CASE("splitting extraction from the formality map") {
    FormalityExtraction ex = extract_splitting_from_formality(running_pair());
    CHECK(ex.beta_ok);
    CHECK(ex.atiyah_ok);
    CHECK(ex.basis_ok);
    CHECK(ex.squares_ok);
    CHECK(ex.invertible);
    CHECK(ex.ok);
    // the recovered retraction satisfies ρ∘α = id against the excess sequence
    LinearCyclePair pair = running_pair();
    ExcessSequence ses = excess_sequence(pair);
    PolyMatrix ra = ex.witness.retraction * ses.alpha;
    ContextPtr ctx = make_context(pair.ring, pair.ideal_intersection());
    PolyMatrix diff = ra - PolyMatrix::identity(pair.ring, ses.rank_excess);
    CHECK(context_reduce(diff, ctx).is_zero());
    PolyMatrix ps = ses.pi * ex.witness.section;
    PolyMatrix pdiff = ps - PolyMatrix::identity(pair.ring, ses.rank_nstar);
    CHECK(context_reduce(pdiff, ctx).is_zero());
}
