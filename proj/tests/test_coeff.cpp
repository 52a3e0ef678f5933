#include "doctest.h"

#include "adelica/coeff.hpp"

using namespace adelica;

namespace {

Poset spec_z_s() {
    return Poset({"(0)", "(2)", "(3)"}, {{"(0)", "(2)"}, {"(0)", "(3)"}});
}

LocalizationSystem localization_side(const Poset& p) {
    LocalizationSystem s;
    s.poset = p;
    s.at.resize(p.size());
    s.at[p.index("(0)")] = arith_localization(ArithFunctorKind::Rationalize);
    s.at[p.index("(2)")] = arith_localization(ArithFunctorKind::LocalizeAt, 2);
    s.at[p.index("(3)")] = arith_localization(ArithFunctorKind::LocalizeAt, 3);
    return s;
}

LocalizationSystem completion_side(const Poset& p) {
    LocalizationSystem s;
    s.poset = p;
    s.at.resize(p.size());
    s.at[p.index("(0)")] = identity_localization();
    s.at[p.index("(2)")] = arith_localization(ArithFunctorKind::CompleteAt, 2);
    s.at[p.index("(3)")] = arith_localization(ArithFunctorKind::CompleteAt, 3);
    return s;
}

CoefficientSystem completion_system(const Poset& p, const Module& m) {
    CoefficientSystem sys;
    sys.poset = p;
    sys.value.resize(p.size());
    std::size_t g = p.index("(0)");
    sys.value[g] = m;
    for (const char* nm : {"(2)", "(3)"}) {
        std::size_t e = p.index(nm);
        ZZ prime(std::string(nm).substr(1, 1));
        auto lam = arith_localization(ArithFunctorKind::CompleteAt, prime);
        auto applied = lam->apply(m);
        sys.value[e] = applied.first;
        sys.restriction[{g, e}] = applied.second;
    }
    return sys;
}

Module qc_cone() { return Module::graded(1, {GradedPiece::cone(0, {0})}); }

}  // namespace

TEST_CASE("induced systems on flags") {
    Poset p = spec_z_s();
    Module m = Module::free_abelian(1, {ZZ(6)});

    SUBCASE("constant system induces constant systems") {
        CoefficientSystem sys = CoefficientSystem::constant(p, m);
        for (auto v : {StarVariance::LowerStar, StarVariance::UpperStar}) {
            FlagSystem f = induce_on_flags(sys, v);
            for (std::size_t s = 0; s <= 1; ++s)
                for (const Flag& fl : enumerate_flags(p, s)) CHECK(f.value(fl) == m);
        }
    }

    SUBCASE("completion system, upper star takes the last vertex") {
        CoefficientSystem sys = completion_system(p, m);
        FlagSystem f = induce_on_flags(sys, StarVariance::UpperStar);
        Flag fl{{p.index("(0)"), p.index("(2)")}};
        Module v = f.value(fl);
        // Lambda_2(R + Z/6) = Z_2 + Z/2
        REQUIRE(v.gens.size() == 2);
        CHECK(v.gens[0].tag == tag_complete(2));
        CHECK(v.gens[1].order == 2);
        CHECK(f.covariant);
    }

    SUBCASE("upper star then last face recovers the restriction map") {
        CoefficientSystem sys = completion_system(p, m);
        FlagSystem f = induce_on_flags(sys, StarVariance::UpperStar);
        Flag fl{{p.index("(0)"), p.index("(2)")}};
        Map got = f.face_map(fl, 1);
        Map want = sys.restrict_map(p.index("(0)"), p.index("(2)"));
        CHECK(maps_equal(got, want));
    }

    SUBCASE("functoriality is machine checked") {
        CoefficientSystem sys = CoefficientSystem::constant(p, m);
        CHECK_NOTHROW(sys.check_functorial(nullptr));
        Poset chain3({"a", "b", "c"}, {{"c", "b"}, {"b", "a"}, {"c", "a"}});
        CoefficientSystem bad = CoefficientSystem::constant(chain3, Module::free_abelian(1));
        QMat two(1, 1);
        two(0, 0) = 2;
        bad.restriction[{chain3.index("c"), chain3.index("a")}] =
            Map::abelian(Module::free_abelian(1), Module::free_abelian(1), two);
        CHECK_THROWS(bad.check_functorial(nullptr));
    }
}

TEST_CASE("absorbativity checks") {
    Poset p = spec_z_s();
    std::vector<Module> samples = {Module::free_abelian(1), Module::free_abelian(1, {ZZ(6)}),
                                   Module::free_abelian(2, {ZZ(4)})};

    SUBCASE("localization is left absorbative but not right") {
        AbsorbReport left = check_absorbative(localization_side(p), AbsorbSide::Left, samples);
        CHECK(left.ok);
        AbsorbReport right = check_absorbative(localization_side(p), AbsorbSide::Right, samples);
        CHECK(!right.ok);  // eta_(0) at M_(2) rationalizes, not an iso on Z/6
    }

    SUBCASE("completion is right absorbative") {
        AbsorbReport right = check_absorbative(completion_side(p), AbsorbSide::Right, samples);
        CHECK(right.ok);
    }

    SUBCASE("identity system is both") {
        LocalizationSystem s;
        s.poset = p;
        s.at.assign(p.size(), identity_localization());
        CHECK(check_absorbative(s, AbsorbSide::Left, samples).ok);
        CHECK(check_absorbative(s, AbsorbSide::Right, samples).ok);
    }
}

TEST_CASE("graded euler localization") {
    Window w({-6}, {6});
    Module qc = qc_cone();
    EulerGenerator c;
    c.label = "c";
    c.action[0] = {Multidegree{1}, QQ(1)};

    SUBCASE("Q[c] localizes to Q[c, 1/c] degreewise") {
        GradedLocalizeResult r = euler_localize_graded(qc, {c}, w);
        w.for_each([&](const Multidegree& d) { CHECK(r.module.dim_at(d) == 1); });
        // certificates: degree -3 stabilizes after walking back above zero
        CHECK(r.certificate.at({-3}) == 3);
        CHECK(r.certificate.at({2}) == 0);
    }

    SUBCASE("trivial multiplicative set is the identity") {
        GradedLocalizeResult r = euler_localize_graded(qc, {}, w);
        CHECK(r.module == qc);
        CHECK(map_is_isomorphism(r.unit, &w));
    }

    SUBCASE("localizing twice is an isomorphism on the second pass") {
        GradedLocalizeResult once = euler_localize_graded(qc, {c}, w);
        GradedLocalizeResult twice = euler_localize_graded(once.module, {c}, w);
        CHECK(modules_isomorphic(once.module, twice.module, &w));
        CHECK(map_is_isomorphism(twice.unit, &w));
    }

    SUBCASE("bounded pieces are annihilated") {
        Module point = Module::graded(1, {GradedPiece::point(0, {0})});
        GradedLocalizeResult r = euler_localize_graded(point, {c}, w);
        CHECK(r.module.pieces.empty());
    }
}

TEST_CASE("abelian euler localization") {
    SUBCASE("Z/6 inverted at 2 is Z/3") {
        Module m = Module::abelian({{tag_base(), 6}});
        AbelianLocalizeResult r = euler_localize_abelian(m, {ZZ(2)});
        REQUIRE(r.module.gens.size() == 1);
        CHECK(r.module.gens[0].order == 3);
        CHECK(r.certificate >= 1);
    }
    SUBCASE("unit multiplier is the identity") {
        Module m = Module::free_abelian(2, {ZZ(5)});
        AbelianLocalizeResult r = euler_localize_abelian(m, {ZZ(1)});
        CHECK(r.module == m);
    }
    SUBCASE("free generator with a non-unit multiplier does not stabilize") {
        Module m = Module::free_abelian(1);
        CHECK_THROWS_AS(euler_localize_abelian(m, {ZZ(2)}), std::invalid_argument);
    }
}

TEST_CASE("restricted products and the sum-vs-product square") {
    Window w({-5}, {3});
    std::vector<Module> comps;
    for (int i = 0; i < 3; ++i) comps.push_back(Module::graded(1, {GradedPiece::cone(i, {0})}));
    Module tail = Module::graded(1, {GradedPiece::cone(-1, {0})});
    RestrictedProduct rp = RestrictedProduct::with_tail(comps, tail, tail);

    EulerFamily fam;
    for (int j = 0; j < 3; ++j) {
        EulerGenerator e;
        e.label = "e" + std::to_string(j);
        e.action[j] = {Multidegree{1}, QQ(1)};
        fam.elements.push_back(e);
    }
    fam.exceptional_support.assign(3, Multidegree{1});
    fam.tail_support = {1};

    SUBCASE("localize_product frees every component") {
        ProductLocalizeResult r = localize_product(rp, fam, w);
        for (const auto& m : r.product.exceptional)
            w.for_each([&](const Multidegree& d) { CHECK(m.dim_at(d) == 1); });
        w.for_each([&](const Multidegree& d) { CHECK(r.product.tail_component.dim_at(d) == 1); });
        CHECK(r.product.tail_sub == tail);
    }

    SUBCASE("cokernel is the direct sum of componentwise quotients") {
        SumVsProductResult r = sum_vs_product_cokernel(rp, fam, w);
        REQUIRE(r.torsion_free);
        CHECK(r.iso_on_cohomology);
        REQUIRE(r.cokernel_components.size() == 3);
        for (const auto& q : r.cokernel_components)
            w.for_each([&](const Multidegree& d) { CHECK(q.dim_at(d) == (d[0] < 0 ? 1 : 0)); });
        w.for_each([&](const Multidegree& d) {
            CHECK(r.cokernel_tail.dim_at(d) == (d[0] < 0 ? 1 : 0));
        });
        for (std::size_t n : {3u, 6u, 12u}) {
            auto dims = truncated_square_cokernel_dims(rp, fam, n, w);
            REQUIRE(dims.size() == n);
            for (std::size_t i = 0; i < 3; ++i)
                w.for_each([&](const Multidegree& d) {
                    int want = r.cokernel_components[i].dim_at(d);
                    auto it = dims[i].find(d);
                    CHECK((it == dims[i].end() ? 0 : it->second) == want);
                });
        }
    }

    SUBCASE("a torsion component is reported, not crashed") {
        std::vector<Module> bad = comps;
        bad[1] = Module::graded(1, {GradedPiece::point(1, {0})});
        RestrictedProduct rp2 = RestrictedProduct::with_tail(bad, tail, tail);
        SumVsProductResult r = sum_vs_product_cokernel(rp2, fam, w);
        CHECK(!r.torsion_free);
        CHECK(!r.failure.empty());
    }

    SUBCASE("finite index sets degenerate to the direct sum") {
        RestrictedProduct fin = RestrictedProduct::finite(comps);
        SumVsProductResult r = sum_vs_product_cokernel(fin, fam, w);
        CHECK(r.iso_on_cohomology);
        CHECK(r.cokernel_components.size() == 3);
        w.for_each([&](const Multidegree& d) { CHECK(r.cokernel_tail.dim_at(d) == 0); });
    }
}

TEST_CASE("iterated cokernel") {
    Window w({-5}, {3});
    Poset p({"G", "C1", "C2"}, {{"G", "C1"}, {"G", "C2"}});
    Module qc = qc_cone();
    auto module_at = [&](std::size_t) { return qc; };
    auto support = [&](std::size_t, std::size_t) { return Multidegree{1}; };
    IteratedCokernelResult r = iterated_cokernel(p, p.index("G"), 0, module_at, support, w);
    REQUIRE(r.summands.size() == 2);
    auto dims = r.dims_in_window(w);
    w.for_each([&](const Multidegree& d) {
        auto it = dims.find(d);
        CHECK((it == dims.end() ? 0 : it->second) == (d[0] < 0 ? 2 : 0));
    });
    // depth 1 has no chains in a height-1 poset: the zero answer
    IteratedCokernelResult r1 = iterated_cokernel(p, p.index("G"), 1, module_at, support, w);
    CHECK(r1.summands.empty());
}

TEST_CASE("composite localizations") {
    auto a = composite_localization(arith_localization(ArithFunctorKind::LocalizeAt, 2),
                                    arith_localization(ArithFunctorKind::CompleteAt, 2));
    Module m = Module::free_abelian(1, {ZZ(6)});
    auto applied = a->apply(m);
    REQUIRE(applied.first.gens.size() == 2);
    CHECK(applied.first.gens[0].tag == tag_complete(2));
    CHECK(applied.first.gens[1].order == 2);
    CHECK(applied.second.dom == m);
    CHECK(applied.second.cod == applied.first);
}
