#include "doctest.h"

#include "adelica/adelic.hpp"
#include "adelica/instances.hpp"

using namespace adelica;

namespace {

AdelicSpec identity_spec_on_chain(std::size_t n) {
    std::vector<std::string> els;
    std::vector<std::pair<std::string, std::string>> covers;
    for (std::size_t i = 0; i < n; ++i) els.push_back(std::to_string(i));
    for (std::size_t i = 0; i + 1 < n; ++i)
        covers.push_back({std::to_string(i + 1), std::to_string(i)});
    AdelicSpec spec;
    spec.poset = Poset(els, covers);
    spec.backend = Backend::Graded;
    spec.window = Window({}, {});
    spec.coeff = CoefficientSystem::constant(spec.poset,
                                             Module::graded(0, {GradedPiece::point(0, {})}));
    spec.loc.poset = spec.poset;
    spec.loc.at.assign(spec.poset.size(), identity_localization());
    spec.validate();
    return spec;
}

// the flag cochain complex with constant coefficients, built independently
// of the adelic machinery: delta_i deletes the i-th term of a descending flag
CochainComplex flag_complex_constant(const Poset& p, std::size_t top) {
    Module q = Module::graded(0, {GradedPiece::point(0, {})});
    CochainComplex c;
    c.backend = Backend::Graded;
    c.window = Window({}, {});
    std::vector<std::vector<Flag>> flags;
    for (std::size_t s = 0; s <= top; ++s) flags.push_back(enumerate_flags(p, s));
    for (std::size_t s = 0; s <= top; ++s) {
        std::vector<GradedPiece> ps(flags[s].size(), GradedPiece::point(0, {}));
        c.objects.push_back(Module::graded(0, ps));
    }
    for (std::size_t s = 0; s + 1 <= top; ++s) {
        std::vector<GrMapEntry> es;
        for (std::size_t g = 0; g < flags[s + 1].size(); ++g)
            for (std::size_t i = 0; i < flags[s + 1][g].length(); ++i) {
                Flag f = face(flags[s + 1][g], i);
                auto it = std::find(flags[s].begin(), flags[s].end(), f);
                if (it == flags[s].end()) continue;
                std::size_t fi = static_cast<std::size_t>(it - flags[s].begin());
                es.push_back({fi, g, i % 2 == 0 ? QQ(1) : QQ(-1)});
            }
        std::map<std::pair<std::size_t, std::size_t>, QQ> acc;
        for (auto& e : es) acc[{e.from, e.to}] += e.coeff;
        std::vector<GrMapEntry> merged;
        for (auto& [k, v] : acc)
            if (v != 0) merged.push_back({k.first, k.second, v});
        c.diffs.push_back(Map::graded(c.objects[s], c.objects[s + 1], merged));
    }
    return c;
}

HasseInstance hasse_r(const std::vector<long>& primes) {
    HasseInstance inst;
    for (long p : primes) inst.primes.push_back(ZZ(p));
    inst.presentation = ZMat(0, 1);
    return inst;
}

}  // namespace

TEST_CASE("identity localizations with constant coefficients give the flag complex") {
    AdelicSpec spec = identity_spec_on_chain(4);
    CochainComplex got = adelic_complex(spec);
    CochainComplex want = flag_complex_constant(spec.poset, spec.dims.poset_dim);
    REQUIRE(got.objects.size() == want.objects.size());
    for (std::size_t s = 0; s < got.objects.size(); ++s)
        CHECK(got.objects[s].gen_count() == want.objects[s].gen_count());
    for (std::size_t s = 0; s + 1 < got.objects.size(); ++s)
        CHECK(maps_equal(got.diffs[s], want.diffs[s], &*spec.window));
    // a chain poset is contractible: cohomology concentrated in degree 0
    CohomologyTable t = adelic_cohomology(spec);
    CHECK(t.graded_dim(0, {}) == 1);
    CHECK(t.gr.count(1) == 0);
    CHECK(t.gr.count(2) == 0);
}

TEST_CASE("constant coefficients on an antichain") {
    AdelicSpec spec;
    spec.poset = Poset({"a", "b", "c"}, {});
    spec.backend = Backend::Graded;
    spec.window = Window({}, {});
    spec.coeff = CoefficientSystem::constant(spec.poset,
                                             Module::graded(0, {GradedPiece::point(0, {})}));
    spec.loc.poset = spec.poset;
    spec.loc.at.assign(3, identity_localization());
    spec.validate();
    CohomologyTable t = adelic_cohomology(spec);
    CHECK(t.graded_dim(0, {}) == 3);
}

TEST_CASE("Hasse d=1 assembly") {
    AdelicSpec spec = hasse_spec(hasse_r({2, 3}));

    SUBCASE("cochain shapes and the classical square") {
        std::vector<AdelicIndex> ix0, ix1;
        Module c0 = adelic_cochains(spec, 0, &ix0);
        Module c1 = adelic_cochains(spec, 1, &ix1);
        REQUIRE(ix0.size() == 3);
        REQUIRE(ix1.size() == 2);
        // canonical order: (0) < (2) < (3)
        REQUIRE(c0.gens.size() == 3);
        CHECK(c0.gens[0].tag == tag_rat());
        CHECK(c0.gens[1].tag == tag_complete(2));
        CHECK(c0.gens[2].tag == tag_complete(3));
        REQUIRE(c1.gens.size() == 2);
        CHECK(c1.gens[0].tag == tag_ratcomplete(2));
        CHECK(c1.gens[1].tag == tag_ratcomplete(3));
    }

    SUBCASE("delta is the localization/completion unit square") {
        Map d = adelic_delta(spec, 0);
        // row for ((0)>(p)): -x_Q + a_p
        CHECK(d.mat(0, 0) == -1);
        CHECK(d.mat(0, 1) == 1);
        CHECK(d.mat(0, 2) == 0);
        CHECK(d.mat(1, 0) == -1);
        CHECK(d.mat(1, 1) == 0);
        CHECK(d.mat(1, 2) == 1);
    }

    SUBCASE("cohomology is the base ring in degree zero") {
        CohomologyTable t = adelic_cohomology(spec);
        REQUIRE(t.ab.count(0) == 1);
        CHECK(t.ab[0].free ==
              std::vector<std::pair<AtomTag, std::size_t>>{{tag_base(), 1}});
        CHECK(t.ab[0].torsion.empty());
        CHECK(t.ab.count(1) == 0);
    }

    SUBCASE("finite-poset collapse") { CHECK(check_collapse(spec)); }

    SUBCASE("decompose and totalize agree with the direct assembly") {
        CubeDiagram cube = decompose_by_dimension(spec);
        REQUIRE(cube.vertices.size() == 3);
        auto v1 = cube.find_vertex(DimensionVector{{1}});
        auto v0 = cube.find_vertex(DimensionVector{{0}});
        auto v10 = cube.find_vertex(DimensionVector{{1, 0}});
        REQUIRE(v1);
        REQUIRE(v0);
        REQUIRE(v10);
        CHECK(cube.vertices[*v1].obj.gens.size() == 1);
        CHECK(cube.vertices[*v0].obj.gens.size() == 2);
        CHECK(cube.vertices[*v10].obj.gens.size() == 2);
        CochainComplex tot = totalize(cube);
        CHECK(cohomology(tot) == adelic_cohomology(spec));
    }

    SUBCASE("the adelic cube of rings") {
        CubeDiagram cube = build_adelic_cube(spec);
        REQUIRE(cube.initial_obj);
        CHECK(cube.initial_maps.size() == 2);  // to the two singleton vertices
        // punctured totalization: H^0 is the ring, no higher cohomology
        CohomologyTable t = cohomology(totalize(cube));
        REQUIRE(t.ab.count(0) == 1);
        CHECK(t.ab[0].free ==
              std::vector<std::pair<AtomTag, std::size_t>>{{tag_base(), 1}});
        CHECK(t.ab.count(1) == 0);
    }

    SUBCASE("both product policies give the same table") {
        HasseInstance inst = hasse_r({2, 3});
        inst.policy = ProductPolicy::AllClosedPoints;
        CHECK(adelic_cohomology(hasse_spec(inst)) == adelic_cohomology(spec));
    }
}

TEST_CASE("delta squared vanishes on seeded random posets with mixed systems") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
        Poset p = random_catenary_poset(seed, 8, 3);
        for (InversionKind kind :
             {InversionKind::Identity, InversionKind::Inversion, InversionKind::Mixed}) {
            AdelicSpec spec = random_inversion_spec(p, seed, kind, Window({-2}, {2}));
            CochainComplex c = adelic_complex(spec);
            CHECK(check_complex(c));
        }
    }
}

TEST_CASE("single point posets") {
    // only the generic point: C^0 = Q
    AdelicSpec spec;
    spec.poset = Poset({"(0)"}, {});
    spec.backend = Backend::Abelian;
    spec.base_primes = {ZZ(2)};
    spec.coeff = CoefficientSystem::constant(spec.poset, Module::free_abelian(1));
    spec.loc.poset = spec.poset;
    spec.loc.at = {arith_localization(ArithFunctorKind::Rationalize)};
    spec.validate();
    CohomologyTable t = adelic_cohomology(spec);
    REQUIRE(t.ab.count(0) == 1);
    CHECK(t.ab[0].free == std::vector<std::pair<AtomTag, std::size_t>>{{tag_rat(), 1}});
}

TEST_CASE("non-catenary posets are rejected") {
    AdelicSpec spec;
    spec.poset = Poset({"a", "b", "c", "d"}, {{"c", "a"}, {"c", "b"}, {"d", "a"}, {"c", "d"}});
    spec.backend = Backend::Graded;
    spec.window = Window({}, {});
    spec.coeff = CoefficientSystem::constant(spec.poset,
                                             Module::graded(0, {GradedPiece::point(0, {})}));
    spec.loc.poset = spec.poset;
    spec.loc.at.assign(4, identity_localization());
    CHECK_THROWS(spec.validate());
}
