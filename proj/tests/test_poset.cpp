#include "doctest.h"

#include "adelica/poset.hpp"

using namespace adelica;

namespace {

Poset chain(std::size_t n) {
    std::vector<std::string> els;
    std::vector<std::pair<std::string, std::string>> covers;
    for (std::size_t i = 0; i < n; ++i) els.push_back(std::to_string(i));
    for (std::size_t i = 0; i + 1 < n; ++i) covers.push_back({std::to_string(i + 1), std::to_string(i)});
    return Poset(els, covers);
}

}  // namespace

TEST_CASE("flags of a chain") {
    Poset p = chain(3);  // 0 < 1 < 2
    auto flags = enumerate_flags(p, 1);
    REQUIRE(flags.size() == 3);
    // canonical order: lexicographic on identifiers
    CHECK(p.name(flags[0].vertices[0]) == "1");
    CHECK(p.name(flags[0].vertices[1]) == "0");
    CHECK(p.name(flags[1].vertices[0]) == "2");
    CHECK(p.name(flags[1].vertices[1]) == "0");
    CHECK(p.name(flags[2].vertices[0]) == "2");
    CHECK(p.name(flags[2].vertices[1]) == "1");
}

TEST_CASE("antichain has no edges") {
    Poset p({"a", "b"}, {});
    CHECK(enumerate_flags(p, 1).empty());
    CHECK(enumerate_flags(p, 0).size() == 2);
}

TEST_CASE("punctured square flags") {
    SimplicialComplex k = punctured_cube({"x", "y"});
    Poset p = k.face_poset();
    auto edges = enumerate_flags(p, 1);
    CHECK(edges.size() == 2);  // {x,y}>{x} and {x,y}>{y}
    auto verts = enumerate_flags(p, 0);
    CHECK(verts.size() == 3);
}

TEST_CASE("face maps") {
    Poset p = chain(3);
    Flag f{{p.index("2"), p.index("1"), p.index("0")}};
    Flag f1 = face(f, 1);
    CHECK(p.name(f1.vertices[0]) == "2");
    CHECK(p.name(f1.vertices[1]) == "0");
    Flag f0 = face(f, 0);
    CHECK(p.name(f0.vertices[0]) == "1");
    CHECK(p.name(f0.vertices[1]) == "0");
    CHECK_THROWS(face(f, 3));
    CHECK_THROWS(face(Flag{{0}}, 0));
}

TEST_CASE("face commutation, exhaustive over small chains") {
    for (std::size_t n = 3; n <= 5; ++n) {
        Poset p = chain(n);
        for (std::size_t s = 2; s + 1 <= n; ++s) {
            for (const Flag& f : enumerate_flags(p, s)) {
                for (std::size_t a = 0; a < f.length(); ++a)
                    for (std::size_t b = a + 1; b < f.length(); ++b) {
                        CHECK(face(face(f, b), a) == face(face(f, a), b - 1));
                    }
            }
        }
    }
}

TEST_CASE("dimension data") {
    Poset p = chain(3);
    DimensionData d = dimension_data(p);
    REQUIRE(d.is_catenary);
    CHECK(d.dim[p.index("0")] == 0);
    CHECK(d.dim[p.index("1")] == 1);
    CHECK(d.dim[p.index("2")] == 2);

    // a < c, b < c, a < d < c: maximal chains from c have lengths 1 and 2
    Poset q({"a", "b", "c", "d"}, {{"c", "a"}, {"c", "b"}, {"d", "a"}, {"c", "d"}});
    CHECK(!dimension_data(q).is_catenary);

    // Spec Z truncated to {2,3} plus the generic point
    Poset z({"(0)", "(2)", "(3)"}, {{"(0)", "(2)"}, {"(0)", "(3)"}});
    DimensionData dz = dimension_data(z);
    REQUIRE(dz.is_catenary);
    CHECK(dz.dim[z.index("(2)")] == 0);
    CHECK(dz.dim[z.index("(3)")] == 0);
    CHECK(dz.dim[z.index("(0)")] == 1);
}

TEST_CASE("dimension vectors") {
    Poset z({"(0)", "(2)", "(3)"}, {{"(0)", "(2)"}, {"(0)", "(3)"}});
    DimensionData dz = dimension_data(z);
    Flag f{{z.index("(0)"), z.index("(2)")}};
    DimensionVector v = dimension_vector(f, dz.dim);
    CHECK(v.dims == std::vector<std::size_t>{1, 0});
    Flag g{{z.index("(0)")}};
    CHECK(dimension_vector(g, dz.dim).dims == std::vector<std::size_t>{1});

    // maximal flag of a chain has dims (r, r-1, ..., 0)
    Poset p = chain(4);
    DimensionData dp = dimension_data(p);
    auto maxflags = enumerate_flags(p, 3);
    REQUIRE(maxflags.size() == 1);
    CHECK(dimension_vector(maxflags[0], dp.dim).dims == std::vector<std::size_t>{3, 2, 1, 0});
}

TEST_CASE("dimension of a face is the face of the dimension") {
    Poset p = chain(5);
    DimensionData d = dimension_data(p);
    for (std::size_t s = 1; s <= 3; ++s)
        for (const Flag& f : enumerate_flags(p, s))
            for (std::size_t i = 0; i < f.length(); ++i) {
                auto dv = dimension_vector(f, d.dim).dims;
                dv.erase(dv.begin() + static_cast<long>(i));
                CHECK(dimension_vector(face(f, i), d.dim).dims == dv);
            }
}

TEST_CASE("punctured cubes") {
    CHECK(punctured_cube({"x"}).simplices().size() == 1);
    CHECK(punctured_cube({"x", "y"}).simplices().size() == 3);
    CHECK(punctured_cube({"x", "y", "z"}).simplices().size() == 7);
    CHECK_THROWS(punctured_cube({}));
    Poset aug = punctured_cube_augmented_poset({"x", "y"});
    CHECK(aug.size() == 4);
    CHECK(aug.minimal_elements().size() == 1);  // the empty set
}

TEST_CASE("order complex") {
    Poset p({"0", "1"}, {{"1", "0"}});
    SimplicialComplex k = order_complex(p);
    CHECK(k.simplices_of_dim(0).size() == 2);
    CHECK(k.simplices_of_dim(1).size() == 1);

    // Delta({x,y}) as a poset: subdivided interval, 3 vertices and 2 edges
    SimplicialComplex sq = punctured_cube({"x", "y"});
    SimplicialComplex sub = order_complex(sq.face_poset());
    CHECK(sub.simplices_of_dim(0).size() == 3);
    CHECK(sub.simplices_of_dim(1).size() == 2);

    Poset anti({"a", "b", "c"}, {});
    SimplicialComplex ak = order_complex(anti);
    CHECK(ak.simplices().size() == 3);
    CHECK(ak.max_dim() == 0);
}

TEST_CASE("subdivision preserves the Euler characteristic") {
    SimplicialComplex tri = punctured_cube({"x", "y", "z"});
    SimplicialComplex sub = order_complex(tri.face_poset());
    CHECK(sub.euler_characteristic() == tri.euler_characteristic());
}

TEST_CASE("poset validation") {
    CHECK_THROWS(Poset({"a", "a"}, {}));
    CHECK_THROWS(Poset({"a", "b"}, {{"a", "b"}, {"b", "a"}}));  // antisymmetry
    CHECK_THROWS(Poset({"a"}, {{"a", "a"}}));
}
