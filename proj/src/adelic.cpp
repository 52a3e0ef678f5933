#include "adelica/adelic.hpp"

#include <algorithm>

namespace adelica {

void AdelicSpec::validate() {
    dims = dimension_data(poset);
    if (!dims.is_catenary)
        throw std::invalid_argument("adelic spec: poset is not catenary");
    if (backend == Backend::Graded && !window)
        throw std::invalid_argument("adelic spec: graded backend needs a window");
    // unit naturality on every structure map of the coefficient system
    for (auto& [pair, r] : coeff.restriction) {
        for (std::size_t p = 0; p < poset.size(); ++p) {
            auto [am1, u1] = loc.of(p).apply(r.dom);
            auto [am2, u2] = loc.of(p).apply(r.cod);
            Map lhs = compose(u2, r);
            Map rhs = compose(loc.of(p).lift(r), u1);
            const Window* w = window ? &*window : nullptr;
            if (!maps_equal(lhs, rhs, w))
                throw std::invalid_argument("adelic spec: unit of " + loc.of(p).name() +
                                            " is not natural on the structure map " +
                                            poset.name(pair.first) + " -> " +
                                            poset.name(pair.second));
        }
    }
}

namespace {

bool index_lex_less(const Poset& poset, const AdelicIndex& a, const AdelicIndex& b) {
    const auto& va = a.flag.vertices;
    const auto& vb = b.flag.vertices;
    for (std::size_t i = 0; i < std::min(va.size(), vb.size()); ++i)
        if (poset.name(va[i]) != poset.name(vb[i])) return poset.name(va[i]) < poset.name(vb[i]);
    if (va.size() != vb.size()) return va.size() < vb.size();
    return a.policy_extra < b.policy_extra;
}

}  // namespace

std::vector<AdelicIndex> adelic_indices(const AdelicSpec& spec, std::size_t s) {
    std::vector<AdelicIndex> out;
    for (const Flag& f : enumerate_flags(spec.poset, s)) out.push_back({f, false});
    if (spec.policy == ProductPolicy::AllClosedPoints && s >= 1) {
        // widen the last product to all closed points when the last slot sits
        // in dimension zero; the prefix must still end above dimension zero
        std::vector<std::size_t> closed = spec.poset.minimal_elements();
        for (const Flag& prefix : enumerate_flags(spec.poset, s - 1)) {
            if (spec.dims.dim[prefix.vertices.back()] == 0) continue;
            for (std::size_t m : closed) {
                if (spec.poset.less(m, prefix.vertices.back())) continue;  // already present
                Flag g = prefix;
                g.vertices.push_back(m);
                out.push_back({g, true});
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const AdelicIndex& a, const AdelicIndex& b) {
        return index_lex_less(spec.poset, a, b);
    });
    return out;
}

Module adelic_value(const AdelicSpec& spec, const AdelicIndex& ix) {
    const auto& v = ix.flag.vertices;
    Module m = spec.coeff.value[v.back()];
    for (std::size_t i = v.size(); i-- > 0;) m = spec.loc.of(v[i]).apply(m).first;
    return m;
}

Module adelic_cochains(const AdelicSpec& spec, std::size_t s, std::vector<AdelicIndex>* indices) {
    std::vector<AdelicIndex> ix = adelic_indices(spec, s);
    if (indices) *indices = ix;
    std::vector<Module> parts;
    for (const auto& i : ix) parts.push_back(adelic_value(spec, i));
    if (parts.empty())
        return spec.backend == Backend::Abelian
                   ? Module::abelian({})
                   : Module::graded(spec.window ? spec.window->nvars() : 0, {});
    return dsum(parts);
}

namespace {

// the iterated value below position `from` of the index's flag
Module tail_value(const AdelicSpec& spec, const AdelicIndex& ix, std::size_t from) {
    const auto& v = ix.flag.vertices;
    Module m = spec.coeff.value[v.back()];
    for (std::size_t i = v.size(); i-- > from;) m = spec.loc.of(v[i]).apply(m).first;
    return m;
}

// delta_i block: value(face(g, i)) -> value(g)
Map delta_block(const AdelicSpec& spec, const AdelicIndex& g, std::size_t i) {
    const auto& v = g.flag.vertices;
    std::size_t last = v.size() - 1;
    Map m = [&] {
        if (i == last) {
            // coefficient restriction into the inserted last vertex, then its unit
            Map r = [&]() -> Map {
                std::size_t a = v[last - 1], b = v[last];
                if (spec.poset.less(b, a)) return spec.coeff.restrict_map(a, b);
                // policy extra with an incomparable closed point: the only
                // structural map is zero
                return Map::zero(spec.coeff.value[a], spec.coeff.value[b]);
            }();
            Map u = spec.loc.of(v[last]).apply(spec.coeff.value[v[last]]).second;
            return compose(u, r);
        }
        Module inner = tail_value(spec, g, i + 1);
        return spec.loc.of(v[i]).apply(inner).second;
    }();
    for (std::size_t j = (i == last ? last : i); j-- > 0;) m = spec.loc.of(v[j]).lift(m);
    return m;
}

Map signed_block(const AdelicSpec& spec, const Map& block, std::size_t i) {
    (void)spec;
    if (i % 2 == 0) return block;
    Map m = block;
    if (m.dom.backend == Backend::Abelian) {
        m.mat = m.mat.scaled(QQ(-1));
    } else {
        for (auto& e : m.entries) e.coeff = -e.coeff;
    }
    return m;
}

std::optional<std::size_t> find_index(const std::vector<AdelicIndex>& ixs, const AdelicIndex& x) {
    for (std::size_t k = 0; k < ixs.size(); ++k)
        if (ixs[k] == x) return k;
    return std::nullopt;
}

// face of an adelic index: removing a prefix vertex keeps the extra marker;
// removing the last vertex produces an honest flag
AdelicIndex index_face(const AdelicIndex& g, std::size_t i) {
    AdelicIndex f;
    f.flag = face(g.flag, i);
    if (g.policy_extra && i + 1 < g.flag.length()) {
        // still ends with the policy-added closed point; it stays an extra
        // unless the shortened chain is comparable again
        f.policy_extra = true;
    }
    return f;
}

void normalize_extra_marker(const Poset& poset, AdelicIndex& ix) {
    if (!ix.policy_extra) return;
    const auto& v = ix.flag.vertices;
    if (v.size() < 2) {
        ix.policy_extra = false;
        return;
    }
    if (poset.less(v.back(), v[v.size() - 2])) ix.policy_extra = false;
}

}  // namespace

Map adelic_delta(const AdelicSpec& spec, std::size_t s) {
    std::vector<AdelicIndex> dom_ix, cod_ix;
    Module dom = adelic_cochains(spec, s, &dom_ix);
    Module cod = adelic_cochains(spec, s + 1, &cod_ix);
    // per-summand offsets
    std::vector<std::size_t> doff(dom_ix.size() + 1, 0), coff(cod_ix.size() + 1, 0);
    for (std::size_t k = 0; k < dom_ix.size(); ++k)
        doff[k + 1] = doff[k] + adelic_value(spec, dom_ix[k]).gen_count();
    for (std::size_t k = 0; k < cod_ix.size(); ++k)
        coff[k + 1] = coff[k] + adelic_value(spec, cod_ix[k]).gen_count();

    QMat big;
    std::vector<GrMapEntry> entries;
    if (spec.backend == Backend::Abelian) big = QMat(cod.gens.size(), dom.gens.size());

    for (std::size_t gk = 0; gk < cod_ix.size(); ++gk) {
        const AdelicIndex& g = cod_ix[gk];
        for (std::size_t i = 0; i < g.flag.length(); ++i) {
            AdelicIndex f = index_face(g, i);
            normalize_extra_marker(spec.poset, f);
            auto fk = find_index(dom_ix, f);
            if (!fk) continue;  // the face is not a summand (non-flag after removal)
            Map block = signed_block(spec, delta_block(spec, g, i), i);
            if (spec.backend == Backend::Abelian) {
                for (std::size_t r = 0; r < block.mat.rows(); ++r)
                    for (std::size_t c = 0; c < block.mat.cols(); ++c)
                        big(coff[gk] + r, doff[*fk] + c) += block.mat(r, c);
            } else {
                for (const auto& e : block.entries)
                    entries.push_back({doff[*fk] + e.from, coff[gk] + e.to, e.coeff});
            }
        }
    }
    if (spec.backend == Backend::Abelian) return Map::abelian(dom, cod, std::move(big));
    // merge duplicate graded entries
    std::map<std::pair<std::size_t, std::size_t>, QQ> acc;
    for (const auto& e : entries) acc[{e.from, e.to}] += e.coeff;
    std::vector<GrMapEntry> merged;
    for (auto& [k, v] : acc)
        if (v != 0) merged.push_back({k.first, k.second, v});
    return Map::graded(dom, cod, merged);
}

CochainComplex adelic_complex(const AdelicSpec& spec) {
    CochainComplex c;
    c.backend = spec.backend;
    c.window = spec.window;
    c.base_primes = spec.base_primes;
    std::size_t top = spec.dims.poset_dim;
    for (std::size_t s = 0; s <= top; ++s) c.objects.push_back(adelic_cochains(spec, s));
    for (std::size_t s = 0; s < top; ++s) c.diffs.push_back(adelic_delta(spec, s));
    return c;
}

CohomologyTable adelic_cohomology(const AdelicSpec& spec) {
    return cohomology(adelic_complex(spec));
}

CubeDiagram decompose_by_dimension(const AdelicSpec& spec) {
    CubeDiagram cube;
    cube.backend = spec.backend;
    cube.window = spec.window;
    cube.base_primes = spec.base_primes;
    std::size_t top = spec.dims.poset_dim;

    // group indices by dimension vector
    std::map<DimensionVector, std::vector<AdelicIndex>> groups;
    for (std::size_t s = 0; s <= top; ++s)
        for (const AdelicIndex& ix : adelic_indices(spec, s))
            groups[dimension_vector(ix.flag, spec.dims.dim)].push_back(ix);

    std::map<DimensionVector, std::size_t> vid;
    for (auto& [dv, ixs] : groups) {
        std::vector<Module> parts;
        std::vector<Flag> flags;
        for (const auto& ix : ixs) {
            parts.push_back(adelic_value(spec, ix));
            flags.push_back(ix.flag);
        }
        CubeVertex vx{dv, dsum(parts), flags};
        vid[dv] = cube.vertices.size();
        cube.vertices.push_back(std::move(vx));
    }

    // edges: one per pair (dv, dv + inserted dimension)
    for (auto& [dv, ixs] : groups) {
        for (std::size_t pos = 0; pos <= dv.dims.size(); ++pos) {
            // candidate inserted dimensions at position pos
            for (std::size_t d = 0; d <= top; ++d) {
                DimensionVector dv2 = dv;
                dv2.dims.insert(dv2.dims.begin() + static_cast<long>(pos), d);
                bool decreasing = true;
                for (std::size_t i = 0; i + 1 < dv2.dims.size(); ++i)
                    if (dv2.dims[i] <= dv2.dims[i + 1]) decreasing = false;
                if (!decreasing) continue;
                auto it = groups.find(dv2);
                if (it == groups.end()) continue;
                const auto& cod_ixs = it->second;
                // block matrix of the unsigned delta_pos between the groups
                std::vector<std::size_t> doff(ixs.size() + 1, 0), coff(cod_ixs.size() + 1, 0);
                for (std::size_t k = 0; k < ixs.size(); ++k)
                    doff[k + 1] = doff[k] + adelic_value(spec, ixs[k]).gen_count();
                for (std::size_t k = 0; k < cod_ixs.size(); ++k)
                    coff[k + 1] = coff[k] + adelic_value(spec, cod_ixs[k]).gen_count();
                const Module& dmod = cube.vertices[vid[dv]].obj;
                const Module& cmod = cube.vertices[vid[dv2]].obj;
                QMat big;
                std::vector<GrMapEntry> entries;
                if (spec.backend == Backend::Abelian) big = QMat(cmod.gens.size(), dmod.gens.size());
                for (std::size_t gk = 0; gk < cod_ixs.size(); ++gk) {
                    const AdelicIndex& g = cod_ixs[gk];
                    AdelicIndex f = index_face(g, pos);
                    normalize_extra_marker(spec.poset, f);
                    auto fk = find_index(ixs, f);
                    if (!fk) continue;
                    Map block = delta_block(spec, g, pos);
                    if (spec.backend == Backend::Abelian) {
                        for (std::size_t r = 0; r < block.mat.rows(); ++r)
                            for (std::size_t c = 0; c < block.mat.cols(); ++c)
                                big(coff[gk] + r, doff[*fk] + c) += block.mat(r, c);
                    } else {
                        for (const auto& e : block.entries)
                            entries.push_back({doff[*fk] + e.from, coff[gk] + e.to, e.coeff});
                    }
                }
                Map edge = spec.backend == Backend::Abelian
                               ? Map::abelian(dmod, cmod, std::move(big))
                               : Map::graded(dmod, cmod, entries);
                cube.edges.push_back({vid[dv], vid[dv2], pos, edge});
            }
        }
    }
    return cube;
}

namespace {

void check_unital_entries(const Map& m, const std::string& where) {
    if (m.dom.backend == Backend::Abelian) {
        for (std::size_t i = 0; i < m.mat.rows(); ++i)
            for (std::size_t j = 0; j < m.mat.cols(); ++j)
                if (m.mat(i, j) != 0 && m.mat(i, j) != 1)
                    throw std::invalid_argument("adelic cube: non-unital entry in " + where);
    } else {
        for (const auto& e : m.entries)
            if (e.coeff != 0 && e.coeff != 1)
                throw std::invalid_argument("adelic cube: non-unital entry in " + where);
    }
}

}  // namespace

CubeDiagram build_adelic_cube(const AdelicSpec& spec) {
    if (!spec.global_module)
        throw std::invalid_argument("adelic cube: spec carries no global module");
    CubeDiagram cube = decompose_by_dimension(spec);
    for (const auto& e : cube.edges) check_unital_entries(e.map, "an edge map");
    cube.initial_obj = spec.global_module;
    // augmentation into each singleton vertex, assembled from the per-element units
    for (std::size_t vi = 0; vi < cube.vertices.size(); ++vi) {
        const CubeVertex& vx = cube.vertices[vi];
        if (vx.dv.dims.size() != 1) continue;
        std::vector<std::size_t> off(vx.flags.size() + 1, 0);
        for (std::size_t k = 0; k < vx.flags.size(); ++k) {
            AdelicIndex ix{vx.flags[k], false};
            off[k + 1] = off[k] + adelic_value(spec, ix).gen_count();
        }
        if (spec.backend == Backend::Abelian) {
            QMat big(vx.obj.gens.size(), spec.global_module->gens.size());
            for (std::size_t k = 0; k < vx.flags.size(); ++k) {
                auto it = spec.global_units.find(vx.flags[k].vertices[0]);
                if (it == spec.global_units.end())
                    throw std::invalid_argument("adelic cube: missing augmentation unit");
                for (std::size_t r = 0; r < it->second.mat.rows(); ++r)
                    for (std::size_t c = 0; c < it->second.mat.cols(); ++c)
                        big(off[k] + r, c) = it->second.mat(r, c);
            }
            Map aug = Map::abelian(*spec.global_module, vx.obj, std::move(big));
            check_unital_entries(aug, "an augmentation map");
            cube.initial_maps.emplace_back(vi, aug);
        } else {
            std::vector<GrMapEntry> entries;
            for (std::size_t k = 0; k < vx.flags.size(); ++k) {
                auto it = spec.global_units.find(vx.flags[k].vertices[0]);
                if (it == spec.global_units.end())
                    throw std::invalid_argument("adelic cube: missing augmentation unit");
                for (const auto& e : it->second.entries)
                    entries.push_back({e.from, off[k] + e.to, e.coeff});
            }
            Map aug = Map::graded(*spec.global_module, vx.obj, entries);
            check_unital_entries(aug, "an augmentation map");
            cube.initial_maps.emplace_back(vi, aug);
        }
    }
    // augmented squares commute: through any singleton pair into a 2-vertex
    for (const auto& [v1, aug1] : cube.initial_maps)
        for (const auto& e : cube.edges) {
            if (e.from != v1) continue;
            for (const auto& [v2, aug2] : cube.initial_maps) {
                for (const auto& e2 : cube.edges) {
                    if (e2.from != v2 || e2.to != e.to) continue;
                    Map p1 = compose(e.map, aug1);
                    Map p2 = compose(e2.map, aug2);
                    const Window* w = spec.window ? &*spec.window : nullptr;
                    if (!maps_equal(p1, p2, w))
                        throw std::invalid_argument("adelic cube: augmented square does not commute");
                }
            }
        }
    return cube;
}

bool check_collapse(const AdelicSpec& spec) {
    const Window* w = spec.window ? &*spec.window : nullptr;
    std::size_t top = spec.dims.poset_dim;
    for (std::size_t s = 0; s <= top; ++s)
        for (const AdelicIndex& ix : adelic_indices(spec, s)) {
            Module v = adelic_value(spec, ix);
            Module collapsed =
                spec.loc.of(ix.flag.vertices.front())
                    .apply(spec.coeff.value[ix.flag.vertices.back()])
                    .first;
            if (!modules_isomorphic(v, collapsed, w)) return false;
        }
    return true;
}

}  // namespace adelica
