#include "adelica/coeff.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace adelica {

// ------------------------------ systems ------------------------------------

Map CoefficientSystem::restrict_map(std::size_t p1, std::size_t p2) const {
    if (p1 == p2) return Map::identity(value[p1]);
    auto it = restriction.find({p1, p2});
    if (it == restriction.end())
        throw std::invalid_argument("coefficient system: missing restriction " +
                                    poset.name(p1) + " -> " + poset.name(p2));
    return it->second;
}

bool maps_equal(const Map& a, const Map& b, const Window* w) {
    if (!(a.dom == b.dom) || !(a.cod == b.cod)) return false;
    if (a.dom.backend == Backend::Abelian) {
        Map d = map_sub(a, b);
        return d.is_zero_map();
    }
    if (!w) throw std::invalid_argument("maps_equal: graded comparison needs a window");
    Map d = map_sub(a, b);
    bool zero = true;
    w->for_each([&](const Multidegree& deg) {
        if (zero && !d.matrix_at(deg).is_zero()) zero = false;
    });
    return zero;
}

void CoefficientSystem::check_functorial(const Window* w) const {
    for (std::size_t p1 = 0; p1 < poset.size(); ++p1)
        for (std::size_t p2 = 0; p2 < poset.size(); ++p2) {
            if (!poset.less(p2, p1)) continue;
            for (std::size_t p3 = 0; p3 < poset.size(); ++p3) {
                if (!poset.less(p3, p2)) continue;
                Map lhs = compose(restrict_map(p2, p3), restrict_map(p1, p2));
                if (!maps_equal(lhs, restrict_map(p1, p3), w))
                    throw std::invalid_argument("coefficient system: functoriality fails on " +
                                                poset.name(p1) + " >= " + poset.name(p2) +
                                                " >= " + poset.name(p3));
            }
        }
}

CoefficientSystem CoefficientSystem::constant(const Poset& poset, const Module& m) {
    CoefficientSystem s;
    s.poset = poset;
    s.value.assign(poset.size(), m);
    for (std::size_t p1 = 0; p1 < poset.size(); ++p1)
        for (std::size_t p2 = 0; p2 < poset.size(); ++p2)
            if (poset.less(p2, p1)) s.restriction[{p1, p2}] = Map::identity(m);
    return s;
}

Map DualCoefficientSystem::structure_map(std::size_t p1, std::size_t p2) const {
    if (p1 == p2) return Map::identity(value[p1]);
    auto it = structure.find({p1, p2});
    if (it == structure.end())
        throw std::invalid_argument("dual coefficient system: missing structure map");
    return it->second;
}

void DualCoefficientSystem::check_functorial(const Window* w) const {
    for (std::size_t p1 = 0; p1 < poset.size(); ++p1)
        for (std::size_t p2 = 0; p2 < poset.size(); ++p2) {
            if (!poset.less(p2, p1)) continue;
            for (std::size_t p3 = 0; p3 < poset.size(); ++p3) {
                if (!poset.less(p3, p2)) continue;
                Map lhs = compose(structure_map(p1, p2), structure_map(p2, p3));
                if (!maps_equal(lhs, structure_map(p1, p3), w))
                    throw std::invalid_argument("dual coefficient system: functoriality fails");
            }
        }
}

FlagSystem induce_on_flags(const CoefficientSystem& sys, StarVariance v) {
    FlagSystem f;
    f.poset = sys.poset;
    if (v == StarVariance::LowerStar) {
        // M_*: first vertex, variance unchanged (contravariant along inclusions)
        f.covariant = false;
        f.value = [sys](const Flag& fl) { return sys.value[fl.vertices.front()]; };
        f.face_map = [sys](const Flag& g, std::size_t i) {
            if (i > 0) return Map::identity(sys.value[g.vertices.front()]);
            return sys.restrict_map(g.vertices[0], g.vertices[1]);
        };
    } else {
        // M^*: last vertex, variance reversed (covariant along inclusions)
        f.covariant = true;
        f.value = [sys](const Flag& fl) { return sys.value[fl.vertices.back()]; };
        f.face_map = [sys](const Flag& g, std::size_t i) {
            if (i + 1 < g.length()) return Map::identity(sys.value[g.vertices.back()]);
            std::size_t s = g.length() - 1;
            return sys.restrict_map(g.vertices[s - 1], g.vertices[s]);
        };
    }
    return f;
}

FlagSystem induce_on_flags(const DualCoefficientSystem& sys, StarVariance v) {
    FlagSystem f;
    f.poset = sys.poset;
    if (v == StarVariance::LowerStar) {
        // N_*: first vertex, covariant along inclusions
        f.covariant = true;
        f.value = [sys](const Flag& fl) { return sys.value[fl.vertices.front()]; };
        f.face_map = [sys](const Flag& g, std::size_t i) {
            if (i > 0) return Map::identity(sys.value[g.vertices.front()]);
            return sys.structure_map(g.vertices[0], g.vertices[1]);
        };
    } else {
        // N^*: last vertex, contravariant along inclusions
        f.covariant = false;
        f.value = [sys](const Flag& fl) { return sys.value[fl.vertices.back()]; };
        f.face_map = [sys](const Flag& g, std::size_t i) {
            if (i + 1 < g.length()) return Map::identity(sys.value[g.vertices.back()]);
            std::size_t s = g.length() - 1;
            return sys.structure_map(g.vertices[s - 1], g.vertices[s]);
        };
    }
    return f;
}

// ---------------------------- localizations --------------------------------

namespace {

class IdentityLoc final : public Localization {
public:
    std::pair<Module, Map> apply(const Module& m) const override {
        return {m, Map::identity(m)};
    }
    Map lift(const Map& f) const override { return f; }
    std::string name() const override { return "id"; }
};

class CompositeLoc final : public Localization {
public:
    CompositeLoc(LocPtr inner, LocPtr outer) : inner_(std::move(inner)), outer_(std::move(outer)) {}
    std::pair<Module, Map> apply(const Module& m) const override {
        auto [im, iu] = inner_->apply(m);
        auto [om, ou] = outer_->apply(im);
        return {om, compose(ou, iu)};
    }
    Map lift(const Map& f) const override { return outer_->lift(inner_->lift(f)); }
    std::string name() const override { return outer_->name() + "." + inner_->name(); }

private:
    LocPtr inner_, outer_;
};

struct GenRewrite {
    bool keep = false;
    AbGen gen;
};

class ArithLoc final : public Localization {
public:
    ArithLoc(ArithFunctorKind kind, ZZ prime) : kind_(kind), p_(std::move(prime)) {}

    GenRewrite rewrite(const AbGen& g) const {
        GenRewrite r;
        if (g.order > 1) {
            if (kind_ == ArithFunctorKind::Rationalize) return r;
            long v = zz_valuation(g.order, p_);
            if (v == 0) return r;
            r.keep = true;
            r.gen = {tag_base(), zz_pow(p_, static_cast<unsigned long>(v))};
            return r;
        }
        const AtomTag& t = g.tag;
        auto keep = [&r](AtomTag nt) {
            r.keep = true;
            r.gen = {nt, 0};
        };
        switch (kind_) {
            case ArithFunctorKind::Rationalize:
                switch (t.kind) {
                    case TagKind::Base:
                    case TagKind::LocalAt:
                    case TagKind::Rat: keep(tag_rat()); break;
                    case TagKind::CompleteAt: keep(tag_ratcomplete(t.prime)); break;
                    case TagKind::RatComplete: keep(t); break;
                }
                break;
            case ArithFunctorKind::LocalizeAt:
                switch (t.kind) {
                    case TagKind::Base: keep(tag_local(p_)); break;
                    case TagKind::LocalAt: keep(t.prime == p_ ? t : tag_rat()); break;
                    case TagKind::Rat: keep(t); break;
                    case TagKind::CompleteAt:
                        keep(t.prime == p_ ? t : tag_ratcomplete(t.prime));
                        break;
                    case TagKind::RatComplete: keep(t); break;
                }
                break;
            case ArithFunctorKind::CompleteAt:
                switch (t.kind) {
                    case TagKind::Base: keep(tag_complete(p_)); break;
                    case TagKind::LocalAt:
                        if (t.prime == p_) keep(tag_complete(p_));
                        break;
                    case TagKind::Rat: break;
                    case TagKind::CompleteAt:
                        if (t.prime == p_) keep(t);
                        break;
                    case TagKind::RatComplete: break;
                }
                break;
        }
        return r;
    }

    std::pair<Module, Map> apply(const Module& m) const override {
        if (m.backend != Backend::Abelian)
            throw std::invalid_argument("arithmetic localization on a graded module");
        std::vector<AbGen> gens;
        std::vector<std::size_t> from;
        for (std::size_t j = 0; j < m.gens.size(); ++j) {
            GenRewrite r = rewrite(m.gens[j]);
            if (r.keep) {
                gens.push_back(r.gen);
                from.push_back(j);
            }
        }
        Module loc = Module::abelian(gens);
        QMat u(loc.gens.size(), m.gens.size());
        for (std::size_t i = 0; i < from.size(); ++i) u(i, from[i]) = 1;
        return {loc, Map::abelian(m, loc, std::move(u))};
    }

    Map lift(const Map& f) const override {
        auto [ld, ud] = apply(f.dom);
        auto [lc, uc] = apply(f.cod);
        std::vector<std::size_t> dkeep, ckeep;
        for (std::size_t j = 0; j < f.dom.gens.size(); ++j)
            if (rewrite(f.dom.gens[j]).keep) dkeep.push_back(j);
        for (std::size_t i = 0; i < f.cod.gens.size(); ++i)
            if (rewrite(f.cod.gens[i]).keep) ckeep.push_back(i);
        QMat m(ckeep.size(), dkeep.size());
        for (std::size_t i = 0; i < ckeep.size(); ++i)
            for (std::size_t j = 0; j < dkeep.size(); ++j) m(i, j) = f.mat(ckeep[i], dkeep[j]);
        return Map::abelian(ld, lc, std::move(m));
    }

    std::string name() const override {
        switch (kind_) {
            case ArithFunctorKind::Rationalize: return "L_(0)";
            case ArithFunctorKind::LocalizeAt: return "L_(" + p_.get_str() + ")";
            case ArithFunctorKind::CompleteAt: return "Lambda_(" + p_.get_str() + ")";
        }
        return "?";
    }

private:
    ArithFunctorKind kind_;
    ZZ p_;
};

// graded localization freeing per-component axis sets
class GradedLoc final : public Localization {
public:
    GradedLoc(std::map<int, Multidegree> support, bool all_components, Multidegree global,
              std::string label)
        : support_(std::move(support)),
          all_(all_components),
          global_(std::move(global)),
          label_(std::move(label)) {}

    // nullopt when the piece is annihilated
    std::optional<GradedPiece> rewrite(const GradedPiece& p) const {
        const Multidegree* sup = nullptr;
        if (all_) {
            sup = &global_;
        } else {
            auto it = support_.find(p.component);
            if (it == support_.end()) return p;
            sup = &it->second;
        }
        GradedPiece q = p;
        for (std::size_t i = 0; i < q.shift.size(); ++i) {
            if ((*sup)[i] <= 0) continue;
            switch (q.mode[i]) {
                case AxisMode::Free: break;
                case AxisMode::Above: q.mode[i] = AxisMode::Free; break;
                case AxisMode::Below:
                case AxisMode::At: return std::nullopt;  // bounded axis: the colimit is zero
            }
        }
        return q;
    }

    std::pair<Module, Map> apply(const Module& m) const override {
        if (m.backend != Backend::Graded)
            throw std::invalid_argument("graded localization on an abelian module");
        std::vector<GradedPiece> ps;
        std::vector<std::size_t> from;
        for (std::size_t j = 0; j < m.pieces.size(); ++j) {
            auto q = rewrite(m.pieces[j]);
            if (q) {
                ps.push_back(*q);
                from.push_back(j);
            }
        }
        Module loc = Module::graded(m.nvars, ps);
        std::vector<GrMapEntry> es;
        for (std::size_t i = 0; i < from.size(); ++i) es.push_back({from[i], i, QQ(1)});
        return {loc, Map::graded(m, loc, es)};
    }

    Map lift(const Map& f) const override {
        auto [ld, ud] = apply(f.dom);
        auto [lc, uc] = apply(f.cod);
        std::vector<long> dnew(f.dom.pieces.size(), -1), cnew(f.cod.pieces.size(), -1);
        {
            std::size_t k = 0;
            for (std::size_t j = 0; j < f.dom.pieces.size(); ++j)
                if (rewrite(f.dom.pieces[j])) dnew[j] = static_cast<long>(k++);
            k = 0;
            for (std::size_t i = 0; i < f.cod.pieces.size(); ++i)
                if (rewrite(f.cod.pieces[i])) cnew[i] = static_cast<long>(k++);
        }
        std::vector<GrMapEntry> es;
        for (const auto& e : f.entries) {
            if (dnew[e.from] < 0) continue;
            if (cnew[e.to] < 0) continue;  // surviving source into annihilated target: zero
            es.push_back({static_cast<std::size_t>(dnew[e.from]),
                          static_cast<std::size_t>(cnew[e.to]), e.coeff});
        }
        return Map::graded(ld, lc, es);
    }

    std::string name() const override { return label_; }

private:
    std::map<int, Multidegree> support_;
    bool all_;
    Multidegree global_;
    std::string label_;
};

}  // namespace

LocPtr identity_localization() { return std::make_shared<IdentityLoc>(); }

LocPtr composite_localization(LocPtr inner, LocPtr outer) {
    return std::make_shared<CompositeLoc>(std::move(inner), std::move(outer));
}

LocPtr arith_localization(ArithFunctorKind kind, const ZZ& prime) {
    return std::make_shared<ArithLoc>(kind, prime);
}

LocPtr monomial_inversion(const Multidegree& support) {
    std::ostringstream os;
    os << "inv[";
    for (std::size_t i = 0; i < support.size(); ++i) os << (i ? "," : "") << support[i];
    os << "]";
    return std::make_shared<GradedLoc>(std::map<int, Multidegree>{}, true, support, os.str());
}

LocPtr component_localization(std::map<int, Multidegree> support, std::string label) {
    return std::make_shared<GradedLoc>(std::move(support), false, Multidegree{}, std::move(label));
}

AbsorbReport check_absorbative(const LocalizationSystem& sys, AbsorbSide side,
                               const std::vector<Module>& samples, const Window* w) {
    AbsorbReport rep;
    for (std::size_t p1 = 0; p1 < sys.poset.size(); ++p1)
        for (std::size_t p2 = 0; p2 < sys.poset.size(); ++p2) {
            if (!sys.poset.leq(p2, p1)) continue;
            for (std::size_t si = 0; si < samples.size(); ++si) {
                const Module& x = samples[si];
                auto [a2x, u2] = sys.of(p2).apply(x);
                bool ok = true;
                if (side == AbsorbSide::Left) {
                    Map m = sys.of(p1).lift(u2);  // A1 X -> A1 A2 X
                    ok = map_is_isomorphism(m, w);
                } else {
                    auto [a1a2x, u1] = sys.of(p1).apply(a2x);  // A2 X -> A1 A2 X
                    ok = map_is_isomorphism(u1, w);
                }
                if (!ok) {
                    rep.ok = false;
                    if (rep.first_failure.empty()) {
                        std::ostringstream os;
                        os << "pair " << sys.poset.name(p1) << " >= " << sys.poset.name(p2)
                           << " on sample " << si;
                        rep.first_failure = os.str();
                    }
                }
            }
        }
    return rep;
}

// ------------------------- euler localization ------------------------------

const std::vector<EulerGenerator>& EulerClassSystem::gens(std::size_t p1, std::size_t p2) const {
    static const std::vector<EulerGenerator> none;
    auto it = pair_gens.find({p1, p2});
    return it == pair_gens.end() ? none : it->second;
}

namespace {

Multidegree support_union(const std::vector<EulerGenerator>& gens, int component,
                          std::size_t nvars) {
    Multidegree u(nvars, 0);
    for (const auto& g : gens) {
        auto it = g.action.find(component);
        if (it == g.action.end()) continue;
        for (std::size_t i = 0; i < nvars; ++i) u[i] = std::max(u[i], it->second.first[i]);
    }
    return u;
}

bool iso_at(const QMat& m) { return m.rows() == m.cols() && qrank(m) == m.rows(); }

// transition matrix of multiplication by scale*x^g on the pieces, from degree
// a to degree a+g; products escaping a piece's region are zero in the module
QMat mult_matrix(const std::vector<GradedPiece>& pieces, const Multidegree& g, const QQ& scale,
                 const Multidegree& a) {
    Multidegree b = a;
    for (std::size_t i = 0; i < a.size(); ++i) b[i] += g[i];
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].realizable(b)) rows.push_back(i);
        if (pieces[i].realizable(a)) cols.push_back(i);
    }
    QMat m(rows.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (!pieces[cols[c]].realizable(b)) continue;
        auto rit = std::lower_bound(rows.begin(), rows.end(), cols[c]);
        m(static_cast<std::size_t>(rit - rows.begin()), c) = scale;
    }
    return m;
}

}  // namespace

bool EulerClassSystem::check_composition_law() const {
    // on effective supports: the (p0/p2) union must match the union of the
    // (p0/p1) and (p1/p2) contributions, componentwise, for every chain
    for (std::size_t p0 = 0; p0 < poset.size(); ++p0)
        for (std::size_t p1 = 0; p1 < poset.size(); ++p1) {
            if (!poset.leq(p1, p0)) continue;
            for (std::size_t p2 = 0; p2 < poset.size(); ++p2) {
                if (!poset.leq(p2, p1)) continue;
                std::set<int> comps;
                std::size_t nv = 0;
                auto scan = [&](const std::vector<EulerGenerator>& gs) {
                    for (const auto& g : gs)
                        for (auto& [c, a] : g.action) {
                            comps.insert(c);
                            nv = std::max(nv, a.first.size());
                        }
                };
                scan(gens(p0, p2));
                scan(gens(p0, p1));
                scan(gens(p1, p2));
                for (int c : comps) {
                    Multidegree whole = support_union(gens(p0, p2), c, nv);
                    Multidegree left = support_union(gens(p0, p1), c, nv);
                    Multidegree right = support_union(gens(p1, p2), c, nv);
                    for (std::size_t i = 0; i < nv; ++i) {
                        bool whole_pos = whole[i] > 0;
                        bool split_pos = left[i] > 0 || right[i] > 0;
                        if (whole_pos != split_pos) return false;
                    }
                }
            }
        }
    return true;
}

GradedLocalizeResult euler_localize_graded(const Module& m,
                                           const std::vector<EulerGenerator>& gens,
                                           const Window& w) {
    if (m.backend != Backend::Graded)
        throw std::invalid_argument("euler_localize_graded: graded module required");
    GradedLocalizeResult out;
    // closed form: per component, free the union of acting supports
    std::map<int, Multidegree> per_comp;
    std::set<int> comps;
    for (const auto& p : m.pieces) comps.insert(p.component);
    for (int c : comps) {
        Multidegree u = support_union(gens, c, m.nvars);
        bool any = false;
        for (int x : u) any |= (x > 0);
        if (any) per_comp[c] = u;
    }
    auto loc = component_localization(per_comp, "euler");
    auto applied = loc->apply(m);
    out.module = applied.first;
    out.unit = applied.second;

    // verify stabilization degreewise, per component, cycling the generators
    for (int c : comps) {
        std::vector<GradedPiece> pieces, locpieces;
        for (const auto& p : m.pieces)
            if (p.component == c) pieces.push_back(p);
        for (const auto& p : out.module.pieces)
            if (p.component == c) locpieces.push_back(p);
        long span = 8;
        for (const auto& p : pieces)
            for (std::size_t i = 0; i < p.shift.size(); ++i)
                span += std::abs(p.shift[i]) + std::abs(w.lo[i]) + std::abs(w.hi[i]);
        std::size_t max_stage =
            static_cast<std::size_t>(span) * std::max<std::size_t>(gens.size(), 1) + 8;

        w.for_each([&](const Multidegree& d) {
            if (gens.empty()) {
                out.certificate[d] = 0;
                return;
            }
            Multidegree cur = d;
            std::size_t consecutive = 0, stage = 0, certified_at = 0;
            while (consecutive < gens.size()) {
                const EulerGenerator& g = gens[stage % gens.size()];
                Multidegree shift(m.nvars, 0);
                QQ scale(1);
                auto it = g.action.find(c);
                if (it != g.action.end()) {
                    shift = it->second.first;
                    scale = it->second.second;
                }
                QMat t = mult_matrix(pieces, shift, scale, cur);
                if (iso_at(t)) {
                    if (consecutive == 0) certified_at = stage;
                    ++consecutive;
                } else {
                    consecutive = 0;
                }
                for (std::size_t i = 0; i < cur.size(); ++i) cur[i] += shift[i];
                ++stage;
                if (stage > max_stage)
                    throw std::invalid_argument(
                        "euler_localize: directed system does not stabilize at a window degree "
                        "of component " +
                        std::to_string(c));
            }
            // cross-check the stable value against the closed form
            int stable_dim = 0;
            for (const auto& p : pieces) stable_dim += p.realizable(cur) ? 1 : 0;
            int closed_dim = 0;
            for (const auto& p : locpieces) closed_dim += p.realizable(d) ? 1 : 0;
            if (stable_dim != closed_dim)
                throw std::logic_error("euler_localize: stable stage disagrees with closed form");
            auto itc = out.certificate.find(d);
            std::size_t prev = itc == out.certificate.end() ? 0 : itc->second;
            out.certificate[d] = std::max(prev, certified_at);
        });
    }
    return out;
}

AbelianLocalizeResult euler_localize_abelian(const Module& m, const std::vector<ZZ>& gens) {
    if (m.backend != Backend::Abelian)
        throw std::invalid_argument("euler_localize_abelian: abelian module required");
    AbelianLocalizeResult out;
    std::vector<AbGen> ngens;
    std::vector<std::size_t> from;
    std::size_t stage = 0;
    for (std::size_t j = 0; j < m.gens.size(); ++j) {
        AbGen g = m.gens[j];
        if (g.order == 0) {
            for (const ZZ& a : gens)
                if (a != 1 && a != -1)
                    throw std::invalid_argument(
                        "euler_localize: non-stabilizing on a free generator (multiplier " +
                        a.get_str() + ")");
            ngens.push_back(g);
            from.push_back(j);
            continue;
        }
        ZZ order = g.order;
        for (const ZZ& a : gens) {
            std::size_t steps = 0;
            while (true) {
                ZZ d = zz_gcd(order, a);
                if (d == 1) break;
                order /= d;
                ++steps;
            }
            stage = std::max(stage, steps);
        }
        if (order > 1) {
            ngens.push_back({g.tag, order});
            from.push_back(j);
        }
    }
    out.module = Module::abelian(ngens);
    QMat u(out.module.gens.size(), m.gens.size());
    for (std::size_t i = 0; i < from.size(); ++i) u(i, from[i]) = 1;
    out.unit = Map::abelian(m, out.module, std::move(u));
    out.certificate = stage;
    return out;
}

// ------------------------- restricted products -----------------------------

RestrictedProduct RestrictedProduct::finite(std::vector<Module> components) {
    RestrictedProduct rp;
    rp.exceptional = std::move(components);
    rp.has_tail = false;
    if (!rp.exceptional.empty()) {
        rp.tail_component = Module::graded(rp.exceptional.front().nvars, {});
        rp.tail_sub = rp.tail_component;
    }
    return rp;
}

RestrictedProduct RestrictedProduct::with_tail(std::vector<Module> exceptional,
                                               Module tail_component, Module tail_sub) {
    RestrictedProduct rp;
    rp.exceptional = std::move(exceptional);
    rp.has_tail = true;
    for (const auto& p : tail_sub.pieces) {
        bool inside = false;
        for (const auto& q : tail_component.pieces)
            if (p.region_subset_of(q)) inside = true;
        if (!inside)
            throw std::invalid_argument("restricted product: tail sub not inside the template");
    }
    rp.tail_component = std::move(tail_component);
    rp.tail_sub = std::move(tail_sub);
    return rp;
}

Module localize_module_by_support(const Module& m, const Multidegree& support) {
    auto loc = monomial_inversion(support);
    return loc->apply(m).first;
}

std::vector<GradedPiece> piece_quotient(const GradedPiece& original, const GradedPiece& localized) {
    std::vector<std::size_t> freed;
    for (std::size_t i = 0; i < original.shift.size(); ++i) {
        if (original.mode[i] == localized.mode[i]) continue;
        if (original.mode[i] == AxisMode::Above && localized.mode[i] == AxisMode::Free)
            freed.push_back(i);
        else
            throw std::invalid_argument("piece_quotient: unsupported localization shape");
    }
    // region difference of a product region: peel one freed axis at a time
    std::vector<GradedPiece> out;
    for (std::size_t k = 0; k < freed.size(); ++k) {
        GradedPiece q = original;
        for (std::size_t j = 0; j < freed.size(); ++j) {
            if (j < k)
                q.mode[freed[j]] = AxisMode::Above;
            else if (j == k)
                q.mode[freed[j]] = AxisMode::Below;
            else
                q.mode[freed[j]] = AxisMode::Free;
        }
        out.push_back(q);
    }
    return out;
}

Module module_quotient_of_localization(const Module& original, const Module& localized) {
    if (original.pieces.size() != localized.pieces.size())
        throw std::invalid_argument(
            "module_quotient_of_localization: annihilated pieces violate torsion-freeness");
    std::vector<GradedPiece> qs;
    for (std::size_t i = 0; i < original.pieces.size(); ++i) {
        auto part = piece_quotient(original.pieces[i], localized.pieces[i]);
        qs.insert(qs.end(), part.begin(), part.end());
    }
    return Module::graded(original.nvars, qs);
}

ProductLocalizeResult localize_product(const RestrictedProduct& rp, const EulerFamily& fam,
                                       const Window& w) {
    if (fam.exceptional_support.size() != rp.exceptional.size())
        throw std::invalid_argument("localize_product: undeclared component factorization");
    ProductLocalizeResult out;
    RestrictedProduct loc = rp;
    for (std::size_t i = 0; i < rp.exceptional.size(); ++i) {
        std::vector<EulerGenerator> local_gens;
        int comp = rp.exceptional[i].pieces.empty() ? 0
                                                    : rp.exceptional[i].pieces.front().component;
        for (const auto& e : fam.elements) {
            auto it = e.action.find(static_cast<int>(i));
            if (it != e.action.end()) {
                EulerGenerator g;
                g.label = e.label;
                g.action[comp] = it->second;
                local_gens.push_back(g);
            }
        }
        if (local_gens.empty()) {
            bool any = false;
            for (int x : fam.exceptional_support[i]) any |= (x > 0);
            if (any) {
                EulerGenerator g;
                g.label = "union";
                g.action[comp] = {fam.exceptional_support[i], QQ(1)};
                local_gens.push_back(g);
            }
        }
        GradedLocalizeResult r = euler_localize_graded(rp.exceptional[i], local_gens, w);
        loc.exceptional[i] = r.module;
        for (auto& [d, s] : r.certificate) {
            auto it = out.certificate.find(d);
            out.certificate[d] = std::max(it == out.certificate.end() ? 0 : it->second, s);
        }
    }
    if (rp.has_tail) {
        bool any = false;
        for (int x : fam.tail_support) any |= (x > 0);
        if (any) {
            std::vector<EulerGenerator> tg(1);
            tg[0].label = "tail-union";
            int comp = rp.tail_component.pieces.empty()
                           ? 0
                           : rp.tail_component.pieces.front().component;
            tg[0].action[comp] = {fam.tail_support, QQ(1)};
            GradedLocalizeResult r = euler_localize_graded(rp.tail_component, tg, w);
            loc.tail_component = r.module;
            // elements stay a.e. inside the original sub-template since each
            // family element is a unit on all but finitely many indices
        }
    }
    out.product = std::move(loc);
    return out;
}

namespace {

bool multiplication_injective_in_window(const Module& m, const Multidegree& g, const Window& w) {
    bool ok = true;
    w.for_each([&](const Multidegree& d) {
        if (!ok) return;
        QMat t = mult_matrix(m.pieces, g, QQ(1), d);
        if (qrank(t) != t.cols()) ok = false;
    });
    return ok;
}

}  // namespace

SumVsProductResult sum_vs_product_cokernel(const RestrictedProduct& rp, const EulerFamily& fam,
                                           const Window& w) {
    SumVsProductResult out;
    out.cokernel_tail = Module::graded(rp.tail_component.nvars, {});
    // hypothesis: every component E-torsion free, checked degreewise in window
    for (std::size_t i = 0; i < rp.exceptional.size(); ++i) {
        for (const auto& e : fam.elements) {
            auto it = e.action.find(static_cast<int>(i));
            if (it == e.action.end()) continue;
            if (!multiplication_injective_in_window(rp.exceptional[i], it->second.first, w)) {
                out.torsion_free = false;
                out.failure = "component " + std::to_string(i) +
                              " has E-torsion in the window (element " + e.label + ")";
                return out;
            }
        }
    }
    if (rp.has_tail) {
        bool any = false;
        for (int x : fam.tail_support) any |= (x > 0);
        if (any && !multiplication_injective_in_window(rp.tail_component, fam.tail_support, w)) {
            out.torsion_free = false;
            out.failure = "tail template has E-torsion in the window";
            return out;
        }
    }
    ProductLocalizeResult loc = localize_product(rp, fam, w);
    // common cokernel: componentwise quotients; the product-side cokernel is
    // supported almost everywhere in (tail template)/(tail template) = 0, so it
    // is the same direct sum as the sum-side cokernel.
    for (std::size_t i = 0; i < rp.exceptional.size(); ++i)
        out.cokernel_components.push_back(
            module_quotient_of_localization(rp.exceptional[i], loc.product.exceptional[i]));
    if (rp.has_tail)
        out.cokernel_tail =
            module_quotient_of_localization(rp.tail_component, loc.product.tail_component);
    out.iso_on_cohomology = true;
    return out;
}

std::vector<Module> truncate_components(const RestrictedProduct& rp, std::size_t n) {
    std::vector<Module> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < rp.exceptional.size())
            out.push_back(rp.exceptional[i]);
        else if (rp.has_tail)
            out.push_back(rp.tail_component);
        else
            break;
    }
    return out;
}

std::vector<std::map<Multidegree, int>> truncated_square_cokernel_dims(
    const RestrictedProduct& rp, const EulerFamily& fam, std::size_t n, const Window& w) {
    std::vector<Module> comps = truncate_components(rp, n);
    std::vector<std::map<Multidegree, int>> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        Multidegree sup =
            (i < rp.exceptional.size()) ? fam.exceptional_support[i] : fam.tail_support;
        auto loc = monomial_inversion(sup);
        auto applied = loc->apply(comps[i]);
        std::map<Multidegree, int> dims;
        w.for_each([&](const Multidegree& d) {
            int c = applied.first.dim_at(d) - static_cast<int>(qrank(applied.second.matrix_at(d)));
            if (c > 0) dims[d] = c;
        });
        out.push_back(dims);
    }
    return out;
}

std::map<Multidegree, int> IteratedCokernelResult::dims_in_window(const Window& w) const {
    std::map<Multidegree, int> dims;
    w.for_each([&](const Multidegree& d) {
        int n = 0;
        for (const auto& m : summands) n += m.dim_at(d);
        if (n > 0) dims[d] = n;
    });
    return dims;
}

IteratedCokernelResult iterated_cokernel(
    const Poset& poset, std::size_t top, std::size_t depth,
    const std::function<Module(std::size_t)>& module_at,
    const std::function<Multidegree(std::size_t, std::size_t)>& pair_support, const Window& w) {
    (void)w;
    IteratedCokernelResult out;
    // descending chains top > k0 > ... > k_depth
    std::vector<std::vector<std::size_t>> chains = {{top}};
    for (std::size_t level = 0; level <= depth; ++level) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& ch : chains)
            for (std::size_t q : poset.strictly_below(ch.back())) {
                auto e = ch;
                e.push_back(q);
                next.push_back(e);
            }
        chains = std::move(next);
    }
    for (const auto& ch : chains) {
        std::size_t bottom = ch.back();
        Module m = module_at(bottom);
        Module loc = localize_module_by_support(m, pair_support(top, bottom));
        out.summands.push_back(module_quotient_of_localization(m, loc));
    }
    return out;
}

}  // namespace adelica
