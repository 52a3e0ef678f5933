#include "adelica/io.hpp"

#include <sstream>

namespace adelica {

using nlohmann::json;

std::map<std::string, json> parse_instance_text(const std::string& text) {
    std::map<std::string, json> doc;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    bool format_seen = false;
    while (std::getline(is, line)) {
        ++ln;
        std::string s = line;
        auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        auto trim = [](std::string t) {
            std::size_t a = t.find_first_not_of(" \t\r");
            std::size_t b = t.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
        };
        s = trim(s);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(ln, "expected `key = value`");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError(ln, "empty key");
        json v = json::parse(value, nullptr, false);
        if (v.is_discarded()) throw ParseError(ln, "value of `" + key + "` is not valid JSON");
        if (doc.count(key)) throw ParseError(ln, "duplicate key `" + key + "`");
        if (key == "format") {
            if (!(v.is_number_integer() && v.get<long>() == 1))
                throw ParseError(ln, "unsupported format (expected 1)");
            format_seen = true;
        }
        doc[key] = v;
    }
    if (!format_seen) throw ParseError(0, "missing `format = 1` header");
    return doc;
}

Multidegree parse_monomial(const std::string& s, const std::vector<std::string>& vars) {
    Multidegree d(vars.size(), 0);
    std::string t;
    std::vector<std::string> factors;
    for (char c : s) {
        if (c == '*') {
            factors.push_back(t);
            t.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            t += c;
        }
    }
    if (!t.empty()) factors.push_back(t);
    for (const std::string& f : factors) {
        auto caret = f.find('^');
        std::string var = caret == std::string::npos ? f : f.substr(0, caret);
        long e = 1;
        if (caret != std::string::npos) {
            try {
                e = std::stol(f.substr(caret + 1));
            } catch (...) {
                throw SchemaError("bad exponent in monomial `" + s + "`");
            }
        }
        auto it = std::find(vars.begin(), vars.end(), var);
        if (it == vars.end()) throw SchemaError("unknown variable `" + var + "` in monomial");
        if (e < 0) throw SchemaError("negative exponent in monomial `" + s + "`");
        d[static_cast<std::size_t>(it - vars.begin())] += static_cast<int>(e);
    }
    return d;
}

Window parse_window_arg(const std::string& s, std::size_t nvars) {
    std::vector<std::pair<int, int>> ranges;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, ',')) {
        auto dots = part.find("..");
        if (dots == std::string::npos) throw SchemaError("window range needs `lo..hi`");
        try {
            int lo = std::stoi(part.substr(0, dots));
            int hi = std::stoi(part.substr(dots + 2));
            ranges.emplace_back(lo, hi);
        } catch (const SchemaError&) {
            throw;
        } catch (...) {
            throw SchemaError("bad window range `" + part + "`");
        }
    }
    if (ranges.empty()) throw SchemaError("empty window");
    if (ranges.size() == 1 && nvars > 1) ranges.assign(nvars, ranges[0]);
    if (ranges.size() != nvars) throw SchemaError("window axis count mismatch");
    Multidegree lo, hi;
    for (auto& [a, b] : ranges) {
        if (a > b) throw SchemaError("window lo > hi");
        lo.push_back(a);
        hi.push_back(b);
    }
    return Window(lo, hi);
}

namespace {

Window window_from_json(const json& v, std::size_t nvars) {
    // either [[lo...],[hi...]] or [lo, hi] applied to all axes
    if (!v.is_array() || v.size() != 2) throw SchemaError("window must be [lo, hi]");
    if (v[0].is_array()) {
        Multidegree lo, hi;
        for (auto& x : v[0]) lo.push_back(x.get<int>());
        for (auto& x : v[1]) hi.push_back(x.get<int>());
        if (lo.size() != nvars || hi.size() != nvars)
            throw SchemaError("window axis count mismatch");
        return Window(lo, hi);
    }
    Multidegree lo(nvars, v[0].get<int>()), hi(nvars, v[1].get<int>());
    return Window(lo, hi);
}

}  // namespace

ParsedInstance load_instance(const std::string& text) {
    auto doc = parse_instance_text(text);
    ParsedInstance out;
    if (!doc.count("kind")) throw SchemaError("missing `kind`");
    std::string kind = doc["kind"].get<std::string>();
    if (kind == "number-ring") {
        out.kind = InstanceKind::NumberRing;
        if (!doc.count("primes")) throw SchemaError("number-ring: missing `primes`");
        for (auto& p : doc["primes"]) {
            long v = p.get<long>();
            if (v < 2) throw SchemaError("number-ring: primes must be >= 2");
            out.hasse.primes.push_back(ZZ(v));
        }
        if (out.hasse.primes.empty()) throw SchemaError("number-ring: empty prime set");
        if (!doc.count("module")) throw SchemaError("number-ring: missing `module`");
        const json& m = doc["module"];
        if (!m.is_object() || !m.count("generators"))
            throw SchemaError("number-ring: module needs {generators, relations}");
        std::size_t gens = m["generators"].get<std::size_t>();
        std::vector<std::vector<long>> rows;
        if (m.count("relations"))
            for (auto& r : m["relations"]) {
                if (r.size() != gens) throw SchemaError("number-ring: relation length mismatch");
                rows.push_back(r.get<std::vector<long>>());
            }
        out.hasse.presentation = ZMat(rows.size(), gens);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < gens; ++j) out.hasse.presentation(i, j) = rows[i][j];
        if (doc.count("variant")) {
            std::string v = doc["variant"].get<std::string>();
            if (v == "L,LambdaM")
                out.hasse.variant = HasseVariant::L_LambdaM;
            else if (v == "L,Lambda'M")
                out.hasse.variant = HasseVariant::L_LambdaPrimeM;
            else if (v == "LambdaL,M")
                out.hasse.variant = HasseVariant::LambdaL_M;
            else
                throw SchemaError("unknown variant `" + v + "`");
        }
        if (doc.count("policy")) {
            std::string v = doc["policy"].get<std::string>();
            if (v == "specializations")
                out.hasse.policy = ProductPolicy::Specializations;
            else if (v == "all-closed-points")
                out.hasse.policy = ProductPolicy::AllClosedPoints;
            else
                throw SchemaError("unknown policy `" + v + "`");
        }
        if (doc.count("precision")) {
            out.hasse.precision = doc["precision"].get<long>();
            if (out.hasse.precision < 1) throw SchemaError("precision must be >= 1");
        }
    } else if (kind == "polynomial") {
        out.kind = InstanceKind::Polynomial;
        if (!doc.count("vars")) throw SchemaError("polynomial: missing `vars`");
        std::vector<std::string> vars = doc["vars"].get<std::vector<std::string>>();
        out.ideal.nvars = vars.size();
        if (!doc.count("generators")) throw SchemaError("polynomial: missing `generators`");
        for (auto& g : doc["generators"])
            out.ideal.generators.push_back(parse_monomial(g.get<std::string>(), vars));
        if (out.ideal.generators.empty()) throw SchemaError("polynomial: empty generator set");
        if (doc.count("module") && doc["module"].get<std::string>() != "free")
            throw SchemaError("polynomial: only the free rank-one module is supported");
        if (doc.count("complex")) {
            std::string v = doc["complex"].get<std::string>();
            if (v == "local")
                out.koszul_variant = KoszulVariant::Local;
            else if (v == "cech")
                out.koszul_variant = KoszulVariant::Cech;
            else
                throw SchemaError("unknown complex `" + v + "` (local|cech)");
        }
        if (!doc.count("window")) throw SchemaError("polynomial: missing `window`");
        out.window = window_from_json(doc["window"], out.ideal.nvars);
    } else if (kind == "torus-rank1") {
        out.kind = InstanceKind::Torus;
        if (!doc.count("orders")) throw SchemaError("torus-rank1: missing `orders`");
        out.torus.orders = doc["orders"].get<std::vector<long>>();
        if (out.torus.orders.empty()) throw SchemaError("torus-rank1: empty orders");
        {
            auto sorted = out.torus.orders;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw SchemaError("torus-rank1: repeated subgroup order");
        }
        if (!doc.count("window")) throw SchemaError("torus-rank1: missing `window`");
        out.window = window_from_json(doc["window"], 1);
        out.torus.window = *out.window;
    } else {
        throw SchemaError("unknown kind `" + kind + "`");
    }
    return out;
}

namespace {

std::string degree_key(const Multidegree& d) {
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + ")";
}

}  // namespace

json table_to_json(const CohomologyTable& t) {
    json out;
    out["backend"] = t.backend == Backend::Abelian ? "abelian" : "graded";
    json degrees = json::object();
    if (t.backend == Backend::Abelian) {
        for (auto& [deg, info] : t.ab) {
            json e;
            e["rank"] = info.total_rank();
            json tags = json::object();
            for (auto& [tag, n] : info.free) tags[tag.str()] = n;
            e["free"] = tags;
            json tor = json::array();
            for (auto& f : info.torsion) tor.push_back(f.get_str());
            e["torsion"] = tor;
            if (!info.divisible.empty()) {
                json dv = json::object();
                for (auto& [p, n] : info.divisible) dv[p.get_str()] = n;
                e["divisible"] = dv;
            }
            if (info.dense_defects > 0) e["dense_defects"] = info.dense_defects;
            degrees[std::to_string(deg)] = e;
        }
    } else {
        for (auto& [deg, dims] : t.gr) {
            json e = json::object();
            for (auto& [d, n] : dims) e[degree_key(d)] = n;
            degrees[std::to_string(deg)] = e;
        }
    }
    out["degrees"] = degrees;
    return out;
}

std::string table_to_csv(const CohomologyTable& t) {
    std::ostringstream os;
    os << "degree,multidegree,rank,torsion\n";
    if (t.backend == Backend::Abelian) {
        for (auto& [deg, info] : t.ab) {
            std::string tor;
            for (std::size_t i = 0; i < info.torsion.size(); ++i)
                tor += (i ? ";" : "") + info.torsion[i].get_str();
            os << deg << ",," << info.total_rank() << "," << tor << "\n";
        }
    } else {
        for (auto& [deg, dims] : t.gr)
            for (auto& [d, n] : dims) {
                std::string key = degree_key(d);
                os << deg << ",\"" << key << "\"," << n << ",\n";
            }
    }
    return os.str();
}

std::string table_to_pretty(const CohomologyTable& t) { return t.str(); }

json module_to_json(const Module& m) {
    json out;
    if (m.backend == Backend::Abelian) {
        out["backend"] = "abelian";
        json gens = json::array();
        for (const auto& g : m.gens) {
            json e;
            e["tag"] = g.tag.str();
            e["order"] = g.order.get_str();
            gens.push_back(e);
        }
        out["gens"] = gens;
    } else {
        out["backend"] = "graded";
        out["nvars"] = m.nvars;
        json ps = json::array();
        for (const auto& p : m.pieces) {
            json e;
            e["component"] = p.component;
            e["shift"] = p.shift;
            e["step"] = p.step;
            std::string modes;
            for (auto md : p.mode) {
                switch (md) {
                    case AxisMode::Free: modes += "*"; break;
                    case AxisMode::Above: modes += "+"; break;
                    case AxisMode::Below: modes += "-"; break;
                    case AxisMode::At: modes += "."; break;
                }
            }
            e["modes"] = modes;
            ps.push_back(e);
        }
        out["pieces"] = ps;
    }
    return out;
}

json map_to_json(const Map& m) {
    json out;
    if (m.dom.backend == Backend::Abelian) {
        json rows = json::array();
        for (std::size_t i = 0; i < m.mat.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < m.mat.cols(); ++j) row.push_back(rational_str(m.mat(i, j)));
            rows.push_back(row);
        }
        out["matrix"] = rows;
    } else {
        json es = json::array();
        for (const auto& e : m.entries) {
            json x;
            x["from"] = e.from;
            x["to"] = e.to;
            x["coeff"] = rational_str(e.coeff);
            es.push_back(x);
        }
        out["entries"] = es;
    }
    return out;
}

json cube_to_json(const CubeDiagram& cube) {
    json out;
    json vs = json::array();
    for (const auto& v : cube.vertices) {
        json e;
        e["dims"] = v.dv.dims;
        e["object"] = module_to_json(v.obj);
        vs.push_back(e);
    }
    out["vertices"] = vs;
    json es = json::array();
    for (const auto& e : cube.edges) {
        json x;
        x["from"] = e.from;
        x["to"] = e.to;
        x["position"] = e.inserted_pos;
        x["map"] = map_to_json(e.map);
        es.push_back(x);
    }
    out["edges"] = es;
    if (cube.initial_obj) {
        out["initial"] = module_to_json(*cube.initial_obj);
        json am = json::array();
        for (const auto& [v, m] : cube.initial_maps) {
            json x;
            x["to"] = v;
            x["map"] = map_to_json(m);
            am.push_back(x);
        }
        out["initial_maps"] = am;
    }
    return out;
}

}  // namespace adelica
