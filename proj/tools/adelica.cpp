#include <fstream>
#include <random>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "adelica/io.hpp"

using namespace adelica;

namespace {

// exit codes: 2 parse, 3 schema, 4 precision, 5 stabilization, 1 other
struct CliFailure {
    int code;
    std::string kind;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CliFailure{3, "schema", "cannot open `" + path + "`"};
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct SpecBundle {
    AdelicSpec spec;
    ParsedInstance inst;
};

SpecBundle build_spec(const std::string& path, const std::string& window_arg,
                      const std::string& variant_arg, const std::string& policy_arg,
                      long precision_arg) {
    ParsedInstance inst;
    try {
        inst = load_instance(read_file(path));
    } catch (const ParseError& e) {
        throw CliFailure{2, "parse", e.what()};
    } catch (const SchemaError& e) {
        throw CliFailure{3, "schema", e.what()};
    }
    if (!variant_arg.empty()) {
        if (inst.kind != InstanceKind::NumberRing)
            throw CliFailure{3, "schema", "--variant applies to number-ring instances"};
        if (variant_arg == "L,LambdaM")
            inst.hasse.variant = HasseVariant::L_LambdaM;
        else if (variant_arg == "L,Lambda'M")
            inst.hasse.variant = HasseVariant::L_LambdaPrimeM;
        else if (variant_arg == "LambdaL,M")
            inst.hasse.variant = HasseVariant::LambdaL_M;
        else
            throw CliFailure{3, "schema", "unknown variant `" + variant_arg + "`"};
    }
    if (!policy_arg.empty()) {
        if (policy_arg == "specializations")
            inst.hasse.policy = ProductPolicy::Specializations;
        else if (policy_arg == "all-closed-points")
            inst.hasse.policy = ProductPolicy::AllClosedPoints;
        else
            throw CliFailure{3, "schema", "unknown policy `" + policy_arg + "`"};
    }
    if (precision_arg > 0) inst.hasse.precision = precision_arg;
    try {
        if (!window_arg.empty()) {
            std::size_t nvars = inst.kind == InstanceKind::Polynomial ? inst.ideal.nvars : 1;
            inst.window = parse_window_arg(window_arg, nvars);
            if (inst.kind == InstanceKind::Torus) inst.torus.window = *inst.window;
        }
    } catch (const SchemaError& e) {
        throw CliFailure{3, "schema", e.what()};
    }
    SpecBundle b;
    b.inst = inst;
    try {
        switch (inst.kind) {
            case InstanceKind::NumberRing: b.spec = hasse_spec(inst.hasse); break;
            case InstanceKind::Polynomial:
                if (!inst.window) throw SchemaError("polynomial instance needs a window");
                b.spec = koszul_spec(inst.ideal, inst.koszul_variant, *inst.window);
                break;
            case InstanceKind::Torus: b.spec = torus_rank1_spec(inst.torus); break;
        }
    } catch (const SchemaError& e) {
        throw CliFailure{3, "schema", e.what()};
    } catch (const std::invalid_argument& e) {
        throw CliFailure{3, "assembly", e.what()};
    }
    return b;
}

int cmd_cohomology(const std::string& path, const std::string& window_arg,
                   const std::string& variant_arg, const std::string& policy_arg,
                   long precision_arg, const std::string& format) {
    SpecBundle b = build_spec(path, window_arg, variant_arg, policy_arg, precision_arg);
    CohomologyTable t;
    try {
        t = adelic_cohomology(b.spec);
    } catch (const InsufficientPrecision& e) {
        throw CliFailure{4, "precision", e.what()};
    } catch (const std::invalid_argument& e) {
        std::string w = e.what();
        if (w.find("stabilize") != std::string::npos) throw CliFailure{5, "stabilization", w};
        throw CliFailure{1, "assembly", w};
    }
    if (format == "json")
        std::cout << table_to_json(t).dump(2) << "\n";
    else if (format == "csv")
        std::cout << table_to_csv(t);
    else
        std::cout << table_to_pretty(t);
    return 0;
}

int cmd_dump(const std::string& path, const std::string& window_arg, const std::string& variant_arg,
             const std::string& policy_arg, long precision_arg) {
    SpecBundle b = build_spec(path, window_arg, variant_arg, policy_arg, precision_arg);
    try {
        CubeDiagram cube = b.spec.global_module ? build_adelic_cube(b.spec)
                                                : decompose_by_dimension(b.spec);
        std::cout << cube_to_json(cube).dump(2) << "\n";
    } catch (const std::invalid_argument& e) {
        throw CliFailure{1, "assembly", e.what()};
    }
    return 0;
}

int cmd_split(const std::vector<std::string>& components, long precision) {
    std::vector<ZZ> primes;
    std::map<ZZ, PAdic> target;
    std::map<ZZ, QQ> rationals;
    for (const std::string& spec : components) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw CliFailure{3, "schema", "component needs `p=value`, got `" + spec + "`"};
        ZZ p;
        try {
            p = ZZ(spec.substr(0, eq));
        } catch (...) {
            throw CliFailure{3, "schema", "bad prime in `" + spec + "`"};
        }
        auto q = parse_rational(spec.substr(eq + 1));
        if (!q) throw CliFailure{3, "schema", "bad rational in `" + spec + "`"};
        primes.push_back(p);
        rationals[p] = *q;
        target[p] = PAdic::from_rational(*q, p, precision);
    }
    if (primes.empty()) throw CliFailure{3, "schema", "no components given"};
    AdelicSplit s;
    try {
        s = adelic_split(primes, target);
    } catch (const InsufficientPrecision& e) {
        throw CliFailure{4, "precision", e.what()};
    }
    nlohmann::json out;
    out["q"] = rational_str(s.principal);
    nlohmann::json parts = nlohmann::json::object();
    for (auto& [p, a] : s.integral) parts[p.get_str()] = a.str();
    out["integral"] = parts;
    out["roundtrip"] = adelic_split_roundtrip(primes, rationals, precision);
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct CheckOutcome {
    int passed = 0, failed = 0;
    void report(const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        (ok ? passed : failed) += 1;
    }
};

int cmd_check(const std::string& suite, unsigned seed, std::size_t max_vertices,
              const std::string& instance_path, long precision) {
    CheckOutcome oc;
    if (suite == "delta-squared") {
        for (unsigned i = 0; i < 20; ++i) {
            Poset p = random_catenary_poset(seed + i, 10, 3);
            for (InversionKind kind :
                 {InversionKind::Identity, InversionKind::Inversion, InversionKind::Mixed}) {
                AdelicSpec spec = random_inversion_spec(p, seed + i, kind, Window({-2}, {2}));
                bool ok = check_complex(adelic_complex(spec));
                oc.report("delta-squared.poset" + std::to_string(i) + ".kind" +
                              std::to_string(static_cast<int>(kind)),
                          ok);
            }
        }
    } else if (suite == "subdivision") {
        Module q = Module::graded(0, {GradedPiece::point(0, {})});
        Window w({}, {});
        auto idloc = [](const std::vector<std::size_t>&) { return identity_localization(); };
        for (unsigned i = 0; i < 8; ++i) {
            SimplicialComplex k = random_simplicial_complex(seed + i, std::min<std::size_t>(max_vertices, 5));
            SubdivisionComparison cmp = subdivision_compare(k, q, idloc, w);
            oc.report("subdivision.seed" + std::to_string(seed + i), cmp.equal);
        }
    } else if (suite == "absorbative") {
        if (instance_path.empty()) throw CliFailure{3, "schema", "absorbative needs --instance"};
        ParsedInstance inst;
        try {
            inst = load_instance(read_file(instance_path));
        } catch (const ParseError& e) {
            throw CliFailure{2, "parse", e.what()};
        }
        if (inst.kind != InstanceKind::NumberRing)
            throw CliFailure{3, "schema", "absorbative runs on number-ring instances"};
        AdelicSpec spec = hasse_spec(inst.hasse);
        std::vector<Module> samples;
        for (unsigned i = 0; i < 10; ++i) samples.push_back(random_fg_module(seed + i, inst.hasse.primes));
        // localization side
        LocalizationSystem lsys;
        lsys.poset = spec.poset;
        lsys.at.resize(spec.poset.size());
        LocalizationSystem csys = lsys;
        std::size_t generic = spec.poset.index("(0)");
        lsys.at[generic] = arith_localization(ArithFunctorKind::Rationalize);
        csys.at[generic] = identity_localization();
        for (const ZZ& p : inst.hasse.primes) {
            std::size_t e = spec.poset.index("(" + p.get_str() + ")");
            lsys.at[e] = arith_localization(ArithFunctorKind::LocalizeAt, p);
            csys.at[e] = arith_localization(ArithFunctorKind::CompleteAt, p);
        }
        oc.report("absorbative.localization-left",
                  check_absorbative(lsys, AbsorbSide::Left, samples).ok);
        oc.report("absorbative.completion-right",
                  check_absorbative(csys, AbsorbSide::Right, samples).ok);
    } else if (suite == "radical") {
        MonomialIdeal a{2, {{1, 0}, {0, 1}}};
        MonomialIdeal b{2, {{2, 0}, {0, 1}, {1, 1}}};
        Window w = parse_window_arg("-6..2", 2);
        bool ok = koszul_local_cohomology(a, KoszulVariant::Local, w) ==
                  koszul_local_cohomology(b, KoszulVariant::Local, w);
        oc.report("radical.xy-vs-x2-y-xy", ok);
    } else if (suite == "split-roundtrip") {
        std::vector<ZZ> primes = {ZZ(2), ZZ(3)};
        std::minstd_rand rng(seed * 31 + 5);
        for (unsigned i = 0; i < 25; ++i) {
            std::map<ZZ, QQ> target;
            for (const ZZ& p : primes) {
                long num = static_cast<long>(rng() % 2000) - 1000;
                long dexp = static_cast<long>(rng() % 6);
                ZZ den = 1;
                for (long k = 0; k < dexp; ++k) den *= p;
                QQ q(num, den);
                q.canonicalize();
                target[p] = q;
            }
            oc.report("split-roundtrip.seed" + std::to_string(seed + i),
                      adelic_split_roundtrip(primes, target, precision > 0 ? precision : 32));
        }
    } else {
        throw CliFailure{3, "schema", "unknown suite `" + suite + "`"};
    }
    std::cout << "passed " << oc.passed << ", failed " << oc.failed << "\n";
    return oc.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adelic cochain complexes of finite posets: exact cohomology engine"};
    app.require_subcommand(1);

    std::string instance, window, variant, policy, format = "pretty", suite;
    long precision = 0;
    unsigned seed = 1;
    std::size_t max_vertices = 5;
    std::vector<std::string> components;

    auto* coh = app.add_subcommand("cohomology", "compute the cohomology table of an instance");
    coh->add_option("--instance", instance, "instance file")->required();
    coh->add_option("--window", window, "multidegree window, e.g. -6..2 or -6..2,-6..2");
    coh->add_option("--variant", variant, "number-ring variant override");
    coh->add_option("--policy", policy, "product policy override");
    coh->add_option("--precision", precision, "p-adic precision override");
    coh->add_option("--format", format, "json | csv | pretty");

    auto* chk = app.add_subcommand("check", "run a deterministic property suite");
    chk->add_option("suite", suite,
                    "delta-squared | subdivision | absorbative | radical | split-roundtrip")
        ->required();
    chk->add_option("--seed", seed, "suite seed");
    chk->add_option("--max-vertices", max_vertices, "vertex bound for complex suites");
    chk->add_option("--instance", instance, "instance file for instance-driven suites");
    chk->add_option("--precision", precision, "p-adic precision");

    auto* dmp = app.add_subcommand("dump", "emit the dimension cube as JSON");
    dmp->add_option("--instance", instance, "instance file")->required();
    dmp->add_option("--window", window, "multidegree window");
    dmp->add_option("--variant", variant, "number-ring variant override");
    dmp->add_option("--policy", policy, "product policy override");
    dmp->add_option("--precision", precision, "p-adic precision override");

    auto* spl = app.add_subcommand("split", "split adelic components into rational + integral parts");
    spl->add_option("components", components, "p=rational component literals")->required();
    spl->add_option("--precision", precision, "p-adic precision (default 32)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (coh->parsed())
            return cmd_cohomology(instance, window, variant, policy, precision, format);
        if (chk->parsed()) return cmd_check(suite, seed, max_vertices, instance, precision);
        if (dmp->parsed()) return cmd_dump(instance, window, variant, policy, precision);
        if (spl->parsed()) return cmd_split(components, precision > 0 ? precision : 32);
    } catch (const CliFailure& f) {
        std::cerr << "error: " << f.kind << ": " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
