// linfty: command line driver.  Exit codes: 0 success, 1 mathematical failure,
// 2 input error.

#include "linfty/io.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace linfty;
using io::json;

namespace {

struct Options {
    std::string format = "text";
    std::string out;
    std::string emit;
    double tol = 1e-9;
};

// Aligned key/value rows for the text report, the same data as JSON.
struct Report {
    std::string command;
    bool ok = true;
    json data = json::object();
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::string> blocks;

    explicit Report(std::string c = {}) : command(std::move(c)) {}
    void row(const std::string& k, const std::string& v) { rows.emplace_back(k, v); }
    void fail() { ok = false; }

    std::string text() const {
        std::ostringstream os;
        os << command << ": " << (ok ? "PASS" : "FAIL") << "\n";
        size_t w = 0;
        for (auto& [k, v] : rows) w = std::max(w, k.size());
        for (auto& [k, v] : rows) os << "  " << k << std::string(w - k.size(), ' ') << "  " << v << "\n";
        for (auto& b : blocks) os << b << (b.empty() || b.back() == '\n' ? "" : "\n");
        return os.str();
    }
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string betti_str(const std::map<int, int>& betti) {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : betti) {
        os << (first ? "" : ", ") << "H" << k << "=" << v;
        first = false;
    }
    return first ? "acyclic" : os.str();
}

std::string dims_str(const GradedSpace& s) {
    std::ostringstream os;
    bool first = true;
    for (auto& [d, n] : s.dims()) {
        os << (first ? "" : ", ") << "deg " << d << ": " << n;
        first = false;
    }
    return first ? "0" : os.str();
}

std::string point_str(const std::vector<Q>& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + q_to_string(p[i]);
    return s + ")";
}

// Deterministic sample points for sample-relative checks.
std::vector<std::vector<Q>> default_samples(int n) {
    static const Q vals[] = {Q(0), Q(1), Q(-1), Q(1, 2), Q(2), Q(-3, 2), Q(3)};
    std::vector<std::vector<Q>> r;
    for (int s = 0; s < 6; ++s) {
        std::vector<Q> p(n);
        for (int i = 0; i < n; ++i) p[i] = vals[(s * (i + 1) + i) % 7];
        r.push_back(p);
    }
    return r;
}

struct Located {
    std::vector<std::vector<Q>> points;
    double tol = 0;
    std::string how;
};

// Candidate classical points: --points, or the numeric search with --tol.
Located locate(const LinftyBundle& b, const std::string& points_arg, const Options& o) {
    Located l;
    if (!points_arg.empty()) {
        l.points = io::points_from_string(points_arg, b.base.dim());
        l.how = "supplied";
        return l;
    }
    if (b.base.dim() > 3) throw io::InputError("base dimension > 3: supply --points", "--points");
    LocusSearch opts;
    opts.tol = o.tol;
    bool numeric = false;
    for (auto& p : find_classical_points(b, opts)) {
        l.points.push_back(p.coords);
        numeric |= !p.exact;
    }
    if (numeric) l.tol = o.tol;
    l.how = numeric ? "numeric search (tol " + std::to_string(o.tol) + ")" : "search, exact";
    return l;
}

// Serialise, reparse and rerun the axiom check.
bool emit_model(const LinftyBundle& b, const json& meta, const Options& o, Report& r) {
    std::string text = io::canonical_model(b, meta);
    io::Model back = io::model_from_json(io::parse_json_text(text, "<emitted>"));
    bool valid = back.bundle.validate().empty() && check_mc(back.bundle).ok &&
                 io::canonical_model(back.bundle, back.metadata) == text;
    r.row("re-validates", yes_no(valid));
    r.data["revalidated"] = valid;
    if (!valid) r.fail();
    if (o.format == "json") r.data["model"] = io::model_to_json(b, meta);
    if (!o.emit.empty()) {
        std::ofstream f(o.emit);
        if (!f) throw io::InputError("cannot write file", o.emit);
        f << text;
        r.row("model written to", o.emit);
    }
    return valid;
}

void add_check(Report& r, const std::string& name, const CheckReport& c, const GradedSpace& in,
               const GradedSpace& out, const std::vector<std::string>& coords) {
    r.row(name, c.ok ? "pass" : "FAIL");
    r.data[name] = io::report_to_json(c, in, out, coords);
    if (!c.ok) {
        r.blocks.push_back(name + ":\n" + c.describe(in, out, coords));
        r.fail();
    }
}

void add_weq(Report& r, const std::string& name, const WeakEquivalenceReport& w) {
    r.row(name, w.ok ? "pass" : "FAIL");
    r.row(name + " locus", w.locus_ok ? "bijective on candidates" : "FAIL");
    r.row(name + " etale", w.etale_ok ? "quasi-isomorphic at every candidate" : "FAIL");
    for (auto& e : w.points)
        r.row("  at " + e.point.str(), betti_str(e.src_betti) + " -> " + betti_str(e.dst_betti) +
                                           (e.ok ? "" : "  FAIL " + e.detail));
    for (auto& n : w.notes) r.row("  note", n);
    r.row("scope", w.scope);
    r.data[name] = io::report_to_json(w);
    if (!w.ok) r.fail();
}

void add_fibration(Report& r, const std::string& name, const FibrationReport& f) {
    r.row(name, f.ok ? "pass" : "FAIL");
    r.row(name + " submersion", yes_no(f.submersion_ok));
    r.row(name + " surjective", yes_no(f.surjective_ok));
    r.row(name + " rank certified", yes_no(f.rank_certified));
    for (auto& n : f.notes) r.row("  note", n);
    r.row("scope", f.scope);
    r.data[name] = io::report_to_json(f);
    if (!f.ok) r.fail();
}

std::vector<Poly> identity_base(int m) {
    std::vector<Poly> r;
    for (int i = 0; i < m; ++i) r.push_back(Poly::var(i));
    return r;
}

// ---- commands ----

Report cmd_check_axioms(const std::string& path) {
    Report r{"check-axioms"};
    io::Model m = io::load_model(path);
    const LinftyBundle& b = m.bundle;
    std::string s = b.validate();
    r.row("structure", s.empty() ? "valid" : s);
    r.data["structure"] = s.empty() ? "valid" : s;
    if (!s.empty()) r.fail();
    r.row("base dimension", std::to_string(b.base.dim()));
    r.row("fiber", dims_str(b.fiber));
    r.row("virtual dimension", std::to_string(virtual_dimension(b)));
    r.data["virtual_dimension"] = virtual_dimension(b);
    add_check(r, "maurer_cartan", check_mc(b), b.fiber, b.fiber, b.base.coords);
    return r;
}

Report cmd_check_morphism(const std::string& sp, const std::string& dp, const std::string& mp) {
    Report r{"check-morphism"};
    io::Model src = io::load_model(sp), dst = io::load_model(dp);
    auto mf = io::morphism_from_json(io::read_json_file(mp), src.bundle, dst.bundle);
    add_check(r, "morphism", check_morphism(src.bundle, dst.bundle, mf.morphism), src.bundle.fiber, dst.bundle.fiber,
              src.bundle.base.coords);
    return r;
}

Report cmd_transfer(const std::string& mp, const std::string& cp, const std::string& mode, const Options& o) {
    Report r{"transfer"};
    io::Model m = io::load_model(mp);
    io::ContractionFile c = io::contraction_from_json(io::read_json_file(cp), m.bundle);
    const Contraction& ctr = c.contraction;
    r.row("L", dims_str(ctr.L));
    r.row("H", dims_str(ctr.H));
    auto to_bundle = [&](const Transferred& t) {
        LinftyBundle h(m.bundle.base, ctr.H);
        h.lambda = t.algebra.total();
        h.lambda.prune();
        return h;
    };
    std::optional<Transferred> rec, tree;
    if (mode != "trees") rec = transfer(ctr, c.lambda);
    if (mode != "recursive") tree = transfer_trees(ctr, c.lambda);
    const Transferred& t = rec ? *rec : *tree;
    LinftyBundle H = to_bundle(t);
    if (rec && tree) {
        std::string a = io::canonical_model(to_bundle(*rec)) + io::canonical_dump(io::ops_to_json(rec->phi, m.bundle.base.coords));
        std::string b = io::canonical_model(to_bundle(*tree)) + io::canonical_dump(io::ops_to_json(tree->phi, m.bundle.base.coords));
        r.row("recursive == trees", a == b ? "identical" : "DIFFERENT");
        r.data["engines_identical"] = a == b;
        if (a != b) r.fail();
    }
    add_check(r, "transferred_mc", check_mc(H), H.fiber, H.fiber, H.base.coords);
    Morphism phi{identity_base(m.bundle.base.dim()), t.phi};
    add_check(r, "phi_morphism", check_morphism(H, m.bundle, phi), H.fiber, m.bundle.fiber, H.base.coords);
    r.data["phi"] = io::ops_to_json(t.phi, m.bundle.base.coords);
    json meta = {{"construction", "transfer"}, {"mode", mode}};
    emit_model(H, meta, o, r);
    if (o.format != "json") r.blocks.push_back("transferred model:\n" + io::canonical_model(H, meta));
    return r;
}

Report cmd_tangent_complex(const std::string& mp, const std::string& pts, const Options& o) {
    Report r{"tangent-complex"};
    io::Model m = io::load_model(mp);
    Located l = locate(m.bundle, pts, o);
    r.row("candidates", std::to_string(l.points.size()) + " (" + l.how + ")");
    int vd = virtual_dimension(m.bundle);
    r.row("virtual dimension", std::to_string(vd));
    r.data["virtual_dimension"] = vd;
    json arr = json::array();
    for (auto& p : l.points) {
        ClassicalPoint P = classical_point(m.bundle, p, l.tol);
        CochainComplex T = tangent_complex(m.bundle, P);
        json e = io::complex_to_json(T);
        e["point"] = P.str();
        arr.push_back(e);
        r.row("at " + P.str(), betti_str(T.betti()) + ", euler " + std::to_string(T.euler()));
        if (T.euler() != vd) r.fail();
    }
    r.data["points"] = arr;
    return r;
}

Report cmd_weak_equiv(const std::string& sp, const std::string& dp, const std::string& mp, const std::string& pts,
                      const std::string& tpts, const Options& o) {
    Report r{"weak-equiv"};
    io::Model src = io::load_model(sp), dst = io::load_model(dp);
    auto mf = io::morphism_from_json(io::read_json_file(mp), src.bundle, dst.bundle);
    Located a, b;
    if (mf.has_points && pts.empty())
        a.points = mf.points, a.how = "morphism file";
    else
        a = locate(src.bundle, pts, o);
    if (mf.has_target_points && tpts.empty())
        b.points = mf.target_points, b.how = "morphism file";
    else
        b = locate(dst.bundle, tpts, o);
    r.row("source candidates", std::to_string(a.points.size()) + " (" + a.how + ")");
    r.row("target candidates", std::to_string(b.points.size()) + " (" + b.how + ")");
    add_check(r, "morphism", check_morphism(src.bundle, dst.bundle, mf.morphism), src.bundle.fiber, dst.bundle.fiber,
              src.bundle.base.coords);
    add_weq(r, "weak_equivalence",
            is_weak_equivalence(src.bundle, dst.bundle, mf.morphism, a.points, b.points, std::max(a.tol, b.tol)));
    return r;
}

Report cmd_fibration(const std::string& sp, const std::string& dp, const std::string& mp, const std::string& samples) {
    Report r{"fibration"};
    io::Model src = io::load_model(sp), dst = io::load_model(dp);
    auto mf = io::morphism_from_json(io::read_json_file(mp), src.bundle, dst.bundle);
    auto pts = !samples.empty() ? io::points_from_string(samples, src.bundle.base.dim())
               : mf.has_samples ? mf.samples
                                : default_samples(src.bundle.base.dim());
    r.row("samples", std::to_string(pts.size()));
    add_check(r, "morphism", check_morphism(src.bundle, dst.bundle, mf.morphism), src.bundle.fiber, dst.bundle.fiber,
              src.bundle.base.coords);
    add_fibration(r, "fibration", is_fibration(src.bundle, dst.bundle, mf.morphism, pts));
    return r;
}

Report cmd_shifted_tangent(const std::string& mp, const Options& o) {
    Report r{"shifted-tangent"};
    io::Model m = io::load_model(mp);
    ShiftedTangent t = shifted_tangent(m.bundle);
    r.row("fiber", dims_str(t.bundle.fiber));
    r.row("virtual dimension", std::to_string(virtual_dimension(t.bundle)));
    emit_model(t.bundle, {{"construction", "shifted tangent"}}, o, r);
    return r;
}

Report cmd_path_space(const std::string& mp, const Options& o) {
    Report r{"path-space"};
    io::Model m = io::load_model(mp);
    DerivedPathSpace P = derived_path_space(m.bundle);
    r.row("degree cap", std::to_string(degree_cap()));
    r.row("base", std::to_string(P.bundle.base.dim()) + " coordinates");
    r.row("fiber", dims_str(P.bundle.fiber));
    r.row("virtual dimension", std::to_string(virtual_dimension(P.bundle)));
    r.data["virtual_dimension"] = virtual_dimension(P.bundle);
    add_check(r, "transferred_mc", check_mc(P.bundle), P.bundle.fiber, P.bundle.fiber, P.bundle.base.coords);
    emit_model(P.bundle, {{"construction", "derived path space"}}, o, r);
    if (o.format != "json") r.blocks.push_back("path space model:\n" + io::canonical_model(P.bundle));
    return r;
}

Report cmd_factorize(const std::string& mp, const std::string& pts, const std::string& samples, const Options& o) {
    Report r{"factorize"};
    io::Model m = io::load_model(mp);
    DiagonalFactorization F = factorize_diagonal(m.bundle);
    Located l = locate(m.bundle, pts, o);
    if (l.tol > 0) throw MathError("factorize needs exact classical points; supply --points");
    auto smp = samples.empty() ? default_samples(F.path.bundle.base.dim())
                               : io::points_from_string(samples, F.path.bundle.base.dim());
    r.row("candidates", std::to_string(l.points.size()) + " (" + l.how + ")");
    FactorizationReport rep = verify_factorization(F, l.points, smp);
    add_check(r, "constant_morphism", rep.constant_morphism, F.source.fiber, F.path.bundle.fiber, F.source.base.coords);
    add_check(r, "evaluation_morphism", rep.evaluation_morphism, F.path.bundle.fiber, F.square.fiber,
              F.path.bundle.base.coords);
    add_weq(r, "constant_weak_equivalence", rep.constant);
    add_fibration(r, "evaluation_fibration", rep.evaluation);
    r.row("composite = diagonal", yes_no(rep.composite_ok));
    r.data["composite_is_diagonal"] = rep.composite_ok;
    if (!rep.composite_ok) r.fail();
    emit_model(F.path.bundle, {{"construction", "derived path space"}}, o, r);
    return r;
}

Report cmd_fib_product(const std::vector<std::string>& files, const Options& o) {
    Report r{"fib-product"};
    io::Model X = io::load_model(files[0]), Y = io::load_model(files[2]), Z = io::load_model(files[4]);
    auto f = io::morphism_from_json(io::read_json_file(files[1]), X.bundle, Z.bundle);
    auto g = io::morphism_from_json(io::read_json_file(files[3]), Y.bundle, Z.bundle);
    add_check(r, "f_morphism", check_morphism(X.bundle, Z.bundle, f.morphism), X.bundle.fiber, Z.bundle.fiber,
              X.bundle.base.coords);
    add_check(r, "g_morphism", check_morphism(Y.bundle, Z.bundle, g.morphism), Y.bundle.fiber, Z.bundle.fiber,
              Y.bundle.base.coords);
    if (!r.ok) return r;
    HomotopyFiberedProduct h = homotopy_fibered_product(X.bundle, f.morphism, Y.bundle, g.morphism, Z.bundle);
    r.row("base", h.base_description);
    r.row("fiber", dims_str(h.bundle.fiber));
    r.row("virtual dimension", std::to_string(h.vdim));
    r.row("vdim X + vdim Y - vdim Z", std::to_string(h.vdim_formula));
    r.data["virtual_dimension"] = h.vdim;
    r.data["virtual_dimension_formula"] = h.vdim_formula;
    if (h.vdim != h.vdim_formula) r.fail();
    add_check(r, "projection_x", check_morphism(h.bundle, X.bundle, h.to_x), h.bundle.fiber, X.bundle.fiber,
              h.bundle.base.coords);
    add_check(r, "projection_y", check_morphism(h.bundle, Y.bundle, h.to_y), h.bundle.fiber, Y.bundle.fiber,
              h.bundle.base.coords);
    emit_model(h.bundle, {{"construction", "homotopy fibered product"}}, o, r);
    return r;
}

Submanifold load_submanifold(const std::string& spec, int m) {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        try {
            return io::submanifold_from_json(io::read_json_file(spec), m);
        } catch (const io::InputError& e) {
            throw io::InputError(e.what(), spec);
        }
    }
    return io::submanifold_from_name(spec, m);
}

Report cmd_intersect(const std::string& xs, const std::string& ys, int m, const std::string& pts, const Options& o) {
    Report r{"intersect"};
    if (m < 1) throw io::InputError("ambient dimension must be positive", "--ambient");
    Submanifold X = load_submanifold(xs, m), Y = load_submanifold(ys, m);
    auto points = pts.empty() ? std::vector<std::vector<Q>>{} : io::points_from_string(pts, m);
    DerivedIntersection d = derived_intersection(X, Y, points);
    r.row("X", xs + " (dim " + std::to_string(X.dim()) + ")");
    r.row("Y", ys + " (dim " + std::to_string(Y.dim()) + ")");
    r.row("virtual dimension", std::to_string(d.vdim));
    r.data["virtual_dimension"] = d.vdim;
    json arr = json::array();
    for (auto& p : d.points) {
        std::string v = "H0=" + std::to_string(p.h0) + ", H1=" + std::to_string(p.h1) + ", " +
                        (p.transversal ? "transversal" : "non-transversal");
        r.row("at " + point_str(p.ambient), v);
        json e = {{"point", io::points_to_json({p.ambient})[0]}, {"H0", p.h0}, {"H1", p.h1}, {"transversal", p.transversal}};
        e["tangent"] = io::complex_to_json(p.tangent);
        arr.push_back(e);
        if (p.tangent.euler() != d.vdim) r.fail();
    }
    if (d.points.empty()) r.row("intersection", "no classical points");
    r.data["points"] = arr;
    for (auto& n : d.notes) r.row("note", n);
    r.data["notes"] = d.notes;
    if (d.classical_comparison) add_weq(r, "classical_comparison", *d.classical_comparison);
    else r.row("scope", d.scope);
    emit_model(d.bundle, {{"construction", "derived intersection"}}, o, r);
    return r;
}

Report cmd_zero_locus(const std::string& mp, const std::string& pts, const Options& o) {
    Report r{"zero-locus"};
    io::Model m = io::load_model(mp);
    const LinftyBundle& b = m.bundle;
    if (b.amplitude() > 1 || b.lambda.max_arity() > 0)
        throw io::InputError("zero-locus needs a quasi-smooth model (fiber in degree 1, curvature only)", mp);
    std::vector<Poly> s(b.fiber.dim());
    for (auto& [i, c] : b.lambda.eval_basis({})) s[i] = c;
    Located l = locate(b, pts, o);
    if (l.tol > 0) throw MathError("zero-locus needs exact classical points; supply --points");
    r.row("candidates", std::to_string(l.points.size()) + " (" + l.how + ")");
    ZeroLocusComparison z = zero_locus_model(s, b.base.dim(), l.points);
    r.row("derived intersection vdim", std::to_string(z.intersection.vdim));
    r.row("quasi-smooth vdim", std::to_string(virtual_dimension(z.quasi_smooth)));
    add_check(r, "comparison_morphism", z.map_check, z.quasi_smooth.fiber, z.intersection.bundle.fiber,
              z.quasi_smooth.base.coords);
    add_weq(r, "weak_equivalence", z.weak_equivalence);
    if (!z.ok) r.fail();
    emit_model(z.intersection.bundle, {{"construction", "derived intersection with zero section"}}, o, r);
    return r;
}

Report cmd_report(const std::string& mp, const std::string& pts, const Options& o) {
    Report r = cmd_check_axioms(mp);
    r.command = "report";
    io::Model m = io::load_model(mp);
    const LinftyBundle& b = m.bundle;
    r.row("amplitude", std::to_string(b.amplitude()));
    if (!r.ok) return r;
    if (b.base.dim() > 3 && pts.empty()) {
        r.row("classical locus", "not searched (base dimension > 3)");
        return r;
    }
    Located l = locate(b, pts, o);
    r.row("classical points", std::to_string(l.points.size()) + " (" + l.how + ")");
    if (!l.how.starts_with("supplied")) r.row("scope", kLocusScope);
    json arr = json::array();
    for (auto& p : l.points) {
        ClassicalPoint P = classical_point(b, p, l.tol);
        CochainComplex T = tangent_complex(b, P);
        r.row("  at " + P.str(), betti_str(T.betti()));
        json e = io::complex_to_json(T);
        e["point"] = P.str();
        arr.push_back(e);
    }
    r.data["points"] = arr;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curved L-infinity algebras and L-infinity bundles"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--out", o.out, "Write the report to a file");
    app.add_option("--emit", o.emit, "Write the derived model to a file");
    app.add_option("--tol", o.tol, "Tolerance of the numeric locus search only");

    std::string a, b, c, pts, tpts, samples, mode = "both", xs, ys;
    std::vector<std::string> files;
    int ambient = 2;
    std::function<Report()> run;

    auto model_cmd = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("model", a, "Model file")->required();
        return s;
    };
    auto mor_cmd = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("source", a, "Source model")->required();
        s->add_option("target", b, "Target model")->required();
        s->add_option("morphism", c, "Morphism file")->required();
        return s;
    };

    model_cmd("check-axioms", "Check the Maurer-Cartan equation")->callback([&] { run = [&] { return cmd_check_axioms(a); }; });
    mor_cmd("check-morphism", "Check the morphism equation")->callback([&] {
        run = [&] { return cmd_check_morphism(a, b, c); };
    });
    {
        auto* s = app.add_subcommand("transfer", "Homotopy transfer along a contraction");
        s->add_option("model", a, "Model file (total structure)")->required();
        s->add_option("contraction", b, "Contraction file")->required();
        s->add_option("--mode", mode, "recursive, trees or both")->check(CLI::IsMember({"recursive", "trees", "both"}));
        s->callback([&] { run = [&] { return cmd_transfer(a, b, mode, o); }; });
    }
    {
        auto* s = model_cmd("tangent-complex", "Tangent complexes at classical points");
        s->add_option("--points", pts, "Points \"x,y;x,y\"");
        s->callback([&] { run = [&] { return cmd_tangent_complex(a, pts, o); }; });
    }
    {
        auto* s = mor_cmd("weak-equiv", "Weak equivalence test on candidate points");
        s->add_option("--points", pts, "Source candidates");
        s->add_option("--target-points", tpts, "Target candidates");
        s->callback([&] { run = [&] { return cmd_weak_equiv(a, b, c, pts, tpts, o); }; });
    }
    {
        auto* s = mor_cmd("fibration", "Fibration test");
        s->add_option("--samples", samples, "Sample points of the source base");
        s->callback([&] { run = [&] { return cmd_fibration(a, b, c, samples); }; });
    }
    model_cmd("shifted-tangent", "Shifted tangent bundle")->callback([&] { run = [&] { return cmd_shifted_tangent(a, o); }; });
    model_cmd("path-space", "Derived path space")->callback([&] { run = [&] { return cmd_path_space(a, o); }; });
    {
        auto* s = model_cmd("factorize", "Factorisation of the diagonal");
        s->add_option("--points", pts, "Classical points of the model");
        s->add_option("--samples", samples, "Sample points of the path space base");
        s->callback([&] { run = [&] { return cmd_factorize(a, pts, samples, o); }; });
    }
    {
        auto* s = app.add_subcommand("fib-product", "Homotopy fibered product X x_Z Y");
        s->add_option("files", files, "X f Y g Z")->required()->expected(5);
        s->callback([&] { run = [&] { return cmd_fib_product(files, o); }; });
    }
    {
        auto* s = app.add_subcommand("intersect", "Derived intersection of submanifolds");
        s->add_option("--x", xs, "Name or JSON file")->required();
        s->add_option("--y", ys, "Name or JSON file")->required();
        s->add_option("--ambient", ambient, "Ambient dimension");
        s->add_option("--points", pts, "Ambient intersection points");
        s->callback([&] { run = [&] { return cmd_intersect(xs, ys, ambient, pts, o); }; });
    }
    {
        auto* s = model_cmd("zero-locus", "Compare a quasi-smooth model with the derived zero locus");
        s->add_option("--points", pts, "Classical points");
        s->callback([&] { run = [&] { return cmd_zero_locus(a, pts, o); }; });
    }
    {
        auto* s = model_cmd("report", "Summary of a model");
        s->add_option("--points", pts, "Classical points");
        s->callback([&] { run = [&] { return cmd_report(a, pts, o); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Report r;
    int code = 0;
    try {
        r = run();
        code = r.ok ? 0 : 1;
    } catch (const io::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DegreeCapError& e) {
        std::cerr << "degree cap exceeded: " << e.what() << "\n";
        return 1;
    } catch (const MathError& e) {
        std::cerr << "mathematical failure: " << e.what() << "\n";
        return 1;
    }

    std::string text;
    if (o.format == "json") {
        json j = r.data;
        j["command"] = r.command;
        j["ok"] = r.ok;
        text = io::canonical_dump(j);
    } else {
        text = r.text();
    }
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out);
        if (!f) {
            std::cerr << "input error: cannot write " << o.out << "\n";
            return 2;
        }
        f << text;
    }
    return code;
}
