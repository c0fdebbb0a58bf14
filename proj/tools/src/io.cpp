#include "linfty/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace linfty::io {

// ---- polynomial expressions ----

namespace {

class PolyParser {
public:
    PolyParser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

    Poly parse() {
        Poly p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& names_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(msg + " at column " + std::to_string(pos_ + 1) + " of '" + s_ + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static bool ident_char(char c) {
        return std::isalnum((unsigned char)c) || c == '_' || c == '.' || c == '\'' || c == '@';
    }

    Poly expr() {
        Poly p = term();
        for (;;) {
            if (eat('+'))
                p += term();
            else if (eat('-'))
                p -= term();
            else
                return p;
        }
    }
    Poly term() {
        Poly p = unary();
        for (;;) {
            if (eat('*')) {
                p = p * unary();
            } else if (eat('/')) {
                Poly d = unary();
                if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
                p *= Q(1) / d.constant_term();
            } else {
                return p;
            }
        }
    }
    Poly unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    Poly power() {
        Poly b = atom();
        if (!eat('^')) return b;
        skip();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
        if (start == pos_) fail("expected a non-negative integer exponent");
        int e = std::stoi(s_.substr(start, pos_ - start));
        Poly r(1);
        for (int i = 0; i < e; ++i) r = r * b;
        return r;
    }
    Poly atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            return Poly(Q(mpz_class(s_.substr(start, pos_ - start))));
        }
        if (ident_char(c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            for (size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == name) return Poly::var((int)i);
            std::string known;
            for (auto& n : names_) known += (known.empty() ? "" : ", ") + n;
            pos_ = start;
            fail("unknown variable '" + name + "' (known: " + (known.empty() ? "none" : known) + ")");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

std::string key_str(int d) { return std::to_string(d); }

int int_field(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw InputError("expected an integer", where);
    return j.get<int>();
}

const json& field(const json& j, const char* name, const std::string& where) {
    if (!j.is_object()) throw InputError("expected an object", where);
    auto it = j.find(name);
    if (it == j.end()) throw InputError(std::string("missing field '") + name + "'", where);
    return *it;
}

// Degree-sorted copy of a space with the old -> new index map.
GradedSpace sorted_space(const GradedSpace& s, std::vector<int>& map) {
    std::vector<int> order(s.dim());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s.deg[a] < s.deg[b]; });
    GradedSpace r;
    map.assign(s.dim(), 0);
    for (int i : order) map[i] = r.add(s.deg[i], s.label[i]);
    return r;
}

Family remap(const Family& f, const std::vector<int>& smap, const GradedSpace& src, const std::vector<int>& tmap,
             const GradedSpace& tgt) {
    Family r(src, tgt, f.degree);
    for (int k = 0; k <= f.max_arity(); ++k)
        for (auto& [key, v] : f.part(k)) {
            Key nk;
            for (int i : key) nk.push_back(smap[i]);
            Vec nv;
            for (auto& [i, c] : v) nv[tmap[i]] = c;
            r.add(nk, nv);
        }
    return r;
}

std::vector<std::string> default_labels(int n, int offset) {
    std::vector<std::string> r;
    for (int i = 0; i < n; ++i) r.push_back("e" + std::to_string(offset + i + 1));
    return r;
}

std::pair<int, int> basis_ref(const json& j, const GradedSpace& s, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw InputError("expected [degree, index]", where);
    int d = int_field(j[0], where + "/0"), i = int_field(j[1], where + "/1");
    auto dims = s.dims();
    auto it = dims.find(d);
    if (it == dims.end()) throw InputError("no basis vectors in degree " + std::to_string(d), where);
    if (i < 0 || i >= it->second)
        throw InputError("index " + std::to_string(i) + " out of range for degree " + std::to_string(d) + " (rank " +
                             std::to_string(it->second) + ")",
                         where);
    return {d, s.global_index(d, i)};
}

json basis_json(const GradedSpace& s, int i) { return json::array({s.deg[i], s.index_in_degree(i)}); }

Poly coeff_from_json(const json& j, const std::vector<std::string>& coords, const std::string& where) {
    try {
        if (j.is_number_integer()) return Poly(Q(j.get<long>()));
        if (j.is_string()) return parse_poly(j.get<std::string>(), coords);
    } catch (const InputError& e) {
        throw InputError(e.what(), where);
    }
    throw InputError("coefficient must be a string or an integer", where);
}

void write_canonical(std::ostringstream& os, const json& j, int indent, bool top) {
    std::string compact = j.dump();
    bool holds_objects = j.is_array() && std::any_of(j.begin(), j.end(), [](const json& e) { return e.is_object(); });
    if (!top && !holds_objects && (compact.size() <= 96 || !(j.is_object() || j.is_array()))) {
        os << compact;
        return;
    }
    std::string pad(indent + 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            write_canonical(os, it.value(), indent + 2, false);
        }
        os << "\n" << std::string(indent, ' ') << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            write_canonical(os, j[i], indent + 2, false);
        }
        os << "\n" << std::string(indent, ' ') << "]";
    } else {
        os << compact;
    }
}

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& names) {
    return PolyParser(text, names).parse();
}

std::string poly_str(const Poly& p, const std::vector<std::string>& names) {
    if (p.nvars() > (int)names.size()) throw std::invalid_argument("polynomial uses more variables than names");
    return p.str(names);
}

Q parse_rational(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Q(j.get<long>());
    if (!j.is_string()) throw InputError("expected a rational \"num/den\" or an integer", where);
    try {
        return q_from_string(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what(), where);
    }
}

// ---- JSON text ----

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError("malformed JSON (" + std::string(e.what()) + ")",
                         source + ":" + std::to_string(line) + ":" + std::to_string(col));
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file", path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

std::string canonical_dump(const json& j) {
    std::ostringstream os;
    write_canonical(os, j, 0, true);
    os << "\n";
    return os.str();
}

// ---- families ----

json ops_to_json(const Family& f, const std::vector<std::string>& coords) {
    std::vector<int> smap, tmap;
    GradedSpace src = sorted_space(f.src, smap), tgt = sorted_space(f.tgt, tmap);
    Family g = remap(f, smap, src, tmap, tgt);
    json ops = json::array();
    for (int k = 0; k <= g.max_arity(); ++k)
        for (auto& [key, v] : g.part(k))
            for (auto& [i, c] : v) {
                json in = json::array();
                for (int a : key) in.push_back(basis_json(src, a));
                ops.push_back({{"arity", k}, {"inputs", in}, {"output", basis_json(tgt, i)}, {"coeff", poly_str(c, coords)}});
            }
    return ops;
}

Family ops_from_json(const json& ops, const GradedSpace& src, const GradedSpace& tgt, int degree,
                     const std::vector<std::string>& coords, const std::string& where) {
    if (!ops.is_array()) throw InputError("expected an array of operations", where);
    Family f(src, tgt, degree);
    for (size_t n = 0; n < ops.size(); ++n) {
        const std::string w = where + "/" + std::to_string(n);
        const json& op = ops[n];
        const json& inputs = field(op, "inputs", w);
        if (!inputs.is_array()) throw InputError("expected an array", w + "/inputs");
        if (op.contains("arity") && int_field(op["arity"], w + "/arity") != (int)inputs.size())
            throw InputError("arity does not match the number of inputs", w + "/arity");
        Key key;
        int dsum = 0;
        for (size_t a = 0; a < inputs.size(); ++a) {
            auto [d, i] = basis_ref(inputs[a], src, w + "/inputs/" + std::to_string(a));
            key.push_back(i);
            dsum += d;
        }
        auto [dout, out] = basis_ref(field(op, "output", w), tgt, w + "/output");
        if (dout != dsum + degree)
            throw InputError("output degree " + std::to_string(dout) + " but inputs and operation degree give " +
                                 std::to_string(dsum + degree),
                             w + "/output");
        Key sorted = key;
        if (sort_with_sign(sorted, src.deg) == 0) throw InputError("repeated odd input", w + "/inputs");
        Poly c = coeff_from_json(field(op, "coeff", w), coords, w + "/coeff");
        f.add(key, unit_vec(out, c));
    }
    f.prune();
    return f;
}

// ---- models ----

json model_to_json(const LinftyBundle& b, const json& metadata) {
    std::vector<int> map;
    GradedSpace s = sorted_space(b.fiber, map);
    json j;
    j["base"] = {{"dim", b.base.dim()}, {"coords", b.base.coords}};
    json dims = json::object(), labels = json::object();
    for (auto& [d, n] : s.dims()) {
        dims[key_str(d)] = n;
        json l = json::array();
        for (int i : s.basis_of_degree(d)) l.push_back(s.label[i]);
        labels[key_str(d)] = l;
    }
    j["bundle"] = dims;
    j["labels"] = labels;
    j["ops"] = ops_to_json(b.lambda, b.base.coords);
    j["metadata"] = metadata.is_null() ? json::object() : metadata;
    return j;
}

std::string canonical_model(const LinftyBundle& b, const json& metadata) {
    return canonical_dump(model_to_json(b, metadata));
}

Model model_from_json(const json& j) {
    if (!j.is_object()) throw InputError("model must be a JSON object", "/");
    Model m;
    const json& base = field(j, "base", "");
    int dim = int_field(field(base, "dim", "/base"), "/base/dim");
    if (dim < 0) throw InputError("negative dimension", "/base/dim");
    if (base.contains("coords")) {
        const json& c = base["coords"];
        if (!c.is_array() || (int)c.size() != dim) throw InputError("expected one name per coordinate", "/base/coords");
        for (size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_string()) throw InputError("expected a string", "/base/coords/" + std::to_string(i));
            m.bundle.base.coords.push_back(c[i].get<std::string>());
        }
        std::vector<std::string> sorted = m.bundle.base.coords;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InputError("duplicate coordinate names", "/base/coords");
    } else {
        m.bundle.base = Base::euclidean(dim);
    }

    const json& bundle = field(j, "bundle", "");
    if (!bundle.is_object()) throw InputError("expected {degree: rank}", "/bundle");
    std::map<int, int> dims;
    for (auto it = bundle.begin(); it != bundle.end(); ++it) {
        int d;
        try {
            size_t used = 0;
            d = std::stoi(it.key(), &used);
            if (used != it.key().size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw InputError("degree keys must be integers", "/bundle/" + it.key());
        }
        int n = int_field(it.value(), "/bundle/" + it.key());
        if (n < 0) throw InputError("negative rank", "/bundle/" + it.key());
        if (n > 0) dims[d] = n;
    }
    GradedSpace L;
    int count = 0;
    for (auto& [d, n] : dims) {
        std::vector<std::string> names;
        if (j.contains("labels") && j["labels"].contains(key_str(d))) {
            const json& l = j["labels"][key_str(d)];
            const std::string w = "/labels/" + key_str(d);
            if (!l.is_array() || (int)l.size() != n) throw InputError("expected one label per basis vector", w);
            for (auto& x : l) {
                if (!x.is_string()) throw InputError("labels must be strings", w);
                names.push_back(x.get<std::string>());
            }
        } else {
            names = default_labels(n, count);
        }
        for (auto& name : names) L.add(d, name);
        count += n;
    }
    m.bundle = LinftyBundle(m.bundle.base, L);
    m.bundle.lambda = ops_from_json(j.contains("ops") ? j["ops"] : json::array(), L, L, 1, m.bundle.base.coords, "/ops");
    if (j.contains("metadata")) m.metadata = j["metadata"];
    return m;
}

Model load_model(const std::string& path) {
    json j = read_json_file(path);
    try {
        return model_from_json(j);
    } catch (const InputError& e) {
        throw InputError(e.what(), path);
    }
}

// ---- morphisms ----

std::vector<std::vector<Q>> points_from_json(const json& j, int dim, const std::string& where) {
    if (!j.is_array()) throw InputError("expected an array of points", where);
    std::vector<std::vector<Q>> pts;
    for (size_t n = 0; n < j.size(); ++n) {
        const std::string w = where + "/" + std::to_string(n);
        if (!j[n].is_array() || (int)j[n].size() != dim)
            throw InputError("expected a point with " + std::to_string(dim) + " coordinates", w);
        std::vector<Q> p;
        for (size_t i = 0; i < j[n].size(); ++i) p.push_back(parse_rational(j[n][i], w + "/" + std::to_string(i)));
        pts.push_back(p);
    }
    return pts;
}

std::vector<std::vector<Q>> points_from_string(const std::string& s, int dim) {
    std::vector<std::vector<Q>> pts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::vector<Q> p;
        std::stringstream cs(item);
        std::string c;
        while (std::getline(cs, c, ',')) {
            c.erase(std::remove_if(c.begin(), c.end(), [](unsigned char ch) { return std::isspace(ch); }), c.end());
            try {
                p.push_back(q_from_string(c));
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what(), "--points");
            }
        }
        if (p.empty() && dim == 0) {
            pts.push_back(p);
            continue;
        }
        if ((int)p.size() != dim)
            throw InputError("point '" + item + "' needs " + std::to_string(dim) + " coordinates", "--points");
        pts.push_back(p);
    }
    return pts;
}

json points_to_json(const std::vector<std::vector<Q>>& pts) {
    json r = json::array();
    for (auto& p : pts) {
        json q = json::array();
        for (auto& c : p) q.push_back(q_to_string(c));
        r.push_back(q);
    }
    return r;
}

MorphismFile morphism_from_json(const json& j, const LinftyBundle& src, const LinftyBundle& dst) {
    MorphismFile f;
    const json& bm = field(j, "base_map", "");
    if (!bm.is_array() || (int)bm.size() != dst.base.dim())
        throw InputError("expected one polynomial per target coordinate", "/base_map");
    for (size_t i = 0; i < bm.size(); ++i)
        f.morphism.base_map.push_back(coeff_from_json(bm[i], src.base.coords, "/base_map/" + std::to_string(i)));
    f.morphism.phi = ops_from_json(field(j, "phi", ""), src.fiber, dst.fiber, 0, src.base.coords, "/phi");
    if (f.morphism.phi.has_arity(0)) throw InputError("morphisms have no arity-0 component", "/phi");
    if (j.contains("points")) {
        f.points = points_from_json(j["points"], src.base.dim(), "/points");
        f.has_points = true;
    }
    if (j.contains("target_points")) {
        f.target_points = points_from_json(j["target_points"], dst.base.dim(), "/target_points");
        f.has_target_points = true;
    }
    if (j.contains("samples")) {
        f.samples = points_from_json(j["samples"], src.base.dim(), "/samples");
        f.has_samples = true;
    }
    return f;
}

json morphism_to_json(const Morphism& m, const LinftyBundle& src, const LinftyBundle& dst) {
    json j;
    json bm = json::array();
    for (auto& p : m.base_map) bm.push_back(poly_str(p, src.base.coords));
    j["base_map"] = bm;
    (void)dst;
    j["phi"] = ops_to_json(m.phi, src.base.coords);
    return j;
}

// ---- contractions ----

ContractionFile contraction_from_json(const json& j, const LinftyBundle& model) {
    const GradedSpace& L = model.fiber;
    Family delta = ops_from_json(field(j, "delta", ""), L, L, 1, model.base.coords, "/delta");
    Family eta = ops_from_json(field(j, "eta", ""), L, L, -1, model.base.coords, "/eta");
    for (auto* f : {&delta, &eta}) {
        if (f->max_arity() > 1 || f->has_arity(0))
            throw InputError("delta and eta must be linear", f == &delta ? "/delta" : "/eta");
        for (auto& [k, v] : f->part(1))
            for (auto& [i, c] : v)
                if (!c.is_constant()) throw InputError("contraction coefficients must be constant", f == &delta ? "/delta" : "/eta");
    }
    std::vector<int> weight;
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (!w.is_object()) throw InputError("expected {degree: [weights]}", "/weights");
        weight.assign(L.dim(), 0);
        for (auto& [d, n] : L.dims()) {
            const std::string where = "/weights/" + key_str(d);
            if (!w.contains(key_str(d)) || !w[key_str(d)].is_array() || (int)w[key_str(d)].size() != n)
                throw InputError("expected one weight per basis vector", where);
            auto idx = L.basis_of_degree(d);
            for (int i = 0; i < n; ++i) weight[idx[i]] = int_field(w[key_str(d)][i], where + "/" + std::to_string(i));
        }
    }
    ContractionFile c;
    try {
        c.contraction = make_contraction(L, delta, eta, weight);
    } catch (const MathError& e) {
        throw InputError(std::string("not a contraction: ") + e.what(), "/eta");
    }
    c.lambda = model.lambda - delta;
    c.lambda.prune();
    return c;
}

// ---- submanifolds ----

Submanifold submanifold_from_name(const std::string& name, int m) {
    auto need = [&](int k) {
        if (m < k) throw InputError("'" + name + "' needs ambient dimension >= " + std::to_string(k));
    };
    auto line = [&](int axis) {
        need(axis + 1);
        Matrix A(m, 1);
        A(axis, 0) = 1;
        return Submanifold::affine(A, std::vector<Q>(m), name);
    };
    if (name == "axis-x") return line(0);
    if (name == "axis-y") return line(1);
    if (name == "axis-z") return line(2);
    if (name == "origin") return Submanifold::affine(Matrix(m, 0), std::vector<Q>(m), name);
    if (name == "whole") {
        Submanifold s = Submanifold::whole(m);
        s.name = name;
        return s;
    }
    if (name == "diagonal") {
        need(1);
        Matrix A(m, 1);
        for (int i = 0; i < m; ++i) A(i, 0) = 1;
        return Submanifold::affine(A, std::vector<Q>(m), name);
    }
    if (name == "line-y1") {
        need(2);
        Matrix A(m, 1);
        A(0, 0) = 1;
        std::vector<Q> b(m);
        b[1] = 1;
        return Submanifold::affine(A, b, name);
    }
    if (name == "parabola") {
        need(2);
        std::vector<Poly> values(m - 1);
        values[0] = Poly::var(0, 2);
        return Submanifold::graph(m, {0}, values, name);
    }
    throw InputError("unknown submanifold '" + name +
                     "' (known: axis-x, axis-y, axis-z, parabola, diagonal, origin, line-y1, whole, or a JSON file)");
}

Submanifold submanifold_from_json(const json& j, int m) {
    const json& kind = field(j, "kind", "");
    std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
    try {
        if (kind == "affine") {
            const json& A = field(j, "A", "");
            if (!A.is_array() || (int)A.size() != m) throw InputError("expected one row per ambient coordinate", "/A");
            int cols = A.empty() ? 0 : (int)A[0].size();
            Matrix M(m, cols);
            for (int r = 0; r < m; ++r) {
                if (!A[r].is_array() || (int)A[r].size() != cols) throw InputError("ragged matrix", "/A/" + std::to_string(r));
                for (int c = 0; c < cols; ++c)
                    M(r, c) = parse_rational(A[r][c], "/A/" + std::to_string(r) + "/" + std::to_string(c));
            }
            std::vector<Q> b(m);
            if (j.contains("b")) {
                auto pts = points_from_json(json::array({j["b"]}), m, "/b");
                b = pts[0];
            }
            return Submanifold::affine(M, b, name);
        }
        if (kind == "graph") {
            const json& fr = field(j, "free", "");
            if (!fr.is_array()) throw InputError("expected coordinate indices", "/free");
            std::vector<int> free;
            for (size_t i = 0; i < fr.size(); ++i) free.push_back(int_field(fr[i], "/free/" + std::to_string(i)));
            Base amb = Base::euclidean(m);
            std::vector<std::string> params;
            for (int i : free) {
                if (i < 0 || i >= m) throw InputError("coordinate index out of range", "/free");
                params.push_back(amb.coords[i]);
            }
            const json& vals = field(j, "values", "");
            if (!vals.is_array()) throw InputError("expected polynomials", "/values");
            std::vector<Poly> values;
            for (size_t i = 0; i < vals.size(); ++i)
                values.push_back(coeff_from_json(vals[i], params, "/values/" + std::to_string(i)));
            return Submanifold::graph(m, free, values, name);
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    throw InputError("kind must be 'affine' or 'graph'", "/kind");
}

// ---- reports ----

json betti_to_json(const std::map<int, int>& betti) {
    json j = json::object();
    for (auto& [k, v] : betti) j[key_str(k)] = v;
    return j;
}

json report_to_json(const CheckReport& r, const GradedSpace& in, const GradedSpace& out,
                    const std::vector<std::string>& coords) {
    json j;
    j["ok"] = r.ok;
    json ar = json::array();
    for (auto& a : r.arities) {
        json x = {{"arity", a.arity}, {"ok", a.ok}};
        if (!a.ok) {
            json w = json::array();
            for (int i : a.witness) w.push_back(in.label[i]);
            x["witness"] = w;
            x["residual"] = vec_str(a.residual, out.label, coords);
        }
        ar.push_back(x);
    }
    j["arities"] = ar;
    j["notes"] = r.notes;
    return j;
}

json report_to_json(const WeakEquivalenceReport& r) {
    json j;
    j["ok"] = r.ok;
    j["locus_ok"] = r.locus_ok;
    j["etale_ok"] = r.etale_ok;
    json pts = json::array();
    for (auto& e : r.points)
        pts.push_back({{"point", e.point.str()},
                       {"image", e.image.str()},
                       {"ok", e.ok},
                       {"source_betti", betti_to_json(e.src_betti)},
                       {"target_betti", betti_to_json(e.dst_betti)},
                       {"cone_betti", betti_to_json(e.cone_betti)},
                       {"detail", e.detail}});
    j["points"] = pts;
    j["matched"] = r.matched;
    j["notes"] = r.notes;
    j["scope"] = r.scope;
    return j;
}

json report_to_json(const FibrationReport& r) {
    return {{"ok", r.ok},
            {"submersion_ok", r.submersion_ok},
            {"surjective_ok", r.surjective_ok},
            {"rank_certified", r.rank_certified},
            {"notes", r.notes},
            {"scope", r.scope}};
}

json complex_to_json(const CochainComplex& c) {
    json dims = json::object();
    for (auto& [k, v] : c.dims) dims[key_str(k)] = v;
    return {{"dims", dims}, {"betti", betti_to_json(c.betti())}, {"euler", c.euler()}};
}

}  // namespace linfty::io
