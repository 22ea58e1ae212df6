#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibasis/closure.hpp"
#include "ibasis/hermite.hpp"
#include "ibasis/parser.hpp"
#include "ibasis/printer.hpp"

using namespace ibasis;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string format = "text";
    std::string iota_file;
    long max_wronskian = 512;
    int jobs = 1;
    long seed = 0; // reserved; the pipeline is deterministic
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--iota", c.iota_file, "iota policy override file (JSON)");
    cmd->add_option("--max-wronskian-terms", c.max_wronskian, "series cap for the Wronskian valuation search");
    cmd->add_option("--jobs", c.jobs, "parallel local analyses");
    cmd->add_option("--seed", c.seed, "reserved");
}

IotaPolicy load_policy(const CommonOpts& c) {
    if (c.iota_file.empty()) return IotaPolicy::defaults();
    return IotaPolicy::from_file(c.iota_file);
}

ClosureOptions closure_opts(const CommonOpts& c) {
    ClosureOptions opt;
    opt.bounds.max_wronskian_levels = c.max_wronskian;
    opt.jobs = c.jobs;
    return opt;
}

OrePoly parse_operator_arg(const std::string& text, bool require_polynomial) {
    OrePoly L = parse_operator(text);
    if (L.is_zero()) fail(ErrKind::NotAnOperator, "the zero operator is not a valid input");
    if (require_polynomial && !L.is_polynomial())
        fail(ErrKind::NotAnOperator, "operator coefficients must be polynomials");
    return L;
}

Handle parse_point(const std::string& text) {
    const std::string tag = "poly-root:";
    if (text.rfind(tag, 0) == 0) {
        QPoly p = parse_poly(text.substr(tag.size()), 't');
        if (p.degree() < 1) fail(ErrKind::ParseError, "poly-root: needs a nonconstant polynomial in t");
        return Handle::from_poly(p);
    }
    return Handle::rational(Rational::parse(text));
}

json point_json(const PointDiagnostics& p) {
    json j;
    j["point"] = p.label;
    j["exponents"] = json::array();
    for (const auto& v : p.nu) j["exponents"].push_back(v.to_string());
    j["log_degrees"] = p.logdeg;
    j["m"] = p.m;
    j["N"] = p.N;
    return j;
}

std::string point_text(const PointDiagnostics& p) {
    std::ostringstream os;
    os << "point " << p.label << ": exponents ";
    for (size_t i = 0; i < p.nu.size(); ++i) os << (i ? ", " : "") << p.nu[i].to_string();
    os << "; log degrees ";
    for (size_t i = 0; i < p.logdeg.size(); ++i) os << (i ? ", " : "") << p.logdeg[i];
    os << "; m = " << p.m << "; N = ";
    for (size_t i = 0; i < p.N.size(); ++i) os << (i ? ", " : "") << p.N[i];
    return os.str();
}

class Timer {
  public:
    long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void emit(const CommonOpts& c, const json& doc, const std::string& text) {
    if (c.format == "json")
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << text;
}

json base_doc(const std::string& command, const OrePoly& L, const Timer& t) {
    json doc;
    doc["schema"] = "ibasis.output.v1";
    doc["command"] = command;
    doc["operator"] = ore_to_string(L);
    doc["timing_ms"] = t.ms();
    return doc;
}

std::string join_polys(const std::vector<QPoly>& ps) {
    std::string out;
    for (size_t i = 0; i < ps.size(); ++i) out += (i ? ", " : "") + poly_to_string(ps[i]);
    return out;
}

int cmd_compute(const std::string& optext, const CommonOpts& c) {
    Timer t;
    OrePoly L = parse_operator_arg(optext, true);
    IotaPolicy pol = load_policy(c);
    ClosureResult r = integral_basis(L, pol, closure_opts(c));
    json doc = base_doc("compute", L, t);
    doc["basis"] = json::array();
    std::ostringstream os;
    os << "operator: " << ore_to_string(L) << "\nbasis:\n";
    for (const auto& e : r.basis.elements) {
        std::string s = basis_elem_to_string(e);
        doc["basis"].push_back(s);
        os << "  " << s << "\n";
    }
    doc["points"] = json::array();
    for (const auto& p : r.points) {
        doc["points"].push_back(point_json(p));
        os << point_text(p) << "\n";
    }
    doc["timing_ms"] = t.ms();
    os << "time: " << t.ms() << " ms\n";
    emit(c, doc, os.str());
    return 0;
}

int cmd_check(const std::string& optext, const std::string& elemtext, const CommonOpts& c) {
    Timer t;
    OrePoly L = parse_operator_arg(optext, true);
    OrePoly E = parse_operator(elemtext);
    BasisElement b = reduce_mod(L, E);
    IotaPolicy pol = load_policy(c);
    CheckResult r = check_integral(L, b, pol, closure_opts(c));
    json doc = base_doc("check", L, t);
    doc["element"] = basis_elem_to_string(b);
    doc["integral"] = r.integral;
    std::ostringstream os;
    os << "operator: " << ore_to_string(L) << "\n";
    os << "element: " << basis_elem_to_string(b) << "\n";
    os << "integral: " << (r.integral ? "true" : "false") << "\n";
    if (r.witness) {
        doc["witness"] = {{"point", r.witness->point},
                          {"solution", r.witness->solution},
                          {"exponent", r.witness->exp.to_string()},
                          {"logpow", r.witness->logpow}};
        os << "witness: point " << r.witness->point << ", solution " << r.witness->solution
           << ", exponent " << r.witness->exp.to_string() << ", log power " << r.witness->logpow << "\n";
    }
    doc["timing_ms"] = t.ms();
    emit(c, doc, os.str());
    return 0;
}

int cmd_solutions(const std::string& optext, const std::string& at, long terms, const CommonOpts& c) {
    Timer t;
    OrePoly L = parse_operator_arg(optext, true);
    Handle h = parse_point(at);
    IotaPolicy pol = load_policy(c);
    auto sols = fundamental_system(L, h, terms);
    std::string var = "x";
    if (h.degree() == 1) {
        Rational a = -h.poly.coeff(0);
        if (!a.is_zero())
            var = a.sign() > 0 ? "(x-" + a.to_string() + ")" : "(x+" + (-a).to_string() + ")";
    } else {
        var = "(x-t)";
    }
    json doc = base_doc("solutions", L, t);
    doc["point"] = h.label;
    doc["solutions"] = json::array();
    std::ostringstream os;
    os << "operator: " << ore_to_string(L) << "\npoint: " << h.label << "\n";
    for (size_t i = 0; i < sols.size(); ++i) {
        json js;
        js["terms"] = json::array();
        for (const auto& [k, coeff] : sols[i].terms())
            js["terms"].push_back({{"exponent", k.exp.to_string()},
                                   {"logpow", k.logpow},
                                   {"coeff", kelem_to_string(coeff)}});
        js["cuts"] = json::array();
        for (const auto& [cls, cut] : sols[i].trunc())
            js["cuts"].push_back({{"class", cls.to_string()}, {"cut", cut.to_string()}});
        std::string diag;
        try {
            bool ok = is_integral(sols[i], pol);
            js["integral"] = ok;
            diag = ok ? "integral" : "not integral";
        } catch (const Error&) {
            diag = "integrality undetermined at this truncation";
        }
        doc["solutions"].push_back(js);
        os << "solution " << (i + 1) << ": " << logseries_to_string(sols[i], var) << "   [" << diag
           << "]\n";
    }
    doc["timing_ms"] = t.ms();
    emit(c, doc, os.str());
    return 0;
}

int cmd_bounds(const std::string& optext, const std::string& at, const CommonOpts& c) {
    Timer t;
    OrePoly L = parse_operator_arg(optext, true);
    IotaPolicy pol = load_policy(c);
    ClosureOptions opt = closure_opts(c);
    std::vector<PointDiagnostics> pts;
    auto collect = [&](const QPoly& p) {
        for (const auto& ctx : detail::resolve_point(L, p, pol, opt.bounds))
            pts.push_back(PointDiagnostics{ctx.h.label, ctx.data.nu, ctx.data.logdeg, ctx.data.m, ctx.data.N});
    };
    if (!at.empty()) {
        collect(parse_point(at).poly);
    } else {
        for (const auto& p : detail::leading_handles(L)) collect(p);
    }
    json doc = base_doc("bounds", L, t);
    doc["points"] = json::array();
    std::ostringstream os;
    os << "operator: " << ore_to_string(L) << "\n";
    for (const auto& p : pts) {
        doc["points"].push_back(point_json(p));
        os << point_text(p) << "\n";
    }
    doc["timing_ms"] = t.ms();
    emit(c, doc, os.str());
    return 0;
}

json basis_vector_json(const BasisVector& v) {
    json j;
    j["a"] = json::array();
    for (const auto& p : v.a) j["a"].push_back(poly_to_string(p));
    j["u"] = poly_to_string(v.u);
    j["v"] = poly_to_string(v.v);
    j["m"] = v.m;
    return j;
}

int cmd_hermite(const std::string& input, const CommonOpts& c) {
    Timer t;
    json in;
    try {
        if (input == "-") {
            in = json::parse(std::cin);
        } else {
            std::ifstream f(input);
            if (!f) fail(ErrKind::ParseError, "cannot open " + input);
            in = json::parse(f);
        }
    } catch (const json::exception& e) {
        fail(ErrKind::ParseError, std::string("hermite input: ") + e.what());
    }
    if (!in.contains("operator") || !in.contains("a") || !in.contains("u") || !in.contains("v") ||
        !in.contains("m"))
        fail(ErrKind::ParseError, "hermite input needs operator, a, u, v, m");
    OrePoly L = parse_operator_arg(in["operator"].get<std::string>(), true);
    int r = ore_order(L);
    IotaPolicy pol = load_policy(c);
    std::vector<BasisElement> basis;
    if (in.contains("basis")) {
        for (const auto& s : in["basis"]) basis.push_back(reduce_mod(L, parse_operator(s.get<std::string>())));
        if (static_cast<int>(basis.size()) != r)
            fail(ErrKind::ParseError, "basis must have exactly ord(L) elements");
    } else {
        basis = integral_basis(L, pol, closure_opts(c)).basis.elements;
    }
    BasisVector f;
    f.a.clear();
    for (const auto& s : in["a"]) f.a.push_back(parse_poly(s.get<std::string>()));
    if (static_cast<int>(f.a.size()) != r) fail(ErrKind::ParseError, "a must have exactly ord(L) entries");
    f.u = parse_poly(in["u"].get<std::string>());
    f.v = parse_poly(in["v"].get<std::string>());
    f.m = in["m"].get<long>();
    HermiteResult res = hermite_reduce(L, basis, f);

    json doc = base_doc("hermite", L, t);
    doc["basis"] = json::array();
    for (const auto& e : basis) doc["basis"].push_back(basis_elem_to_string(e));
    doc["g"] = basis_vector_json(res.g);
    doc["h"] = basis_vector_json(res.h);
    doc["obstructed"] = res.obstructed;
    std::ostringstream os;
    os << "operator: " << ore_to_string(L) << "\n";
    os << "g numerators: " << join_polys(res.g.a) << "\n";
    os << "g denominator: (" << poly_to_string(res.g.v) << ")^" << res.g.m << "\n";
    os << "h numerators: " << join_polys(res.h.a) << "\n";
    os << "h denominator: (" << poly_to_string(res.h.u) << ") * (" << poly_to_string(res.h.v) << ")^"
       << res.h.m << "\n";
    if (!res.obstructed) {
        std::vector<RatFun> gcoords(static_cast<size_t>(r)), dcoords(static_cast<size_t>(r));
        for (int k = 0; k < r; ++k)
            gcoords[static_cast<size_t>(k)] = RatFun(res.g.a[static_cast<size_t>(k)], res.g.v.pow(res.g.m));
        for (int k = 0; k < r; ++k)
            for (int i = 0; i < r; ++i)
                dcoords[static_cast<size_t>(k)] +=
                    gcoords[static_cast<size_t>(i)] * basis[static_cast<size_t>(i)].coeff(k);
        doc["antiderivative"] = json::array();
        os << "antiderivative (coefficients of y, y', ...): ";
        for (size_t k = 0; k < dcoords.size(); ++k) {
            doc["antiderivative"].push_back(ratfun_to_string(dcoords[k]));
            os << (k ? ", " : "") << ratfun_to_string(dcoords[k]);
        }
        os << "\n";
    } else {
        os << "reduction obstructed; partial result shown\n";
    }
    doc["timing_ms"] = t.ms();
    emit(c, doc, os.str());
    return res.obstructed ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"integral bases of differential operator algebras"};
    app.require_subcommand(1);

    CommonOpts copt;
    std::string optext, elemtext, at, hermite_input;
    long terms = 6;

    CLI::App* compute = app.add_subcommand("compute", "compute an integral basis");
    compute->add_option("operator", optext, "operator expression")->required();
    add_common(compute, copt);

    CLI::App* check = app.add_subcommand("check", "test integrality of an element");
    check->add_option("operator", optext, "operator expression")->required();
    check->add_option("--element", elemtext, "element of C(x)[D]/<L>")->required();
    add_common(check, copt);

    CLI::App* solutions = app.add_subcommand("solutions", "local series solutions");
    solutions->add_option("operator", optext, "operator expression")->required();
    solutions->add_option("--at", at, "expansion point (rational or poly-root:p(t))")->required();
    solutions->add_option("--terms", terms, "series levels to display");
    add_common(solutions, copt);

    CLI::App* bounds = app.add_subcommand("bounds", "local exponents and truncation orders");
    bounds->add_option("operator", optext, "operator expression")->required();
    bounds->add_option("--at", at, "expansion point (rational or poly-root:p(t))");
    add_common(bounds, copt);

    CLI::App* hermite = app.add_subcommand("hermite", "Hermite reduction of a basis-vector integrand");
    hermite->add_option("input", hermite_input, "JSON input file, or - for stdin");
    add_common(hermite, copt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (compute->parsed()) return cmd_compute(optext, copt);
        if (check->parsed()) return cmd_check(optext, elemtext, copt);
        if (solutions->parsed()) return cmd_solutions(optext, at, terms, copt);
        if (bounds->parsed()) return cmd_bounds(optext, at, copt);
        if (hermite->parsed()) return cmd_hermite(hermite_input.empty() ? "-" : hermite_input, copt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const SplitError&) {
        std::cerr << "error: internal: unhandled modulus split\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
