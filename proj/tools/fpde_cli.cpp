// Command-line surface: list the catalog, verify a problem end to end, print
// its reduced fractional ODE system, print the solved coefficient series, or
// sample the solution as CSV.  Exit codes: 0 success, 1 verification failure,
// 2 configuration error; diagnostics go to standard error.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpde/catalog.hpp"
#include "fpde/errors.hpp"

namespace {

using namespace fpde;

// Configuration problems the flag parser cannot see (bad names, bad files).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Options {
    std::string example;
    std::string spec_file;
    std::vector<std::string> sets;
    std::vector<std::string> grids;
    std::string out = "-";
    std::string truncation;
    double tolerance = 1e-8;
    bool force = false;
};

std::string fmt_g(double v, int precision = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

// %g with the exponent's leading zeros stripped: 1e-08 -> 1e-8.
std::string fmt_short(double v) {
    std::string s = fmt_g(v, 6);
    auto e = s.find('e');
    if (e == std::string::npos) return s;
    std::size_t i = e + 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t z = i;
    while (z + 1 < s.size() && s[z] == '0') ++z;
    return s.substr(0, i) + s.substr(z);
}

std::pair<std::string, std::string> split_once(const std::string& s, char sep,
                                               const std::string& what) {
    auto pos = s.find(sep);
    if (pos == std::string::npos || pos == 0)
        throw ConfigError("expected " + what + ", got '" + s + "'");
    return {s.substr(0, pos), s.substr(pos + 1)};
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid " + what + " '" + text + "'");
    }
}

Rational parse_rational(const std::string& text, const std::string& what) {
    try {
        return Rational::parse(text);
    } catch (const std::exception&) {
        throw ConfigError("invalid " + what + " '" + text + "' (want an integer, fraction, or decimal)");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << text;
}

// Builds the problem from --example or --spec plus the --set overrides.
// Unknown --set names are routed through build() so its range messages
// surface verbatim.
std::pair<ProblemSpec, KnownSolution> load_problem(const Options& o) {
    if (o.example.empty() == o.spec_file.empty())
        throw ConfigError("provide exactly one of --example or --spec");

    std::optional<Rational> trunc;
    if (!o.truncation.empty()) trunc = parse_rational(o.truncation, "--truncation");

    std::map<std::string, Rational> params;
    std::map<std::string, double> binds;
    std::string id;
    std::pair<ProblemSpec, KnownSolution> base =
        o.spec_file.empty() ? build(o.example) : from_json(read_file(o.spec_file));
    id = base.first.id;
    if (!o.spec_file.empty()) {
        const ParamTable& pt = *base.first.params;
        for (std::size_t i = 0; i < pt.size(); ++i)
            params[pt.name(static_cast<int>(i))] = pt.value(static_cast<int>(i));
        binds = base.first.free_constants;
        if (!trunc) trunc = base.first.truncation;
    }

    std::vector<std::pair<std::string, std::string>> pending;
    for (const auto& s : o.sets) {
        auto [name, value] = split_once(s, '=', "--set name=value");
        if (base.first.params->index(name) >= 0)
            params[name] = parse_rational(value, "value for '" + name + "'");
        else if (base.first.free_constants.count(name))
            binds[name] = parse_double(value, "value for '" + name + "'");
        else
            pending.emplace_back(name, value);
    }
    if (!pending.empty()) {
        // Order parameters can unlock new free constants (the n-parameter
        // family), so reclassify leftovers against the updated constant set.
        auto mid = build(id, params, {}, trunc);
        for (const auto& [name, value] : pending) {
            if (mid.first.free_constants.count(name))
                binds[name] = parse_double(value, "value for '" + name + "'");
            else
                params[name] = parse_rational(value, "value for '" + name + "'");
        }
    }
    return build(id, params, binds, trunc);
}

// Per-variable grid overrides "var=lo,hi,count" on top of the defaults.
void apply_grids(const Options& o, const ProblemSpec& ps, GridAxis& time_axis,
                 std::vector<GridAxis>& space_axes) {
    for (const auto& g : o.grids) {
        auto [var, rest] = split_once(g, '=', "--grid var=min,max,count");
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.size() != 3)
            throw ConfigError("expected --grid " + var + "=min,max,count, got '" + rest + "'");
        GridAxis ax;
        ax.lo = parse_double(parts[0], "grid minimum");
        ax.hi = parse_double(parts[1], "grid maximum");
        double cnt = parse_double(parts[2], "grid count");
        ax.count = static_cast<int>(cnt);
        if (ax.count < 1 || ax.count != cnt)
            throw ConfigError("grid count for '" + var + "' must be an integer >= 1");
        if (!(ax.lo <= ax.hi))
            throw ConfigError("grid for '" + var + "' needs min <= max");
        if (var == ps.time_var) {
            time_axis = ax;
            continue;
        }
        bool found = false;
        for (std::size_t i = 0; i < ps.space_vars.size(); ++i)
            if (ps.space_vars[i] == var) {
                space_axes[i] = ax;
                found = true;
            }
        if (!found) {
            std::string valid = ps.time_var;
            for (const auto& v : ps.space_vars) valid += ", " + v;
            throw ConfigError("unknown grid variable '" + var + "' (have " + valid + ")");
        }
    }
}

std::vector<std::vector<double>> cartesian_rows(const GridAxis& time_axis,
                                                const std::vector<GridAxis>& space_axes) {
    std::vector<std::vector<double>> axes{axis_nodes(time_axis)};
    for (const auto& a : space_axes) axes.push_back(axis_nodes(a));
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        std::vector<double> row;
        for (std::size_t i = 0; i < axes.size(); ++i) row.push_back(axes[i][idx[i]]);
        rows.push_back(std::move(row));
        std::size_t i = axes.size();
        while (i > 0 && ++idx[i - 1] == axes[i - 1].size()) idx[--i] = 0;
        if (i == 0) break;
    }
    return rows;
}

std::string bound_values_line(const ProblemSpec& ps) {
    std::ostringstream out;
    const ParamTable& pt = *ps.params;
    out << "parameters:";
    for (std::size_t i = 0; i < pt.size(); ++i)
        out << (i ? ", " : " ") << pt.name(static_cast<int>(i)) << " = "
            << pt.value(static_cast<int>(i)).str();
    if (!ps.free_constants.empty()) {
        out << "\nconstants:";
        bool first = true;
        for (const auto& [name, v] : ps.free_constants) {
            out << (first ? " " : ", ") << name << " = " << fmt_g(v);
            first = false;
        }
    }
    return out.str();
}

// One reduced equation in the canonical text form
//   lam1*D^g1[K] + ... = psi + c*D^g[K'] + ...
std::string equation_line(const FODESystem& sys, const FODEEquation& eq) {
    const ParamTable& pt = *sys.params;
    auto coord = [&](int comp, int j) {
        return sys.symbols->names[static_cast<std::size_t>(
            sys.unknown[static_cast<std::size_t>(comp)][static_cast<std::size_t>(j)])];
    };
    auto order_text = [&](const FracOrder& base, int folds) {
        ExponentVector e = folds == 1 ? base.sym : base.sym.scaled(Rational(folds));
        std::string t = e.str(pt);
        bool composite = t.find(' ') != std::string::npos || t.find('*') != std::string::npos;
        return composite ? "D^{" + t + "}" : "D^" + t;
    };

    std::ostringstream out;
    for (std::size_t i = 0; i < eq.lhs.size(); ++i) {
        const TimeTerm& tt = eq.lhs[i];
        double lam = tt.lambda;
        if (i == 0) {
            if (lam < 0) out << "-";
        } else {
            out << (lam < 0 ? " - " : " + ");
        }
        if (std::fabs(std::fabs(lam) - 1.0) > 0) out << fmt_g(std::fabs(lam)) << "*";
        out << order_text(tt.base, tt.folds) << "[" << coord(eq.comp, eq.j) << "]";
    }
    out << " = ";
    bool have_rhs = false;
    if (!eq.psi.is_zero()) {
        out << eq.psi.str();
        have_rhs = true;
    }
    for (const auto& rd : eq.rhs_derivs) {
        double c = rd.coef;
        if (!have_rhs) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (std::fabs(std::fabs(c) - 1.0) > 0) out << fmt_g(std::fabs(c)) << "*";
        out << order_text(rd.order, 1) << "[" << coord(rd.comp, rd.j) << "]";
        have_rhs = true;
    }
    if (!have_rhs) out << "0";
    return out.str();
}

// Human-readable form of one basis atom from its recipe.
std::string atom_text(const BasisAtom& a) {
    std::ostringstream out;
    if (a.kind == "mono") {
        bool unit = a.coeff == 1.0;
        if (!unit || a.exps.empty()) out << fmt_g(a.coeff);
        bool first = unit && !a.exps.empty();
        for (const auto& [var, e] : a.exps) {
            if (!first) out << "*";
            first = false;
            out << var << (e == "1" ? "" : "^{" + e + "}");
        }
        return out.str();
    }
    std::string fn = a.kind == "ml" ? "E" : a.kind;
    if (a.coeff != 1.0) out << fmt_g(a.coeff) << "*";
    out << fn << "_{" << a.order << "}(" << fmt_g(a.lam) << "*" << a.var << "^{" << a.order
        << "})";
    return out.str();
}

std::string basis_fn_text(const std::vector<BasisAtom>& atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::string t = atom_text(atoms[i]);
        if (i) s += t.size() && t[0] == '-' ? " - " + t.substr(1) : " + " + t;
        else s += t;
    }
    return s.empty() ? "0" : s;
}

int cmd_list(const Options& o) {
    std::ostringstream out;
    for (const auto& e : catalog_index()) {
        out << e.id;
        for (std::size_t i = e.id.size(); i < 20; ++i) out << ' ';
        out << e.title << "\n";
    }
    write_output(o.out, out.str());
    return 0;
}

int cmd_verify(const Options& o) {
    if (!(o.tolerance > 0)) throw ConfigError("--tolerance must be positive");
    auto [ps, ks] = load_problem(o);

    std::vector<std::vector<double>> rows;
    if (!o.grids.empty()) {
        GridAxis t = ps.verify_time;
        std::vector<GridAxis> s = ps.verify_space;
        apply_grids(o, ps, t, s);
        rows = cartesian_rows(t, s);
    }
    VerificationReport rep = verify(ps, ks, rows);
    bool residual_ok = rep.residual.value <= o.tolerance;
    bool pass = rep.invariance.ok && rep.reduction.ok && residual_ok && rep.oracle.ok;

    std::ostringstream out;
    out << "example: " << ps.id << "  (" << ps.title << ")\n";
    out << bound_values_line(ps) << "\n";
    auto stage = [&](const char* name, const StageReport& r, bool ok) {
        out << name << ": " << (ok ? "PASS" : "FAIL") << "  " << r.note << "  ("
            << fmt_g(r.value, 3) << ")\n";
    };
    stage("invariance", rep.invariance, rep.invariance.ok);
    stage("reduction", rep.reduction, rep.reduction.ok);
    out << "residual: " << (residual_ok ? "PASS" : "FAIL") << "  max_residual "
        << (residual_ok ? "<=" : ">") << " " << fmt_short(o.tolerance) << "  ("
        << fmt_g(rep.residual.value, 3) << ", " << rep.residual.note << ")\n";
    stage("oracle", rep.oracle, rep.oracle.ok);
    out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
    write_output(o.out, out.str());

    if (!pass) {
        std::cerr << "verification failed for " << ps.id << "\n";
        return 1;
    }
    return 0;
}

int cmd_reduce(const Options& o) {
    auto [ps, ks] = load_problem(o);
    FODESystem sys = reduce(ps.T, ps.N, ps.I, ps.coord_names, ps.time_var);
    std::ostringstream out;
    for (const auto& eq : sys.eqs) out << equation_line(sys, eq) << "\n";
    write_output(o.out, out.str());
    return 0;
}

// Display copy without the cancellation dust far below the leading scale.
GenSeries strip_dust(const GenSeries& s) {
    double scale = 0.0;
    for (const auto& [k, c] : s.terms())
        if (c.is_scalar()) scale = std::max(scale, std::fabs(c.scalar()));
    GenSeries r = GenSeries::zero(s.params(), s.vars());
    for (const auto& [k, c] : s.terms())
        if (!c.is_scalar() || std::fabs(c.scalar()) > 1e-14 * scale) r.add_term(k, c);
    return r;
}

int cmd_solve(const Options& o) {
    auto [ps, ks] = load_problem(o);
    std::ostringstream out;
    out << "example: " << ps.id << "  (" << ps.title << ")\n";
    out << bound_values_line(ps) << "\n";
    out << "family: " << ks.description << "\n";
    std::string coords = ps.time_var;
    for (const auto& v : ps.space_vars) coords += ", " + v;

    std::size_t flat = 0;
    for (std::size_t p = 0; p < ks.sol.K.size(); ++p) {
        out << "\n" << ps.field_names[p] << "(" << coords << ") =";
        for (std::size_t j = 0; j < ks.sol.K[p].size(); ++j) {
            std::string phi = basis_fn_text(ps.recipe[p][j]);
            bool composite = phi.find(' ') != std::string::npos;
            out << (j ? " + " : " ") << ps.coord_names[flat + j] << "(" << ps.time_var << ")";
            if (phi != "1") out << "*" << (composite ? "(" + phi + ")" : phi);
        }
        out << "\n";
        for (std::size_t j = 0; j < ks.sol.K[p].size(); ++j)
            out << "  " << ps.coord_names[flat + j] << "(" << ps.time_var
                << ") = " << strip_dust(ks.sol.K[p][j]).str() << "\n";
        flat += ks.sol.K[p].size();
    }
    write_output(o.out, out.str());
    return 0;
}

int cmd_sample(const Options& o) {
    if (!(o.tolerance > 0)) throw ConfigError("--tolerance must be positive");
    auto [ps, ks] = load_problem(o);
    if (!o.force) {
        VerificationReport rep = verify(ps, ks);
        bool pass = rep.invariance.ok && rep.reduction.ok &&
                    rep.residual.value <= o.tolerance && rep.oracle.ok;
        if (!pass) {
            std::cerr << "verification failed for " << ps.id
                      << "; not sampling (override with --force)\n";
            return 1;
        }
    }
    GridAxis t = ps.sample_time;
    std::vector<GridAxis> s = ps.sample_space;
    apply_grids(o, ps, t, s);
    write_output(o.out, sample_csv(ps, ks, t, s));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant subspace toolkit for multi-term fractional PDE systems"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* cmd, bool with_tol) {
        cmd->add_option("--example", o.example, "catalog example id (see `list`)");
        cmd->add_option("--spec", o.spec_file, "problem JSON file (schema fpde.problem/1)");
        cmd->add_option("--set", o.sets,
                        "override a fractional order or free constant, name=value; repeatable");
        cmd->add_option("--grid", o.grids, "grid override, var=min,max,count; repeatable");
        cmd->add_option("--out", o.out, "output path, - for standard output");
        cmd->add_option("--truncation", o.truncation,
                        "series truncation frontier (default: the problem's own, 12)");
        if (with_tol)
            cmd->add_option("--tolerance", o.tolerance,
                            "max relative residual accepted by the verdict (default 1e-8)");
    };

    CLI::App* c_list = app.add_subcommand("list", "list the catalog examples");
    c_list->add_option("--out", o.out, "output path, - for standard output");
    CLI::App* c_verify = app.add_subcommand(
        "verify", "check invariance, reduction, residual, and oracle stages for one problem");
    add_common(c_verify, true);
    CLI::App* c_reduce =
        app.add_subcommand("reduce", "print the reduced fractional ODE system, one equation per line");
    add_common(c_reduce, false);
    CLI::App* c_solve =
        app.add_subcommand("solve", "print the solved coefficient functions as series");
    add_common(c_solve, false);
    CLI::App* c_sample = app.add_subcommand("sample", "write solution samples as CSV");
    add_common(c_sample, true);
    c_sample->add_flag("--force", o.force, "sample even when verification fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_list->parsed()) return cmd_list(o);
        if (c_verify->parsed()) return cmd_verify(o);
        if (c_reduce->parsed()) return cmd_reduce(o);
        if (c_solve->parsed()) return cmd_solve(o);
        if (c_sample->parsed()) return cmd_sample(o);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
