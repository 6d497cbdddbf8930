#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpde/errors.hpp"
#include "fpde/operators.hpp"

using namespace fpde;

namespace {

ParamTableRef ab_params(const Rational& alpha = Rational(3, 10),
                        const Rational& beta = Rational(4, 5)) {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha", alpha);
    p->declare("beta", beta);
    return p;
}

ExponentVector bexp(const ParamTable& p, const Rational& scale = Rational(1)) {
    return ExponentVector::param(p, "beta", scale);
}

// span{1, x^beta} per component
SubspaceBasis poly_basis(const ParamTableRef& p, int components) {
    SubspaceBasis I;
    GenSeries one = GenSeries::constant(p, {"x"}, Coeff(1.0));
    GenSeries xb = GenSeries::monomial(p, {"x"}, "x", bexp(*p), Coeff(1.0));
    for (int c = 0; c < components; ++c) I.phi.push_back({one, xb});
    return I;
}

// quadratic advection pair: N_p = -a0 d^{2b}f_p - a1 f_p d^b f_p - a2 (f d^b g + g d^b f)
std::vector<OpRef> burgers_ops(const ParamTableRef& p, double a0, double a1, double a2, double b0,
                               double b1, double b2) {
    FracOrder b = FracOrder::of(*p, "beta");
    auto f = op_component(0), g = op_component(1);
    auto cross = [&](double c) {
        return op_scale(-c, op_sum({op_product({f, op_sderiv(g, "x", b)}),
                                    op_product({g, op_sderiv(f, "x", b)})}));
    };
    OpRef n1 = op_sum({op_scale(-a0, op_sderiv(f, "x", b, 2)),
                       op_scale(-a1, op_product({f, op_sderiv(f, "x", b)})), cross(a2)});
    OpRef n2 = op_sum({op_scale(-b0, op_sderiv(g, "x", b, 2)),
                       op_scale(-b1, op_product({g, op_sderiv(g, "x", b)})), cross(b2)});
    return {n1, n2};
}

double gam(const Rational& x) { return gamma_ratio(x, Rational(1)); }

Poly mono(const SymbolTableRef& syms, std::vector<int> e, double c) {
    return poly_term(syms, std::move(e), c);
}

} // namespace

TEST_CASE("quadratic pair image on the monomial subspace matches hand expansion") {
    auto p = ab_params();
    const double a1 = 0.7, a2 = -1.3;
    auto N = burgers_ops(p, -1.0, a1, a2, -1.0, 2.1, 0.4);
    GenSeries f = GenSeries::constant(p, {"x"}, Coeff(2.0)) +
                  GenSeries::monomial(p, {"x"}, "x", bexp(*p), Coeff(3.0));
    GenSeries g = GenSeries::constant(p, {"x"}, Coeff(-1.0)) +
                  GenSeries::monomial(p, {"x"}, "x", bexp(*p), Coeff(0.5));
    auto img = op_apply(N, {f, g});
    const double G = gam(Rational(9, 5));
    // second-stage derivative annihilates both fields, so a0 drops out
    GenSeries want = GenSeries::constant(p, {"x"}, Coeff(-G * (a1 * 6.0 + a2 * 1.0 + a2 * -3.0))) +
                     GenSeries::monomial(p, {"x"}, "x", bexp(*p),
                                         Coeff(-G * (a1 * 9.0 + 2.0 * a2 * 1.5)));
    CHECK(series_equal(img[0], want, 1e-13));
}

TEST_CASE("zero field tuple maps to the zero tuple") {
    auto p = ab_params();
    auto N = burgers_ops(p, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
    GenSeries z = GenSeries::zero(p, {"x"});
    auto img = op_apply(N, {z, z});
    CHECK(img[0].size() == 0);
    CHECK(img[1].size() == 0);
}

TEST_CASE("invariance and psi extraction for the quadratic advection pair") {
    auto p = ab_params();
    const double a1 = 0.7, a2 = -1.3, b1 = 2.1, b2 = 0.4;
    auto N = burgers_ops(p, -1.0, a1, a2, -1.0, b1, b2);
    SubspaceBasis I = poly_basis(p, 2);
    auto rep = check_invariant(N, I);
    REQUIRE(rep.invariant);
    CHECK(rep.genuine_residual[0] <= 1e-12);
    CHECK(rep.genuine_residual[1] <= 1e-12);

    const double G = gam(Rational(9, 5));
    auto& S = rep.env->syms; // K1 K2 L1 L2
    Poly p00 = mono(S, {1, 1, 0, 0}, -G * a1) + mono(S, {1, 0, 0, 1}, -G * a2) +
               mono(S, {0, 1, 1, 0}, -G * a2);
    Poly p01 = mono(S, {0, 2, 0, 0}, -G * a1) + mono(S, {0, 1, 0, 1}, -2.0 * G * a2);
    Poly p10 = mono(S, {0, 0, 1, 1}, -G * b1) + mono(S, {1, 0, 0, 1}, -G * b2) +
               mono(S, {0, 1, 1, 0}, -G * b2);
    Poly p11 = mono(S, {0, 0, 0, 2}, -G * b1) + mono(S, {0, 1, 0, 1}, -2.0 * G * b2);
    CHECK(poly_equal(rep.psi[0][0], p00, 1e-12));
    CHECK(poly_equal(rep.psi[0][1], p01, 1e-12));
    CHECK(poly_equal(rep.psi[1][0], p10, 1e-12));
    CHECK(poly_equal(rep.psi[1][1], p11, 1e-12));
}

TEST_CASE("squaring escapes span{x^beta}; advection by the derivative does not") {
    auto p = ab_params();
    SubspaceBasis I;
    I.phi.push_back({GenSeries::monomial(p, {"x"}, "x", bexp(*p), Coeff(1.0))});

    auto sq = check_invariant({op_power(op_component(0), 2)}, I);
    CHECK_FALSE(sq.invariant);
    CHECK(sq.genuine_residual[0] > 0.5);
    CHECK_THROWS_AS(
        reduce(TimeOperator{{{TimeTerm{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}}}},
               {op_power(op_component(0), 2)}, I),
        NotInvariantError);

    FracOrder b = FracOrder::of(*p, "beta");
    auto adv = check_invariant(
        {op_product({op_component(0), op_sderiv(op_component(0), "x", b)})}, I);
    REQUIRE(adv.invariant);
    Poly want = mono(adv.env->syms, {2}, gam(Rational(9, 5)));
    CHECK(poly_equal(adv.psi[0][0], want, 1e-12));
}

TEST_CASE("dispersion-coupled pair groups the cross coefficients") {
    auto p = ab_params();
    const double a1 = 1.7, a2 = 0.6, a3 = -0.9, b1 = 1.1, b2 = -0.4, b3 = 2.2;
    FracOrder b = FracOrder::of(*p, "beta");
    auto f = op_component(0), g = op_component(1);
    OpRef n1 = op_sum({op_scale(a1, op_product({f, op_sderiv(f, "x", b)})),
                       op_scale(a2, op_product({g, op_sderiv(g, "x", b)})),
                       op_scale(a3, op_sderiv(f, "x", b, 3))});
    OpRef n2 = op_sum({op_scale(b1, op_product({f, op_sderiv(g, "x", b)})),
                       op_scale(b2, op_product({g, op_sderiv(f, "x", b)})),
                       op_scale(b3, op_sderiv(g, "x", b, 3))});
    auto rep = check_invariant({n1, n2}, poly_basis(p, 2));
    REQUIRE(rep.invariant);
    const double G = gam(Rational(9, 5));
    auto& S = rep.env->syms;
    CHECK(poly_equal(rep.psi[0][0], mono(S, {1, 1, 0, 0}, G * a1) + mono(S, {0, 0, 1, 1}, G * a2),
                     1e-12));
    CHECK(poly_equal(rep.psi[0][1], mono(S, {0, 2, 0, 0}, G * a1) + mono(S, {0, 0, 0, 2}, G * a2),
                     1e-12));
    CHECK(poly_equal(rep.psi[1][0], mono(S, {1, 0, 0, 1}, G * b1) + mono(S, {0, 1, 1, 0}, G * b2),
                     1e-12));
    // the x^beta row collapses onto the combined constant b1+b2
    CHECK(poly_equal(rep.psi[1][1], mono(S, {0, 1, 0, 1}, G * (b1 + b2)), 1e-12));
}

TEST_CASE("exact cancellation on the trig/exponential mixed basis") {
    auto p = ab_params();
    const double a1 = 0.8, a2 = 1.4, m1 = 2.3, n1 = -1.1, n2 = 0.7;
    const Rational trunc(12);
    FracOrder b = FracOrder::of(*p, "beta");
    ExponentVector be = bexp(*p);

    SubspaceBasis I;
    I.phi.push_back({sin_atom(p, {"x"}, "x", a2, be, trunc), cos_atom(p, {"x"}, "x", a2, be, trunc)});
    I.phi.push_back({ml_atom(p, {"x"}, "x", -a1, be, trunc)});

    auto f = op_component(0), g = op_component(1);
    OpRef N1 = op_sum({op_sderiv(f, "x", b, 2),
                       op_scale(m1, op_product({g, op_sderiv(g, "x", b)})),
                       op_scale(a1 * m1, op_power(g, 2))});
    OpRef N2 = op_sum({op_sderiv(g, "x", b, 2), op_scale(n1, op_sderiv(f, "x", b, 2)),
                       op_scale(a2 * a2 * n1, f), op_scale(n2, g)});

    auto rep = check_invariant({N1, N2}, I);
    REQUIRE(rep.invariant);
    auto& S = rep.env->syms; // K1 K2 L1
    CHECK(poly_equal(rep.psi[0][0], mono(S, {1, 0, 0}, -a2 * a2), 1e-10));
    CHECK(poly_equal(rep.psi[0][1], mono(S, {0, 1, 0}, -a2 * a2), 1e-10));
    CHECK(poly_equal(rep.psi[1][0], mono(S, {0, 0, 1}, a1 * a1 + n2), 1e-10));
    // below the frontier the quadratic parts cancel termwise
    CHECK(rep.genuine_residual[0] <= 1e-10 * std::max(1.0, rep.image_scale[0]));
    CHECK(rep.artifact_residual[0] >= 0.0);
}

TEST_CASE("reduction emits one equation per coordinate in declaration order") {
    auto ptab = std::make_shared<ParamTable>();
    ptab->declare("alpha1", Rational(2, 5));
    ptab->declare("alpha2", Rational(7, 10));
    ptab->declare("beta", Rational(9, 10));
    ExponentVector be = ExponentVector::param(*ptab, "beta");
    FracOrder b = FracOrder::of(*ptab, "beta");
    const double m1 = 1.6, m2 = -0.8;

    SubspaceBasis I;
    GenSeries one = GenSeries::constant(ptab, {"x"}, Coeff(1.0));
    GenSeries xb = GenSeries::monomial(ptab, {"x"}, "x", be, Coeff(1.0));
    I.phi = {{one, xb}, {one, xb}};

    auto f = op_component(0), g = op_component(1);
    OpRef N1 = op_scale(-1.0, op_sderiv(g, "x", b));
    OpRef N2 = op_sum({op_scale(-m1, op_sderiv(f, "x", b)),
                       op_scale(3.0, op_product({f, op_sderiv(f, "x", b)})),
                       op_scale(m2, op_sderiv(f, "x", b, 3))});
    TimeOperator T;
    T.terms = {{TimeTerm{1.0, FracOrder::of(*ptab, "alpha1"), 1, DerivKind::Caputo}},
               {TimeTerm{1.0, FracOrder::of(*ptab, "alpha2"), 1, DerivKind::Caputo}}};

    FODESystem sys = reduce(T, {N1, N2}, I);
    REQUIRE(sys.eqs.size() == 4);
    CHECK(sys.unknown_count() == 4);
    CHECK(sys.symbols->names == std::vector<std::string>{"K1", "K2", "L1", "L2"});
    const double G = gam(Rational(19, 10));
    auto& S = sys.symbols;
    CHECK(poly_equal(sys.eqs[0].psi, mono(S, {0, 0, 0, 1}, -G), 1e-12));
    CHECK(sys.eqs[1].psi.is_zero());
    CHECK(poly_equal(sys.eqs[2].psi, mono(S, {0, 1, 0, 0}, -m1 * G) + mono(S, {1, 1, 0, 0}, 3.0 * G),
                     1e-12));
    CHECK(poly_equal(sys.eqs[3].psi, mono(S, {0, 2, 0, 0}, 3.0 * G), 1e-12));
    for (const auto& eq : sys.eqs) {
        CHECK(eq.rhs_derivs.empty());
        REQUIRE(eq.lhs.size() == 1);
    }
    CHECK(sys.eqs[0].lhs[0].base.mu == Rational(2, 5));
    CHECK(sys.eqs[2].lhs[0].base.mu == Rational(7, 10));
}

TEST_CASE("two-variable trig span under third-stage dispersion") {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha", Rational(4, 5));
    p->declare("beta1", Rational(7, 10));
    p->declare("beta2", Rational(9, 10));
    const double l1 = 1.0, l2 = 2.0;
    const Rational trunc(12);
    std::vector<std::string> vars{"x1", "x2"};
    ExponentVector b1 = ExponentVector::param(*p, "beta1");
    ExponentVector b2 = ExponentVector::param(*p, "beta2");

    SubspaceBasis I;
    I.phi.push_back({cos_atom(p, vars, "x1", l1, b1, trunc), sin_atom(p, vars, "x1", l1, b1, trunc),
                     cos_atom(p, vars, "x2", l2, b2, trunc),
                     sin_atom(p, vars, "x2", l2, b2, trunc)});

    auto f = op_component(0);
    OpRef N = op_scale(-1.0, op_sum({op_sderiv(f, "x1", FracOrder::of(*p, "beta1"), 3),
                                     op_sderiv(f, "x2", FracOrder::of(*p, "beta2"), 3)}));
    auto rep = check_invariant({N}, I);
    REQUIRE(rep.invariant);
    auto& S = rep.env->syms; // K1..K4
    CHECK(poly_equal(rep.psi[0][0], mono(S, {0, 1, 0, 0}, l1 * l1 * l1), 1e-9));
    CHECK(poly_equal(rep.psi[0][1], mono(S, {1, 0, 0, 0}, -l1 * l1 * l1), 1e-9));
    CHECK(poly_equal(rep.psi[0][2], mono(S, {0, 0, 0, 1}, l2 * l2 * l2), 1e-9));
    CHECK(poly_equal(rep.psi[0][3], mono(S, {0, 0, 1, 0}, -l2 * l2 * l2), 1e-9));
}

TEST_CASE("mixed time-space stages reduce to derivative terms on the right side") {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha1", Rational(4, 5));
    p->declare("alpha2", Rational(9, 10));
    p->declare("beta", Rational(3, 5));
    p->declare("gamma", Rational(1, 2));
    const double a1 = 0.9, a2 = 1.5, m1 = 2.0, n1 = -1.3, n2 = 0.6;
    const Rational trunc(12);
    ExponentVector be = ExponentVector::param(*p, "beta");
    FracOrder b = FracOrder::of(*p, "beta");
    FracOrder g_ord = FracOrder::of(*p, "gamma");

    SubspaceBasis I;
    I.phi.push_back({ml_atom(p, {"x"}, "x", a2, be, trunc), ml_atom(p, {"x"}, "x", -a2, be, trunc)});
    I.phi.push_back({ml_atom(p, {"x"}, "x", -a1, be, trunc)});

    auto f = op_component(0), g = op_component(1);
    OpRef N1 = op_sum({op_mixed(f, g_ord, "x", b, 2),
                       op_scale(m1, op_product({g, op_sderiv(g, "x", b)})),
                       op_scale(a1 * m1, op_power(g, 2))});
    OpRef N2 = op_sum({op_mixed(g, g_ord, "x", b, 2), op_scale(n1, op_sderiv(f, "x", b, 2)),
                       op_scale(-a2 * a2 * n1, f), op_scale(n2, g)});
    TimeOperator T;
    T.terms = {{TimeTerm{1.0, FracOrder::of(*p, "alpha1"), 1, DerivKind::Caputo}},
               {TimeTerm{1.0, FracOrder::of(*p, "alpha2"), 1, DerivKind::Caputo}}};

    FODESystem sys = reduce(T, {N1, N2}, I);
    REQUIRE(sys.eqs.size() == 3);
    CHECK(sys.eqs[0].psi.is_zero());
    REQUIRE(sys.eqs[0].rhs_derivs.size() == 1);
    CHECK(sys.eqs[0].rhs_derivs[0].comp == 0);
    CHECK(sys.eqs[0].rhs_derivs[0].j == 0);
    CHECK(sys.eqs[0].rhs_derivs[0].order.mu == Rational(1, 2));
    CHECK(sys.eqs[0].rhs_derivs[0].coef == doctest::Approx(a2 * a2).epsilon(1e-12));
    REQUIRE(sys.eqs[1].rhs_derivs.size() == 1);
    CHECK(sys.eqs[1].rhs_derivs[0].j == 1);
    CHECK(sys.eqs[1].rhs_derivs[0].coef == doctest::Approx(a2 * a2).epsilon(1e-12));
    REQUIRE(sys.eqs[2].rhs_derivs.size() == 1);
    CHECK(sys.eqs[2].rhs_derivs[0].comp == 1);
    CHECK(sys.eqs[2].rhs_derivs[0].coef == doctest::Approx(a1 * a1).epsilon(1e-12));
    CHECK(poly_equal(sys.eqs[2].psi, mono(sys.symbols, {0, 0, 1}, n2), 1e-10));
}

TEST_CASE("psi extraction agrees with numeric application on random coordinates") {
    auto p = ab_params();
    auto N = burgers_ops(p, -1.0, 0.7, -1.3, -1.0, 2.1, 0.4);
    SubspaceBasis I = poly_basis(p, 2);
    auto rep = check_invariant(N, I);
    REQUIRE(rep.invariant);

    std::mt19937 rng(77);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> k(4);
        for (auto& v : k) v = U(rng);
        GenSeries f = I.phi[0][0].scaled(k[0]) + I.phi[0][1].scaled(k[1]);
        GenSeries g = I.phi[1][0].scaled(k[2]) + I.phi[1][1].scaled(k[3]);
        auto img = op_apply(N, {f, g});
        for (int comp = 0; comp < 2; ++comp) {
            GenSeries recon = GenSeries::zero(p, {"x"});
            for (int j = 0; j < 2; ++j)
                recon = recon + I.phi[comp][j].scaled(rep.psi[comp][j].eval(k));
            double scale = std::max(1.0, img[comp].max_abs_coeff());
            CHECK(series_equal(img[comp], recon, 1e-9 * scale));
        }
    }
}

TEST_CASE("scaling a basis function rescales its psi row consistently") {
    auto p = ab_params();
    auto N = burgers_ops(p, -1.0, 0.7, -1.3, -1.0, 2.1, 0.4);
    SubspaceBasis I = poly_basis(p, 2);
    const double c = 2.5;
    SubspaceBasis J = I;
    J.phi[0][1] = J.phi[0][1].scaled(c);

    auto ri = check_invariant(N, I);
    auto rj = check_invariant(N, J);
    REQUIRE(ri.invariant);
    REQUIRE(rj.invariant);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int it = 0; it < 20; ++it) {
        std::vector<double> kp(4);
        for (auto& v : kp) v = U(rng);
        // same element in both coordinate systems: k = kp except k[1] = c*kp[1]
        std::vector<double> k = kp;
        k[1] = c * kp[1];
        for (int comp = 0; comp < 2; ++comp)
            for (int j = 0; j < 2; ++j) {
                double lhs = rj.psi[comp][j].eval(kp) * (comp == 0 && j == 1 ? c : 1.0);
                double rhs = ri.psi[comp][j].eval(k);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }
    }
}

TEST_CASE("time derivative passes through separated products termwise") {
    auto p = ab_params();
    std::vector<std::string> tv{"t"}, xv{"x"}, txv{"t", "x"};
    FracOrder g_ord = FracOrder::of(*p, Rational(2, 5));
    GenSeries K = GenSeries::monomial(p, tv, "t", ExponentVector::constant(*p, Rational(1, 2)),
                                      Coeff(1.3)) +
                  GenSeries::monomial(p, tv, "t", ExponentVector::constant(*p, Rational(7, 5)),
                                      Coeff(-0.4)) +
                  GenSeries::constant(p, tv, Coeff(2.2));
    GenSeries phi = GenSeries::monomial(p, xv, "x", bexp(*p), Coeff(0.9)) +
                    GenSeries::constant(p, xv, Coeff(-1.1));
    GenSeries lhs = caputo_deriv(K.embedded(txv) * phi.embedded(txv), "t", g_ord);
    GenSeries rhs = caputo_deriv(K, "t", g_ord).embedded(txv) * phi.embedded(txv);
    CHECK(series_equal(lhs, rhs, 1e-13));
}

TEST_CASE("power-law pair satisfies the advection system on a positive grid") {
    auto p = ab_params(Rational(3, 10), Rational(4, 5));
    // row bindings that make the displayed closed form an exact solution
    const double a1 = 2.0, a2 = -1.0, b1 = -2.0, b2 = 1.0, M1 = 1.0;
    auto N = burgers_ops(p, -1.0, a1, a2, -1.0, b1, b2);
    const double G = gam(Rational(9, 5));
    const double P = gamma_ratio(Rational(7, 10), Rational(2, 5)); // G(1-a)/G(1-2a)

    SolutionForm sol;
    sol.basis = poly_basis(p, 2);
    ExponentVector mt = ExponentVector::param(*p, "alpha", Rational(-1));
    auto kpow = [&](double c) {
        return GenSeries::monomial(p, {"t"}, "t", mt, Coeff(c));
    };
    sol.K = {{kpow(2.0 * M1), kpow(-P / G)}, {kpow(M1), kpow(-P / (2.0 * G))}};

    TimeOperator T;
    T.terms = {{TimeTerm{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville}},
               {TimeTerm{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville}}};

    std::vector<std::vector<double>> grid;
    for (double t : {0.5, 1.0, 2.0})
        for (double x : {0.1, 0.7, 2.0}) grid.push_back({t, x});
    CHECK(residual(T, N, sol, grid) <= 1e-8);
}

TEST_CASE("polynomial-in-time family satisfies the shallow-water pair") {
    auto ptab = std::make_shared<ParamTable>();
    ptab->declare("alpha1", Rational(2, 5));
    ptab->declare("alpha2", Rational(7, 10));
    ptab->declare("beta", Rational(9, 10));
    const double m1 = 1.5, m2 = 0.7;
    const double e = std::exp(1.0);
    const double a = e, b = 2.0, c = 1.5, d = 0.0;
    ExponentVector be = ExponentVector::param(*ptab, "beta");
    FracOrder bord = FracOrder::of(*ptab, "beta");
    const double G = gam(Rational(19, 10));
    auto gmono = [&](const Rational& ex, double co) {
        return GenSeries::monomial(ptab, {"t"}, "t", ExponentVector::constant(*ptab, ex), Coeff(co));
    };
    const Rational a1r(2, 5), a2r(7, 10);
    auto gamma1 = [&](const Rational& x) { return gam(x + Rational(1)); };

    SolutionForm sol;
    GenSeries one = GenSeries::constant(ptab, {"x"}, Coeff(1.0));
    GenSeries xb = GenSeries::monomial(ptab, {"x"}, "x", be, Coeff(1.0));
    sol.basis.phi = {{one, xb}, {one, xb}};
    GenSeries K1 = gmono(Rational(0), a) + gmono(a1r, -d * G / gamma1(a1r)) +
                   gmono(a1r + a2r, -3.0 * b * b * G * G / gamma1(a1r + a2r));
    GenSeries K2 = gmono(Rational(0), b);
    GenSeries L1 = gmono(Rational(0), c) + gmono(a2r, (3.0 * b * a - m1 * b) * G / gamma1(a2r)) +
                   gmono(a1r + a2r, -3.0 * b * d * G * G / gamma1(a1r + a2r)) +
                   gmono(a1r + a2r * Rational(2),
                         -9.0 * b * b * b * G * G * G / gamma1(a1r + a2r * Rational(2)));
    GenSeries L2 = gmono(Rational(0), d) + gmono(a2r, 3.0 * b * b * G / gamma1(a2r));
    sol.K = {{K1, K2}, {L1, L2}};

    auto f = op_component(0), g = op_component(1);
    OpRef N1 = op_scale(-1.0, op_sderiv(g, "x", bord));
    OpRef N2 = op_sum({op_scale(-m1, op_sderiv(f, "x", bord)),
                       op_scale(3.0, op_product({f, op_sderiv(f, "x", bord)})),
                       op_scale(m2, op_sderiv(f, "x", bord, 3))});
    TimeOperator T;
    T.terms = {{TimeTerm{1.0, FracOrder::of(*ptab, "alpha1"), 1, DerivKind::Caputo}},
               {TimeTerm{1.0, FracOrder::of(*ptab, "alpha2"), 1, DerivKind::Caputo}}};

    std::vector<std::vector<double>> grid;
    for (double t : {0.2, 0.9, 1.7})
        for (double x : {0.3, 1.2}) grid.push_back({t, x});
    CHECK(residual(T, {N1, N2}, sol, grid) <= 1e-8);
}

TEST_CASE("coordinate-coefficient operator reproduces the classical rotation limit") {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha", Rational(1));
    p->declare("beta", Rational(1));
    p->declare("gamma", Rational(1));
    const Rational trunc(16);
    std::vector<std::string> xv{"x", "y"};
    ExponentVector two = ExponentVector::constant(*p, Rational(2));
    FracOrder bord = FracOrder::of(*p, "beta");
    FracOrder gord = FracOrder::of(*p, "gamma");

    SolutionForm sol;
    sol.basis.phi = {{GenSeries::constant(p, xv, Coeff(1.0)),
                      GenSeries::monomial(p, xv, "x", two, Coeff(1.0)),
                      GenSeries::monomial(p, xv, "y", two, Coeff(1.0))}};
    // sinh and cosh as ml2 expansions: t E_{2,2}(t^2) and E_{2,1}(t^2)
    ExponentVector ta = ExponentVector::constant(*p, Rational(2));
    GenSeries sinh_t = ml2_atom(p, {"t"}, "t", 1.0, ta, ta, ExponentVector::constant(*p, Rational(1)),
                                trunc);
    GenSeries cosh_t = ml2_atom(p, {"t"}, "t", 1.0, ta, ExponentVector::constant(*p, Rational(1)),
                                ExponentVector::constant(*p, Rational(0)), trunc);
    sol.K = {{GenSeries::zero(p, {"t"}), sinh_t, cosh_t}};

    auto f = op_component(0);
    OpRef N = op_scale(0.5, op_sum({op_product({op_coord("x", two.scaled(Rational(1))),
                                                op_sderiv(f, "y", gord, 2)}),
                                    op_product({op_coord("y", two), op_sderiv(f, "x", bord, 2)})}));
    TimeOperator T;
    T.terms = {{TimeTerm{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}}};

    std::vector<std::vector<double>> grid;
    for (double t : {0.25, 0.5, 1.0})
        for (double x : {0.5, 1.5})
            for (double y : {0.4, 1.2}) grid.push_back({t, x, y});
    CHECK(residual(T, {N}, sol, grid) <= 1e-10);

    // assembled field against the classical closed form
    auto fields = assemble(sol);
    GenSeries fd = drop_beyond_frontier(fields[0]);
    for (const auto& pt : grid) {
        double want = std::sinh(pt[0]) * pt[1] * pt[1] + std::cosh(pt[0]) * pt[2] * pt[2];
        CHECK(std::fabs(fd.eval(pt) - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
    }
}

TEST_CASE("basis atoms expand to the expected leading terms") {
    auto p = ab_params();
    ExponentVector be = bexp(*p);
    const Rational trunc(12);
    GenSeries ml = ml_atom(p, {"x"}, "x", 2.0, be, trunc);
    // k-th coefficient 2^k / Gamma(k beta + 1)
    std::vector<double> at1 = {1.0};
    double acc = 0.0;
    for (int k = 0; Rational(4 * k, 5) <= trunc; ++k)
        acc += std::pow(2.0, k) / gam(Rational(4 * k, 5) + Rational(1));
    CHECK(ml.eval({1.0}) == doctest::Approx(acc).epsilon(1e-12));
    CHECK(ml.truncated());

    // n=0 epsilon series coincides with the two-parameter ML series shifted by w=b-1
    ExponentVector a = ExponentVector::constant(*p, Rational(1, 2));
    ExponentVector bml = ExponentVector::constant(*p, Rational(13, 10));
    GenSeries eps = eps_atom(p, {"t"}, "t", 0, 0.8, true, a, bml, trunc);
    GenSeries ml2 = ml2_atom(p, {"t"}, "t", -0.8, a, bml,
                             bml - ExponentVector::constant(*p, Rational(1)), trunc);
    CHECK(series_equal(eps, ml2, 1e-13));

    // sin/cos atoms at beta=1 match the classical functions
    auto pc = std::make_shared<ParamTable>();
    pc->declare("beta", Rational(1));
    ExponentVector one = ExponentVector::param(*pc, "beta");
    GenSeries s = sin_atom(pc, {"x"}, "x", 1.5, one, Rational(30));
    GenSeries c = cos_atom(pc, {"x"}, "x", 1.5, one, Rational(30));
    for (double x : {0.3, 1.0, 2.0}) {
        CHECK(s.eval({x}) == doctest::Approx(std::sin(1.5 * x)).epsilon(1e-12));
        CHECK(c.eval({x}) == doctest::Approx(std::cos(1.5 * x)).epsilon(1e-12));
    }
}

TEST_CASE("operator builders validate their arguments") {
    auto p = ab_params();
    CHECK_THROWS_AS(op_power(op_component(0), 0), DomainError);
    CHECK_THROWS_AS(op_sum({}), DomainError);
    CHECK_THROWS_AS(op_sderiv(op_component(0), "x", FracOrder::of(*p, "beta"), 0), DomainError);
    GenSeries z = GenSeries::zero(p, {"x"});
    CHECK_THROWS_AS(op_apply({op_component(2)}, {z}), DomainError);
    // nonlinear coefficient under a time-derivative marker is rejected
    SubspaceBasis I;
    I.phi.push_back({GenSeries::monomial(p, {"x"}, "x", bexp(*p), Coeff(1.0))});
    OpRef bad = op_mixed(op_power(op_component(0), 2), FracOrder::of(*p, Rational(1, 5)), "x",
                         FracOrder::of(*p, "beta"), 0);
    CHECK_THROWS_AS(check_invariant({bad}, I), DomainError);
}
