#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fpde/errors.hpp"
#include "fpde/fode.hpp"
#include "fpde/fracalc.hpp"

using namespace fpde;

namespace {

ParamTableRef a_params(const Rational& alpha = Rational(3, 5)) {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha", alpha);
    return p;
}

ParamTableRef ab_params(const Rational& alpha) {
    auto p = std::make_shared<ParamTable>();
    p->declare("alpha", alpha);
    p->declare("beta", Rational(4, 5));
    return p;
}

ExponentVector ev_c(const ParamTable& p, const Rational& r) {
    return ExponentVector::constant(p, r);
}

ExponentVector ev_a(const ParamTable& p, const Rational& s = Rational(1)) {
    return ExponentVector::param(p, "alpha", s);
}

FODESystem make_sys(ParamTableRef p, std::vector<std::string> names) {
    FODESystem sys;
    auto st = std::make_shared<SymbolTable>();
    st->names = std::move(names);
    sys.symbols = st;
    std::vector<int> flat(sys.symbols->names.size());
    std::iota(flat.begin(), flat.end(), 0);
    sys.unknown = {flat};
    sys.params = std::move(p);
    return sys;
}

FODEEquation mk_eq(int j, std::vector<TimeTerm> lhs, Poly psi,
                   std::vector<RhsDerivTerm> rds = {}) {
    FODEEquation e;
    e.comp = 0;
    e.j = j;
    e.lhs = std::move(lhs);
    e.psi = std::move(psi);
    e.rhs_derivs = std::move(rds);
    return e;
}

double gam(const Rational& x) { return gamma_ratio(x, Rational(1)); }

} // namespace

TEST_CASE("single relaxation equation marches to the one-parameter series") {
    auto p = a_params();
    auto sys = make_sys(p, {"K"});
    const double c = 0.8;
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                     Poly::symbol(sys.symbols, 0, c))};
    auto sol = solve_series(sys, {{{1.0}}}, Rational(12));
    GenSeries want = ml_atom(p, {"t"}, "t", c, ev_a(*p), Rational(12));
    CHECK(series_equal(sol.K[0], want, 1e-12));
}

TEST_CASE("paired rotation marches to the fractional sine and cosine") {
    auto p = a_params(Rational(1, 2));
    auto sys = make_sys(p, {"K1", "K2"});
    const double w = 0.9, amp = 1.7;
    TimeTerm dt{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo};
    sys.eqs = {mk_eq(0, {dt}, Poly::symbol(sys.symbols, 1, w)),
               mk_eq(1, {dt}, Poly::symbol(sys.symbols, 0, -w))};
    auto sol = solve_series(sys, {{{0.0}, {amp}}}, Rational(10));
    GenSeries s = sin_atom(p, {"t"}, "t", w, ev_a(*p), Rational(10)).scaled(amp);
    GenSeries c = cos_atom(p, {"t"}, "t", w, ev_a(*p), Rational(10)).scaled(amp);
    CHECK(series_equal(sol.K[0], s, 1e-12));
    CHECK(series_equal(sol.K[1], c, 1e-12));
}

TEST_CASE("two-term left side matches the derivative-series closed form") {
    auto p = a_params();
    auto sys = make_sys(p, {"K"});
    const double a = 1.0, lam = 0.25, k0 = 1.0, k1 = 0.0;
    sys.eqs = {mk_eq(0,
                     {{a, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo},
                      {1.0, FracOrder::of(*p, Rational(8, 5)), 1, DerivKind::Caputo}},
                     Poly::symbol(sys.symbols, 0, lam))};
    auto sol = solve_series(sys, {{{k0, k1}}}, Rational(18));

    // K = sum_m (lam^m/m!) [K(0) eps_m(1, am+1) + (a K(0)+K'(0)) eps_m(1, am+2)],
    // the epsilon argument being -a t.
    GenSeries closed = GenSeries::zero(p, {"t"});
    double mfact = 1.0, lpow = 1.0;
    for (int m = 0; m <= 11; ++m) {
        if (m > 0) {
            mfact *= m;
            lpow *= lam;
        }
        ExponentVector one = ev_c(*p, Rational(1));
        GenSeries e1 = eps_atom(p, {"t"}, "t", m, a, true, one,
                                ev_a(*p, Rational(m)) + ev_c(*p, Rational(1)), Rational(18));
        GenSeries e2 = eps_atom(p, {"t"}, "t", m, a, true, one,
                                ev_a(*p, Rational(m)) + ev_c(*p, Rational(2)), Rational(18));
        closed = closed + e1.scaled(lpow / mfact * k0) + e2.scaled(lpow / mfact * (a * k0 + k1));
    }
    for (double t : {0.5, 1.0, 2.0}) {
        double got = sol.K[0].eval({t});
        double ref = closed.eval({t});
        CHECK(std::abs(got - ref) <= 1e-7 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("sequential double order marches to the two-parameter pair") {
    auto p = a_params(Rational(2, 5));
    auto sys = make_sys(p, {"K"});
    const double lam = 0.7, b1 = 1.3, b2 = -0.4;
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 2, DerivKind::Caputo}},
                     Poly::symbol(sys.symbols, 0, lam))};
    auto sol = solve_series(sys, {{{b1, b2}}}, Rational(12));
    GenSeries w1 = ml2_atom(p, {"t"}, "t", lam, ev_a(*p, Rational(2)), ev_c(*p, Rational(1)),
                            ev_c(*p, Rational(0)), Rational(12));
    GenSeries w2 = ml2_atom(p, {"t"}, "t", lam, ev_a(*p, Rational(2)),
                            ev_a(*p) + ev_c(*p, Rational(1)), ev_a(*p), Rational(12));
    CHECK(series_equal(sol.K[0], w1.scaled(b1) + w2.scaled(b2), 1e-11));
}

TEST_CASE("right-side derivative couplings march correctly") {
    SUBCASE("self-coupling without a zero-order term telescopes to a constant") {
        auto p = a_params();
        auto sys = make_sys(p, {"K"});
        RhsDerivTerm rd{0.36, 0, 0, FracOrder::of(*p, Rational(2, 5))};
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::constant(sys.symbols, 0.0), {rd})};
        auto sol = solve_series(sys, {{{2.5}}}, Rational(8));
        CHECK(sol.K[0].size() == 1);
        CHECK(sol.K[0].eval({0.7}) == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("coupling plus zero-order term matches the epsilon series") {
        auto p = a_params(Rational(7, 10));
        const Rational gma(2, 5);
        const double q = 0.36, n2 = 0.5, c1 = 2.0;
        auto sys = make_sys(p, {"L"});
        RhsDerivTerm rd{q, 0, 0, FracOrder::of(*p, gma)};
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 0, n2), {rd})};
        auto sol = solve_series(sys, {{{c1}}}, Rational(10));

        // L = c1 sum_m (n2^m/m!) [eps_m(a2-g, gm+1) - q eps_m(a2-g, a2+g(m-1)+1)]
        // with epsilon argument +q t^{a2-g}.
        const Rational a2(7, 10);
        ExponentVector step = ev_c(*p, a2 - gma);
        GenSeries closed = GenSeries::zero(p, {"t"});
        double mfact = 1.0, npow = 1.0;
        for (int m = 0; m <= 14; ++m) {
            if (m > 0) {
                mfact *= m;
                npow *= n2;
            }
            GenSeries e1 = eps_atom(p, {"t"}, "t", m, q, false, step,
                                    ev_c(*p, gma * Rational(m) + Rational(1)), Rational(10));
            GenSeries e2 = eps_atom(p, {"t"}, "t", m, q, false, step,
                                    ev_c(*p, a2 + gma * Rational(m - 1) + Rational(1)),
                                    Rational(10));
            closed = closed + (e1 - e2.scaled(q)).scaled(c1 * npow / mfact);
        }
        for (double t : {0.5, 1.0}) {
            double got = sol.K[0].eval({t});
            double ref = closed.eval({t});
            CHECK(std::abs(got - ref) <= 1e-7 * (1.0 + std::abs(ref)));
        }
    }
}

TEST_CASE("integer order limit marches to the exponential") {
    auto p = a_params(Rational(1));
    auto sys = make_sys(p, {"K"});
    const double c = -1.3;
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                     Poly::symbol(sys.symbols, 0, c))};
    auto sol = solve_series(sys, {{{1.0}}}, Rational(16));
    GenSeries want = ml_atom(p, {"t"}, "t", c, ev_c(*p, Rational(1)), Rational(16));
    CHECK(series_equal(sol.K[0], want, 1e-12));
    CHECK(sol.K[0].eval({1.0}) == doctest::Approx(std::exp(-1.3)).epsilon(1e-10));
}

TEST_CASE("overly fine exponent lattice raises") {
    auto p = a_params(Rational(1, 100));
    auto sys = make_sys(p, {"K"});
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                     Poly::symbol(sys.symbols, 0, 1.0))};
    CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(12)), LatticeError);
}

TEST_CASE("series marching validates its inputs") {
    auto p = a_params();
    auto sys = make_sys(p, {"K"});
    TimeTerm dt{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo};
    sys.eqs = {mk_eq(0, {dt}, Poly::symbol(sys.symbols, 0, 1.0))};

    SUBCASE("initial data rows must match the slot count") {
        CHECK_THROWS_AS(solve_series(sys, {{{1.0, 2.0}}}, Rational(8)), DomainError);
        CHECK_THROWS_AS(solve_series(sys, {{}}, Rational(8)), DomainError);
    }
    SUBCASE("nonlinear right sides are rejected") {
        sys.eqs[0].psi = poly_term(sys.symbols, {2}, 1.0);
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
    SUBCASE("non-Caputo left sides are rejected") {
        sys.eqs[0].lhs[0].kind = DerivKind::RiemannLiouville;
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
    SUBCASE("right-side derivative orders must sit below the top") {
        sys.eqs[0].rhs_derivs = {{0.5, 0, 0, FracOrder::of(*p, Rational(4, 5))}};
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
    SUBCASE("two left-side terms of the same order are rejected") {
        sys.eqs[0].lhs.push_back({2.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo});
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
    SUBCASE("empty left sides are rejected") {
        sys.eqs[0].lhs.clear();
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
    SUBCASE("sequential folds need a base order in (0,1]") {
        sys.eqs[0].lhs[0].base = FracOrder::of(*p, Rational(3, 2));
        sys.eqs[0].lhs[0].folds = 2;
        CHECK_THROWS_AS(solve_series(sys, {{{1.0}}}, Rational(8)), DomainError);
    }
}

TEST_CASE("power-law ansatz resolves the quadratic advection pair") {
    auto p = ab_params(Rational(3, 10));
    const double G = gam(Rational(9, 5));
    const double P = gamma_ratio(Rational(7, 10), Rational(2, 5));
    const double a1 = 2.0, a2 = -1.0, b1 = -2.0, b2 = 1.0;
    auto sys = make_sys(p, {"k1", "k2", "l1", "l2"});
    auto st = sys.symbols;
    TimeTerm rl{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville};
    Poly p1 = poly_term(st, {1, 1, 0, 0}, -G * a1) + poly_term(st, {1, 0, 0, 1}, -G * a2) +
              poly_term(st, {0, 1, 1, 0}, -G * a2);
    Poly p2 = poly_term(st, {0, 2, 0, 0}, -G * a1) + poly_term(st, {0, 1, 0, 1}, -2.0 * G * a2);
    Poly p3 = poly_term(st, {0, 0, 1, 1}, -G * b1) + poly_term(st, {1, 0, 0, 1}, -G * b2) +
              poly_term(st, {0, 1, 1, 0}, -G * b2);
    Poly p4 = poly_term(st, {0, 0, 0, 2}, -G * b1) + poly_term(st, {0, 1, 0, 1}, -2.0 * G * b2);
    sys.eqs = {mk_eq(0, {rl}, p1), mk_eq(1, {rl}, p2), mk_eq(2, {rl}, p3), mk_eq(3, {rl}, p4)};

    const double M1 = 1.0;
    auto sols = solve_power_ansatz(sys, {{2, M1}, {3, -P / (2.0 * G)}});
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].form == "power-law");
    CHECK(sols[0].constants.at("k1") == doctest::Approx(2.0 * M1).epsilon(1e-9));
    CHECK(sols[0].constants.at("k2") == doctest::Approx(-P / G).epsilon(1e-9));
    CHECK(sols[0].constants.at("l1") == doctest::Approx(M1).epsilon(1e-9));
    CHECK(sols[0].constants.at("l2") == doctest::Approx(-P / (2.0 * G)).epsilon(1e-9));
    // each unknown is c t^{-alpha}
    CHECK(sols[0].K[0].eval({2.0}) ==
          doctest::Approx(2.0 * M1 * std::pow(2.0, -0.3)).epsilon(1e-12));
}

TEST_CASE("power-law ansatz finds both coupled-advection branches") {
    // b = b1+b2 > a1, a2 > 0; branch pairs (k1, l2) = (-s sqrt(a2) M1 / sqrt(b-a1),
    // s P sqrt(b-a1) / (sqrt(a2) b G)) with k2 = -P/(bG) in both.
    const double a1 = 2.0, a2 = 4.0, b1 = 1.0, b2 = 2.0, b = b1 + b2, M1 = 1.0;
    auto build = [&](const Rational& alpha) {
        auto p = ab_params(alpha);
        auto sys = make_sys(p, {"k1", "k2", "l1", "l2"});
        auto st = sys.symbols;
        const double G = gam(Rational(9, 5));
        TimeTerm rl{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville};
        Poly q1 = poly_term(st, {1, 1, 0, 0}, -G * a1) + poly_term(st, {0, 0, 1, 1}, -G * a2);
        Poly q2 = poly_term(st, {0, 2, 0, 0}, -G * a1) + poly_term(st, {0, 0, 0, 2}, -G * a2);
        Poly q3 = poly_term(st, {1, 0, 0, 1}, -G * b1) + poly_term(st, {0, 1, 1, 0}, -G * b2);
        Poly q4 = poly_term(st, {0, 1, 0, 1}, -G * (b1 + b2));
        sys.eqs = {mk_eq(0, {rl}, q1), mk_eq(1, {rl}, q2), mk_eq(2, {rl}, q3),
                   mk_eq(3, {rl}, q4)};
        return sys;
    };
    const double G = gam(Rational(9, 5));

    SUBCASE("both sign branches at a fractional order") {
        const double P = gamma_ratio(Rational(7, 10), Rational(2, 5));
        auto sys = build(Rational(3, 10));
        for (double s : {1.0, -1.0}) {
            double l2 = s * P * std::sqrt(b - a1) / (std::sqrt(a2) * b * G);
            auto sols = solve_power_ansatz(sys, {{2, M1}, {3, l2}});
            REQUIRE(sols.size() == 1);
            CHECK(sols[0].constants.at("k1") ==
                  doctest::Approx(-s * std::sqrt(a2) * M1 / std::sqrt(b - a1)).epsilon(1e-8));
            CHECK(sols[0].constants.at("k2") == doctest::Approx(-P / (b * G)).epsilon(1e-8));
        }
    }
    SUBCASE("classical limit keeps the pole-ratio value -1") {
        auto sys = build(Rational(1));
        const double P = -1.0; // Gamma(0)/Gamma(-1) limit
        double l2 = -P * std::sqrt(b - a1) / (std::sqrt(a2) * b * G);
        auto sols = solve_power_ansatz(sys, {{2, M1}, {3, l2}});
        REQUIRE(sols.size() == 1);
        CHECK(sols[0].constants.at("k2") == doctest::Approx(1.0 / (b * G)).epsilon(1e-8));
        CHECK(sols[0].constants.at("k1") == doctest::Approx(2.0 * M1).epsilon(1e-8));
    }
}

TEST_CASE("power-law ansatz raises at the degenerate half order") {
    auto p = a_params(Rational(1, 2));
    auto sys = make_sys(p, {"K"});
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville}},
                     poly_term(sys.symbols, {2}, -1.0))};
    CHECK_THROWS_AS(solve_power_ansatz(sys), PoleError);
}

TEST_CASE("power-law ansatz reports when no branch survives the pins") {
    auto p = a_params(Rational(3, 10));
    auto sys = make_sys(p, {"K"});
    sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::RiemannLiouville}},
                     poly_term(sys.symbols, {2}, 1.0))};
    CHECK_THROWS_AS(solve_power_ansatz(sys, {{0, 5.0}}), NoPowerLawSolutionError);
}

TEST_CASE("picard iterates for the integral fixed point") {
    auto p = a_params(Rational(1, 2));
    FracOrder al = FracOrder::of(*p, "alpha");

    SUBCASE("constant seed generates the power ladder") {
        GenSeries g0 = GenSeries::constant(p, {"t"}, Coeff(2.0));
        const double c = 0.8;
        auto it = nim_iterates(g0, c, "t", al, 5);
        REQUIRE(it.size() == 6);
        // iterate m = 2 c^m t^{m/2} / Gamma(m/2+1)
        GenSeries want3 = GenSeries::monomial(p, {"t"}, "t", ev_c(*p, Rational(3, 2)),
                                              Coeff(2.0 * std::pow(c, 3) / gam(Rational(5, 2))));
        CHECK(series_equal(it[3], want3, 1e-13));
        auto sum = nim_solve(g0, c, "t", al, 5);
        double t = 0.9, acc = 0.0;
        for (int m = 0; m <= 5; ++m)
            acc += 2.0 * std::pow(c, m) * std::pow(t, m / 2.0) / gam(Rational(m, 2) + Rational(1));
        CHECK(sum.K[0].eval({t}) == doctest::Approx(acc).epsilon(1e-13));
    }
    SUBCASE("zero contraction returns the seed after one step") {
        GenSeries g0 = GenSeries::constant(p, {"t"}, Coeff(2.0));
        auto it = nim_iterates(g0, 0.0, "t", al, 7);
        CHECK(it.size() == 1);
        CHECK(series_equal(nim_solve(g0, 0.0, "t", al, 7).K[0], g0, 1e-15));
    }
    SUBCASE("first iterate of the forced relaxation splits as expected") {
        const double c = 1.0, A = 0.37, a1v = 0.2;
        GenSeries E = ml_atom(p, {"t"}, "t", c, ev_a(*p), Rational(12));
        GenSeries g0 =
            GenSeries::constant(p, {"t"}, Coeff(a1v)) + rl_integral(E * E, "t", al).scaled(A);
        auto it = nim_iterates(g0, c, "t", al, 8);
        REQUIRE(it.size() == 9);
        GenSeries want =
            GenSeries::monomial(p, {"t"}, "t", ev_a(*p), Coeff(a1v * c / gam(Rational(3, 2)))) +
            rl_integral(rl_integral(E * E, "t", al), "t", al).scaled(A * c);
        CHECK(series_equal(it[1], want, 1e-12));

        // residual of the m-th partial sum is -c K^m: strictly decreasing sup
        std::vector<double> sup(9, 0.0);
        for (int m = 1; m <= 8; ++m)
            for (int i = 1; i <= 10; ++i)
                sup[m] = std::max(sup[m], std::abs(it[m].eval({i / 10.0})));
        for (int m = 2; m <= 8; ++m) CHECK(sup[m] < sup[m - 1]);
    }
    SUBCASE("iterates past the truncation bound stall") {
        auto p6 = a_params(Rational(3, 5));
        FracOrder al6 = FracOrder::of(*p6, "alpha");
        GenSeries g0 = ml_atom(p6, {"t"}, "t", 1.0, ev_a(*p6), Rational(2));
        CHECK_THROWS_AS(nim_iterates(g0, 1.0, "t", al6, 8), TruncationStallError);
    }
}

TEST_CASE("predictor-corrector stepper") {
    SUBCASE("relaxation trajectory tracks the marched series") {
        auto p = a_params(Rational(7, 10));
        auto sys = make_sys(p, {"K"});
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 0, -1.0))};
        auto ref = solve_series(sys, {{{1.0}}}, Rational(14));
        auto tr = adams_pece(sys, {1.0}, 1e-3, 1.0);
        REQUIRE(tr.t.size() == 1001);
        for (std::size_t i : {250u, 500u, 1000u}) {
            double want = ref.K[0].eval({tr.t[i]});
            CHECK(std::abs(tr.y[i][0] - want) <= 1e-4);
        }
    }
    SUBCASE("classical limit integrates a quadratic blow-up accurately") {
        auto p = a_params(Rational(1));
        auto sys = make_sys(p, {"K"});
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         poly_term(sys.symbols, {2}, 1.0))};
        auto tr = adams_pece(sys, {1.0}, 1e-3, 0.5);
        CHECK(std::abs(tr.y.back()[0] - 2.0) <= 5e-4);
    }
    SUBCASE("halving the step improves the error at the expected rate") {
        auto p = a_params(Rational(1, 2));
        auto sys = make_sys(p, {"K"});
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 0, -1.0))};
        auto ref = solve_series(sys, {{{1.0}}}, Rational(20));
        double exact = ref.K[0].eval({1.0});
        double e1 = std::abs(adams_pece(sys, {1.0}, 0.02, 1.0).y.back()[0] - exact);
        double e2 = std::abs(adams_pece(sys, {1.0}, 0.01, 1.0).y.back()[0] - exact);
        CHECK(e1 / e2 >= std::pow(2.0, std::min(2.0, 1.5) - 0.2));
    }
    SUBCASE("step validation") {
        auto p = a_params(Rational(1, 2));
        auto sys = make_sys(p, {"K"});
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 0, -1.0))};
        CHECK_THROWS_AS(adams_pece(sys, {1.0}, 0.0, 1.0), StepError);
        CHECK_THROWS_AS(adams_pece(sys, {1.0}, -0.1, 1.0), StepError);
        CHECK_THROWS_AS(adams_pece(sys, {1.0}, 0.5, 0.2), StepError);
        CHECK_THROWS_AS(adams_pece(sys, {1.0, 2.0}, 0.1, 1.0), DomainError);
    }
    SUBCASE("mixed orders are rejected") {
        auto p = a_params(Rational(1, 2));
        auto sys = make_sys(p, {"K1", "K2"});
        sys.eqs = {mk_eq(0, {{1.0, FracOrder::of(*p, "alpha"), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 1, 1.0)),
                   mk_eq(1, {{1.0, FracOrder::of(*p, Rational(3, 4)), 1, DerivKind::Caputo}},
                         Poly::symbol(sys.symbols, 0, -1.0))};
        CHECK_THROWS_AS(adams_pece(sys, {0.0, 1.0}, 0.1, 1.0), DomainError);
    }
}
