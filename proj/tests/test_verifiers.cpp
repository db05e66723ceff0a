#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pgdlab/instances.hpp"
#include "pgdlab/verifiers.hpp"

using namespace pgdlab;

namespace {

Objective quadratic(double lambda = 1.0)
{
    return make_power_instance(2.0, lambda, scalar_vector(0.0), Domain::interval(-1, 1));
}

GridSpec grid(const Domain& d, std::size_t n = 2001) { return GridSpec{d, n, 0.0}; }

GridSpec cell_grid(const BinarySearchLayout& l, int j, std::size_t n = 2001)
{
    return GridSpec{Domain::interval(l.breakpoint(j), l.breakpoint(j + 1) - 1e-12), n, 0.0};
}

} // namespace

TEST(GridPoints, IntervalEndpointsAndExclusion)
{
    const auto pts = grid_points(GridSpec{Domain::interval(0, 1), 11, 0.0});
    ASSERT_EQ(pts.size(), 11u);
    EXPECT_EQ(pts.front()[0], 0.0);
    EXPECT_EQ(pts.back()[0], 1.0);
    const auto cut = grid_points(GridSpec{Domain::interval(0, 1), 11, 0.05}, {0.5});
    EXPECT_EQ(cut.size(), 10u);
    EXPECT_THROW(grid_points(GridSpec{Domain::all_space(1), 11, 0.0}), InvalidArgument);
}

TEST(GridPoints, BallKeepsOnlyFeasiblePoints)
{
    const Domain b = Domain::ball(Vector::Zero(2), 1.0);
    for (const auto& x : grid_points(GridSpec{b, 21, 0.0})) EXPECT_LE(x.norm(), 1.0);
}

TEST(VerifySmoothness, QuadraticIsTight)
{
    const Objective q = quadratic();
    const auto r = verify_smoothness(q, grid(q.domain()), 2.0);
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_NEAR(r.worst_ratio, 1.0, 1e-12);
    const auto half = verify_smoothness(q, grid(q.domain()), 1.0);
    EXPECT_FALSE(half.passed);
    EXPECT_NEAR(half.worst_ratio, 2.0, 1e-12);
}

TEST(VerifyHolder, PowerInstanceWithItsExponent)
{
    // |x|^{3/2}: gradient (3/2) sgn(x)|x|^{1/2} is Holder with exponent 1/2, i.e. beta = 3
    const Objective f = power_objective(1.5, 1.0, scalar_vector(0.0), Domain::interval(-1, 1));
    const double L = 1.5 * std::sqrt(2.0);
    const auto r = verify_holder(f, grid(f.domain()), L, 3.0);
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_LE(r.worst_ratio, 1.0 + 1e-9);
    EXPECT_FALSE(verify_holder(f, grid(f.domain()), L / 2, 3.0).passed);
}

TEST(VerifyGradDominance, QuadraticRatioIsOne)
{
    const Objective q = quadratic(3.0);
    const auto& c = *q.certificate();
    EXPECT_DOUBLE_EQ(c.tau, 1.0 / 12.0);
    const auto r = verify_grad_dominance(q, grid(q.domain()), c.alpha, c.tau);
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.worst_ratio, 1.0, 1e-12);
}

TEST(VerifyGradDominance, HalvedTauFails)
{
    const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
    const auto c = theoretical_constants(pair);
    const GridSpec g{pair.f1.domain(), 2001, 1e-9};
    EXPECT_TRUE(verify_grad_dominance(pair.f1, g, c.alpha, c.tau).passed);
    const auto r = verify_grad_dominance(pair.f1, g, c.alpha, c.tau / 2);
    EXPECT_FALSE(r.passed);
    EXPECT_GT(r.worst_ratio, 1.0);
}

TEST(VerifyGradDominance, MonotoneInTau)
{
    const auto pair = make_lower_bound_pair(1.8, 0.5, 1.0, 0.05);
    const auto c = theoretical_constants(pair);
    const GridSpec g{pair.f0.domain(), 1001, 0.0};
    const auto a = verify_grad_dominance(pair.f0, g, c.alpha, c.tau);
    const auto b = verify_grad_dominance(pair.f0, g, c.alpha, 2 * c.tau);
    EXPECT_TRUE(a.passed);
    EXPECT_TRUE(b.passed);
    EXPECT_LE(b.worst_ratio, a.worst_ratio);
}

TEST(VerifyGradDominance, RefusesWithoutMinimum)
{
    const Objective anon(Objective::Parts{
        .name = "anon",
        .domain = Domain::interval(0, 1),
        .value = [](const Vector& x) { return x[0]; },
        .gradient = [](const Vector& x) { return Vector::Ones(x.size()); },
        .gap = {},
        .minimizer = {},
        .min_value = {},
        .certificate = {},
        .breakpoints = {},
    });
    EXPECT_THROW(verify_grad_dominance(anon, grid(anon.domain(), 11), 2.0, 1.0), Refused);
}

TEST(VerifyProjectedDominance, AllSpaceEqualsPlainDominance)
{
    const Objective q = make_power_instance(1.5, 1.0, scalar_vector(0.0), Domain::all_space(1));
    const Objective on_box = make_power_instance(1.5, 1.0, scalar_vector(0.0), Domain::interval(-1, 1));
    const auto& c = *on_box.certificate();
    const GridSpec g = grid(Domain::interval(-1, 1));
    const auto plain = verify_grad_dominance(on_box, g, c.alpha, c.tau);
    const auto proj = verify_projected_grad_dominance(q, Domain::all_space(1), g, c.alpha, c.tau, {0.1, 1.0, 10.0});
    EXPECT_EQ(plain.worst_ratio, proj.worst_ratio);
}

TEST(VerifyProjectedDominance, LowerBoundPairOnItsInterval)
{
    const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
    const auto c = theoretical_constants(pair);
    const GridSpec g{pair.f0.domain(), 2001, 1e-9};
    const auto r = verify_projected_grad_dominance(pair.f1, pair.f1.domain(), g, c.alpha, c.tau,
                                                   {*c.eta0, *c.eta0 / 2, *c.eta0 / 10});
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_THROW(verify_projected_grad_dominance(pair.f1, pair.f1.domain(), g, c.alpha, c.tau, {2 * *c.eta0}),
                 InvalidArgument);
}

TEST(VerifyLocalDominance, InfiniteEpsilonMatchesGlobal)
{
    const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
    const auto c = theoretical_constants(pair);
    const GridSpec g{pair.f0.domain(), 1001, 1e-9};
    const auto global = verify_grad_dominance(pair.f0, g, c.alpha, c.tau);
    const auto local = verify_local_grad_dominance(pair.f0, g, c.alpha, c.tau, std::numeric_limits<double>::infinity());
    EXPECT_EQ(global.worst_ratio, local.worst_ratio);
}

TEST(VerifyLocalDominance, NbsCellPassesAndTenthTauFails)
{
    for (double alpha : {1.5, 2.0}) {
        const NbsInstance inst = make_nbs_instance(alpha, 0.2, 1.0, 1.0, 8, 3);
        const auto& c = *inst.objective.certificate();
        const GridSpec g = cell_grid(inst, 3);
        EXPECT_TRUE(verify_local_grad_dominance(inst.objective, g, c.alpha, c.tau, 1.0 / 8).passed) << alpha;
        EXPECT_FALSE(verify_local_grad_dominance(inst.objective, g, c.alpha, c.tau / 10, 1.0 / 8).passed) << alpha;
    }
}

TEST(VerifyLocalDominance, EmptySublevelIsInconclusive)
{
    const NbsInstance inst = make_nbs_instance(1.5, 0.2, 1.0, 1.0, 8, 3);
    const GridSpec far{Domain::interval(0.8, 1.0), 11, 0.0};
    const auto r = verify_local_grad_dominance(inst.objective, far, 1.5, 1.0, 1e-6);
    EXPECT_TRUE(r.inconclusive);
    EXPECT_FALSE(r.passed);
}

TEST(VerifyPhiKl, EqualityCaseHasRatioOne)
{
    const PsiPower psi{3.0};
    const double R = 1.0;
    const int N = 4;
    const double h = R / (2.0 * N);
    const double G = 2.0;
    const double p = psi.dpsi(h) / G;
    const PhiKlInstance inst = make_phi_kl_instance(psi, p, G, R, N, 2);
    const auto r = verify_phi_kl(inst.objective, cell_grid(inst, 2), psi);
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_NEAR(r.worst_ratio, 1.0, 1e-9);

    const PhiKlInstance doubled = make_phi_kl_instance(psi, 2 * p, G, R, N, 2);
    const auto r2 = verify_phi_kl(doubled.objective, cell_grid(doubled, 2), psi);
    EXPECT_TRUE(r2.passed);
    EXPECT_LT(r2.worst_ratio, 1.0);
}

TEST(VerifyPhiKl, ViolatingInstanceFails)
{
    const PsiPower psi{2.0};
    EXPECT_THROW(make_phi_kl_instance(psi, 0.1, 1.0, 1.0, 4, 2), CertificateViolation);
    const PhiKlInstance bad = make_phi_kl_instance(psi, 0.1, 1.0, 1.0, 4, 2, true);
    EXPECT_FALSE(verify_phi_kl(bad.objective, cell_grid(bad, 2), psi).passed);
}

TEST(KlPerStep, VanishesWhereThePairAgrees)
{
    const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
    for (double x : {0.2, 0.5, 1.0}) EXPECT_EQ(kl_per_step(pair, 1.0, x), 0.0);
    // f0'(0) - f1'(0) = 0 - (-0.12)
    EXPECT_NEAR(kl_per_step(pair, 1.0, 0.0), 0.0072, 1e-15);
    EXPECT_THROW(kl_per_step(pair, 1.0, 1.5), InvalidArgument);
    EXPECT_THROW(kl_per_step(pair, 0.0, 0.5), InvalidArgument);
}

TEST(VarianceRecursion, NoiselessStartAtZeroStaysZero)
{
    const VarianceRecursionParams p{.a0 = 1.5, .beta0 = 1.0, .sigma = 0.0, .L_tilde = 0.0, .R = 1.0, .V0 = 0.0, .T = 100};
    for (double v : variance_recursion_sequence(p)) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(check_variance_recursion(p).passed);
}

TEST(VarianceRecursion, HoldsAndDetectsInjectedFault)
{
    const VarianceRecursionParams p{.a0 = 1.2, .beta0 = 0.5, .sigma = 1.0, .L_tilde = 2.0, .R = 1.0, .V0 = 3.0, .T = 5000};
    EXPECT_TRUE(check_variance_recursion(p).passed);
    const auto bad = check_variance_recursion(p, 1e-9, [](std::vector<double>& V) { V[1000] *= 1e3; });
    EXPECT_FALSE(bad.passed);
    EXPECT_EQ(bad.worst_index, 1000u);
    EXPECT_THROW(check_variance_recursion(VarianceRecursionParams{.a0 = 2.0, .beta0 = 1, .sigma = 1, .L_tilde = 1, .R = 1, .V0 = 1, .T = 10}),
                 InvalidArgument);
}

TEST(OlsSlope, ExactLine)
{
    const auto [s, r] = ols_slope({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_DOUBLE_EQ(s, 2.0);
    EXPECT_NEAR(r, 0.0, 1e-15);
    EXPECT_TRUE(std::isnan(ols_slope({1}, {1}).first));
}

TEST(DeltaRecursion, ZeroNoiseZeroStartVanishes)
{
    const DeltaRecursionParams p{.q0 = 1, .eta0 = 1, .beta0 = 1, .c0 = 1, .tau = 1, .alpha = 1.5, .E = 0, .delta0 = 0, .T = 1000};
    const auto r = check_delta_recursion(p);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.worst_ratio, 0.0);
}

TEST(DeltaRecursion, AlphaOneSlopeNearMinusHalf)
{
    const DeltaRecursionParams p{.q0 = 1, .eta0 = 1, .beta0 = 1, .c0 = 1, .tau = 1, .alpha = 1.0, .E = 1, .delta0 = 1, .T = 100000};
    const auto r = check_delta_recursion(p);
    EXPECT_TRUE(r.passed) << r.details;
    double slope = 0.0;
    for (const auto& [k, v] : r.metrics)
        if (k == "slope") slope = v;
    EXPECT_NEAR(slope, -0.5, 0.1);
}

TEST(DeltaRecursion, RejectsBadParameters)
{
    DeltaRecursionParams p{.q0 = 1, .eta0 = 1, .beta0 = 1, .c0 = 1, .tau = 1, .alpha = 2.0, .E = 1, .delta0 = 1, .T = 100};
    EXPECT_THROW(check_delta_recursion(p), InvalidArgument);
    p.alpha = 1.5;
    p.T = 10;
    EXPECT_THROW(check_delta_recursion(p), InvalidArgument);
}

TEST(PolyBound, AlphaOneIsTheQuadraticVertex)
{
    // A0 B - A1 B^2 + A2 peaks at A0^2 / (4 A1) + A2
    EXPECT_NEAR(poly_bound_closed_form(2.0, 1.0, 0.5, 1.0), 1.5, 1e-15);
    const auto r = check_poly_bound(2.0, 1.0, 0.5, 1.0);
    EXPECT_TRUE(r.passed) << r.details;
}

TEST(PolyBound, WorkedExample)
{
    // alpha = 1.5: max_B B - B^{4/3} = (3/4)^3 (1/4) = 27/256
    EXPECT_NEAR(poly_bound_closed_form(1.0, 1.0, 0.0, 1.5), 27.0 / 256.0, 1e-15);
    // alpha = 1: max_B B - B^2 = 1/4
    EXPECT_NEAR(poly_bound_closed_form(1.0, 1.0, 0.0, 1.0), 0.25, 1e-15);
    EXPECT_TRUE(check_poly_bound(1.0, 1.0, 0.0, 1.5).passed);
    EXPECT_THROW(check_poly_bound(0.0, 1.0, 0.0, 1.5), InvalidArgument);
}

TEST(DistanceBounds, HoldOnThePairAndFailWithTinyTau)
{
    const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
    const auto c = theoretical_constants(pair);
    const GridSpec g{pair.f1.domain(), 2001, 0.0};
    EXPECT_TRUE(verify_distance_bounds(pair.f1, g, c.alpha, c.tau, c.L).passed);
    EXPECT_FALSE(verify_distance_bounds(pair.f1, g, c.alpha, c.tau / 100, c.L).passed);
}
