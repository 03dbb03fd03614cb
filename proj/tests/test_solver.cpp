#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pme/errors.hpp"
#include "pme/pressure.hpp"
#include "pme/solver.hpp"

using namespace pme;

namespace {

// Independent long-double evaluation of the Barenblatt profile used as the
// reference for the library's double version.
long double barenblatt_ld(int n, long double m, long double t, long double r, long double C)
{
    const long double b = 1.0L / (n * (m - 1.0L) + 2.0L);
    const long double k = (m - 1.0L) * b / (2.0L * m);
    const long double inner = C - k * r * r * std::pow(t, -2.0L * b);
    if (inner <= 0.0L)
        return 0.0L;
    return std::pow(t, -n * b) * std::pow(inner, 1.0L / (m - 1.0L));
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = a + (b - a) * i / (n - 1);
    return x;
}

} // namespace

TEST(Parameters, RejectsSubcriticalExponent)
{
    EXPECT_THROW(PMEParameters(1.0, 2), ParameterError);
    EXPECT_THROW(PMEParameters(0.5, 2), ParameterError);
}

TEST(Parameters, StructuralConstant)
{
    EXPECT_DOUBLE_EQ(PMEParameters(2.0, 2).a(), 0.5);
    EXPECT_DOUBLE_EQ(PMEParameters(2.0, 1).a(), 1.0 / 3.0);
    for (int n = 1; n <= 5; ++n) {
        double prev = 0.0;
        for (double m = 1.01; m < 6.0; m += 0.1) {
            const double a = PMEParameters(m, n).a();
            EXPECT_GT(a, 0.0);
            EXPECT_LT(a, 1.0);
            EXPECT_GE(a, prev);
            prev = a;
        }
    }
}

TEST(Barenblatt, Examples)
{
    EXPECT_DOUBLE_EQ(barenblatt(1, 2.0, 1.0, 0.0, 1.0), 1.0);
    const BarenblattConstants c = barenblatt_constants(1, 2.0);
    EXPECT_DOUBLE_EQ(c.b, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.k, 1.0 / 12.0);
    EXPECT_EQ(barenblatt(1, 2.0, 1.0, std::sqrt(12.0) + 1e-9, 1.0), 0.0);
    EXPECT_GT(barenblatt(1, 2.0, 1.0, std::sqrt(12.0) - 1e-6, 1.0), 0.0);
    EXPECT_NEAR(barenblatt_front(1, 2.0, 1.0, 1.0), std::sqrt(12.0), 1e-14);
}

// The closed form must satisfy u_t = Lap u^m; checked with Richardson
// extrapolated central differences in long double at random interior points.
TEST(Barenblatt, SolvesThePorousMediumEquation)
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int ns[] = {1, 2, 3};
    const double ms[] = {1.5, 2.0, 3.0};
    double worst = 0.0;
    for (int sample = 0; sample < 100; ++sample) {
        const int n = ns[sample % 3];
        const long double m = ms[(sample / 3) % 3];
        const long double C = 0.5 + U(gen);
        const long double t = 0.5 + 2.5 * U(gen);
        const long double front = std::sqrt(C / ((m - 1) / (2 * m) / (n * (m - 1) + 2))) * std::pow(t, 1.0L / (n * (m - 1) + 2));
        const long double r = (0.05 + 0.8 * U(gen)) * front;

        EXPECT_NEAR(barenblatt(n, double(m), double(t), double(r), double(C)),
                    double(barenblatt_ld(n, m, t, r, C)), 1e-14);

        auto u = [&](long double rr, long double tt) { return barenblatt_ld(n, m, tt, rr, C); };
        auto w = [&](long double rr, long double tt) { return std::pow(u(rr, tt), m); };
        auto d_t = [&](long double h) { return (u(r, t + h) - u(r, t - h)) / (2 * h); };
        auto d_r = [&](long double h) { return (w(r + h, t) - w(r - h, t)) / (2 * h); };
        auto d_rr = [&](long double h) { return (w(r + h, t) - 2 * w(r, t) + w(r - h, t)) / (h * h); };
        const long double h = 1e-3L;
        const long double ut = (4 * d_t(h / 2) - d_t(h)) / 3;
        const long double wr = (4 * d_r(h / 2) - d_r(h)) / 3;
        const long double wrr = (4 * d_rr(h / 2) - d_rr(h)) / 3;
        const long double lap = wrr + (n - 1) * wr / r;
        const double residual = double(std::abs(ut - lap));
        worst = std::max(worst, residual);
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(SolutionField, RejectsNonPositiveValues)
{
    const ManifoldModel model = ManifoldModel::flat(1);
    const PMEParameters params(2.0, 1);
    EXPECT_THROW(sample_field(model, params, linspace(0, 1, 8), linspace(1, 2, 8),
                              [](double r, double) { return r - 0.5; }),
                 ConfigError);
}

TEST(Solver, ConstantDataIsSteady)
{
    const ManifoldModel model = ManifoldModel::hyperbolic(2, 1.0);
    const GridSpec grid{4.0, 41, 1.0, 2.0, 17, 2};
    const SolveResult res = solve_radial(model, PMEParameters(2.0, 2), [](double) { return 0.7; }, grid);
    for (double u : res.field.values())
        EXPECT_NEAR(u, 0.7, 1e-14);
}

TEST(Solver, RejectsNonPositiveData)
{
    const GridSpec grid{4.0, 41, 1.0, 2.0, 17, 1};
    EXPECT_THROW(solve_radial(ManifoldModel::flat(1), PMEParameters(2.0, 1), [](double r) { return 1.0 - r; }, grid),
                 ConfigError);
}

TEST(Solver, ConservesMassWithZeroFlux)
{
    for (auto model : {ManifoldModel::flat(3), ManifoldModel::hyperbolic(2, 1.0), ManifoldModel::spherical(2, 1.0)}) {
        const GridSpec grid{3.0, 81, 1.0, 2.0, 21, 2};
        const SolveResult res = solve_radial(model, PMEParameters(2.0, model.dimension()),
                                             [](double r) { return 0.2 + std::exp(-4.0 * r * r); }, grid);
        EXPECT_LT(res.diagnostics.max_relative_mass_drift, 1e-10);
        const auto vol = cell_volumes(model, res.field.r());
        const std::span<const double> last(res.field.values().data() + (res.field.nt() - 1) * res.field.nr(),
                                           res.field.nr());
        EXPECT_NEAR(discrete_mass(vol, last) / res.diagnostics.initial_mass, 1.0, 1e-10);
    }
}

TEST(Solver, CellVolumesAddUpToBallVolume)
{
    const ManifoldModel model = ManifoldModel::hyperbolic(3, 1.0);
    const auto r = linspace(0.0, 2.0, 41);
    const auto vol = cell_volumes(model, r);
    double total = 0.0;
    for (double v : vol)
        total += v;
    // int_0^2 sinh^2 r dr
    EXPECT_NEAR(total, 0.25 * std::sinh(4.0) - 1.0, 1e-10);
}

TEST(Solver, HyperbolicBumpStaysPositiveAndSupDecreases)
{
    const ManifoldModel model = ManifoldModel::hyperbolic(2, 1.0);
    const GridSpec grid{6.0, 121, 1.0, 3.0, 41, 2};
    const SolveResult res = solve_radial(model, PMEParameters(2.0, 2),
                                         [](double r) { return 1.0 + std::exp(-r * r); }, grid);
    const SolutionField& f = res.field;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.nt(); ++k) {
        double sup = 0.0;
        for (std::size_t i = 0; i < f.nr(); ++i) {
            EXPECT_GT(f.u(k, i), 0.0);
            sup = std::max(sup, f.u(k, i));
        }
        EXPECT_LE(sup, prev + 1e-12);
        prev = sup;
    }
}

TEST(Solver, OrderedDataGiveOrderedSolutions)
{
    const ManifoldModel model = ManifoldModel::hyperbolic(2, 1.0);
    const GridSpec grid{5.0, 101, 1.0, 2.0, 21, 2};
    const PMEParameters params(3.0, 2);
    const SolveResult lo = solve_radial(model, params, [](double r) { return 0.5 + 0.5 * std::exp(-r * r); }, grid);
    const SolveResult hi = solve_radial(model, params, [](double r) { return 0.6 + std::exp(-r * r); }, grid);
    for (std::size_t j = 0; j < lo.field.values().size(); ++j)
        EXPECT_LE(lo.field.values()[j], hi.field.values()[j] + 1e-12);
}

TEST(Solver, TracksShiftedBarenblatt)
{
    const ManifoldModel model = ManifoldModel::flat(1);
    const double floor = 1e-3;
    const GridSpec grid{6.0, 241, 1.0, 2.0, 21, 10};
    const SolveResult res = solve_radial(model, PMEParameters(2.0, 1),
                                         [&](double r) { return barenblatt(1, 2.0, 1.0, r, 1.0) + floor; }, grid);
    const SolutionField& f = res.field;
    double worst = 0.0;
    for (std::size_t k = 0; k < f.nt(); ++k)
        for (std::size_t i = 0; i < f.nr(); ++i)
            if (f.r()[i] <= 2.0)
                worst = std::max(worst, std::abs(f.u(k, i) - barenblatt(1, 2.0, f.t()[k], f.r()[i], 1.0)));
    const double h = grid.r_max / (grid.nr - 1);
    const double tau = (grid.T - grid.t0) / ((grid.nt - 1) * grid.substeps);
    EXPECT_LT(worst, 5.0 * (floor + h * h + tau));
}

TEST(PressureField, ConstantSolution)
{
    const double c = 0.8;
    const SolutionField sol = sample_field(ManifoldModel::hyperbolic(2, 1.0), PMEParameters(2.0, 2),
                                           linspace(0, 3, 16), linspace(1, 2, 16), [&](double, double) { return c; });
    const PressureField pf = pressure_field(sol);
    for (std::size_t j = 0; j < pf.v.size(); ++j) {
        EXPECT_NEAR(pf.v[j], 2.0 * c, 1e-15);
        EXPECT_NEAR(pf.v_t[j], 0.0, 1e-12);
        EXPECT_NEAR(pf.v_r[j], 0.0, 1e-12);
        EXPECT_NEAR(pf.lap[j], 0.0, 1e-11);
        EXPECT_NEAR(pf.grad_sq[j], 0.0, 1e-20);
    }
    EXPECT_DOUBLE_EQ(pf.sup, 2.0 * c);
    EXPECT_DOUBLE_EQ(pf.inf, 2.0 * c);
    const ResidualField res = pressure_identity_residual(pf);
    EXPECT_LT(res.max_abs, 1e-11);
}

TEST(PressureField, NeedsFiveNodesEachWay)
{
    const SolutionField sol = sample_field(ManifoldModel::flat(1), PMEParameters(2.0, 1), linspace(0, 1, 4),
                                           linspace(1, 2, 8), [](double, double) { return 1.0; });
    EXPECT_THROW(pressure_field(sol), ConfigError);
}

TEST(PressureField, BarenblattInteriorLaplacian)
{
    // n = 1, m = 2: Lap v = -1/(3t) inside the support
    const SolutionField sol = sample_field(ManifoldModel::flat(1), PMEParameters(2.0, 1), linspace(0, 2, 65),
                                           linspace(1, 2, 33),
                                           [](double r, double t) { return barenblatt(1, 2.0, t, r, 1.0); });
    const PressureField pf = pressure_field(sol);
    for (std::size_t k = 0; k < pf.nt(); ++k)
        for (std::size_t i = 0; i + 1 < pf.nr(); ++i)
            EXPECT_NEAR(pf.lap[pf.index(k, i)], -1.0 / (3.0 * pf.t[k]), 1e-10);
}

TEST(PressureField, ExtremalValues)
{
    const SolutionField sol = sample_field(ManifoldModel::flat(2), PMEParameters(2.0, 2), linspace(0, 3, 31),
                                           linspace(1, 2, 8), [](double r, double) { return 0.5 * (1.0 + std::exp(-r * r)); });
    const PressureField pf = pressure_field(sol); // v = 1 + e^{-r^2}
    const Extrema all = extremal_values(pf);
    EXPECT_NEAR(all.sup, 2.0, 1e-15);
    Region band;
    band.r_lo = 1.0;
    band.r_hi = 2.0;
    EXPECT_NEAR(extremal_values(pf, band).sup, 1.0 + std::exp(-1.0), 1e-15);
    for (double v : pf.v) {
        EXPECT_LE(v, all.sup);
        EXPECT_GE(v, all.inf);
    }
    Region empty;
    empty.r_lo = 10.0;
    EXPECT_THROW(extremal_values(pf, empty), ConfigError);
}

TEST(PressureIdentity, ManufacturedFieldIsNotASolution)
{
    // v = e^{-t}(2 + cos r) with m = 2, so u = v/2
    const SolutionField sol = sample_field(ManifoldModel::flat(1), PMEParameters(2.0, 1), linspace(0, 3, 61),
                                           linspace(0.5, 1.5, 41),
                                           [](double r, double t) { return 0.5 * std::exp(-t) * (2.0 + std::cos(r)); });
    const ResidualField res = pressure_identity_residual(pressure_field(sol));
    EXPECT_GT(res.max_abs, 0.1);
}

TEST(PressureIdentity, ConvergesOnSampledBarenblatt)
{
    // n = 2, m = 3: v is not polynomial in t, so both stencils contribute
    double prev = 0.0;
    for (int refine = 0; refine < 3; ++refine) {
        const int nr = 33 << refine;
        const int nt = 17 << refine;
        const SolutionField sol = sample_field(ManifoldModel::flat(2), PMEParameters(3.0, 2), linspace(0, 1.5, nr),
                                               linspace(1, 2, nt),
                                               [](double r, double t) { return barenblatt(2, 3.0, t, r, 1.0); });
        const ResidualField res = pressure_identity_residual(pressure_field(sol));
        if (refine > 0)
            EXPECT_GT(std::log2(prev / res.max_abs), 1.8);
        prev = res.max_abs;
    }
}
