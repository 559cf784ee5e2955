#include "dgocp/benchmarks.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dgocp;
using namespace dgocp::testing;

namespace {

ProblemData constant_data(double f, double y_d)
{
    ProblemData d;
    d.f = [f](const Point&, double) { return f; };
    d.y_d = [y_d](const Point&, double) { return y_d; };
    d.g_D = d.g_N = d.r_N = d.q_d = [](const Point&, double) { return 0.0; };
    d.q_a = [](const Point&, double) { return -1.0; };
    d.q_b = [](const Point&, double) { return 1.0; };
    d.y0 = [](const Point&) { return 0.0; };
    d.a0 = [](const Point&) { return 1.0; };
    d.alpha = 1.0;
    return d;
}

double flat_sum(const StepEstimate& s, bool residual)
{
    double sum = 0.0;
    if (residual) {
        for (const Vector* v : {&s.eta_y_K, &s.eta_z_K, &s.eta_y_E0, &s.eta_z_E0, &s.eta_y_E0_tilde,
                                &s.eta_z_E0_tilde, &s.eta_y_gD, &s.eta_y_ED, &s.eta_z_ED, &s.eta_y_EN, &s.eta_z_EN,
                                &s.eta_q_EN}) {
            for (Index i = 0; i < v->size(); ++i) {
                sum += (*v)[i];
            }
        }
    } else {
        for (const Vector* v : {&s.theta_y_K, &s.theta_z_K, &s.theta_y_EN, &s.theta_z_EN, &s.theta_y_ED,
                                &s.theta_q_EN}) {
            for (Index i = 0; i < v->size(); ++i) {
                sum += (*v)[i];
            }
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("smoothed inactive indicator")
{
    CHECK(smoothed_inactive_indicator(-1.0, -1.0, 1.0, 0.1, 2.0) == 0.0);
    CHECK(smoothed_inactive_indicator(1.0, -1.0, 1.0, 0.1, 2.0) == 0.0);
    CHECK(smoothed_inactive_indicator(3.0, -1.0, 1.0, 0.1, 2.0) == 0.0);
    // p = (q - q_a)(q_b - q) = 0.25 = h^mu
    CHECK(smoothed_inactive_indicator(0.5, 0.0, 1.0, 0.5, 2.0) == doctest::Approx(0.5));
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double q = uniform(rng, -1.0, 1.0);
        const double h = uniform(rng, 1e-3, 1.0);
        const double chi = smoothed_inactive_indicator(q, -1.0, 1.0, h, 2.0);
        CHECK(chi >= 0.0);
        CHECK(chi < 1.0);
        // shrinking h pushes the indicator towards one inside the inactive set
        CHECK(smoothed_inactive_indicator(q, -1.0, 1.0, 0.5 * h, 2.0) >= chi);
    }
}

TEST_CASE("effectivity index")
{
    CHECK(effectivity_index(3.0, 1.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)effectivity_index(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)effectivity_index(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("initial data estimator")
{
    const MeshPtr t = reference_triangle();
    const ScalarField sq = [](const Point& x) { return x.x() * x.x(); };
    const Vector e = initial_data_estimator(sq, project_data(sq, t));
    REQUIRE(e.size() == 1);
    CHECK(e[0] == doctest::Approx(1.0 / 600.0).epsilon(1e-10));

    Rng rng(8);
    const MeshPtr m = random_mesh(rng, 128);
    const ScalarField lin = [](const Point& x) { return 2.0 - x.x() + 0.5 * x.y(); };
    CHECK(initial_data_estimator(lin, project_data(lin, m)).cwiseAbs().maxCoeff() <= 1e-24);
}

TEST_CASE("zero data gives zero estimates")
{
    BoundarySpec b;
    b.kind = [](const Point& x) { return x.y() < 1e-12 ? EdgeKind::Neumann : EdgeKind::Dirichlet; };
    b.controlled = [](const Point&) { return true; };
    const MeshPtr m = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 3, 3, b);
    DiscreteProblem p(m, TimeGrid::uniform(1.0, 3), constant_data(0.0, 0.0), 10.0);
    const OCPSolution s = solve_ocp(p);
    const EstimatorReport r = estimate(s, p);
    CHECK(r.upsilon == 0.0);
    CHECK(r.theta == 0.0);
    CHECK(r.xi == 0.0);
    CHECK(r.eta_q_bar == 0.0);
}

TEST_CASE("single element residuals match hand computation")
{
    const MeshPtr t = reference_triangle();
    const double f = 1.0, c = 0.3, k = 0.5;
    DiscreteProblem p(t, TimeGrid({0.0, k}), constant_data(f, 0.0), 10.0);
    const DGFunction y0 = DGFunction::zero(t);
    DGFunction y1 = DGFunction::zero(t);
    y1.coeffs.setConstant(c);
    const DGFunction z = DGFunction::zero(t);
    const TraceFunction q = p.zero_controls()[1];
    StepFields in;
    in.problem = &p;
    in.step = 1;
    in.y_prev = &y0;
    in.y_cur = &y1;
    in.z_prev = &z;
    in.z_cur = &z;
    in.q = &q;
    const StepEstimate s = estimate_step(in);

    const double area = 0.5, h2 = 2.0;
    const double r = f - c / k - c;
    CHECK(s.eta_y_K[0] == doctest::Approx(k * h2 * r * r * area));
    // adjoint residual y - y_d with a zero adjoint
    CHECK(s.eta_z_K[0] == doctest::Approx(k * h2 * c * c * area));
    // constant increment: energy norm reduces to the weighted L2 part
    CHECK(s.theta_yT == doctest::Approx(k / 3.0 * c * c * area));
    CHECK(s.theta_zT == 0.0);
    CHECK(s.eta_y_EN.sum() == 0.0);

    // |||dy|||^2 = 3 with k = 1 gives a unit temporal contribution
    DiscreteProblem unit(t, TimeGrid({0.0, 1.0}), constant_data(f, 0.0), 10.0);
    y1.coeffs.setConstant(std::sqrt(6.0));
    in.problem = &unit;
    CHECK(estimate_step(in).theta_yT == doctest::Approx(1.0));
}

TEST_CASE("aggregate matches flat sums")
{
    const BenchmarkSpec ex = make_example2();
    const MeshPtr m = build_mesh(ex, 4, 4);
    DiscreteProblem p(m, TimeGrid::uniform(1.0, 4), ex.data, ex.sigma0);
    const OCPSolution s = solve_ocp(p);
    const EstimatorReport r = estimate(s, p);
    double res = r.eta_y0_K.sum(), osc = 0.0, tT = 0.0;
    for (const StepEstimate& st : r.steps) {
        res += flat_sum(st, true);
        osc += flat_sum(st, false);
        tT += st.theta_yT + st.theta_zT;
    }
    CHECK(r.upsilon == doctest::Approx(std::sqrt(res)).epsilon(1e-12));
    CHECK(r.theta == doctest::Approx(std::sqrt(osc)).epsilon(1e-12));
    CHECK(r.xi == doctest::Approx(std::sqrt(tT)).epsilon(1e-12));
    CHECK(r.upsilon * r.upsilon ==
          doctest::Approx(r.eta_y * r.eta_y + r.eta_z * r.eta_z + r.eta_q * r.eta_q).epsilon(1e-12));

    // indicators cover every residual part on every entity
    for (const StepEstimate& st : r.steps) {
        double sum = st.element_indicator().sum() + st.edge_indicator().sum() - st.eta_q_bar.sum() +
                     st.eta_q_EN.sum();
        CHECK(sum == doctest::Approx(flat_sum(st, true)).epsilon(1e-12));
        CHECK(st.element_indicator().minCoeff() >= 0.0);
        CHECK(st.edge_indicator().minCoeff() >= 0.0);
    }
}

TEST_CASE("residual estimator decreases under uniform refinement")
{
    const BenchmarkSpec ex = make_example1();
    double prev = 1e300;
    for (int l = 0; l < 3; ++l) {
        const Index n = 4 << l;
        DiscreteProblem p(build_mesh(ex, n, n), TimeGrid::uniform(1.0, n), ex.data, ex.sigma0);
        const double u = estimate(solve_ocp(p), p).upsilon;
        CHECK(u < prev);
        prev = u;
    }
}
