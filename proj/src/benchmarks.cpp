#include "dgocp/benchmarks.hpp"

#include <cmath>

namespace dgocp {

namespace {

constexpr double kBoundaryTol = 1e-12;

}  // namespace

BenchmarkSpec make_example1(const Example1Options& o)
{
    constexpr double K = 10.0;
    constexpr int n = 20;
    BenchmarkSpec b;
    b.name = "ex1";
    b.x_range = {0.0, 3.0};
    b.y_range = {0.0, 3.0};
    b.final_time = 1.0;
    b.sigma0 = o.sigma0;
    b.q_a = o.q_a;
    b.q_b = o.q_b;
    b.boundary.kind = [](const Point&) { return EdgeKind::Neumann; };
    b.boundary.controlled = [](const Point& x) {
        return x.x() <= kBoundaryTol && x.y() >= 1.0 - kBoundaryTol && x.y() <= 2.0 + kBoundaryTol;
    };

    auto peak = [](const Point& x) { return std::exp(-10.0 * x.squaredNorm()); };
    auto s_of = [](const Point& x) { return 2.0 * x.y() / 3.0 - 1.0; };
    // adjoint profile in x2 and its derivative in s
    auto c = [](double s) { return K / (2.0 * n) * ((2.0 * n + 1.0) * s - std::pow(s, 2 * n + 1)); };
    auto dc = [](double s) { return K / (2.0 * n) * (2.0 * n + 1.0) * (1.0 - std::pow(s, 2 * n)); };

    b.y.value = [peak](const Point& x, double t) { return t * peak(x); };
    b.y.gradient = [peak](const Point& x, double t) -> Point { return -20.0 * t * peak(x) * x; };
    b.y_t = [peak](const Point& x, double) { return peak(x); };
    b.z.value = [=](const Point& x, double t) { return (1.0 - t) * c(s_of(x)); };
    b.z.gradient = [=](const Point& x, double t) -> Point {
        return {0.0, (1.0 - t) * dc(s_of(x)) * 2.0 / 3.0};
    };
    b.z_t = [=](const Point& x, double) { return -c(s_of(x)); };

    const double qa = o.q_a, qb = o.q_b, alpha = o.alpha;
    const SpaceTimeField z = b.z.value;
    b.q = [=](const Point& x, double t) { return project_box(z(x, t), qa, qb); };
    b.mu = [=](const Point& x, double t) { return z(x, t) - project_box(z(x, t), qa, qb); };

    ProblemData& d = b.data;
    d.alpha = alpha;
    d.a0 = [](const Point&) { return 1.0; };
    d.y0 = [](const Point&) { return 0.0; };
    d.f = [peak](const Point& x, double t) {
        return ((41.0 - 400.0 * x.squaredNorm()) * t + 1.0) * peak(x);
    };
    d.y_d = [=](const Point& x, double t) {
        const double s = s_of(x);
        return t * peak(x) + (t - 2.0) * c(s) - (8.0 * n + 4.0) / 9.0 * (1.0 - t) * K * std::pow(s, 2 * n - 1);
    };
    d.g_N = [=](const Point& x, double t) {
        if (x.x() <= kBoundaryTol && x.y() >= 1.0 && x.y() <= 2.0) {
            return -project_box(z(x, t), qa, qb);
        }
        if (x.x() >= 3.0 - kBoundaryTol) {
            return -60.0 * t * std::exp(-10.0 * (9.0 + x.y() * x.y()));
        }
        if (x.y() >= 3.0 - kBoundaryTol) {
            return -60.0 * t * std::exp(-10.0 * (x.x() * x.x() + 9.0));
        }
        return 0.0;
    };
    d.g_D = [](const Point&, double) { return 0.0; };
    d.r_N = [](const Point&, double) { return 0.0; };
    if (o.variant == ControlDataVariant::Consistent) {
        d.q_d = [=](const Point& x, double t) {
            const double zv = z(x, t);
            return (2.0 * zv + (alpha - 1.0) * project_box(zv, qa, qb)) / alpha;
        };
    } else {
        d.q_d = [](const Point&, double) { return 0.0; };
    }
    d.q_a = [qa](const Point&, double) { return qa; };
    d.q_b = [qb](const Point&, double) { return qb; };
    return b;
}

BenchmarkSpec make_example2(const Example2Options& o)
{
    BenchmarkSpec b;
    b.name = "ex2";
    b.x_range = {-1.0, 1.0};
    b.y_range = {-1.0, 1.0};
    b.final_time = 1.0;
    b.sigma0 = o.sigma0;
    b.q_a = o.q_a;
    b.q_b = o.q_b;
    b.boundary.kind = [](const Point& x) {
        return std::abs(std::abs(x.y()) - 1.0) <= kBoundaryTol ? EdgeKind::Neumann : EdgeKind::Dirichlet;
    };
    b.boundary.controlled = [](const Point&) { return true; };

    struct Parts {
        double A, dA, G, Gt, lapG;
        Point gradG;
    };
    auto parts = [](const Point& x, double t) {
        const double c = t - 0.5;
        const double u = x.x() - c;
        const double v = x.y() - c;
        const double rho = u * u + v * v;
        Parts p{};
        const double decay = std::exp(-1000.0 * c * c);
        p.A = 0.1 * (1.0 - decay);
        p.dA = 200.0 * c * decay;
        p.G = std::exp(-rho / 0.04);
        p.Gt = 50.0 * (u + v) * p.G;
        p.gradG = -50.0 * p.G * Point(u, v);
        p.lapG = p.G * (2500.0 * rho - 100.0);
        return p;
    };

    b.y.value = [parts](const Point& x, double t) {
        const Parts p = parts(x, t);
        return p.A * p.G;
    };
    b.y.gradient = [parts](const Point& x, double t) -> Point {
        const Parts p = parts(x, t);
        return p.A * p.gradG;
    };
    b.y_t = [parts](const Point& x, double t) {
        const Parts p = parts(x, t);
        return p.dA * p.G + p.A * p.Gt;
    };
    b.z = b.y;
    b.z_t = b.y_t;

    const double qa = o.q_a, qb = o.q_b, alpha = o.alpha;
    const SpaceTimeField z = b.z.value;
    b.q = [=](const Point& x, double t) { return project_box(-z(x, t) / alpha, qa, qb); };
    b.mu = [=](const Point& x, double t) { return -alpha * project_box(-z(x, t) / alpha, qa, qb) - z(x, t); };

    ProblemData& d = b.data;
    d.alpha = alpha;
    d.a0 = [](const Point&) { return 1.0; };
    d.y0 = [y = b.y.value](const Point& x) { return y(x, 0.0); };
    d.f = [parts](const Point& x, double t) {
        const Parts p = parts(x, t);
        return p.dA * p.G + p.A * p.Gt - p.A * p.lapG + p.A * p.G;
    };
    d.y_d = [parts](const Point& x, double t) {
        const Parts p = parts(x, t);
        return p.dA * p.G + p.A * p.Gt + p.A * p.lapG;
    };
    d.g_D = [](const Point&, double) { return 0.0; };
    d.g_N = [](const Point&, double) { return 0.0; };
    d.r_N = [](const Point&, double) { return 0.0; };
    d.q_d = [](const Point&, double) { return 0.0; };
    d.q_a = [qa](const Point&, double) { return qa; };
    d.q_b = [qb](const Point&, double) { return qb; };
    return b;
}

MeshPtr build_mesh(const BenchmarkSpec& spec, Index nx, Index ny)
{
    return build_rect_mesh(spec.x_range, spec.y_range, nx, ny, spec.boundary);
}

double energy_error_sq(const DGFunction& uh, const ExactField& u, double t, const DGFunction& a0, double sigma0)
{
    const Mesh& mesh = *uh.mesh;
    return energy_norm_sq(
               mesh,
               [&](Index k, const Eigen::Vector3d& l) {
                   const Point x = mesh.map_to_physical(k, l);
                   return std::pair<double, Point>(u.value(x, t) - uh.value(k, l),
                                                   u.gradient(x, t) - uh.gradient(k));
               },
               [&a0](Index k, const Eigen::Vector3d& l) { return a0.value(k, l); }, sigma0)
        .total();
}

TrueErrors true_errors(const OCPSolution& sol, const DiscreteProblem& problem, const BenchmarkSpec& spec)
{
    const Mesh& mesh = *sol.mesh;
    const LineRule time = gauss_rule(3);
    const auto& line = edge_rule();
    const DGFunction& a0 = problem.a0();
    const double sigma0 = problem.sigma0();
    const auto& cedges = mesh.control_edges();
    double ey = 0.0, ez = 0.0, eq = 0.0, em = 0.0;
    for (Index i = 1; i <= sol.grid.steps(); ++i) {
        const double t0 = sol.grid.t(i - 1);
        const double k = sol.grid.k(i);
        for (int m = 0; m < time.size(); ++m) {
            const double tau = time.point[m];
            const double t = t0 + k * tau;
            const double w = k * time.weight[m];
            const DGFunction Yt(sol.mesh, (1.0 - tau) * sol.Y[i - 1].coeffs + tau * sol.Y[i].coeffs);
            const DGFunction Zt(sol.mesh, (1.0 - tau) * sol.Z[i - 1].coeffs + tau * sol.Z[i].coeffs);
            ey += w * energy_error_sq(Yt, spec.y, t, a0, sigma0);
            ez += w * energy_error_sq(Zt, spec.z, t, a0, sigma0);
            for (std::size_t j = 0; j < cedges.size(); ++j) {
                const Index e = cedges[j];
                const double h = mesh.edge(e).length;
                for (int q = 0; q < line.size(); ++q) {
                    const double s = line.point[q];
                    const Point x = mesh.edge_point(e, s);
                    const double dq = spec.q(x, t) - sol.Q[i].value(static_cast<Index>(j), s);
                    const double dm = spec.mu(x, t) - sol.Mu[i].value(static_cast<Index>(j), s);
                    eq += w * line.weight[q] * h * dq * dq;
                    em += w * line.weight[q] * h * dm * dm;
                }
            }
        }
    }
    return {std::sqrt(ey), std::sqrt(ez), std::sqrt(eq), std::sqrt(em)};
}

}  // namespace dgocp
