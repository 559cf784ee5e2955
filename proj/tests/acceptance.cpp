// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "dgocp/adaptive.hpp"
#include "dgocp/benchmarks.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace dgocp;
using namespace dgocp::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

/// Squared L2 norm of a control-edge trace.
double trace_l2_sq(const TraceFunction& f)
{
    double s = 0.0;
    for (Index j = 0; j < f.size(); ++j) {
        const double h = f.mesh->edge(f.edges[static_cast<std::size_t>(j)]).length;
        const double a = f.coeffs[2 * j], b = f.coeffs[2 * j + 1];
        s += h / 3.0 * (a * a + a * b + b * b);
    }
    return s;
}

Outcome bilinear_form_laws()
{
    Rng rng(1001);
    double coercivity = 1e300, continuity = 0.0, asym = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const MeshPtr m = random_mesh(rng, 512);
        const SipgConfig cfg = SipgConfig::constant(m, 10.0, 1.0);
        const SparseMatrix A = assemble_stiffness(*m, cfg);
        asym = std::max(asym, max_asymmetry(A));
        for (int s = 0; s < 100; ++s) {
            const DGFunction v = random_field(rng, m);
            const DGFunction w = random_field(rng, m);
            const double nv = energy_norm(v, cfg.a0, cfg.sigma0);
            const double nw = energy_norm(w, cfg.a0, cfg.sigma0);
            coercivity = std::min(coercivity, v.coeffs.dot(A * v.coeffs) / (nv * nv));
            continuity = std::max(continuity, std::abs(w.coeffs.dot(A * v.coeffs)) / (nv * nw));
        }
    }
    return {asym <= 1e-12 && coercivity >= 0.05 && continuity <= 2.0 + 1e-10,
            fmt("asymmetry %.2e, min coercivity %.4f, max continuity %.4f", asym, coercivity, continuity)};
}

Outcome forward_convergence()
{
    const BenchmarkSpec ex = make_example1();
    const LineRule time = gauss_rule(3);
    std::vector<double> err;
    for (Index n : {8, 16, 32, 64}) {
        const MeshPtr mesh = build_mesh(ex, n, n);
        DiscreteProblem p(mesh, TimeGrid::uniform(1.0, n), ex.data, ex.sigma0);
        ControlTrajectory Q = p.zero_controls();
        for (Index i = 1; i <= n; ++i) {
            const double t = p.grid().t(i);
            Q[i] = project_trace([&](const Point& x) { return ex.q(x, t); }, mesh, mesh->control_edges());
        }
        const Trajectory Y = p.solve_state_forward(Q);
        double e = 0.0;
        for (Index i = 1; i <= n; ++i) {
            for (int m = 0; m < time.size(); ++m) {
                const double tau = time.point[m];
                const DGFunction Yt(mesh, (1.0 - tau) * Y[i - 1].coeffs + tau * Y[i].coeffs);
                e += p.grid().k(i) * time.weight[m] *
                     energy_error_sq(Yt, ex.y, p.grid().t(i - 1) + tau * p.grid().k(i), p.a0(), ex.sigma0);
            }
        }
        err.push_back(std::sqrt(e));
    }
    const double rate = std::log2(err[2] / err[3]);
    return {rate >= 0.8 && rate <= 1.2,
            fmt("errors %.4g %.4g %.4g %.4g", err[0], err[1], err[2], err[3]) + fmt(", last rate %.3f", rate)};
}

struct SignCheck {
    bool ok = true;
    int active = 0;
    int wrong_sign_active = 0;
};

SignCheck check_signs(const OCPSolution& s, const DiscreteProblem& p)
{
    SignCheck c;
    for (Index i = 1; i <= p.grid().steps(); ++i) {
        const InstantData& d = p.instant(i);
        for (Index n = 0; n < s.Q[i].coeffs.size(); ++n) {
            const double q = s.Q[i].coeffs[n], mu = s.Mu[i].coeffs[n];
            const double qa = d.q_a.coeffs[n], qb = d.q_b.coeffs[n];
            c.ok = c.ok && q >= qa && q <= qb;
            switch (s.sets[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]) {
            case NodeSet::Lower:
                ++c.active;
                c.ok = c.ok && q == qa;
                c.wrong_sign_active += mu > 0.0;
                break;
            case NodeSet::Upper:
                ++c.active;
                c.ok = c.ok && q == qb;
                c.wrong_sign_active += mu < 0.0;
                break;
            case NodeSet::Inactive:
                c.ok = c.ok && mu == 0.0;
                break;
            }
        }
    }
    c.ok = c.ok && c.wrong_sign_active == 0;
    return c;
}

OCPSolution solve_example1(double bound, std::shared_ptr<DiscreteProblem>& problem)
{
    Example1Options o;
    o.q_a = -bound;
    o.q_b = bound;
    const BenchmarkSpec ex = make_example1(o);
    problem = std::make_shared<DiscreteProblem>(build_mesh(ex, 16, 16), TimeGrid::uniform(1.0, 20), ex.data,
                                                ex.sigma0);
    return solve_ocp(*problem);
}

Outcome kkt_correctness()
{
    std::shared_ptr<DiscreteProblem> p;
    const OCPSolution s = solve_example1(5.0, p);
    const double comp = complementarity_residual(s, *p);
    const SignCheck c = check_signs(s, *p);
    return {s.sweeps <= 20 && comp <= 1e-10 && c.ok,
            fmt("sweeps %.0f, complementarity %.2e, feasible and signed %.0f, active nodes %.0f", s.sweeps, comp,
                c.ok, c.active)};
}

Outcome inactive_set_detection()
{
    const LineRule time = gauss_rule(3);
    auto norms = [&](const OCPSolution& s, const DiscreteProblem& p) {
        double mu = 0.0, z = 0.0;
        for (Index i = 1; i <= p.grid().steps(); ++i) {
            const double k = p.grid().k(i);
            mu += k * trace_l2_sq(s.Mu[i]);
            for (int m = 0; m < time.size(); ++m) {
                const double tau = time.point[m];
                const DGFunction Zt(s.mesh, (1.0 - tau) * s.Z[i - 1].coeffs + tau * s.Z[i].coeffs);
                z += k * time.weight[m] * trace_l2_sq(p.control_trace(Zt));
            }
        }
        return std::pair<double, double>(std::sqrt(mu), std::sqrt(z));
    };
    std::shared_ptr<DiscreteProblem> wide, tight;
    const OCPSolution sw = solve_example1(8.5, wide);
    const auto [mu_w, z_w] = norms(sw, *wide);
    const OCPSolution st = solve_example1(5.0, tight);
    const SignCheck c = check_signs(st, *tight);
    double max_unconstrained = 0.0;
    for (Index i = 1; i <= tight->grid().steps(); ++i) {
        const Vector zt = tight->control_trace(st.Z[i - 1]).coeffs;
        const Vector u = tight->instant(i).q_d.coeffs - zt / tight->data().alpha;
        max_unconstrained = std::max(max_unconstrained, u.cwiseAbs().maxCoeff());
    }
    const bool vanish = mu_w <= 1e-6 * z_w;
    const bool active = c.active > 0 && c.wrong_sign_active == 0;
    return {vanish && active,
            fmt("bounds 8.5: |mu| %.2e vs |z| %.4g; bounds 5: active nodes %.0f, max |q_d - z/alpha| %.4g", mu_w, z_w,
                c.active, max_unconstrained)};
}

Outcome reliability_surrogate()
{
    const BenchmarkSpec ex = make_example1();
    std::vector<double> ratio;
    std::string detail = "TrueErr/(Theta+Upsilon+Xi):";
    for (Index n : {8, 16, 32}) {
        DiscreteProblem p(build_mesh(ex, n, n), TimeGrid::uniform(1.0, n), ex.data, ex.sigma0);
        const OCPSolution s = solve_ocp(p);
        const EstimatorReport r = estimate(s, p);
        ratio.push_back(true_errors(s, p, ex).total() / (r.theta + r.upsilon + r.xi));
        detail += fmt(" %.4f", ratio.back());
    }
    const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
    return {spread < 3.0, detail + fmt(", spread %.3f", spread)};
}

AdaptConfig example1_adaptive(double theta)
{
    AdaptConfig c;
    c.theta = theta;
    c.eps_space = 1.0;
    c.eps_time = 0.25;
    c.max_outer_iters = 4;
    c.max_space_iters_per_step = 2;
    c.sigma0 = make_example1().sigma0;
    return c;
}

Outcome effectivity_stability()
{
    const BenchmarkSpec ex = make_example1();
    std::vector<double> eff;
    std::string detail = "effectivity:";
    run_adaptive(ex.data, build_mesh(ex, 8, 8), TimeGrid::uniform(1.0, 10), example1_adaptive(0.45),
                 [&](const AdaptIteration& it) {
                     eff.push_back(effectivity_index(it.report.upsilon,
                                                     true_errors(it.solution, *it.problem, ex).total()));
                     detail += fmt(" %.3f", eff.back());
                 });
    const double band = *std::max_element(eff.begin(), eff.end()) / *std::min_element(eff.begin(), eff.end());
    return {eff.size() == 4 && band <= 5.0, detail + fmt(", max/min %.3f", band)};
}

Outcome adaptive_superiority()
{
    const BenchmarkSpec ex = make_example1();
    const AdaptHistory h =
        run_adaptive(ex.data, build_mesh(ex, 8, 8), TimeGrid::uniform(1.0, 10), example1_adaptive(0.40));
    const AdaptIteration& last = h.iterations.back();
    const double target = last.report.upsilon;
    const Index adaptive_ndof = last.ndof();
    // smallest uniform level reaching the target; if none does, the finest level is a lower bound
    Index uniform_ndof = 0;
    bool reached = false;
    double last_uniform = 0.0;
    for (Index n : {8, 16, 32}) {
        DiscreteProblem p(build_mesh(ex, n, n), TimeGrid::uniform(1.0, n), ex.data, ex.sigma0);
        last_uniform = estimate(solve_ocp(p), p).upsilon;
        uniform_ndof = 3 * p.mesh()->num_elements();
        if (last_uniform <= target) {
            reached = true;
            break;
        }
    }
    const double share = static_cast<double>(adaptive_ndof) / static_cast<double>(uniform_ndof);
    return {share <= 0.7,
            fmt("adaptive Upsilon %.4g at NDOF %.0f; uniform Upsilon %.4g at NDOF %.0f", target,
                static_cast<double>(adaptive_ndof), last_uniform, static_cast<double>(uniform_ndof)) +
                (reached ? " (target reached)" : " (target not reached, NDOF is a lower bound)") +
                fmt(", share %.3f", share)};
}

Outcome singularity_tracking()
{
    const BenchmarkSpec ex = make_example2();
    AdaptConfig c;
    c.theta = 0.4;
    c.eps_space = 0.015;
    c.eps_time = 0.022;
    c.Lambda2 = 0.7;
    c.delta2 = 1.5;
    c.max_space_iters_per_step = 3;
    c.max_outer_iters = 1;
    c.sigma0 = ex.sigma0;
    const AdaptHistory h = run_adaptive(ex.data, build_mesh(ex, 20, 20), TimeGrid::uniform(1.0, 20), c);
    const auto& march = h.iterations.front().march;
    bool ok = true;
    std::string detail;
    double k_early = 0.0, k_mid = 1e300;
    for (const StepRecord& r : march) {
        const double k = r.t1 - r.t0;
        if (r.t0 < 0.1 && 0.1 <= r.t1) {
            k_early = k;
        }
        if (std::abs(0.5 * (r.t0 + r.t1) - 0.5) <= 0.1) {
            k_mid = std::min(k_mid, k);
        }
        for (double t : {0.1, 0.48, 1.0}) {
            if (r.t0 < t && t <= r.t1) {
                const Point centre(t - 0.5, t - 0.5);
                int near = 0;
                for (const Point& x : r.marked_centroids) {
                    near += (x - centre).norm() <= 0.3;
                }
                const double frac =
                    r.marked_centroids.empty() ? 0.0 : static_cast<double>(near) / r.marked_centroids.size();
                ok = ok && frac >= 0.5;
                detail += fmt("t=%.2f near %.0f/%.0f; ", t, near, static_cast<double>(r.marked_centroids.size()));
            }
        }
    }
    ok = ok && k_mid < k_early;
    return {ok, detail + fmt("k(0.1) %.4f, min k near 0.5 %.4f", k_early, k_mid)};
}

Outcome marking_oracle()
{
    Rng rng(909);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = uniform_index(rng, 1, 12);
        Vector v(n);
        for (Index i = 0; i < n; ++i) {
            v[i] = uniform(rng, 0.0, 1.0);
        }
        const double theta = uniform(rng, 0.05, 0.95);
        const std::vector<Index> m = dorfler_mark(v, theta);
        double marked = 0.0, weakest = 1e300;
        for (Index i : m) {
            marked += v[i];
            weakest = std::min(weakest, v[i]);
        }
        int best = static_cast<int>(n) + 1;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            double s = 0.0;
            for (Index i = 0; i < n; ++i) {
                s += (mask >> i) & 1u ? v[i] : 0.0;
            }
            if (s >= theta * v.sum()) {
                best = std::min(best, std::popcount(mask));
            }
        }
        // minimal size, bulk reached, and every unmarked entity is no larger than a marked one
        bool ok = static_cast<int>(m.size()) == best && marked >= theta * v.sum();
        for (Index i = 0; i < n; ++i) {
            if (std::find(m.begin(), m.end(), i) == m.end()) {
                ok = ok && v[i] <= weakest;
            }
        }
        mismatches += !ok;
    }
    return {mismatches == 0, fmt("%.0f mismatches in 200 instances", mismatches)};
}

Outcome transfer_exactness()
{
    Rng rng(77);
    double worst = 0.0;
    for (int seq = 0; seq < 20; ++seq) {
        MeshPtr mesh = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, uniform_index(rng, 1, 3), uniform_index(rng, 1, 3),
                                       random_boundary(rng));
        const DGFunction f = random_field(rng, mesh);
        const int steps = static_cast<int>(uniform_index(rng, 1, 5));
        for (int s = 0; s < steps; ++s) {
            std::vector<Index> marks;
            for (Index k = 0; k < mesh->num_elements(); ++k) {
                if (uniform(rng, 0.0, 1.0) < 0.3) {
                    marks.push_back(k);
                }
            }
            mesh = refine(mesh, marks);
        }
        const DGFunction g = transfer(f, mesh);
        for (int i = 0; i < 50; ++i) {
            const Point x(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0));
            worst = std::max(worst, std::abs(g(x) - f(x)));
        }
    }
    return {worst <= 1e-12, fmt("max point difference %.2e", worst)};
}

/// Fourth-order central differences.
double d2(const std::function<double(double)>& u, double h)
{
    return (-u(2 * h) + 16 * u(h) - 30 * u(0) + 16 * u(-h) - u(-2 * h)) / (12 * h * h);
}

double d1(const std::function<double(double)>& u, double h)
{
    return (-u(2 * h) + 8 * u(h) - 8 * u(-h) + u(-2 * h)) / (12 * h);
}

Outcome manufactured_consistency()
{
    double worst = 0.0;
    std::string detail;
    Rng rng(55);
    for (const BenchmarkSpec& ex : {make_example1(), make_example2()}) {
        double ex_worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const Point x(uniform(rng, ex.x_range[0], ex.x_range[1]), uniform(rng, ex.y_range[0], ex.y_range[1]));
            const double t = uniform(rng, 0.0, 1.0);
            const double h = 1e-3;
            auto lap = [&](const SpaceTimeField& u) {
                return d2([&](double s) { return u(x + Point(s, 0), t); }, h) +
                       d2([&](double s) { return u(x + Point(0, s), t); }, h);
            };
            auto dt = [&](const SpaceTimeField& u) { return d1([&](double s) { return u(x, t + s); }, h); };
            const double a = ex.data.a0(x);
            const double y = ex.y.value(x, t), z = ex.z.value(x, t);
            const double f = ex.data.f(x, t);
            const double src = y - ex.data.y_d(x, t);
            const double r1 = std::abs(dt(ex.y.value) - lap(ex.y.value) + a * y - f) / std::max(1.0, std::abs(f));
            const double r2 =
                std::abs(-dt(ex.z.value) - lap(ex.z.value) + a * z - src) / std::max(1.0, std::abs(src));
            ex_worst = std::max({ex_worst, r1, r2});
        }
        detail += ex.name + fmt(" max residual %.2e; ", ex_worst);
        worst = std::max(worst, ex_worst);
    }
    return {worst <= 1e-6, detail};
}

}  // namespace

int main()
{
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bilinear form laws", bilinear_form_laws},
        {"forward solver convergence", forward_convergence},
        {"KKT correctness", kkt_correctness},
        {"inactive set detection", inactive_set_detection},
        {"reliability surrogate", reliability_surrogate},
        {"effectivity stability", effectivity_stability},
        {"adaptive superiority", adaptive_superiority},
        {"moving singularity tracking", singularity_tracking},
        {"marking oracle", marking_oracle},
        {"transfer exactness", transfer_exactness},
        {"manufactured data consistency", manufactured_consistency},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("%s  %2zu %-30s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
