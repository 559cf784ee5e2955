#include "dgocp/estimators.hpp"

#include <cmath>

namespace dgocp {

double StepEstimate::eta_y_sq() const
{
    return eta_y_K.sum() + eta_y_EN.sum() + eta_y_gD.sum() + eta_y_E0.sum() + eta_y_E0_tilde.sum() +
           eta_y_ED.sum();
}

double StepEstimate::eta_z_sq() const
{
    return eta_z_K.sum() + eta_z_EN.sum() + eta_z_E0.sum() + eta_z_ED.sum() + eta_z_E0_tilde.sum();
}

double StepEstimate::theta_y_sq() const
{
    return theta_y_K.sum() + theta_y_EN.sum() + theta_y_ED.sum();
}

double StepEstimate::theta_z_sq() const
{
    return theta_z_K.sum() + theta_z_EN.sum();
}

double StepEstimate::upsilon() const
{
    return std::sqrt(eta_y_sq() + eta_z_sq() + eta_q_sq());
}

Vector StepEstimate::element_indicator() const
{
    return eta_y_K + eta_z_K;
}

Vector StepEstimate::edge_indicator() const
{
    // the smoothed control indicator stands in for eta_q on Neumann edges
    return eta_y_E0 + eta_z_E0 + eta_y_E0_tilde + eta_z_E0_tilde + eta_y_gD + eta_y_ED + eta_z_ED + eta_y_EN +
           eta_z_EN + eta_q_bar;
}

double smoothed_inactive_indicator(double q, double q_a, double q_b, double h, double mu)
{
    const double p = (q - q_a) * (q_b - q);
    if (p <= 0.0) {
        return 0.0;
    }
    return p / (std::pow(h, mu) + p);
}

double effectivity_index(double estimated, double true_error)
{
    if (!(true_error > 0.0)) {
        throw std::invalid_argument("effectivity index needs a positive true error");
    }
    return estimated / true_error;
}

Vector initial_data_estimator(const ScalarField& y0, const DGFunction& y0_h)
{
    const Mesh& mesh = *y0_h.mesh;
    const auto& rule = triangle_rule();
    Vector out = Vector::Zero(mesh.num_elements());
    for (Index k = 0; k < mesh.num_elements(); ++k) {
        double sum = 0.0;
        for (int q = 0; q < rule.size; ++q) {
            const double d = y0(mesh.map_to_physical(k, rule.bary[q])) - y0_h.value(k, rule.bary[q]);
            sum += rule.weight[q] * d * d;
        }
        out[k] = sum * mesh.area(k);
    }
    return out;
}

StepEstimate estimate_step(const StepFields& in, const EstimatorConfig& config)
{
    const DiscreteProblem& P = *in.problem;
    const Mesh& mesh = *P.mesh();
    const ProblemData& data = P.data();
    const Index i = in.step;
    const double t0 = P.grid().t(i - 1);
    const double t1 = P.grid().t(i);
    const double k = t1 - t0;
    const double sigma0 = P.sigma0();
    const double alpha = data.alpha;
    const DGFunction& a0h = P.a0();
    const InstantData& now = P.instant(i);
    const InstantData& before = P.instant(i - 1);
    const DGFunction& y0 = *in.y_prev;
    const DGFunction& y1 = *in.y_cur;
    const DGFunction& z0 = *in.z_prev;
    const DGFunction& z1 = *in.z_cur;
    const TraceFunction& Q = *in.q;

    const auto& tri = triangle_rule();
    const auto& line = edge_rule();
    const LineRule time = gauss_rule(2);

    StepEstimate s;
    s.t0 = t0;
    s.t1 = t1;
    const Index ne = mesh.num_elements();
    const Index nE = mesh.num_edges();
    for (Vector* v : {&s.eta_y_K, &s.eta_z_K, &s.theta_y_K, &s.theta_z_K}) {
        *v = Vector::Zero(ne);
    }
    for (Vector* v : {&s.eta_y_E0, &s.eta_z_E0, &s.eta_y_E0_tilde, &s.eta_z_E0_tilde, &s.eta_y_gD, &s.eta_y_ED,
                      &s.eta_z_ED, &s.eta_y_EN, &s.eta_z_EN, &s.eta_q_EN, &s.eta_q_bar, &s.theta_y_EN,
                      &s.theta_z_EN, &s.theta_y_ED, &s.theta_q_EN}) {
        *v = Vector::Zero(nE);
    }

    // element residuals and volume oscillations
    for (Index K = 0; K < ne; ++K) {
        const double hK2 = mesh.element(K).diameter * mesh.element(K).diameter;
        double ry = 0.0, rz = 0.0, oy = 0.0, oz = 0.0;
        for (int q = 0; q < tri.size; ++q) {
            const auto& l = tri.bary[q];
            const Point x = mesh.map_to_physical(K, l);
            const double a = a0h.value(K, l);
            const double yv = y1.value(K, l);
            const double zt = z0.value(K, l);
            const double fh = now.f.value(K, l);
            const double ydh = now.y_d.value(K, l);
            const double r1 = fh - (yv - y0.value(K, l)) / k - a * yv;
            const double r2 = yv - ydh + (z1.value(K, l) - zt) / k - a * zt;
            ry += tri.weight[q] * r1 * r1;
            rz += tri.weight[q] * r2 * r2;
            const double da = a - data.a0(x);
            double osc_y = da * yv * da * yv;
            double osc_z = da * zt * da * zt;
            double fy = 0.0, fz = 0.0;
            for (int m = 0; m < time.size(); ++m) {
                const double t = t0 + k * time.point[m];
                const double df = data.f(x, t) - fh;
                const double dy = ydh - data.y_d(x, t);
                fy += time.weight[m] * df * df;
                fz += time.weight[m] * dy * dy;
            }
            oy += tri.weight[q] * (osc_y + fy);
            oz += tri.weight[q] * (osc_z + fz);
        }
        const double area = mesh.area(K);
        s.eta_y_K[K] = k * hK2 * ry * area;
        s.eta_z_K[K] = k * hK2 * rz * area;
        s.theta_y_K[K] = k * hK2 * oy * area;
        s.theta_z_K[K] = k * hK2 * oz * area;
    }

    // time-linear interpolant coefficient at Gauss point m: (1 - tau) v^{i-1} + tau v^i
    auto lerp = [](double a, double b, double tau) { return (1.0 - tau) * a + tau * b; };

    for (Index e : mesh.interior_edges()) {
        const Edge& E = mesh.edge(e);
        const double h = E.length;
        const double gy = jump_grad(y1, e);
        const double gz = jump_grad(z0, e);
        double jy = 0.0, jz = 0.0, jy_t = 0.0, jz_t = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double sq = line.point[q];
            const double w = line.weight[q] * h;
            const double dy1 = y1.trace(e, 0, sq) - y1.trace(e, 1, sq);
            const double dy0 = y0.trace(e, 0, sq) - y0.trace(e, 1, sq);
            const double dz1 = z1.trace(e, 0, sq) - z1.trace(e, 1, sq);
            const double dz0 = z0.trace(e, 0, sq) - z0.trace(e, 1, sq);
            jy += w * dy1 * dy1;
            jz += w * dz0 * dz0;
            for (int m = 0; m < time.size(); ++m) {
                const double tau = time.point[m];
                const double Yt = lerp(dy0, dy1, tau);
                const double Zt = lerp(dz0, dz1, tau);
                jy_t += time.weight[m] * w * Yt * Yt;
                jz_t += time.weight[m] * w * Zt * Zt;
            }
        }
        const double pen = sigma0 * sigma0 / h;
        s.eta_y_E0[e] = k * (h * gy * gy * h + pen * jy);
        s.eta_z_E0[e] = k * (h * gz * gz * h + pen * jz);
        s.eta_y_E0_tilde[e] = k * pen * (jy + jy_t);
        s.eta_z_E0_tilde[e] = k * pen * (jz + jz_t);
    }

    for (std::size_t j = 0; j < mesh.dirichlet_edges().size(); ++j) {
        const Index e = mesh.dirichlet_edges()[j];
        const double h = mesh.edge(e).length;
        double gd = 0.0, yy = 0.0, zz = 0.0, yy_t = 0.0, zz_t = 0.0, osc = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double sq = line.point[q];
            const double w = line.weight[q] * h;
            const Point x = mesh.edge_point(e, sq);
            const double v1 = y1.trace(e, 0, sq);
            const double v0 = y0.trace(e, 0, sq);
            const double w1 = z1.trace(e, 0, sq);
            const double w0 = z0.trace(e, 0, sq);
            const double g1 = now.g_D.value(static_cast<Index>(j), sq);
            const double g0 = before.g_D.value(static_cast<Index>(j), sq);
            gd += w * (g1 - v1) * (g1 - v1);
            yy += w * v1 * v1;
            zz += w * w0 * w0;
            for (int m = 0; m < time.size(); ++m) {
                const double tau = time.point[m];
                const double Yt = lerp(v0, v1, tau);
                const double Zt = lerp(w0, w1, tau);
                const double dg = data.g_D(x, t0 + k * tau) - lerp(g0, g1, tau);
                yy_t += time.weight[m] * w * Yt * Yt;
                zz_t += time.weight[m] * w * Zt * Zt;
                osc += time.weight[m] * w * dg * dg;
            }
        }
        const double pen = sigma0 * sigma0 / h;
        s.eta_y_gD[e] = k * pen * gd;
        s.eta_y_ED[e] = k * pen * (yy + yy_t);
        s.eta_z_ED[e] = k * pen * (zz + zz_t);
        s.theta_y_ED[e] = k * sigma0 / h * osc;
    }

    const double mu_exp = config.chi_exponent;
    for (std::size_t j = 0; j < mesh.neumann_edges().size(); ++j) {
        const Index e = mesh.neumann_edges()[j];
        const Edge& E = mesh.edge(e);
        const double h = E.length;
        const Index K = E.elements[0];
        const double dny = y1.gradient(K).dot(E.normal);
        const double dnz = z0.gradient(K).dot(E.normal);
        const Index slot = P.control_slot(e);
        const auto js = static_cast<Index>(j);
        double ry = 0.0, rz = 0.0, oy = 0.0, oz = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double sq = line.point[q];
            const double w = line.weight[q] * h;
            const Point x = mesh.edge_point(e, sq);
            const double qv = slot >= 0 ? Q.value(slot, sq) : 0.0;
            const double gN = now.g_N.value(js, sq);
            const double rN = now.r_N.value(js, sq);
            ry += w * (qv + gN - dny) * (qv + gN - dny);
            rz += w * (rN - dnz) * (rN - dnz);
            for (int m = 0; m < time.size(); ++m) {
                const double t = t0 + k * time.point[m];
                const double dg = data.g_N(x, t) - gN;
                const double dr = data.r_N(x, t) - rN;
                oy += time.weight[m] * w * dg * dg;
                oz += time.weight[m] * w * dr * dr;
            }
        }
        s.eta_y_EN[e] = k * h * ry;
        s.eta_z_EN[e] = k * h * rz;
        s.theta_y_EN[e] = k * h * oy;
        s.theta_z_EN[e] = k * h * oz;

        if (slot < 0) {
            continue;
        }
        const double dq = (Q.value(slot, 1.0) - Q.value(slot, 0.0)) / h;
        const double dqd = (now.q_d.value(slot, 1.0) - now.q_d.value(slot, 0.0)) / h;
        const double g = dnz + alpha * (dq - dqd);
        s.eta_q_EN[e] = k * h * h * g * g * h;
        double bar = 0.0, osc = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double sq = line.point[q];
            const double w = line.weight[q] * h;
            const Point x = mesh.edge_point(e, sq);
            const double chi = smoothed_inactive_indicator(Q.value(slot, sq), now.q_a.value(slot, sq),
                                                           now.q_b.value(slot, sq), h, mu_exp);
            bar += w * g * g * chi * chi;
            for (int m = 0; m < time.size(); ++m) {
                const double t = t0 + k * time.point[m];
                const double d1 = alpha * (data.q_d(x, t) - now.q_d.value(slot, sq));
                const double d2 = data.q_a(x, t) - now.q_a.value(slot, sq);
                const double d3 = data.q_b(x, t) - now.q_b.value(slot, sq);
                osc += time.weight[m] * w * (d1 * d1 + d2 * d2 + d3 * d3);
            }
        }
        s.eta_q_bar[e] = k * h * h * bar;
        s.theta_q_EN[e] = k * osc;
    }

    s.theta_yT = k / 3.0 * energy_norm_sq(y1 - y0, a0h, sigma0).total();
    s.theta_zT = k / 3.0 * energy_norm_sq(z1 - z0, a0h, sigma0).total();
    return s;
}

void aggregate(EstimatorReport& r)
{
    double ey = r.eta_y0_K.size() > 0 ? r.eta_y0_K.sum() : 0.0;
    double ez = 0.0, eq = 0.0, ty = 0.0, tz = 0.0, tq = 0.0, tyT = 0.0, tzT = 0.0, bar = 0.0;
    for (const StepEstimate& s : r.steps) {
        ey += s.eta_y_sq();
        ez += s.eta_z_sq();
        eq += s.eta_q_sq();
        ty += s.theta_y_sq();
        tz += s.theta_z_sq();
        tq += s.theta_q_sq();
        tyT += s.theta_yT;
        tzT += s.theta_zT;
        bar += s.eta_q_bar.sum();
    }
    r.eta_y = std::sqrt(ey);
    r.eta_z = std::sqrt(ez);
    r.eta_q = std::sqrt(eq);
    r.upsilon = std::sqrt(ey + ez + eq);
    r.theta_y = std::sqrt(ty);
    r.theta_z = std::sqrt(tz);
    r.theta_q = std::sqrt(tq);
    r.theta = std::sqrt(ty + tz + tq);
    r.theta_yT = std::sqrt(tyT);
    r.theta_zT = std::sqrt(tzT);
    r.xi = std::sqrt(tyT + tzT);
    r.eta_q_bar = std::sqrt(bar);
}

EstimatorReport estimate(const OCPSolution& sol, const DiscreteProblem& problem, const EstimatorConfig& config)
{
    EstimatorReport r;
    r.eta_y0_K = initial_data_estimator(problem.data().y0, sol.Y[0]);
    for (Index i = 1; i <= sol.grid.steps(); ++i) {
        StepFields in;
        in.problem = &problem;
        in.step = i;
        in.y_prev = &sol.Y[i - 1];
        in.y_cur = &sol.Y[i];
        in.z_prev = &sol.Z[i - 1];
        in.z_cur = &sol.Z[i];
        in.q = &sol.Q[i];
        r.steps.push_back(estimate_step(in, config));
    }
    aggregate(r);
    return r;
}

}  // namespace dgocp
