#include "dgocp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dgocp {

TimeGrid::TimeGrid(std::vector<double> t) : t_(std::move(t))
{
    if (t_.size() < 2) {
        throw OptimizerError("time grid needs at least one step");
    }
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] > t_[i - 1])) {
            throw OptimizerError("time grid must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double final_time, Index steps)
{
    if (steps < 1 || !(final_time > 0.0)) {
        throw OptimizerError("uniform grid needs T > 0 and at least one step");
    }
    std::vector<double> t(static_cast<std::size_t>(steps + 1));
    for (Index i = 0; i <= steps; ++i) {
        t[i] = final_time * static_cast<double>(i) / static_cast<double>(steps);
    }
    t.back() = final_time;
    return TimeGrid(std::move(t));
}

Index TimeGrid::step_containing(double t) const
{
    if (t < t_.front() || t > t_.back()) {
        throw OptimizerError("time outside the grid");
    }
    const auto it = std::lower_bound(t_.begin() + 1, t_.end(), t);
    return static_cast<Index>(it - t_.begin());
}

void ProblemData::validate() const
{
    if (!f || !y_d || !g_D || !g_N || !r_N || !q_d || !q_a || !q_b || !y0 || !a0) {
        throw OptimizerError("problem data has an unset field");
    }
    if (!(alpha > 0.0)) {
        throw OptimizerError("regularization alpha must be positive");
    }
}

DiscreteProblem::DiscreteProblem(MeshPtr mesh, TimeGrid grid, ProblemData data, double sigma0)
    : mesh_(std::move(mesh)),
      grid_(std::move(grid)),
      data_((data.validate(), std::move(data))),
      sipg_{sigma0, project_data(data_.a0, mesh_)},
      ops_(assemble_operators(*mesh_, sipg_)),
      initial_state_(project_data(data_.y0, mesh_)),
      terminal_adjoint_(DGFunction::zero(mesh_)),
      solver_(ops_.M, ops_.A)
{
    const Mesh& m = *mesh_;
    control_slot_.assign(static_cast<std::size_t>(m.num_edges()), -1);
    for (std::size_t j = 0; j < m.control_edges().size(); ++j) {
        control_slot_[m.control_edges()[j]] = static_cast<Index>(j);
    }
    instants_.reserve(static_cast<std::size_t>(grid_.steps() + 1));
    for (Index i = 0; i <= grid_.steps(); ++i) {
        const double t = grid_.t(i);
        auto at = [t](const SpaceTimeField& g) { return [&g, t](const Point& x) { return g(x, t); }; };
        InstantData d;
        d.t = t;
        d.f = project_data(at(data_.f), mesh_);
        d.y_d = project_data(at(data_.y_d), mesh_);
        d.g_D = project_trace(at(data_.g_D), mesh_, m.dirichlet_edges());
        d.g_N = project_trace(at(data_.g_N), mesh_, m.neumann_edges());
        d.r_N = project_trace(at(data_.r_N), mesh_, m.neumann_edges());
        d.q_d = project_trace(at(data_.q_d), mesh_, m.control_edges());
        d.q_a = project_trace(at(data_.q_a), mesh_, m.control_edges());
        d.q_b = project_trace(at(data_.q_b), mesh_, m.control_edges());
        for (Index n = 0; n < d.q_a.coeffs.size(); ++n) {
            if (d.q_a.coeffs[n] > d.q_b.coeffs[n]) {
                throw OptimizerError("control bounds cross: q_a > q_b at a control node");
            }
        }
        d.state_load = ops_.M * d.f.coeffs + ops_.D * d.g_D.coeffs + ops_.Nn * d.g_N.coeffs;
        d.adjoint_load = -(ops_.M * d.y_d.coeffs) + ops_.Nn * d.r_N.coeffs;
        instants_.push_back(std::move(d));
    }
}

void DiscreteProblem::set_initial_state(DGFunction y)
{
    if (y.mesh != mesh_) {
        throw OptimizerError("initial state lives on a different mesh");
    }
    initial_state_ = std::move(y);
}

void DiscreteProblem::set_terminal_adjoint(DGFunction z)
{
    if (z.mesh != mesh_) {
        throw OptimizerError("terminal adjoint lives on a different mesh");
    }
    terminal_adjoint_ = std::move(z);
}

ControlTrajectory DiscreteProblem::zero_controls() const
{
    return ControlTrajectory(static_cast<std::size_t>(grid_.steps() + 1),
                             TraceFunction::zero(mesh_, mesh_->control_edges()));
}

Trajectory DiscreteProblem::solve_state_forward(const ControlTrajectory& Q)
{
    const Index n = grid_.steps();
    if (static_cast<Index>(Q.size()) != n + 1) {
        throw OptimizerError("control trajectory does not match the time grid");
    }
    Trajectory Y;
    Y.reserve(static_cast<std::size_t>(n + 1));
    Y.push_back(initial_state_);
    for (Index i = 1; i <= n; ++i) {
        const double k = grid_.k(i);
        const Vector rhs = ops_.M * Y.back().coeffs + k * (instants_[i].state_load + ops_.B * Q[i].coeffs);
        Y.emplace_back(mesh_, solver_.solve(k, rhs));
    }
    return Y;
}

Trajectory DiscreteProblem::solve_adjoint_backward(const Trajectory& Y)
{
    const Index n = grid_.steps();
    if (static_cast<Index>(Y.size()) != n + 1) {
        throw OptimizerError("state trajectory does not match the time grid");
    }
    Trajectory Z(static_cast<std::size_t>(n + 1));
    Z[n] = terminal_adjoint_;
    for (Index i = n; i >= 1; --i) {
        const double k = grid_.k(i);
        const Vector rhs = ops_.M * Z[i].coeffs + k * (ops_.M * Y[i].coeffs + instants_[i].adjoint_load);
        Z[i - 1] = DGFunction(mesh_, solver_.solve(k, rhs));
    }
    return Z;
}

TraceFunction DiscreteProblem::control_trace(const DGFunction& f) const
{
    TraceFunction out = TraceFunction::zero(mesh_, mesh_->control_edges());
    for (Index j = 0; j < out.size(); ++j) {
        out.coeffs[2 * j] = f.trace(out.edges[j], 0, 0.0);
        out.coeffs[2 * j + 1] = f.trace(out.edges[j], 0, 1.0);
    }
    return out;
}

NodeUpdate pdas_node(double z_tilde, double q_d, double q_a, double q_b, double alpha, double gamma,
                     double q_prev, double mu_prev, double omega)
{
    NodeUpdate out;
    if (mu_prev + gamma * (q_prev - q_a) < 0.0) {
        out.set = NodeSet::Lower;
        out.q = q_a;
    } else if (mu_prev + gamma * (q_prev - q_b) > 0.0) {
        out.set = NodeSet::Upper;
        out.q = q_b;
    } else {
        const double unconstrained = q_d - z_tilde / alpha;
        out.q = omega == 1.0 ? unconstrained : (1.0 - omega) * q_prev + omega * unconstrained;
        // a relaxed inactive value may leave the box; keep the iterate feasible
        out.q = std::clamp(out.q, q_a, q_b);
        if (omega == 1.0 && out.q == unconstrained) {
            out.mu = 0.0;
            return out;
        }
    }
    out.mu = -alpha * (out.q - q_d) - z_tilde;
    return out;
}

ControlUpdate update_control_pdas(const DiscreteProblem& problem, const Trajectory& Z,
                                  const ControlTrajectory& Q_prev, const ControlTrajectory& Mu_prev,
                                  double omega)
{
    const Index n = problem.grid().steps();
    const double alpha = problem.data().alpha;
    const double gamma = problem.data().active_set_gamma();
    ControlUpdate out;
    out.Q = problem.zero_controls();
    out.Mu = problem.zero_controls();
    out.sets.assign(static_cast<std::size_t>(n + 1), {});
    for (Index i = 1; i <= n; ++i) {
        const TraceFunction zt = problem.control_trace(Z[i - 1]);
        const InstantData& d = problem.instant(i);
        auto& sets = out.sets[i];
        sets.resize(static_cast<std::size_t>(zt.coeffs.size()));
        for (Index node = 0; node < zt.coeffs.size(); ++node) {
            const NodeUpdate u = pdas_node(zt.coeffs[node], d.q_d.coeffs[node], d.q_a.coeffs[node],
                                           d.q_b.coeffs[node], alpha, gamma, Q_prev[i].coeffs[node],
                                           Mu_prev[i].coeffs[node], omega);
            out.Q[i].coeffs[node] = u.q;
            out.Mu[i].coeffs[node] = u.mu;
            sets[node] = u.set;
        }
    }
    return out;
}

ControlTrajectory implied_cocontrol(const DiscreteProblem& problem, const Trajectory& Z,
                                    const ControlTrajectory& Q)
{
    ControlTrajectory Mu = problem.zero_controls();
    const double alpha = problem.data().alpha;
    for (Index i = 1; i <= problem.grid().steps(); ++i) {
        const TraceFunction zt = problem.control_trace(Z[i - 1]);
        Mu[i].coeffs = -alpha * (Q[i].coeffs - problem.instant(i).q_d.coeffs) - zt.coeffs;
    }
    return Mu;
}

OCPSolution solve_ocp(DiscreteProblem& problem, const OptimizerConfig& config,
                      const std::optional<ControlTrajectory>& initial_control)
{
    if (config.max_outer < 1 || !(config.omega > 0.0 && config.omega <= 1.0)) {
        throw OptimizerError("invalid optimizer configuration");
    }
    OCPSolution sol;
    sol.mesh = problem.mesh();
    sol.grid = problem.grid();
    sol.Q = initial_control ? *initial_control : problem.zero_controls();
    sol.sets.assign(static_cast<std::size_t>(problem.grid().steps() + 1), {});
    double omega = config.omega;
    std::set<std::vector<std::vector<NodeSet>>> seen;
    int churn = 0;

    for (int sweep = 1; sweep <= config.max_outer; ++sweep) {
        sol.Y = problem.solve_state_forward(sol.Q);
        sol.Z = problem.solve_adjoint_backward(sol.Y);
        const ControlTrajectory mu_prev = implied_cocontrol(problem, sol.Z, sol.Q);
        ControlUpdate upd = update_control_pdas(problem, sol.Z, sol.Q, mu_prev, omega);

        double change = 0.0;
        for (std::size_t i = 1; i < upd.Q.size(); ++i) {
            if (upd.Q[i].coeffs.size() > 0) {
                change = std::max(change, (upd.Q[i].coeffs - sol.Q[i].coeffs).cwiseAbs().maxCoeff());
            }
        }
        const bool sets_unchanged = sweep > 1 && upd.sets == sol.sets;
        churn = 0;
        for (std::size_t i = 1; i < upd.sets.size(); ++i) {
            for (std::size_t n = 0; n < upd.sets[i].size(); ++n) {
                churn += (sol.sets[i].size() == upd.sets[i].size() && sol.sets[i][n] != upd.sets[i][n]) ? 1 : 0;
            }
        }
        if (!sets_unchanged && !seen.insert(upd.sets).second && omega > config.omega_fallback) {
            omega = config.omega_fallback;  // an earlier active set came back: cycling
        }
        sol.Q = std::move(upd.Q);
        sol.Mu = std::move(upd.Mu);
        sol.sets = std::move(upd.sets);
        sol.sweeps = sweep;
        sol.last_change = change;
        if (change <= config.tol && (sets_unchanged || sweep == 1)) {
            sol.Y = problem.solve_state_forward(sol.Q);
            sol.Z = problem.solve_adjoint_backward(sol.Y);
            return sol;
        }
    }
    std::ostringstream msg;
    msg << "control iteration did not converge in " << config.max_outer << " sweeps; last change "
        << sol.last_change << ", active-set churn " << churn;
    throw OuterNoConvergence(msg.str());
}

double complementarity_residual(const OCPSolution& solution, const DiscreteProblem& problem)
{
    const double gamma = problem.data().active_set_gamma();
    double worst = 0.0;
    for (Index i = 1; i <= solution.grid.steps(); ++i) {
        const InstantData& d = problem.instant(i);
        for (Index n = 0; n < solution.Q[i].coeffs.size(); ++n) {
            const double q = solution.Q[i].coeffs[n];
            const double mu = solution.Mu[i].coeffs[n];
            const double r = mu - std::max(0.0, mu + gamma * (q - d.q_b.coeffs[n])) +
                             std::min(0.0, mu + gamma * (q - d.q_a.coeffs[n]));
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

TimeInterpolants::TimeInterpolants(const OCPSolution& solution) : s_(solution) {}

Index TimeInterpolants::step(double t) const
{
    return s_.grid.step_containing(t);
}

DGFunction TimeInterpolants::Y(double t) const
{
    const Index i = step(t);
    const double tau = (t - s_.grid.t(i - 1)) / s_.grid.k(i);
    return {s_.mesh, (1.0 - tau) * s_.Y[i - 1].coeffs + tau * s_.Y[i].coeffs};
}

DGFunction TimeInterpolants::Z(double t) const
{
    const Index i = step(t);
    const double tau = (t - s_.grid.t(i - 1)) / s_.grid.k(i);
    return {s_.mesh, (1.0 - tau) * s_.Z[i - 1].coeffs + tau * s_.Z[i].coeffs};
}

const DGFunction& TimeInterpolants::Y_hat(double t) const
{
    return s_.Y[step(t)];
}

const DGFunction& TimeInterpolants::Z_tilde(double t) const
{
    return s_.Z[step(t) - 1];
}

const TraceFunction& TimeInterpolants::Q_hat(double t) const
{
    return s_.Q[step(t)];
}

}  // namespace dgocp
