#include "dgocp/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dgocp {

void AdaptConfig::validate() const
{
    if (!(theta > 0.0 && theta < 1.0)) {
        throw AdaptError("theta must lie in (0, 1)");
    }
    if (!(eps_space > 0.0) || !(eps_time > 0.0)) {
        throw AdaptError("tolerances must be positive");
    }
    if (!(delta1 > 0.0 && delta1 < 1.0) || !(delta2 > 1.0)) {
        throw AdaptError("need 0 < delta1 < 1 < delta2");
    }
    if (!(Lambda1 > 0.0) || !(Lambda2 > 0.0 && Lambda2 < Lambda1)) {
        throw AdaptError("need Lambda1 > 0 and 0 < Lambda2 < Lambda1");
    }
    if (max_outer_iters < 1 || max_space_iters_per_step < 0 || !(k_min_fraction > 0.0)) {
        throw AdaptError("invalid iteration caps");
    }
}

const char* to_string(StepAction a)
{
    switch (a) {
    case StepAction::Keep:
        return "keep";
    case StepAction::Shrink:
        return "shrink";
    case StepAction::Grow:
        return "grow";
    }
    return "?";
}

std::vector<Index> dorfler_mark(const Vector& indicators_sq, double theta)
{
    if (indicators_sq.size() == 0) {
        throw AdaptError("cannot mark from an empty indicator list");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw AdaptError("theta must lie in (0, 1)");
    }
    std::vector<Index> order(static_cast<std::size_t>(indicators_sq.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return indicators_sq[a] > indicators_sq[b]; });
    const double target = theta * indicators_sq.sum();
    std::vector<Index> marked;
    double sum = 0.0;
    for (Index id : order) {
        if (sum >= target) {
            break;
        }
        marked.push_back(id);
        sum += indicators_sq[id];
    }
    return marked;
}

TimeStepDecision adapt_time_step(const std::function<double(double)>& xi_of_k, const AdaptConfig& config,
                                 double k_current, double t_prev, double final_time)
{
    if (!(k_current > 0.0)) {
        throw AdaptError("time step must be positive");
    }
    const double k_min = config.k_min_fraction * final_time;
    const double shrink_at = config.Lambda1 * config.eps_time / final_time;
    const double grow_at = config.Lambda2 * config.eps_time / final_time;
    TimeStepDecision d;
    double k = std::min(k_current, final_time - t_prev);
    if (final_time - (t_prev + k) < 0.5 * k) {
        k = final_time - t_prev;  // absorb a short remainder instead of leaving a sliver step
    }
    double xi = xi_of_k(k);
    d.evaluations = 1;
    while (xi >= shrink_at) {
        k *= config.delta1;
        if (k < k_min) {
            std::ostringstream msg;
            msg << "time step fell below k_min = " << k_min << " at t = " << t_prev
                << "; temporal tolerance unreachable";
            throw AdaptError(msg.str());
        }
        d.action = StepAction::Shrink;
        xi = xi_of_k(k);
        ++d.evaluations;
    }
    d.k_accepted = k;
    d.k_next = k;
    if (xi <= grow_at) {
        d.k_next = config.delta2 * k;
        if (d.action == StepAction::Keep) {
            d.action = StepAction::Grow;
        }
    }
    return d;
}

namespace {

/// Solution of the optimality system restricted to one time step on a refinement of the shared mesh.
struct LocalStep {
    std::unique_ptr<DiscreteProblem> problem;
    OCPSolution solution;
    StepEstimate estimate;

    [[nodiscard]] double upsilon() const { return estimate.upsilon(); }
    [[nodiscard]] double xi() const { return std::sqrt(estimate.xi_sq()); }
};

class StepSolverContext {
public:
    StepSolverContext(const ProblemData& data, const OCPSolution& global, const AdaptConfig& config)
        : data_(data), interp_(global), config_(config)
    {
    }

    LocalStep solve(const MeshPtr& mesh, double t0, double t1) const
    {
        LocalStep s;
        s.problem = std::make_unique<DiscreteProblem>(mesh, TimeGrid({t0, t1}), data_, config_.sigma0);
        if (t0 > 0.0) {
            s.problem->set_initial_state(transfer(interp_.Y(t0), mesh));
        }
        s.problem->set_terminal_adjoint(transfer(interp_.Z(t1), mesh));
        s.solution = solve_ocp(*s.problem, config_.optimizer);
        StepFields in;
        in.problem = s.problem.get();
        in.step = 1;
        in.y_prev = &s.solution.Y[0];
        in.y_cur = &s.solution.Y[1];
        in.z_prev = &s.solution.Z[0];
        in.z_cur = &s.solution.Z[1];
        in.q = &s.solution.Q[1];
        s.estimate = estimate_step(in, config_.estimator);
        return s;
    }

private:
    const ProblemData& data_;
    TimeInterpolants interp_;
    const AdaptConfig& config_;
};

}  // namespace

AdaptHistory run_adaptive(const ProblemData& data, const MeshPtr& initial_mesh, const TimeGrid& initial_grid,
                          const AdaptConfig& config, const IterationCallback& on_iteration)
{
    config.validate();
    const double T = initial_grid.final_time();
    const double space_tol = config.eps_space / T;

    AdaptHistory history;
    MeshPtr mesh = initial_mesh;
    TimeGrid grid = initial_grid;

    for (int iter = 0; iter < config.max_outer_iters; ++iter) {
        AdaptIteration it;
        it.iter = iter;
        it.problem = std::make_shared<DiscreteProblem>(mesh, grid, data, config.sigma0);
        it.solution = solve_ocp(*it.problem, config.optimizer);
        it.report = estimate(it.solution, *it.problem, config.estimator);

        const StepSolverContext ctx(data, it.solution, config);
        std::vector<double> instants{grid.start()};
        std::vector<Point> new_vertices;
        bool changed = false;
        double t = grid.start();
        double k = grid.k(1);

        while (t < T) {
            StepRecord rec;
            rec.t0 = t;
            MeshPtr local_mesh = mesh;
            LocalStep step;
            auto evaluate = [&](double kk) {
                step = ctx.solve(local_mesh, t, t + kk);
                return step.xi();
            };
            TimeStepDecision dec = adapt_time_step(evaluate, config, k, t, T);  // Step-1 and Step-2
            bool shrunk = dec.action == StepAction::Shrink;

            rec.ndof_per_pass.push_back(3 * local_mesh->num_elements());
            while (step.upsilon() > space_tol && rec.space_passes < config.max_space_iters_per_step) {
                const std::vector<Index> marked_el = dorfler_mark(step.estimate.element_indicator(), config.theta);
                const std::vector<Index> marked_ed = dorfler_mark(step.estimate.edge_indicator(), config.theta);
                std::vector<char> flag(static_cast<std::size_t>(local_mesh->num_elements()), 0);
                for (Index K : marked_el) {
                    flag[K] = 1;
                }
                for (Index e : marked_ed) {
                    for (Index K : local_mesh->edge(e).elements) {
                        if (K >= 0) {
                            flag[K] = 1;
                        }
                    }
                }
                std::vector<Index> marks;
                std::vector<Point> centroids;
                for (Index K = 0; K < local_mesh->num_elements(); ++K) {
                    if (flag[K]) {
                        marks.push_back(K);
                        centroids.push_back(local_mesh->centroid(K));
                    }
                }
                if (marks.empty()) {
                    break;
                }
                rec.marked_centroids = std::move(centroids);
                local_mesh = refine(local_mesh, marks);
                ++rec.space_passes;
                dec = adapt_time_step(evaluate, config, dec.k_accepted, t, T);  // nested temporal check
                shrunk = shrunk || dec.action == StepAction::Shrink;
                rec.ndof_per_pass.push_back(3 * local_mesh->num_elements());
            }
            k = dec.k_accepted;
            rec.action = shrunk ? StepAction::Shrink : dec.action;

            rec.t1 = t + k;
            rec.upsilon = step.upsilon();
            rec.xi = step.xi();
            rec.elements = local_mesh->num_elements();
            changed = changed || rec.space_passes > 0 || rec.action == StepAction::Shrink;
            if (local_mesh != mesh) {
                for (const Vertex& v : local_mesh->vertices()) {
                    new_vertices.push_back(v.x);
                }
            }
            t = rec.t1;
            k = dec.k_next;  // Step-4
            instants.push_back(t);
            it.march.push_back(std::move(rec));
        }
        instants.back() = T;

        history.iterations.push_back(std::move(it));
        if (on_iteration) {
            on_iteration(history.iterations.back());
        }
        if (!changed) {
            history.status = AdaptStatus::Converged;
            std::ostringstream msg;
            msg << "tolerances met on every step after " << iter + 1 << " iteration(s)";
            history.message = msg.str();
            return history;
        }
        mesh = overlay(mesh, new_vertices);
        grid = TimeGrid(std::move(instants));
    }
    history.status = AdaptStatus::OuterCapReached;
    std::ostringstream msg;
    msg << "outer iteration cap " << config.max_outer_iters << " reached; last Upsilon "
        << history.iterations.back().report.upsilon << " vs eps_space " << config.eps_space << ", Xi "
        << history.iterations.back().report.xi << " vs eps_time " << config.eps_time;
    history.message = msg.str();
    return history;
}

}  // namespace dgocp
