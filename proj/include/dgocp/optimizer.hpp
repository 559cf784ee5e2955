#ifndef DGOCP_OPTIMIZER_HPP
#define DGOCP_OPTIMIZER_HPP

#include "dgocp/assembly.hpp"
#include "dgocp/linsolve.hpp"

#include <cstdint>
#include <optional>

namespace dgocp {

class OptimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OuterNoConvergence : public OptimizerError {
public:
    using OptimizerError::OptimizerError;
};

/// Instants t_0 = 0 < ... < t_N = T. Steps are 1-based: k(i) = t_i - t_{i-1}.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> t);
    static TimeGrid uniform(double final_time, Index steps);

    [[nodiscard]] Index steps() const { return static_cast<Index>(t_.size()) - 1; }
    [[nodiscard]] double t(Index i) const { return t_[i]; }
    [[nodiscard]] double k(Index i) const { return t_[i] - t_[i - 1]; }
    [[nodiscard]] double start() const { return t_.front(); }
    [[nodiscard]] double final_time() const { return t_.back(); }
    [[nodiscard]] const std::vector<double>& instants() const { return t_; }
    /// Step i with t in (t_{i-1}, t_i]; t = t_0 maps to step 1.
    [[nodiscard]] Index step_containing(double t) const;

private:
    std::vector<double> t_;
};

/// Continuous problem data. Boundary fields are only sampled on their own boundary parts.
struct ProblemData {
    SpaceTimeField f, y_d;
    SpaceTimeField g_D, g_N, r_N;
    SpaceTimeField q_d, q_a, q_b;
    ScalarField y0;
    ScalarField a0;
    double alpha = 1.0;
    double gamma = 0.0;  // active-set parameter; <= 0 means gamma = alpha

    [[nodiscard]] double active_set_gamma() const { return gamma > 0.0 ? gamma : alpha; }
    void validate() const;
};

/// Discrete data at one time instant.
struct InstantData {
    double t = 0.0;
    DGFunction f, y_d;
    TraceFunction g_D, g_N, r_N;   // Dirichlet / Neumann edge lists
    TraceFunction q_d, q_a, q_b;   // control edge list
    Vector state_load;             // M f + D g_D + N g_N
    Vector adjoint_load;           // -M y_d + N r_N
};

using Trajectory = std::vector<DGFunction>;
using ControlTrajectory = std::vector<TraceFunction>;

enum class NodeSet : std::int8_t { Lower = -1, Inactive = 0, Upper = 1 };

struct OCPSolution {
    MeshPtr mesh;
    TimeGrid grid;
    Trajectory Y;              // levels 0..N
    Trajectory Z;              // levels 0..N
    ControlTrajectory Q;       // steps 1..N, Q[0] unused (zero)
    ControlTrajectory Mu;      // steps 1..N, Mu[0] unused (zero)
    std::vector<std::vector<NodeSet>> sets;  // steps 1..N
    int sweeps = 0;
    double last_change = 0.0;
};

struct OptimizerConfig {
    double tol = 1e-10;
    int max_outer = 50;
    double omega = 1.0;          // control relaxation
    double omega_fallback = 0.5;  // used once active-set cycling is detected
};

/// Mesh, grid and discretized data of one space-time optimal control problem.
class DiscreteProblem {
public:
    DiscreteProblem(MeshPtr mesh, TimeGrid grid, ProblemData data, double sigma0);

    [[nodiscard]] const MeshPtr& mesh() const { return mesh_; }
    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] const ProblemData& data() const { return data_; }
    [[nodiscard]] const SpaceOperators& ops() const { return ops_; }
    [[nodiscard]] const SipgConfig& sipg() const { return sipg_; }
    [[nodiscard]] double sigma0() const { return sipg_.sigma0; }
    [[nodiscard]] const DGFunction& a0() const { return sipg_.a0; }
    [[nodiscard]] const InstantData& instant(Index i) const { return instants_[i]; }
    [[nodiscard]] Index num_controls() const { return 2 * static_cast<Index>(mesh_->control_edges().size()); }
    /// Position of edge e in the control edge list, or -1.
    [[nodiscard]] Index control_slot(Index e) const { return control_slot_[e]; }

    [[nodiscard]] const DGFunction& initial_state() const { return initial_state_; }
    [[nodiscard]] const DGFunction& terminal_adjoint() const { return terminal_adjoint_; }
    /// Override y^0 (default: projection of y0) or z^N (default: zero); used for step-local solves.
    void set_initial_state(DGFunction y);
    void set_terminal_adjoint(DGFunction z);

    [[nodiscard]] ControlTrajectory zero_controls() const;
    Trajectory solve_state_forward(const ControlTrajectory& Q);
    Trajectory solve_adjoint_backward(const Trajectory& Y);
    /// Nodal values of a DG field on the control edges, taken from the adjacent element.
    [[nodiscard]] TraceFunction control_trace(const DGFunction& f) const;

private:
    MeshPtr mesh_;
    TimeGrid grid_;
    ProblemData data_;
    SipgConfig sipg_;
    SpaceOperators ops_;
    std::vector<InstantData> instants_;
    std::vector<Index> control_slot_;
    DGFunction initial_state_;
    DGFunction terminal_adjoint_;
    StepSolver solver_;
};

/// One primal-dual active-set update at a single control node.
struct NodeUpdate {
    double q = 0.0;
    double mu = 0.0;
    NodeSet set = NodeSet::Inactive;
};

NodeUpdate pdas_node(double z_tilde, double q_d, double q_a, double q_b, double alpha, double gamma,
                     double q_prev, double mu_prev, double omega = 1.0);

struct ControlUpdate {
    ControlTrajectory Q, Mu;
    std::vector<std::vector<NodeSet>> sets;
};

/// Control update on every step from the adjoint trajectory (Z-tilde on step i is z^{i-1}).
ControlUpdate update_control_pdas(const DiscreteProblem& problem, const Trajectory& Z,
                                  const ControlTrajectory& Q_prev, const ControlTrajectory& Mu_prev,
                                  double omega = 1.0);

/// Co-control implied by the optimality condition: mu = -alpha (Q - q_d) - Z-tilde.
ControlTrajectory implied_cocontrol(const DiscreteProblem& problem, const Trajectory& Z,
                                    const ControlTrajectory& Q);

OCPSolution solve_ocp(DiscreteProblem& problem, const OptimizerConfig& config = {},
                      const std::optional<ControlTrajectory>& initial_control = std::nullopt);

/// max |mu - max(0, mu + gamma (Q - q_b)) + min(0, mu + gamma (Q - q_a))| over steps and nodes.
double complementarity_residual(const OCPSolution& solution, const DiscreteProblem& problem);

/// Evaluators of the time reconstructions of a trajectory.
class TimeInterpolants {
public:
    TimeInterpolants(const OCPSolution& solution);

    /// Continuous piecewise linear state and adjoint.
    [[nodiscard]] DGFunction Y(double t) const;
    [[nodiscard]] DGFunction Z(double t) const;
    /// Right-endpoint state, left-endpoint adjoint and the step control.
    [[nodiscard]] const DGFunction& Y_hat(double t) const;
    [[nodiscard]] const DGFunction& Z_tilde(double t) const;
    [[nodiscard]] const TraceFunction& Q_hat(double t) const;

private:
    [[nodiscard]] Index step(double t) const;
    const OCPSolution& s_;
};

}  // namespace dgocp

#endif  // DGOCP_OPTIMIZER_HPP
