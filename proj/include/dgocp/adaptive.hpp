#ifndef DGOCP_ADAPTIVE_HPP
#define DGOCP_ADAPTIVE_HPP

#include "dgocp/estimators.hpp"

#include <memory>
#include <string>

namespace dgocp {

class AdaptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AdaptConfig {
    double theta = 0.4;
    double eps_space = 1e-3;
    double eps_time = 1e-3;
    double delta1 = 0.5;   // time-step shrink factor
    double delta2 = 1.5;   // time-step growth factor
    double Lambda1 = 1.0;  // shrink while Xi >= Lambda1 eps_time / T
    double Lambda2 = 0.5;  // grow when Xi <= Lambda2 eps_time / T
    double k_min_fraction = 1e-6;  // k_min = fraction * T
    int max_outer_iters = 4;
    int max_space_iters_per_step = 10;
    double sigma0 = 10.0;
    OptimizerConfig optimizer;
    EstimatorConfig estimator;

    void validate() const;
};

/// Smallest prefix of the entities sorted by decreasing indicator (ties by id) whose sum
/// reaches theta times the total. Returns the ids in that order.
std::vector<Index> dorfler_mark(const Vector& indicators_sq, double theta);

enum class StepAction { Keep, Shrink, Grow };

const char* to_string(StepAction a);

struct TimeStepDecision {
    double k_accepted = 0.0;  // step actually taken
    double k_next = 0.0;      // proposal for the following step
    StepAction action = StepAction::Keep;
    int evaluations = 0;
};

/// Shrink by delta1 while xi(k) >= Lambda1 eps_time / T, then propose delta2 k when
/// xi(k) <= Lambda2 eps_time / T. The step never runs past T; a remainder shorter than half
/// a step is absorbed into the current one.
TimeStepDecision adapt_time_step(const std::function<double(double)>& xi_of_k, const AdaptConfig& config,
                                 double k_current, double t_prev, double final_time);

struct StepRecord {
    double t0 = 0.0, t1 = 0.0;
    StepAction action = StepAction::Keep;
    double upsilon = 0.0;  // local residual estimator
    double xi = 0.0;       // local temporal estimator
    int space_passes = 0;
    Index elements = 0;    // elements of the final local mesh
    std::vector<Index> ndof_per_pass;
    std::vector<Point> marked_centroids;  // elements marked in the last spatial pass
};

struct AdaptIteration {
    int iter = 0;
    std::shared_ptr<DiscreteProblem> problem;
    OCPSolution solution;
    EstimatorReport report;
    std::vector<StepRecord> march;  // time march that produced the next mesh and grid

    [[nodiscard]] Index ndof() const { return 3 * solution.mesh->num_elements(); }
};

enum class AdaptStatus { Converged, OuterCapReached };

struct AdaptHistory {
    std::vector<AdaptIteration> iterations;
    AdaptStatus status = AdaptStatus::OuterCapReached;
    std::string message;
};

using IterationCallback = std::function<void(const AdaptIteration&)>;

/// Space-time adaptive loop. Each outer iteration solves the optimality system on a shared mesh,
/// then marches in time with step-local refinement and step-size control; the next shared mesh is
/// the overlay of all step-local meshes.
AdaptHistory run_adaptive(const ProblemData& data, const MeshPtr& initial_mesh, const TimeGrid& initial_grid,
                          const AdaptConfig& config, const IterationCallback& on_iteration = {});

}  // namespace dgocp

#endif  // DGOCP_ADAPTIVE_HPP
