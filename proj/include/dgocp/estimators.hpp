#ifndef DGOCP_ESTIMATORS_HPP
#define DGOCP_ESTIMATORS_HPP

#include "dgocp/optimizer.hpp"

namespace dgocp {

struct EstimatorConfig {
    double chi_exponent = 2.0;  // h^mu in the smoothed characteristic function of the inactive set
};

/// Squared estimator contributions of one time step. Element vectors are indexed by element id,
/// edge vectors by edge id (zero on edges of the wrong kind).
struct StepEstimate {
    double t0 = 0.0, t1 = 0.0;

    Vector eta_y_K, eta_z_K;
    Vector eta_y_E0, eta_z_E0, eta_y_E0_tilde, eta_z_E0_tilde;
    Vector eta_y_gD, eta_y_ED, eta_z_ED;
    Vector eta_y_EN, eta_z_EN, eta_q_EN, eta_q_bar;
    Vector theta_y_K, theta_z_K, theta_y_EN, theta_z_EN, theta_y_ED, theta_q_EN;
    double theta_yT = 0.0, theta_zT = 0.0;

    [[nodiscard]] double eta_y_sq() const;
    [[nodiscard]] double eta_z_sq() const;
    [[nodiscard]] double eta_q_sq() const { return eta_q_EN.sum(); }
    [[nodiscard]] double theta_y_sq() const;
    [[nodiscard]] double theta_z_sq() const;
    [[nodiscard]] double theta_q_sq() const { return theta_q_EN.sum(); }
    [[nodiscard]] double xi_sq() const { return theta_yT + theta_zT; }
    /// Local Upsilon of this step (square root of the residual parts).
    [[nodiscard]] double upsilon() const;

    /// Marking indicators: eta_y_K + eta_z_K per element, all edge residuals per edge.
    [[nodiscard]] Vector element_indicator() const;
    [[nodiscard]] Vector edge_indicator() const;
};

struct EstimatorReport {
    std::vector<StepEstimate> steps;  // steps[i - 1] belongs to step i
    Vector eta_y0_K;                  // squared, per element

    double eta_y = 0.0, eta_z = 0.0, eta_q = 0.0, upsilon = 0.0;
    double theta_y = 0.0, theta_z = 0.0, theta_q = 0.0, theta = 0.0;
    double theta_yT = 0.0, theta_zT = 0.0, xi = 0.0;
    double eta_q_bar = 0.0;
};

/// Inputs of one step: fields on a single mesh.
struct StepFields {
    const DiscreteProblem* problem = nullptr;
    Index step = 1;
    const DGFunction* y_prev = nullptr;  // y^{i-1}
    const DGFunction* y_cur = nullptr;   // y^i
    const DGFunction* z_prev = nullptr;  // z^{i-1}
    const DGFunction* z_cur = nullptr;   // z^i
    const TraceFunction* q = nullptr;    // control of step i
};

StepEstimate estimate_step(const StepFields& in, const EstimatorConfig& config = {});

/// Squared initial-data errors ||y0 - y0_h||^2 per element.
Vector initial_data_estimator(const ScalarField& y0, const DGFunction& y0_h);

/// Every component for a full solution, aggregated.
EstimatorReport estimate(const OCPSolution& solution, const DiscreteProblem& problem,
                         const EstimatorConfig& config = {});

/// Fills the global fields of the report from its steps and initial part.
void aggregate(EstimatorReport& report);

/// chi = p / (h^mu + p) with p = (Q - q_a)(q_b - Q).
double smoothed_inactive_indicator(double q, double q_a, double q_b, double h, double mu);

double effectivity_index(double estimated, double true_error);

}  // namespace dgocp

#endif  // DGOCP_ESTIMATORS_HPP
