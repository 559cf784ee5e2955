#ifndef DGOCP_BENCHMARKS_HPP
#define DGOCP_BENCHMARKS_HPP

#include "dgocp/estimators.hpp"

#include <string>

namespace dgocp {

/// Smooth exact field with its spatial gradient.
struct ExactField {
    SpaceTimeField value;
    std::function<Point(const Point&, double)> gradient;
};

struct BenchmarkSpec {
    std::string name;
    std::array<double, 2> x_range{0.0, 1.0};
    std::array<double, 2> y_range{0.0, 1.0};
    BoundarySpec boundary;
    double final_time = 1.0;
    double sigma0 = 10.0;
    double q_a = 0.0, q_b = 0.0;
    ProblemData data;

    ExactField y, z;
    SpaceTimeField q, mu;
    /// Time derivatives of the exact state and adjoint, for data checks.
    SpaceTimeField y_t, z_t;
};

enum class ControlDataVariant {
    /// Desired control chosen so the printed control and co-control satisfy the optimality condition.
    Consistent,
    /// Desired control zero; the printed control and co-control are then not optimal.
    AsPrinted,
};

struct Example1Options {
    double alpha = 1.0;
    double q_a = -5.0;
    double q_b = 5.0;
    double sigma0 = 100.0;
    ControlDataVariant variant = ControlDataVariant::Consistent;
};

struct Example2Options {
    double alpha = 1.0;
    double q_a = -0.25;
    double q_b = 0.25;
    double sigma0 = 1000.0;
};

/// Square [0,3]^2, pure Neumann boundary, control on {0} x [1,2], exponential peak at the origin.
BenchmarkSpec make_example1(const Example1Options& options = {});
/// Square [-1,1]^2, Neumann on x2 = +-1, Dirichlet on x1 = +-1, Gaussian moving along the diagonal.
BenchmarkSpec make_example2(const Example2Options& options = {});

MeshPtr build_mesh(const BenchmarkSpec& spec, Index nx, Index ny);

inline double project_box(double v, double lo, double hi)
{
    return std::max(lo, std::min(hi, v));
}

struct TrueErrors {
    double y = 0.0;   // energy norm in L2 over time
    double z = 0.0;
    double q = 0.0;   // L2 over time and the control boundary
    double mu = 0.0;
    [[nodiscard]] double total() const { return y + z + q + mu; }
};

TrueErrors true_errors(const OCPSolution& solution, const DiscreteProblem& problem, const BenchmarkSpec& spec);

/// Energy-norm error of one DG field against an exact field at time t.
double energy_error_sq(const DGFunction& uh, const ExactField& u, double t, const DGFunction& a0, double sigma0);

}  // namespace dgocp

#endif  // DGOCP_BENCHMARKS_HPP
