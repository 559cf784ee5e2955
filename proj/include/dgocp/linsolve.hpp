#ifndef DGOCP_LINSOLVE_HPP
#define DGOCP_LINSOLVE_HPP

#include "dgocp/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <memory>

namespace dgocp {

enum class Preconditioner { None, Jacobi, BlockJacobi3x3 };

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iters = 20000;
    Preconditioner preconditioner = Preconditioner::BlockJacobi3x3;
};

class MaxItersExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteEntry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveResult {
    Vector x;
    int iterations = 0;
    double residual = 0.0;  // ||A x - b|| / ||b||
};

/// Preconditioned conjugate gradients for a symmetric positive definite A.
SolveResult solve_spd(const SparseMatrix& A, const Vector& rhs, const SolverConfig& config = {});

/// Solves (M + k A) x = b for the handful of step sizes a time grid uses,
/// keeping one sparse LDL^T factorization per distinct k.
class StepSolver {
public:
    StepSolver(SparseMatrix M, SparseMatrix A, std::size_t max_cached = 8);

    Vector solve(double k, const Vector& rhs);
    [[nodiscard]] SparseMatrix system(double k) const;

private:
    using ColMatrix = Eigen::SparseMatrix<double>;
    using Factor = Eigen::SimplicialLDLT<ColMatrix>;

    SparseMatrix M_;
    SparseMatrix A_;
    std::size_t max_cached_;
    std::map<double, std::unique_ptr<Factor>> cache_;
};

}  // namespace dgocp

#endif  // DGOCP_LINSOLVE_HPP
