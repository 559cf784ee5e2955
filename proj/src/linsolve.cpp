#include "dgocp/linsolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dgocp {

namespace {

void check_finite(const SparseMatrix& A, const Vector& b)
{
    for (Index i = 0; i < A.nonZeros(); ++i) {
        if (!std::isfinite(A.valuePtr()[i])) {
            throw NonFiniteEntry("matrix has a non-finite entry");
        }
    }
    if (!b.allFinite()) {
        throw NonFiniteEntry("right-hand side has a non-finite entry");
    }
}

/// Inverse diagonal blocks stored as one 3x3 matrix per block.
struct BlockPreconditioner {
    Preconditioner kind;
    std::vector<Eigen::Matrix3d> blocks;
    Vector inv_diag;

    BlockPreconditioner(const SparseMatrix& A, Preconditioner kind_) : kind(kind_)
    {
        const Index n = A.rows();
        if (kind == Preconditioner::Jacobi) {
            inv_diag = A.diagonal().cwiseInverse();
        } else if (kind == Preconditioner::BlockJacobi3x3) {
            // a trailing partial block is padded with the identity
            const Index count = (n + 2) / 3;
            blocks.resize(static_cast<std::size_t>(count));
            for (Index b = 0; b < count; ++b) {
                Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
                for (Index i = 3 * b; i < std::min(n, 3 * b + 3); ++i) {
                    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
                        if (it.col() / 3 == b) {
                            D(i - 3 * b, it.col() - 3 * b) = it.value();
                        }
                    }
                }
                blocks[b] = D.inverse();
            }
        }
    }

    [[nodiscard]] Vector apply(const Vector& r) const
    {
        switch (kind) {
        case Preconditioner::None:
            return r;
        case Preconditioner::Jacobi:
            return inv_diag.cwiseProduct(r);
        case Preconditioner::BlockJacobi3x3: {
            Vector z(r.size());
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                const auto i = static_cast<Index>(3 * b);
                const Index len = std::min<Index>(3, r.size() - i);
                z.segment(i, len) = blocks[b].topLeftCorner(len, len) * r.segment(i, len);
            }
            return z;
        }
        }
        return r;
    }
};

}  // namespace

SolveResult solve_spd(const SparseMatrix& A, const Vector& rhs, const SolverConfig& config)
{
    if (A.rows() != A.cols() || A.rows() != rhs.size()) {
        throw std::invalid_argument("solve_spd: dimension mismatch");
    }
    if (!(config.rel_tol > 0.0 && config.rel_tol < 1.0) || config.max_iters < 1) {
        throw std::invalid_argument("solve_spd: invalid solver configuration");
    }
    check_finite(A, rhs);

    SolveResult out;
    out.x = Vector::Zero(rhs.size());
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        return out;
    }
    const BlockPreconditioner P(A, config.preconditioner);
    Vector r = rhs;
    Vector z = P.apply(r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= config.max_iters; ++it) {
        const Vector Ap = A * p;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) {
            throw NonFiniteEntry("conjugate gradients lost positive definiteness");
        }
        const double step = rz / pAp;
        out.x += step * p;
        r -= step * Ap;
        out.iterations = it;
        out.residual = r.norm() / bnorm;
        if (out.residual <= config.rel_tol) {
            // confirm against the true residual to avoid drift in the recurrence
            out.residual = (rhs - A * out.x).norm() / bnorm;
            if (out.residual <= config.rel_tol) {
                return out;
            }
            r = rhs - A * out.x;
        }
        z = P.apply(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    std::ostringstream msg;
    msg << "conjugate gradients stopped after " << config.max_iters << " iterations at relative residual "
        << out.residual << "; check sigma0 and the mesh quality";
    throw MaxItersExceeded(msg.str());
}

StepSolver::StepSolver(SparseMatrix M, SparseMatrix A, std::size_t max_cached)
    : M_(std::move(M)), A_(std::move(A)), max_cached_(max_cached)
{
}

SparseMatrix StepSolver::system(double k) const
{
    SparseMatrix S = M_ + k * A_;
    return S;
}

Vector StepSolver::solve(double k, const Vector& rhs)
{
    if (!(k > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    auto it = cache_.find(k);
    if (it == cache_.end()) {
        if (cache_.size() >= max_cached_) {
            cache_.clear();
        }
        auto factor = std::make_unique<Factor>();
        const ColMatrix S = system(k);
        factor->compute(S);
        if (factor->info() != Eigen::Success) {
            throw NonFiniteEntry("time-step matrix is not positive definite");
        }
        it = cache_.emplace(k, std::move(factor)).first;
    }
    Vector x = it->second->solve(rhs);
    if (!x.allFinite()) {
        throw NonFiniteEntry("time-step solve produced non-finite values");
    }
    return x;
}

}  // namespace dgocp
