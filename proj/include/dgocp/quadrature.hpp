#ifndef DGOCP_QUADRATURE_HPP
#define DGOCP_QUADRATURE_HPP

#include <Eigen/Core>

#include <array>
#include <vector>

namespace dgocp {

/// Symmetric 6-point rule on triangles, exact to degree 4. Weights sum to one; scale by the area.
template <typename Scalar = double>
struct TriangleRule {
    static constexpr int size = 6;
    std::array<Eigen::Matrix<Scalar, 3, 1>, size> bary;
    std::array<Scalar, size> weight;

    TriangleRule()
    {
        const Scalar a1 = Scalar(0.44594849091596488632);
        const Scalar w1 = Scalar(0.22338158967801146570);
        const Scalar a2 = Scalar(0.09157621350977074346);
        const Scalar w2 = Scalar(0.10995174365532186764);
        const Scalar b1 = Scalar(1) - 2 * a1;
        const Scalar b2 = Scalar(1) - 2 * a2;
        bary[0] << b1, a1, a1;
        bary[1] << a1, b1, a1;
        bary[2] << a1, a1, b1;
        bary[3] << b2, a2, a2;
        bary[4] << a2, b2, a2;
        bary[5] << a2, a2, b2;
        for (int q = 0; q < 3; ++q) {
            weight[q] = w1;
            weight[q + 3] = w2;
        }
    }
};

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to one.
struct LineRule {
    std::vector<double> point;
    std::vector<double> weight;

    [[nodiscard]] int size() const { return static_cast<int>(point.size()); }
};

/// n in {1, 2, 3}. n points integrate degree 2n-1 exactly.
LineRule gauss_rule(int n);

inline const TriangleRule<double>& triangle_rule()
{
    static const TriangleRule<double> rule;
    return rule;
}

inline const LineRule& edge_rule()
{
    static const LineRule rule = gauss_rule(3);
    return rule;
}

}  // namespace dgocp

#endif  // DGOCP_QUADRATURE_HPP
