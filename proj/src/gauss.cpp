#include "ladderlab/gauss.hpp"

#include <Eigen/Dense>

namespace ladderlab {

namespace {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials:
// off-diagonals sqrt(k), so eigenvalues are the N(0,1) quadrature nodes and
// weights are the squared first eigenvector components.
GaussHermite build(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermite out;
    out.x.resize(n);
    out.w.resize(n);
    for (int i = 0; i < n; ++i) {
        out.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        out.w[i] = v0 * v0;
    }
    double sw = 0.0;
    for (double wi : out.w) sw += wi;
    for (double& wi : out.w) wi /= sw;
    return out;
}

}  // namespace

const GaussHermite& gh15() {
    static const GaussHermite gh = build(15);
    return gh;
}

}  // namespace ladderlab
