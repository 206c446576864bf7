#include "hoistream/descriptor.hpp"

#include <algorithm>
#include <cmath>

namespace hoistream {

Eigen::VectorXd ObjectDescriptor::flat() const {
    Eigen::VectorXd out(one_hot.size() + geom.size());
    out << one_hot, geom;
    return out;
}

ObjectDescriptor object_descriptor(const ObjectTemplate& tpl) {
    ObjectDescriptor d;
    d.one_hot = Eigen::VectorXd::Zero(tpl.class_count);
    d.one_hot[tpl.class_id] = 1.0;
    d.geom = Eigen::VectorXd::Zero(kObjectGeomDim);

    const int V = static_cast<int>(tpl.vertices.size());
    Eigen::MatrixXd pts(V, 3);
    for (int i = 0; i < V; ++i) pts.row(i) = tpl.vertices[i].transpose();

    // second moments about the centroid (vertices are already centered)
    const Eigen::Matrix3d cov = pts.transpose() * pts / double(V);
    int k = 0;
    d.geom[k++] = cov(0, 0);
    d.geom[k++] = cov(1, 1);
    d.geom[k++] = cov(2, 2);
    d.geom[k++] = cov(0, 1);
    d.geom[k++] = cov(0, 2);
    d.geom[k++] = cov(1, 2);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    for (int i = 2; i >= 0; --i) d.geom[k++] = eig.eigenvalues()[i];  // descending

    const Eigen::Vector3d lo = pts.colwise().minCoeff();
    const Eigen::Vector3d hi = pts.colwise().maxCoeff();
    for (int i = 0; i < 3; ++i) d.geom[k++] = hi[i] - lo[i];

    // radial histogram over [0, r_max], normalized by vertex count
    const int bins = kObjectGeomDim - k;
    const double r_max = std::max(pts.rowwise().norm().maxCoeff(), 1e-9);
    for (int i = 0; i < V; ++i) {
        const int b = std::min(bins - 1, static_cast<int>(pts.row(i).norm() / r_max * bins));
        d.geom[k + b] += 1.0 / V;
    }
    return d;
}

}  // namespace hoistream
