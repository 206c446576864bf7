#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hoistream/errors.hpp"

// Minimal reverse-mode differentiation engine. Values are dense 2-D
// matrices; ops record their parents on an implicit tape and backward()
// walks the tape in reverse creation order. Gradients live in a GradStore
// per backward call, so shared parameter leaves can be used from several
// graphs (and threads) at once.
namespace hoistream::ad {

using Mat = Eigen::MatrixXd;

struct Node;
struct GradStore;

struct Node {
    Mat val;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(const Node& self, const Mat& g, GradStore& gs)> backprop;
    bool requires_grad = false;
    long id = 0;
};

using NodePtr = std::shared_ptr<Node>;

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(NodePtr n) : node(std::move(n)) {}

    bool defined() const { return node != nullptr; }
    const Mat& val() const { return node->val; }
    Mat& mutable_val() { return node->val; }
    int rows() const { return static_cast<int>(node->val.rows()); }
    int cols() const { return static_cast<int>(node->val.cols()); }

    NodePtr node;
};

struct GradStore {
    std::unordered_map<const Node*, Mat> grads;

    // zero-initialized accumulator for a node
    Mat& accum(const Node* n);
    void add(const NodePtr& n, const Mat& g);
    const Mat* find(const Tensor& t) const;
    Mat get(const Tensor& t) const;  // zeros if absent
};

// While a guard is alive, new ops do not record the tape (inference mode).
struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    bool prev;
};

bool grad_enabled();

Tensor constant(Mat v);
Tensor param(Mat v);  // leaf with requires_grad

// Backpropagate from a 1x1 root.
GradStore backward(const Tensor& root);

// ---- primitives ----
// Broadcasting: b may be the same shape as a, a 1x1 scalar, a 1xC row, or
// an Rx1 column; gradients reduce over the broadcast dimensions.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double c);
Tensor add_const(const Tensor& a, double c);

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);

Tensor layer_norm(const Tensor& a, double eps = 1e-6);  // per row
Tensor softmax(const Tensor& a);                        // per row
Tensor gelu(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor abs(const Tensor& a);
// max(a, c) elementwise; zero gradient where the clamp is active
Tensor clamp_min(const Tensor& a, double c);

Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, int r0, int n);
Tensor slice_cols(const Tensor& a, int c0, int n);

Tensor sum(const Tensor& a);        // 1x1
Tensor mean(const Tensor& a);       // 1x1
Tensor sum_cols(const Tensor& a);   // Rx1, reduce over columns
Tensor min_reduce(const Tensor& a); // Rx1, per-row min (argmin subgradient)

Tensor gather_rows(const Tensor& table, std::vector<int> idx);

// L2 norm of each consecutive `group` columns -> R x (C/group).
Tensor group_norms(const Tensor& a, int group);

// ---- row-wise 3-D kinematics ----
// Rotations are stored one per row, column-major: [c0 c1 c2] as 9 reals.
Tensor cross_rows(const Tensor& a, const Tensor& b);        // Rx3, Rx3 -> Rx3
Tensor rotmul_rows(const Tensor& a, const Tensor& b);       // Rx9, Rx9 -> Rx9
Tensor rotapply_rows(const Tensor& r, const Tensor& v);     // Rx9, Rx3 -> Rx3
// Gram-Schmidt per row: Rx6 -> Rx9 rotation (clamped norms, never throws).
Tensor rows_gram_schmidt(const Tensor& sixd);
// Pose a constant point set by per-row rigid transforms: -> R x 3V,
// vertex k occupying columns [3k, 3k+3).
Tensor pose_points_rows(const Tensor& rot, const Tensor& trans, const Eigen::MatrixXd& points);
// Per-row min distance from a point (Rx3) to a posed set (Rx3V).
Tensor point_min_dist_rows(const Tensor& p, const Tensor& sets);

}  // namespace hoistream::ad
