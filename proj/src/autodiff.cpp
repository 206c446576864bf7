#include "hoistream/autodiff.hpp"

#include <atomic>
#include <cmath>
#include <unordered_set>

namespace hoistream::ad {

namespace {

std::atomic<long> g_next_id{1};
thread_local bool g_grad_enabled = true;

NodePtr make_node(Mat val, std::vector<NodePtr> parents,
                  std::function<void(const Node&, const Mat&, GradStore&)> backprop) {
    auto n = std::make_shared<Node>();
    n->val = std::move(val);
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    bool rg = false;
    if (g_grad_enabled) {
        for (const auto& p : parents) rg = rg || p->requires_grad;
    }
    if (rg) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backprop = std::move(backprop);
    }
    return n;
}

enum class Bcast { same, scalar, row, col };

Bcast bcast_of(const Mat& a, const Mat& b, const char* op) {
    if (b.rows() == a.rows() && b.cols() == a.cols()) return Bcast::same;
    if (b.rows() == 1 && b.cols() == 1) return Bcast::scalar;
    if (b.rows() == 1 && b.cols() == a.cols()) return Bcast::row;
    if (b.cols() == 1 && b.rows() == a.rows()) return Bcast::col;
    throw ShapeMismatch(std::string(op) + ": shapes not broadcastable");
}

Mat reduce_like_b(const Mat& g, Bcast bc) {
    switch (bc) {
        case Bcast::same: return g;
        case Bcast::scalar: return Mat::Constant(1, 1, g.sum());
        case Bcast::row: return g.colwise().sum();
        case Bcast::col: return g.rowwise().sum();
    }
    return g;
}

Mat broadcast_b(const Mat& b, Bcast bc, Eigen::Index rows, Eigen::Index cols) {
    switch (bc) {
        case Bcast::same: return b;
        case Bcast::scalar: return Mat::Constant(rows, cols, b(0, 0));
        case Bcast::row: return b.replicate(rows, 1);
        case Bcast::col: return b.replicate(1, cols);
    }
    return b;
}

}  // namespace

Mat& GradStore::accum(const Node* n) {
    auto it = grads.find(n);
    if (it == grads.end()) {
        it = grads.emplace(n, Mat::Zero(n->val.rows(), n->val.cols())).first;
    }
    return it->second;
}

void GradStore::add(const NodePtr& n, const Mat& g) {
    if (!n->requires_grad) return;
    accum(n.get()) += g;
}

const Mat* GradStore::find(const Tensor& t) const {
    auto it = grads.find(t.node.get());
    return it == grads.end() ? nullptr : &it->second;
}

Mat GradStore::get(const Tensor& t) const {
    const Mat* g = find(t);
    return g ? *g : Mat::Zero(t.rows(), t.cols());
}

NoGradGuard::NoGradGuard() : prev(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev; }

bool grad_enabled() { return g_grad_enabled; }

Tensor constant(Mat v) {
    auto n = std::make_shared<Node>();
    n->val = std::move(v);
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return Tensor(n);
}

Tensor param(Mat v) {
    auto n = std::make_shared<Node>();
    n->val = std::move(v);
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    n->requires_grad = true;
    return Tensor(n);
}

GradStore backward(const Tensor& root) {
    if (root.rows() != 1 || root.cols() != 1) {
        throw ShapeMismatch("backward root must be a 1x1 scalar");
    }
    GradStore gs;
    if (!root.node->requires_grad) return gs;

    std::vector<const Node*> order;
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{root.node.get()};
    seen.insert(root.node.get());
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (const auto& p : n->parents) {
            if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
        }
    }
    std::sort(order.begin(), order.end(), [](const Node* a, const Node* b) { return a->id > b->id; });

    gs.grads[root.node.get()] = Mat::Ones(1, 1);
    for (const Node* n : order) {
        if (!n->backprop) continue;
        auto it = gs.grads.find(n);
        if (it == gs.grads.end()) continue;
        n->backprop(*n, it->second, gs);
    }
    return gs;
}

Tensor add(const Tensor& a, const Tensor& b) {
    const Bcast bc = bcast_of(a.val(), b.val(), "add");
    Mat out = a.val() + broadcast_b(b.val(), bc, a.rows(), a.cols());
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [bc](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g);
                                gs.add(self.parents[1], reduce_like_b(g, bc));
                            }));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    const Bcast bc = bcast_of(a.val(), b.val(), "sub");
    Mat out = a.val() - broadcast_b(b.val(), bc, a.rows(), a.cols());
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [bc](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g);
                                gs.add(self.parents[1], -reduce_like_b(g, bc));
                            }));
}

Tensor mul(const Tensor& a, const Tensor& b) {
    const Bcast bc = bcast_of(a.val(), b.val(), "mul");
    const Mat bb = broadcast_b(b.val(), bc, a.rows(), a.cols());
    Mat out = a.val().cwiseProduct(bb);
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [bc, bb](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g.cwiseProduct(bb));
                                gs.add(self.parents[1],
                                       reduce_like_b(g.cwiseProduct(self.parents[0]->val), bc));
                            }));
}

Tensor div(const Tensor& a, const Tensor& b) {
    const Bcast bc = bcast_of(a.val(), b.val(), "div");
    const Mat bb = broadcast_b(b.val(), bc, a.rows(), a.cols());
    Mat out = a.val().cwiseQuotient(bb);
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [bc, bb](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g.cwiseQuotient(bb));
                                const Mat gb = -g.cwiseProduct(self.val).cwiseQuotient(bb);
                                gs.add(self.parents[1], reduce_like_b(gb, bc));
                            }));
}

Tensor scale(const Tensor& a, double c) {
    return Tensor(make_node(a.val() * c, {a.node},
                            [c](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g * c);
                            }));
}

Tensor add_const(const Tensor& a, double c) {
    return Tensor(make_node(Mat(a.val().array() + c), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                gs.add(self.parents[0], g);
                            }));
}

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
    const Eigen::Index ak = trans_a ? a.val().rows() : a.val().cols();
    const Eigen::Index bk = trans_b ? b.val().cols() : b.val().rows();
    if (ak != bk) throw ShapeMismatch("matmul: inner dimensions differ");
    Mat out;
    if (!trans_a && !trans_b) out = a.val() * b.val();
    else if (trans_a && !trans_b) out = a.val().transpose() * b.val();
    else if (!trans_a && trans_b) out = a.val() * b.val().transpose();
    else out = a.val().transpose() * b.val().transpose();
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [trans_a, trans_b](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& av = self.parents[0]->val;
                                const Mat& bv = self.parents[1]->val;
                                if (!trans_a && !trans_b) {
                                    gs.add(self.parents[0], g * bv.transpose());
                                    gs.add(self.parents[1], av.transpose() * g);
                                } else if (trans_a && !trans_b) {
                                    gs.add(self.parents[0], bv * g.transpose());
                                    gs.add(self.parents[1], av * g);
                                } else if (!trans_a && trans_b) {
                                    gs.add(self.parents[0], g * bv);
                                    gs.add(self.parents[1], g.transpose() * av);
                                } else {
                                    gs.add(self.parents[0], bv.transpose() * g.transpose());
                                    gs.add(self.parents[1], g.transpose() * av.transpose());
                                }
                            }));
}

Tensor layer_norm(const Tensor& a, double eps) {
    const Mat& x = a.val();
    const Eigen::Index d = x.cols();
    Eigen::VectorXd m = x.rowwise().mean();
    Mat centered = x.colwise() - m;
    Eigen::VectorXd s = ((centered.array().square().rowwise().sum() / d) + eps).sqrt();
    Mat y(centered.array().colwise() / s.array());
    return Tensor(make_node(std::move(y), {a.node},
                            [s = std::move(s), d](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& y = self.val;
                                Eigen::VectorXd gm = g.rowwise().mean();
                                Eigen::VectorXd gym = g.cwiseProduct(y).rowwise().sum() / double(d);
                                Mat dx = g;
                                dx.colwise() -= gm;
                                dx -= Mat(y.array().colwise() * gym.array());
                                dx.array().colwise() /= s.array();
                                gs.add(self.parents[0], dx);
                            }));
}

Tensor softmax(const Tensor& a) {
    const Mat& x = a.val();
    Mat y((x.colwise() - x.rowwise().maxCoeff()).array().exp());
    Eigen::VectorXd z = y.rowwise().sum();
    y.array().colwise() /= z.array();
    return Tensor(make_node(std::move(y), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& y = self.val;
                                Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
                                Mat dx = g;
                                dx.colwise() -= dot;
                                dx = dx.cwiseProduct(y);
                                gs.add(self.parents[0], dx);
                            }));
}

Tensor gelu(const Tensor& a) {
    Mat y = a.val().unaryExpr(
        [](double v) { return 0.5 * v * (1.0 + std::erf(v / M_SQRT2)); });
    return Tensor(make_node(std::move(y), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                Mat dphi = self.parents[0]->val.unaryExpr([](double v) {
                                    return 0.5 * (1.0 + std::erf(v / M_SQRT2)) +
                                           v * std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
                                });
                                gs.add(self.parents[0], Mat(g.cwiseProduct(dphi)));
                            }));
}

Tensor sqrt(const Tensor& a) {
    Mat y(a.val().array().sqrt());
    return Tensor(make_node(std::move(y), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                Mat dx(0.5 * g.array() / self.val.array().max(1e-12));
                                gs.add(self.parents[0], dx);
                            }));
}

Tensor abs(const Tensor& a) {
    Mat y = a.val().cwiseAbs();
    return Tensor(make_node(std::move(y), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                Mat dx = g.cwiseProduct(self.parents[0]->val.cwiseSign());
                                gs.add(self.parents[0], dx);
                            }));
}

Tensor clamp_min(const Tensor& a, double c) {
    Mat y = a.val().cwiseMax(c);
    return Tensor(make_node(std::move(y), {a.node},
                            [c](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& x = self.parents[0]->val;
                                Mat dx = ((x.array() > c).cast<double>() * g.array()).matrix();
                                gs.add(self.parents[0], dx);
                            }));
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_rows: empty");
    Eigen::Index rows = 0;
    const Eigen::Index cols = parts[0].cols();
    std::vector<NodePtr> parents;
    for (const auto& p : parts) {
        if (p.cols() != cols) throw ShapeMismatch("concat_rows: column mismatch");
        rows += p.rows();
        parents.push_back(p.node);
    }
    Mat out(rows, cols);
    Eigen::Index r = 0;
    for (const auto& p : parts) {
        out.middleRows(r, p.rows()) = p.val();
        r += p.rows();
    }
    return Tensor(make_node(std::move(out), std::move(parents),
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                Eigen::Index r = 0;
                                for (const auto& p : self.parents) {
                                    gs.add(p, g.middleRows(r, p->val.rows()));
                                    r += p->val.rows();
                                }
                            }));
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols: empty");
    Eigen::Index cols = 0;
    const Eigen::Index rows = parts[0].rows();
    std::vector<NodePtr> parents;
    for (const auto& p : parts) {
        if (p.rows() != rows) throw ShapeMismatch("concat_cols: row mismatch");
        cols += p.cols();
        parents.push_back(p.node);
    }
    Mat out(rows, cols);
    Eigen::Index c = 0;
    for (const auto& p : parts) {
        out.middleCols(c, p.cols()) = p.val();
        c += p.cols();
    }
    return Tensor(make_node(std::move(out), std::move(parents),
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                Eigen::Index c = 0;
                                for (const auto& p : self.parents) {
                                    gs.add(p, g.middleCols(c, p->val.cols()));
                                    c += p->val.cols();
                                }
                            }));
}

Tensor slice_rows(const Tensor& a, int r0, int n) {
    if (r0 < 0 || n < 0 || r0 + n > a.rows()) throw ShapeMismatch("slice_rows: out of range");
    Mat out = a.val().middleRows(r0, n);
    return Tensor(make_node(std::move(out), {a.node},
                            [r0, n](const Node& self, const Mat& g, GradStore& gs) {
                                if (!self.parents[0]->requires_grad) return;
                                Mat& acc = gs.accum(self.parents[0].get());
                                acc.middleRows(r0, n) += g;
                            }));
}

Tensor slice_cols(const Tensor& a, int c0, int n) {
    if (c0 < 0 || n < 0 || c0 + n > a.cols()) throw ShapeMismatch("slice_cols: out of range");
    Mat out = a.val().middleCols(c0, n);
    return Tensor(make_node(std::move(out), {a.node},
                            [c0, n](const Node& self, const Mat& g, GradStore& gs) {
                                if (!self.parents[0]->requires_grad) return;
                                Mat& acc = gs.accum(self.parents[0].get());
                                acc.middleCols(c0, n) += g;
                            }));
}

Tensor sum(const Tensor& a) {
    Mat out = Mat::Constant(1, 1, a.val().sum());
    return Tensor(make_node(std::move(out), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                const auto& p = self.parents[0];
                                gs.add(p, Mat::Constant(p->val.rows(), p->val.cols(), g(0, 0)));
                            }));
}

Tensor mean(const Tensor& a) {
    const double n = double(a.val().size());
    Mat out = Mat::Constant(1, 1, a.val().sum() / n);
    return Tensor(make_node(std::move(out), {a.node},
                            [n](const Node& self, const Mat& g, GradStore& gs) {
                                const auto& p = self.parents[0];
                                gs.add(p, Mat::Constant(p->val.rows(), p->val.cols(), g(0, 0) / n));
                            }));
}

Tensor sum_cols(const Tensor& a) {
    Mat out = a.val().rowwise().sum();
    return Tensor(make_node(std::move(out), {a.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                const auto& p = self.parents[0];
                                gs.add(p, g.replicate(1, p->val.cols()));
                            }));
}

Tensor min_reduce(const Tensor& a) {
    const Mat& x = a.val();
    Mat out(x.rows(), 1);
    std::vector<int> arg(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        Eigen::Index c;
        out(r, 0) = x.row(r).minCoeff(&c);
        arg[r] = static_cast<int>(c);
    }
    return Tensor(make_node(std::move(out), {a.node},
                            [arg = std::move(arg)](const Node& self, const Mat& g, GradStore& gs) {
                                if (!self.parents[0]->requires_grad) return;
                                Mat& acc = gs.accum(self.parents[0].get());
                                for (Eigen::Index r = 0; r < g.rows(); ++r) {
                                    acc(r, arg[r]) += g(r, 0);
                                }
                            }));
}

Tensor gather_rows(const Tensor& table, std::vector<int> idx) {
    const Mat& t = table.val();
    Mat out(static_cast<Eigen::Index>(idx.size()), t.cols());
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= t.rows()) throw ShapeMismatch("gather_rows: index out of range");
        out.row(static_cast<Eigen::Index>(i)) = t.row(idx[i]);
    }
    return Tensor(make_node(std::move(out), {table.node},
                            [idx = std::move(idx)](const Node& self, const Mat& g, GradStore& gs) {
                                if (!self.parents[0]->requires_grad) return;
                                Mat& acc = gs.accum(self.parents[0].get());
                                for (size_t i = 0; i < idx.size(); ++i) {
                                    acc.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
                                }
                            }));
}

Tensor group_norms(const Tensor& a, int group) {
    const Mat& x = a.val();
    if (group <= 0 || x.cols() % group != 0) throw ShapeMismatch("group_norms: bad group size");
    const Eigen::Index k = x.cols() / group;
    Mat out(x.rows(), k);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index j = 0; j < k; ++j) {
            out(r, j) = x.row(r).segment(j * group, group).norm();
        }
    }
    return Tensor(make_node(std::move(out), {a.node},
                            [group, k](const Node& self, const Mat& g, GradStore& gs) {
                                if (!self.parents[0]->requires_grad) return;
                                const Mat& x = self.parents[0]->val;
                                Mat& acc = gs.accum(self.parents[0].get());
                                for (Eigen::Index r = 0; r < x.rows(); ++r) {
                                    for (Eigen::Index j = 0; j < k; ++j) {
                                        const double n = std::max(self.val(r, j), 1e-12);
                                        acc.row(r).segment(j * group, group) +=
                                            (g(r, j) / n) * x.row(r).segment(j * group, group);
                                    }
                                }
                            }));
}

Tensor cross_rows(const Tensor& a, const Tensor& b) {
    const Mat& av = a.val();
    const Mat& bv = b.val();
    if (av.cols() != 3 || bv.cols() != 3 || av.rows() != bv.rows()) {
        throw ShapeMismatch("cross_rows: expects matching Rx3");
    }
    auto cross = [](const Mat& x, const Mat& y) {
        Mat out(x.rows(), 3);
        out.col(0) = x.col(1).cwiseProduct(y.col(2)) - x.col(2).cwiseProduct(y.col(1));
        out.col(1) = x.col(2).cwiseProduct(y.col(0)) - x.col(0).cwiseProduct(y.col(2));
        out.col(2) = x.col(0).cwiseProduct(y.col(1)) - x.col(1).cwiseProduct(y.col(0));
        return out;
    };
    return Tensor(make_node(cross(av, bv), {a.node, b.node},
                            [cross](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& av = self.parents[0]->val;
                                const Mat& bv = self.parents[1]->val;
                                gs.add(self.parents[0], cross(bv, g));
                                gs.add(self.parents[1], cross(g, av));
                            }));
}

Tensor rotmul_rows(const Tensor& a, const Tensor& b) {
    const Mat& av = a.val();
    const Mat& bv = b.val();
    if (av.cols() != 9 || bv.cols() != 9 || av.rows() != bv.rows()) {
        throw ShapeMismatch("rotmul_rows: expects matching Rx9");
    }
    auto unpack = [](const Mat& m, Eigen::Index r) {
        Eigen::Matrix3d out;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) out(i, j) = m(r, 3 * j + i);
        return out;
    };
    auto pack = [](Mat& m, Eigen::Index r, const Eigen::Matrix3d& x) {
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) m(r, 3 * j + i) = x(i, j);
    };
    Mat out(av.rows(), 9);
    for (Eigen::Index r = 0; r < av.rows(); ++r) pack(out, r, unpack(av, r) * unpack(bv, r));
    return Tensor(make_node(std::move(out), {a.node, b.node},
                            [unpack, pack](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& av = self.parents[0]->val;
                                const Mat& bv = self.parents[1]->val;
                                Mat ga = Mat::Zero(av.rows(), 9);
                                Mat gb = Mat::Zero(av.rows(), 9);
                                for (Eigen::Index r = 0; r < av.rows(); ++r) {
                                    const Eigen::Matrix3d A = unpack(av, r);
                                    const Eigen::Matrix3d B = unpack(bv, r);
                                    const Eigen::Matrix3d G = unpack(g, r);
                                    pack(ga, r, G * B.transpose());
                                    pack(gb, r, A.transpose() * G);
                                }
                                gs.add(self.parents[0], ga);
                                gs.add(self.parents[1], gb);
                            }));
}

Tensor rotapply_rows(const Tensor& r, const Tensor& v) {
    const Mat& rv = r.val();
    const Mat& vv = v.val();
    if (rv.cols() != 9 || vv.cols() != 3 || rv.rows() != vv.rows()) {
        throw ShapeMismatch("rotapply_rows: expects Rx9 and Rx3");
    }
    Mat out(rv.rows(), 3);
    for (Eigen::Index k = 0; k < rv.rows(); ++k) {
        for (int i = 0; i < 3; ++i) {
            out(k, i) = rv(k, i) * vv(k, 0) + rv(k, 3 + i) * vv(k, 1) + rv(k, 6 + i) * vv(k, 2);
        }
    }
    return Tensor(make_node(std::move(out), {r.node, v.node},
                            [](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& rv = self.parents[0]->val;
                                const Mat& vv = self.parents[1]->val;
                                Mat gr = Mat::Zero(rv.rows(), 9);
                                Mat gv = Mat::Zero(rv.rows(), 3);
                                for (Eigen::Index k = 0; k < rv.rows(); ++k) {
                                    for (int j = 0; j < 3; ++j) {
                                        for (int i = 0; i < 3; ++i) {
                                            gr(k, 3 * j + i) = g(k, i) * vv(k, j);
                                            gv(k, j) += rv(k, 3 * j + i) * g(k, i);
                                        }
                                    }
                                }
                                gs.add(self.parents[0], gr);
                                gs.add(self.parents[1], gv);
                            }));
}

Tensor rows_gram_schmidt(const Tensor& sixd) {
    if (sixd.cols() != 6) throw ShapeMismatch("rows_gram_schmidt: expects Rx6");
    Tensor c0 = slice_cols(sixd, 0, 3);
    Tensor c1 = slice_cols(sixd, 3, 3);
    Tensor u0 = div(c0, clamp_min(sqrt(sum_cols(mul(c0, c0))), 1e-8));
    Tensor w = sub(c1, mul(u0, sum_cols(mul(u0, c1))));
    Tensor u1 = div(w, clamp_min(sqrt(sum_cols(mul(w, w))), 1e-8));
    Tensor u2 = cross_rows(u0, u1);
    return concat_cols({u0, u1, u2});
}

Tensor pose_points_rows(const Tensor& rot, const Tensor& trans, const Eigen::MatrixXd& points) {
    const Mat& rv = rot.val();
    const Mat& tv = trans.val();
    if (rv.cols() != 9 || tv.cols() != 3 || rv.rows() != tv.rows() || points.cols() != 3) {
        throw ShapeMismatch("pose_points_rows: bad shapes");
    }
    const Eigen::Index V = points.rows();
    Mat out(rv.rows(), 3 * V);
    for (Eigen::Index r = 0; r < rv.rows(); ++r) {
        for (Eigen::Index k = 0; k < V; ++k) {
            for (int i = 0; i < 3; ++i) {
                out(r, 3 * k + i) = rv(r, i) * points(k, 0) + rv(r, 3 + i) * points(k, 1) +
                                    rv(r, 6 + i) * points(k, 2) + tv(r, i);
            }
        }
    }
    return Tensor(make_node(std::move(out), {rot.node, trans.node},
                            [points, V](const Node& self, const Mat& g, GradStore& gs) {
                                const Eigen::Index R = g.rows();
                                Mat gr = Mat::Zero(R, 9);
                                Mat gt = Mat::Zero(R, 3);
                                for (Eigen::Index r = 0; r < R; ++r) {
                                    for (Eigen::Index k = 0; k < V; ++k) {
                                        for (int i = 0; i < 3; ++i) {
                                            const double gi = g(r, 3 * k + i);
                                            gr(r, i) += gi * points(k, 0);
                                            gr(r, 3 + i) += gi * points(k, 1);
                                            gr(r, 6 + i) += gi * points(k, 2);
                                            gt(r, i) += gi;
                                        }
                                    }
                                }
                                gs.add(self.parents[0], gr);
                                gs.add(self.parents[1], gt);
                            }));
}

Tensor point_min_dist_rows(const Tensor& p, const Tensor& sets) {
    const Mat& pv = p.val();
    const Mat& sv = sets.val();
    if (pv.cols() != 3 || sv.cols() % 3 != 0 || pv.rows() != sv.rows()) {
        throw ShapeMismatch("point_min_dist_rows: bad shapes");
    }
    const Eigen::Index V = sv.cols() / 3;
    Mat out(pv.rows(), 1);
    std::vector<int> arg(pv.rows());
    for (Eigen::Index r = 0; r < pv.rows(); ++r) {
        double best = std::numeric_limits<double>::infinity();
        int bk = 0;
        for (Eigen::Index k = 0; k < V; ++k) {
            const double dx = pv(r, 0) - sv(r, 3 * k);
            const double dy = pv(r, 1) - sv(r, 3 * k + 1);
            const double dz = pv(r, 2) - sv(r, 3 * k + 2);
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 < best) {
                best = d2;
                bk = static_cast<int>(k);
            }
        }
        out(r, 0) = std::sqrt(best);
        arg[r] = bk;
    }
    return Tensor(make_node(std::move(out), {p.node, sets.node},
                            [arg = std::move(arg)](const Node& self, const Mat& g, GradStore& gs) {
                                const Mat& pv = self.parents[0]->val;
                                const Mat& sv = self.parents[1]->val;
                                Mat gp = Mat::Zero(pv.rows(), 3);
                                Mat gset = Mat::Zero(sv.rows(), sv.cols());
                                for (Eigen::Index r = 0; r < pv.rows(); ++r) {
                                    const double d = self.val(r, 0);
                                    if (d <= 1e-12) continue;
                                    const int k = arg[r];
                                    for (int i = 0; i < 3; ++i) {
                                        const double dir = (pv(r, i) - sv(r, 3 * k + i)) / d;
                                        gp(r, i) += g(r, 0) * dir;
                                        gset(r, 3 * k + i) -= g(r, 0) * dir;
                                    }
                                }
                                gs.add(self.parents[0], gp);
                                gs.add(self.parents[1], gset);
                            }));
}

}  // namespace hoistream::ad
