#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "hoistream/autodiff.hpp"
#include "hoistream/geom.hpp"
#include "hoistream/rng.hpp"

using namespace hoistream;
using ad::Tensor;

namespace {

Eigen::MatrixXd randn(Rng& rng, int r, int c, double scl = 1.0) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = scl * rng.normal();
    return m;
}

// Central finite differences against one analytic backward pass. The graph
// builder maps leaf values to any output tensor; a fixed random probe turns
// it into a scalar.
void check_gradients(std::vector<Eigen::MatrixXd> inputs,
                     const std::function<Tensor(const std::vector<Tensor>&)>& build,
                     double tol = 1e-6, double h = 1e-5) {
    Rng rng(999);
    auto eval = [&](const std::vector<Eigen::MatrixXd>& vals,
                    Eigen::MatrixXd* probe) -> std::pair<double, ad::GradStore> {
        std::vector<Tensor> leaves;
        for (const auto& v : vals) leaves.push_back(ad::param(v));
        Tensor out = build(leaves);
        if (probe->size() == 0) *probe = randn(rng, out.rows(), out.cols());
        Tensor loss = ad::sum(ad::mul(out, ad::constant(*probe)));
        ad::GradStore gs = ad::backward(loss);
        std::vector<Eigen::MatrixXd> grads;
        for (const auto& l : leaves) grads.push_back(gs.get(l));
        return {loss.val()(0, 0), std::move(gs)};
    };

    Eigen::MatrixXd probe;
    std::vector<Tensor> leaves;
    for (const auto& v : inputs) leaves.push_back(ad::param(v));
    Tensor out = build(leaves);
    probe = randn(rng, out.rows(), out.cols());
    Tensor loss = ad::sum(ad::mul(out, ad::constant(probe)));
    ad::GradStore gs = ad::backward(loss);

    for (size_t li = 0; li < inputs.size(); ++li) {
        const Eigen::MatrixXd analytic = gs.get(leaves[li]);
        for (int i = 0; i < inputs[li].rows(); ++i) {
            for (int j = 0; j < inputs[li].cols(); ++j) {
                auto f = [&](double delta) {
                    std::vector<Eigen::MatrixXd> vals = inputs;
                    vals[li](i, j) += delta;
                    std::vector<Tensor> ls;
                    for (const auto& v : vals) ls.push_back(ad::param(v));
                    Tensor o = build(ls);
                    return ad::sum(ad::mul(o, ad::constant(probe))).val()(0, 0);
                };
                const double numeric = (f(h) - f(-h)) / (2 * h);
                const double err = std::abs(analytic(i, j) - numeric);
                CHECK(err <= tol * std::max(1.0, std::abs(numeric)));
            }
        }
    }
}

}  // namespace

TEST_CASE("polynomial sanity: d/dx sum(x*x) = 2x") {
    Tensor x = ad::param((Eigen::MatrixXd(1, 2) << 1, 2).finished());
    Tensor loss = ad::sum(ad::mul(x, x));
    ad::GradStore gs = ad::backward(loss);
    const Eigen::MatrixXd g = gs.get(x);
    CHECK(g(0, 0) == doctest::Approx(2));
    CHECK(g(0, 1) == doctest::Approx(4));
}

TEST_CASE("elementwise ops with broadcasting") {
    Rng rng(1);
    const auto a = randn(rng, 4, 5);
    for (auto shape : std::vector<std::pair<int, int>>{{4, 5}, {1, 1}, {1, 5}, {4, 1}}) {
        auto b = randn(rng, shape.first, shape.second);
        check_gradients({a, b}, [](const std::vector<Tensor>& l) { return ad::add(l[0], l[1]); });
        check_gradients({a, b}, [](const std::vector<Tensor>& l) { return ad::sub(l[0], l[1]); });
        check_gradients({a, b}, [](const std::vector<Tensor>& l) { return ad::mul(l[0], l[1]); });
        b = b.unaryExpr([](double v) { return v >= 0 ? v + 0.5 : v - 0.5; });  // keep away from 0
        check_gradients({a, b}, [](const std::vector<Tensor>& l) { return ad::div(l[0], l[1]); });
    }
    check_gradients({a}, [](const std::vector<Tensor>& l) { return ad::scale(l[0], -2.5); });
    check_gradients({a}, [](const std::vector<Tensor>& l) { return ad::add_const(l[0], 3.0); });
}

TEST_CASE("matmul all transpose combinations") {
    Rng rng(2);
    check_gradients({randn(rng, 3, 4), randn(rng, 4, 5)},
                    [](const std::vector<Tensor>& l) { return ad::matmul(l[0], l[1]); });
    check_gradients({randn(rng, 4, 3), randn(rng, 4, 5)},
                    [](const std::vector<Tensor>& l) { return ad::matmul(l[0], l[1], true, false); });
    check_gradients({randn(rng, 3, 4), randn(rng, 5, 4)},
                    [](const std::vector<Tensor>& l) { return ad::matmul(l[0], l[1], false, true); });
    check_gradients({randn(rng, 4, 3), randn(rng, 5, 4)},
                    [](const std::vector<Tensor>& l) { return ad::matmul(l[0], l[1], true, true); });
    CHECK_THROWS_AS(ad::matmul(ad::constant(randn(rng, 2, 3)), ad::constant(randn(rng, 2, 3))),
                    ShapeMismatch);
}

TEST_CASE("layer_norm gradient vs finite differences") {
    Rng rng(3);
    check_gradients({randn(rng, 5, 8)},
                    [](const std::vector<Tensor>& l) { return ad::layer_norm(l[0]); });
}

TEST_CASE("softmax rows sum to one and gradient checks") {
    Rng rng(4);
    const auto x = randn(rng, 6, 7);
    Tensor y = ad::softmax(ad::constant(x));
    for (int r = 0; r < 6; ++r) {
        CHECK(y.val().row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    check_gradients({x}, [](const std::vector<Tensor>& l) { return ad::softmax(l[0]); });
}

TEST_CASE("unary nonlinearities") {
    Rng rng(5);
    check_gradients({randn(rng, 4, 6)},
                    [](const std::vector<Tensor>& l) { return ad::gelu(l[0]); });
    Eigen::MatrixXd pos = randn(rng, 3, 5).cwiseAbs().array() + 0.2;
    check_gradients({pos}, [](const std::vector<Tensor>& l) { return ad::sqrt(l[0]); });
    Eigen::MatrixXd off = randn(rng, 3, 5).unaryExpr(
        [](double v) { return v >= 0 ? v + 0.3 : v - 0.3; });
    check_gradients({off}, [](const std::vector<Tensor>& l) { return ad::abs(l[0]); });
}

TEST_CASE("clamp_min") {
    Eigen::MatrixXd x(2, 3);
    x << -1.0, 0.4, 2.0, 0.9, -0.2, 1.5;  // mix of clamped and passing entries
    check_gradients({x}, [](const std::vector<Tensor>& l) { return ad::clamp_min(l[0], 0.5); });
    Tensor y = ad::clamp_min(ad::constant(x), 0.5);
    CHECK(y.val()(0, 0) == 0.5);
    CHECK(y.val()(0, 2) == 2.0);
}

TEST_CASE("concat and slice") {
    Rng rng(6);
    check_gradients({randn(rng, 2, 4), randn(rng, 3, 4)},
                    [](const std::vector<Tensor>& l) { return ad::concat_rows({l[0], l[1]}); });
    check_gradients({randn(rng, 3, 2), randn(rng, 3, 5)},
                    [](const std::vector<Tensor>& l) { return ad::concat_cols({l[0], l[1]}); });
    check_gradients({randn(rng, 6, 4)},
                    [](const std::vector<Tensor>& l) { return ad::slice_rows(l[0], 1, 3); });
    check_gradients({randn(rng, 4, 7)},
                    [](const std::vector<Tensor>& l) { return ad::slice_cols(l[0], 2, 4); });
}

TEST_CASE("reductions") {
    Rng rng(7);
    check_gradients({randn(rng, 3, 4)},
                    [](const std::vector<Tensor>& l) { return ad::sum(l[0]); });
    check_gradients({randn(rng, 3, 4)},
                    [](const std::vector<Tensor>& l) { return ad::mean(l[0]); });
    check_gradients({randn(rng, 3, 4)},
                    [](const std::vector<Tensor>& l) { return ad::sum_cols(l[0]); });
    // gaps between entries keep the argmin stable under the probe step
    Eigen::MatrixXd spread(2, 3);
    spread << 0.1, 1.0, 2.0, 5.0, -3.0, 0.0;
    check_gradients({spread}, [](const std::vector<Tensor>& l) { return ad::min_reduce(l[0]); });
}

TEST_CASE("gather_rows accumulates duplicate indices") {
    Rng rng(8);
    check_gradients({randn(rng, 5, 3)}, [](const std::vector<Tensor>& l) {
        return ad::gather_rows(l[0], {0, 2, 2, 4, 1});
    });
}

TEST_CASE("group_norms") {
    Rng rng(9);
    Eigen::MatrixXd x = randn(rng, 4, 9).array() + 2.0;  // keep norms away from 0
    check_gradients({x}, [](const std::vector<Tensor>& l) { return ad::group_norms(l[0], 3); });
    check_gradients({x}, [](const std::vector<Tensor>& l) { return ad::group_norms(l[0], 9); });
}

TEST_CASE("row-wise kinematics ops") {
    Rng rng(10);
    check_gradients({randn(rng, 4, 3), randn(rng, 4, 3)},
                    [](const std::vector<Tensor>& l) { return ad::cross_rows(l[0], l[1]); });
    check_gradients({randn(rng, 3, 9), randn(rng, 3, 9)},
                    [](const std::vector<Tensor>& l) { return ad::rotmul_rows(l[0], l[1]); });
    check_gradients({randn(rng, 3, 9), randn(rng, 3, 3)},
                    [](const std::vector<Tensor>& l) { return ad::rotapply_rows(l[0], l[1]); });

    // gram-schmidt on well-conditioned 6d rows
    Eigen::MatrixXd sixd(3, 6);
    sixd << 1.2, 0.1, -0.3, 0.2, 0.9, 0.4,
            -0.5, 1.0, 0.2, 0.8, 0.1, -0.7,
            0.3, -0.2, 1.1, -0.4, 0.6, 0.5;
    check_gradients({sixd},
                    [](const std::vector<Tensor>& l) { return ad::rows_gram_schmidt(l[0]); });

    // gram-schmidt forward agrees with the strict geometry routine
    Tensor r = ad::rows_gram_schmidt(ad::constant(sixd));
    for (int row = 0; row < 3; ++row) {
        Rot6 r6;
        for (int i = 0; i < 6; ++i) r6.a[i] = sixd(row, i);
        const Mat3 m = rot6_to_matrix(r6);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
                CHECK(r.val()(row, 3 * j + i) == doctest::Approx(m(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("pose and min-distance ops") {
    Rng rng(11);
    Eigen::MatrixXd pts = randn(rng, 5, 3);
    Eigen::MatrixXd rot(2, 9);
    // valid rotations per row (identity and 90-degree yaw, column-major)
    rot << 1, 0, 0, 0, 1, 0, 0, 0, 1,
           0, 1, 0, -1, 0, 0, 0, 0, 1;
    check_gradients({rot, randn(rng, 2, 3)}, [&pts](const std::vector<Tensor>& l) {
        return ad::pose_points_rows(l[0], l[1], pts);
    });

    Eigen::MatrixXd p = randn(rng, 2, 3);
    Eigen::MatrixXd sets = randn(rng, 2, 15);
    check_gradients({p, sets}, [](const std::vector<Tensor>& l) {
        return ad::point_min_dist_rows(l[0], l[1]);
    });
}

TEST_CASE("graph reuse, no-grad mode, and error paths") {
    Rng rng(12);
    // diamond: x feeds two branches; gradients accumulate
    const auto xv = randn(rng, 2, 2);
    check_gradients({xv}, [](const std::vector<Tensor>& l) {
        return ad::add(ad::mul(l[0], l[0]), ad::scale(l[0], 3.0));
    });

    {
        ad::NoGradGuard guard;
        Tensor x = ad::param(xv);
        Tensor y = ad::mul(x, x);
        CHECK_FALSE(y.node->requires_grad);
        CHECK(y.node->parents.empty());
    }

    Tensor nonscalar = ad::param(randn(rng, 2, 3));
    CHECK_THROWS_AS(ad::backward(nonscalar), ShapeMismatch);

    // backward through a constant-only graph yields no gradients
    Tensor c = ad::constant(randn(rng, 1, 1));
    ad::GradStore gs = ad::backward(ad::sum(c));
    CHECK(gs.grads.empty());
}
