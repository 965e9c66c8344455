#include <doctest.h>

#include <array>
#include <cmath>

#include "seghyp/lstm.hpp"
#include "seghyp/random.hpp"

using namespace seghyp;

namespace {

void fill(Eigen::MatrixXd& mat, Rng& rng, double scale) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        for (Eigen::Index i = 0; i < mat.rows(); ++i) mat(i, j) = rng.uniform(-scale, scale);
    }
}

void fill(Eigen::VectorXd& vec, Rng& rng, double scale) {
    for (Eigen::Index i = 0; i < vec.size(); ++i) vec(i) = rng.uniform(-scale, scale);
}

LstmCell random_cell(int input_dim, int hidden_dim, Rng& rng) {
    LstmCell cell = LstmCell::zeros(input_dim, hidden_dim);
    fill(cell.w_x, rng, 0.5);
    fill(cell.w_h, rng, 0.5);
    fill(cell.b, rng, 0.5);
    return cell;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

// Loss = sum of h elementwise-weighted by a fixed random matrix, so dh is
// that matrix and every output step participates.
double probe_loss(const LstmCell& cell, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& weight) {
    return (lstm_forward(cell, inputs).h.array() * weight.array()).sum();
}

}  // namespace

TEST_CASE("forward shapes and the zero-weight fixed point") {
    LstmCell cell = LstmCell::zeros(3, 2);
    Eigen::MatrixXd inputs = Eigen::MatrixXd::Ones(3, 4);
    LstmTrace trace = lstm_forward(cell, inputs);
    CHECK(trace.steps() == 4);
    CHECK(trace.h.rows() == 2);
    CHECK(trace.gates.rows() == 8);
    // Zero weights: candidate tanh(0) = 0 keeps cell and output at zero.
    CHECK(trace.h.cwiseAbs().maxCoeff() == 0.0);
    CHECK(trace.c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    const double h = 1e-5;
    Rng rng(314159);
    for (auto [input_dim, hidden_dim, steps] : {std::array<int, 3>{3, 2, 4}, {1, 3, 1}, {4, 2, 6}}) {
        LstmCell cell = random_cell(input_dim, hidden_dim, rng);
        Eigen::MatrixXd inputs(input_dim, steps);
        fill(inputs, rng, 1.0);
        Eigen::MatrixXd weight(hidden_dim, steps);
        fill(weight, rng, 1.0);

        LstmTrace trace = lstm_forward(cell, inputs);
        LstmCell grad = LstmCell::zeros(input_dim, hidden_dim);
        Eigen::MatrixXd dx = lstm_backward(cell, trace, weight, grad);

        double worst = 0.0;
        auto check_matrix = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& analytic) {
            for (Eigen::Index j = 0; j < param.cols(); ++j) {
                for (Eigen::Index i = 0; i < param.rows(); ++i) {
                    double kept = param(i, j);
                    param(i, j) = kept + h;
                    double up = probe_loss(cell, inputs, weight);
                    param(i, j) = kept - h;
                    double down = probe_loss(cell, inputs, weight);
                    param(i, j) = kept;
                    worst = std::max(worst, relative_error(analytic(i, j), (up - down) / (2 * h)));
                }
            }
        };
        check_matrix(cell.w_x, grad.w_x);
        check_matrix(cell.w_h, grad.w_h);
        for (Eigen::Index i = 0; i < cell.b.size(); ++i) {
            double kept = cell.b(i);
            cell.b(i) = kept + h;
            double up = probe_loss(cell, inputs, weight);
            cell.b(i) = kept - h;
            double down = probe_loss(cell, inputs, weight);
            cell.b(i) = kept;
            worst = std::max(worst, relative_error(grad.b(i), (up - down) / (2 * h)));
        }
        check_matrix(inputs, dx);
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("backward accumulates into the gradient buffer") {
    Rng rng(7);
    LstmCell cell = random_cell(2, 2, rng);
    Eigen::MatrixXd inputs(2, 3);
    fill(inputs, rng, 1.0);
    Eigen::MatrixXd dh = Eigen::MatrixXd::Ones(2, 3);

    LstmTrace trace = lstm_forward(cell, inputs);
    LstmCell grad = LstmCell::zeros(2, 2);
    lstm_backward(cell, trace, dh, grad);
    Eigen::MatrixXd once = grad.w_x;
    lstm_backward(cell, trace, dh, grad);
    CHECK((grad.w_x - 2.0 * once).cwiseAbs().maxCoeff() < 1e-14);
}
