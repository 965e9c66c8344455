#include "seghyp/lstm.hpp"

namespace seghyp {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

LstmCell LstmCell::zeros(int input_dim, int hidden_dim) {
    LstmCell cell;
    cell.w_x = Eigen::MatrixXd::Zero(4 * hidden_dim, input_dim);
    cell.w_h = Eigen::MatrixXd::Zero(4 * hidden_dim, hidden_dim);
    cell.b = Eigen::VectorXd::Zero(4 * hidden_dim);
    return cell;
}

LstmTrace lstm_forward(const LstmCell& cell, const Eigen::MatrixXd& inputs) {
    const int hidden = cell.hidden_dim();
    const int steps = static_cast<int>(inputs.cols());

    LstmTrace trace;
    trace.x = inputs;
    trace.gates.resize(4 * hidden, steps);
    trace.c.resize(hidden, steps);
    trace.h.resize(hidden, steps);
    trace.tanh_c.resize(hidden, steps);

    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(hidden);
    for (int t = 0; t < steps; ++t) {
        Eigen::VectorXd z = cell.w_x * inputs.col(t) + cell.w_h * h_prev + cell.b;
        Eigen::ArrayXd gi = sigmoid(z.segment(0, hidden).array());
        Eigen::ArrayXd gf = sigmoid(z.segment(hidden, hidden).array());
        Eigen::ArrayXd go = sigmoid(z.segment(2 * hidden, hidden).array());
        Eigen::ArrayXd gg = z.segment(3 * hidden, hidden).array().tanh();

        Eigen::ArrayXd c_now = gf * c_prev.array() + gi * gg;
        Eigen::ArrayXd tc = c_now.tanh();

        trace.gates.col(t).segment(0, hidden) = gi.matrix();
        trace.gates.col(t).segment(hidden, hidden) = gf.matrix();
        trace.gates.col(t).segment(2 * hidden, hidden) = go.matrix();
        trace.gates.col(t).segment(3 * hidden, hidden) = gg.matrix();
        trace.c.col(t) = c_now.matrix();
        trace.tanh_c.col(t) = tc.matrix();
        trace.h.col(t) = (go * tc).matrix();

        h_prev = trace.h.col(t);
        c_prev = trace.c.col(t);
    }
    return trace;
}

Eigen::MatrixXd lstm_backward(const LstmCell& cell, const LstmTrace& trace,
                              const Eigen::MatrixXd& dh, LstmCell& grad) {
    const int hidden = cell.hidden_dim();
    const int steps = trace.steps();

    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(trace.x.rows(), steps);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hidden);  // from step t+1
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hidden);

    for (int t = steps - 1; t >= 0; --t) {
        Eigen::ArrayXd gi = trace.gates.col(t).segment(0, hidden).array();
        Eigen::ArrayXd gf = trace.gates.col(t).segment(hidden, hidden).array();
        Eigen::ArrayXd go = trace.gates.col(t).segment(2 * hidden, hidden).array();
        Eigen::ArrayXd gg = trace.gates.col(t).segment(3 * hidden, hidden).array();
        Eigen::ArrayXd tc = trace.tanh_c.col(t).array();

        Eigen::ArrayXd dh_total = dh.col(t).array() + dh_next.array();
        Eigen::ArrayXd dc = dc_next.array() + dh_total * go * (1.0 - tc * tc);

        Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(hidden);
        if (t > 0) c_prev = trace.c.col(t - 1).array();

        Eigen::VectorXd dz(4 * hidden);
        dz.segment(0, hidden) = (dc * gg * gi * (1.0 - gi)).matrix();
        dz.segment(hidden, hidden) = (dc * c_prev * gf * (1.0 - gf)).matrix();
        dz.segment(2 * hidden, hidden) = (dh_total * tc * go * (1.0 - go)).matrix();
        dz.segment(3 * hidden, hidden) = (dc * gi * (1.0 - gg * gg)).matrix();

        grad.w_x += dz * trace.x.col(t).transpose();
        if (t > 0) grad.w_h += dz * trace.h.col(t - 1).transpose();
        grad.b += dz;

        dx.col(t) = cell.w_x.transpose() * dz;
        dh_next = cell.w_h.transpose() * dz;
        dc_next = (dc * gf).matrix();
    }
    return dx;
}

}  // namespace seghyp
