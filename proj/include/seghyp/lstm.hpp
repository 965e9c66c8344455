#pragma once

// A single-direction LSTM written out explicitly (input/forget/output gates
// plus candidate), with an in-repo analytic backward pass. Kept free of any
// learning framework so gradients stay finite-difference-verifiable.

#include <Eigen/Core>

namespace seghyp {

/// Gate weights packed in row blocks [input; forget; output; candidate],
/// each of height H.
struct LstmCell {
    Eigen::MatrixXd w_x;  // 4H x D
    Eigen::MatrixXd w_h;  // 4H x H
    Eigen::VectorXd b;    // 4H

    int input_dim() const { return static_cast<int>(w_x.cols()); }
    int hidden_dim() const { return static_cast<int>(b.size()) / 4; }

    static LstmCell zeros(int input_dim, int hidden_dim);
};

/// Everything the backward pass needs from one forward run: inputs and
/// per-step post-activation gates, cell states, and outputs (one column per
/// step).
struct LstmTrace {
    Eigen::MatrixXd x;       // D x T
    Eigen::MatrixXd gates;   // 4H x T, after sigmoid/tanh
    Eigen::MatrixXd c;       // H x T
    Eigen::MatrixXd h;       // H x T
    Eigen::MatrixXd tanh_c;  // H x T

    int steps() const { return static_cast<int>(x.cols()); }
};

/// Runs the recurrence over the columns of `inputs` from zero initial state.
LstmTrace lstm_forward(const LstmCell& cell, const Eigen::MatrixXd& inputs);

/// Backward through a recorded forward run. `dh` holds the loss gradient
/// w.r.t. each step's output (H x T). Parameter gradients accumulate into
/// `grad`; the return value is the gradient w.r.t. the inputs (D x T).
Eigen::MatrixXd lstm_backward(const LstmCell& cell, const LstmTrace& trace,
                              const Eigen::MatrixXd& dh, LstmCell& grad);

}  // namespace seghyp
