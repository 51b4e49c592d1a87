#include "causalx/rnn.hpp"

#include "causalx/error.hpp"

namespace causalx {

namespace {

using Eigen::Index;

Vector sigmoid(const Vector& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

void check_input(const RnnWeights& w, Index d) {
  if (d != w.input.cols()) {
    throw ValidationError("input has dimension " + std::to_string(d) + ", recurrent layer expects " +
                          std::to_string(w.input.cols()));
  }
}

// One GRU step given the precomputed input projection W x (without bias).
// Writes [z, r, n] into `gates`.
Vector gru_cell(const RnnWeights& w, const Vector& wx, const Vector& h_prev, Vector& gates) {
  const Index h = w.hidden();
  Vector a_zr = wx.head(2 * h) + w.bias.head(2 * h) + w.recurrent.topRows(2 * h) * h_prev;
  Vector zr = sigmoid(a_zr);
  Vector rh = zr.tail(h).cwiseProduct(h_prev);
  Vector a_n = wx.tail(h) + w.bias.tail(h) + w.recurrent.bottomRows(h) * rh;
  Vector n = a_n.array().tanh().matrix();
  gates.resize(3 * h);
  gates << zr, n;
  const auto z = zr.head(h).array();
  return ((1.0 - z) * h_prev.array() + z * n.array()).matrix();
}

// One LSTM step; writes [i, f, g, o] into `gates`.
LstmState lstm_cell(const RnnWeights& w, const Vector& wx, const LstmState& prev, Vector& gates) {
  const Index h = w.hidden();
  Vector a = wx + w.bias + w.recurrent * prev.h;
  gates.resize(4 * h);
  gates.segment(0, h) = sigmoid(a.segment(0, h));
  gates.segment(h, h) = sigmoid(a.segment(h, h));
  gates.segment(2 * h, h) = a.segment(2 * h, h).array().tanh().matrix();
  gates.segment(3 * h, h) = sigmoid(a.segment(3 * h, h));
  LstmState next;
  next.c = gates.segment(h, h).cwiseProduct(prev.c) + gates.segment(0, h).cwiseProduct(gates.segment(2 * h, h));
  next.h = gates.segment(3 * h, h).cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

}  // namespace

Vector gru_step(const RnnWeights& w, const Vector& x, const Vector& h_prev) {
  if (w.kind != RnnKind::Gru) throw ValidationError("gru_step called with LSTM weights");
  check_input(w, x.size());
  if (h_prev.size() != w.hidden()) throw ValidationError("h_prev has the wrong size");
  Vector gates;
  return gru_cell(w, w.input * x, h_prev, gates);
}

LstmState lstm_step(const RnnWeights& w, const Vector& x, const LstmState& prev) {
  if (w.kind != RnnKind::Lstm) throw ValidationError("lstm_step called with GRU weights");
  check_input(w, x.size());
  if (prev.h.size() != w.hidden() || prev.c.size() != w.hidden()) {
    throw ValidationError("previous LSTM state has the wrong size");
  }
  Vector gates;
  return lstm_cell(w, w.input * x, prev, gates);
}

RnnTrace rnn_forward(const RnnWeights& w, const Matrix& inputs, Index length, bool reverse) {
  check_input(w, inputs.cols());
  if (length < 1 || length > inputs.rows()) {
    throw ValidationError("sequence length " + std::to_string(length) + " outside [1, " +
                          std::to_string(inputs.rows()) + "]");
  }
  const Index h = w.hidden();
  const Index g = static_cast<Index>(gate_count(w.kind));
  RnnTrace tr;
  tr.reverse = reverse;
  tr.length = length;
  tr.states.resize(length, h);
  tr.prev.resize(length, h);
  tr.gates.resize(length, g * h);
  const Matrix projected = inputs.topRows(length) * w.input.transpose();

  Vector gates;
  if (w.kind == RnnKind::Gru) {
    Vector state = Vector::Zero(h);
    for (Index step = 0; step < length; ++step) {
      const Index t = reverse ? length - 1 - step : step;
      tr.prev.row(t) = state.transpose();
      state = gru_cell(w, projected.row(t).transpose(), state, gates);
      tr.gates.row(t) = gates.transpose();
      tr.states.row(t) = state.transpose();
    }
  } else {
    tr.cells.resize(length, h);
    tr.prev_cells.resize(length, h);
    LstmState state{Vector::Zero(h), Vector::Zero(h)};
    for (Index step = 0; step < length; ++step) {
      const Index t = reverse ? length - 1 - step : step;
      tr.prev.row(t) = state.h.transpose();
      tr.prev_cells.row(t) = state.c.transpose();
      state = lstm_cell(w, projected.row(t).transpose(), state, gates);
      tr.gates.row(t) = gates.transpose();
      tr.states.row(t) = state.h.transpose();
      tr.cells.row(t) = state.c.transpose();
    }
  }
  return tr;
}

Matrix rnn_backward(const RnnWeights& w, const RnnTrace& tr, const Matrix& d_states) {
  const Index h = w.hidden();
  const Index len = tr.length;
  const Index g = static_cast<Index>(gate_count(w.kind));
  if (d_states.rows() < len || d_states.cols() != h) {
    throw ValidationError("state gradient has the wrong shape");
  }
  Matrix d_pre(len, g * h);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  for (Index step = len - 1; step >= 0; --step) {
    const Index t = tr.reverse ? len - 1 - step : step;
    const Vector dh = d_states.row(t).transpose() + dh_next;
    const Vector hp = tr.prev.row(t).transpose();
    const Vector gates = tr.gates.row(t).transpose();
    if (w.kind == RnnKind::Gru) {
      const auto z = gates.segment(0, h).array();
      const auto r = gates.segment(h, h).array();
      const auto n = gates.segment(2 * h, h).array();
      const Vector da_n = (dh.array() * z * (1.0 - n * n)).matrix();
      const Vector drh = w.recurrent.bottomRows(h).transpose() * da_n;
      const Vector da_z = (dh.array() * (n - hp.array()) * z * (1.0 - z)).matrix();
      const Vector da_r = (drh.array() * hp.array() * r * (1.0 - r)).matrix();
      Vector dhp = (dh.array() * (1.0 - z) + drh.array() * r).matrix();
      dhp.noalias() += w.recurrent.topRows(h).transpose() * da_z;
      dhp.noalias() += w.recurrent.middleRows(h, h).transpose() * da_r;
      d_pre.row(t) << da_z.transpose(), da_r.transpose(), da_n.transpose();
      dh_next = dhp;
    } else {
      const auto i = gates.segment(0, h).array();
      const auto f = gates.segment(h, h).array();
      const auto gg = gates.segment(2 * h, h).array();
      const auto o = gates.segment(3 * h, h).array();
      const Eigen::ArrayXd tc = tr.cells.row(t).transpose().array().tanh();
      const Eigen::ArrayXd cp = tr.prev_cells.row(t).transpose().array();
      const Eigen::ArrayXd dc = dc_next.array() + dh.array() * o * (1.0 - tc * tc);
      Vector da(4 * h);
      da.segment(0, h) = (dc * gg * i * (1.0 - i)).matrix();
      da.segment(h, h) = (dc * cp * f * (1.0 - f)).matrix();
      da.segment(2 * h, h) = (dc * i * (1.0 - gg * gg)).matrix();
      da.segment(3 * h, h) = (dh.array() * tc * o * (1.0 - o)).matrix();
      d_pre.row(t) = da.transpose();
      dh_next = w.recurrent.transpose() * da;
      dc_next = (dc * f).matrix();
    }
  }
  return d_pre;
}

void accumulate_rnn_gradients(const RnnWeights& w, const RnnTrace& tr, const Matrix& inputs,
                              const Matrix& d_pre, RnnWeights& grad) {
  const Index h = w.hidden();
  const Index len = tr.length;
  grad.input.noalias() += d_pre.transpose() * inputs.topRows(len);
  if (w.kind == RnnKind::Gru) {
    grad.recurrent.topRows(2 * h).noalias() += d_pre.leftCols(2 * h).transpose() * tr.prev;
    const Matrix gated = tr.gates.middleCols(h, h).cwiseProduct(tr.prev);
    grad.recurrent.bottomRows(h).noalias() += d_pre.rightCols(h).transpose() * gated;
  } else {
    grad.recurrent.noalias() += d_pre.transpose() * tr.prev;
  }
  grad.bias += d_pre.colwise().sum().transpose();
}

Matrix bidir_encode(const TaggerParams& params, const Matrix& inputs, Index length) {
  const Index h = params.hidden();
  const RnnTrace fwd = rnn_forward(params.forward, inputs, length, false);
  const RnnTrace bwd = rnn_forward(params.backward, inputs, length, true);
  Matrix context = Matrix::Zero(inputs.rows(), 2 * h);
  context.topLeftCorner(length, h) = fwd.states;
  context.block(0, h, length, h) = bwd.states;
  return context;
}

Matrix bidir_encode(const TaggerParams& params, const Matrix& inputs) {
  return bidir_encode(params, inputs, inputs.rows());
}

}  // namespace causalx
