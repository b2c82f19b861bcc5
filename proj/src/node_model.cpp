#include "lndp/node_model.hpp"

#include "lndp/error.hpp"

#include <cmath>

namespace lndp {

namespace {

void check_finite(const RowMat& m, const char* what) {
    require_finite(std::span<const float>(m.data(), static_cast<std::size_t>(m.size())), what);
}

}  // namespace

GtParams GtParams::zeros(const GtShape& shape) {
    GtParams p;
    p.heads.resize(shape.n_heads);
    for (auto& h : p.heads) {
        h.query = Mat::Zero(shape.d_head, shape.d_node_in);
        h.key = Mat::Zero(shape.d_head, shape.d_node_in);
        h.value = Mat::Zero(shape.d_head, shape.d_node_in);
        h.edge = Mat::Zero(shape.d_head, shape.d_edge_in);
    }
    p.out_proj = Mat::Zero(shape.d_out, shape.n_heads * shape.d_head);
    p.out_bias = Vec::Zero(shape.d_out);
    return p;
}

GtShape GtParams::shape() const {
    GtShape s;
    s.n_heads = static_cast<int>(heads.size());
    s.d_head = heads.empty() ? 0 : static_cast<int>(heads.front().query.rows());
    s.d_node_in = heads.empty() ? 0 : static_cast<int>(heads.front().query.cols());
    s.d_edge_in = heads.empty() ? 0 : static_cast<int>(heads.front().edge.cols());
    s.d_out = static_cast<int>(out_proj.rows());
    return s;
}

GruCell GruCell::zeros(int input_dim, int hidden_dim) {
    GruCell c;
    for (Mat* w : {&c.wz, &c.wr, &c.wh}) *w = Mat::Zero(hidden_dim, input_dim);
    for (Mat* u : {&c.uz, &c.ur, &c.uh}) *u = Mat::Zero(hidden_dim, hidden_dim);
    for (Vec* b : {&c.bz, &c.br, &c.bh}) *b = Vec::Zero(hidden_dim);
    return c;
}

/// Batched GRU: one row of `h` / `x` per unit.
RowMat gru_rows(const GruCell& c, const RowMat& h, const RowMat& x) {
    const Eigen::Index hid = c.hidden_dim();
    Mat w(3 * hid, c.input_dim());
    w << c.wz, c.wr, c.wh;
    Mat u(2 * hid, hid);
    u << c.uz, c.ur;
    Vec b(3 * hid);
    b << c.bz, c.br, c.bh;

    // Columns: z pre-activation, r pre-activation, candidate pre-activation.
    RowMat pre(x.rows(), 3 * hid);
    pre.noalias() = x * w.transpose();
    pre.leftCols(2 * hid).noalias() += h * u.transpose();
    pre.rowwise() += b.transpose();
    pre.leftCols(2 * hid) = (1.0f / (1.0f + (-pre.leftCols(2 * hid).array()).exp())).matrix();

    const RowMat gated = pre.middleCols(hid, hid).cwiseProduct(h);
    pre.rightCols(hid).noalias() += gated * c.uh.transpose();
    const auto cand = pre.rightCols(hid).array().tanh();
    return (h.array() + pre.leftCols(hid).array() * (cand - h.array())).matrix();
}

Vec gru_step(const GruCell& cell, const Vec& h, const Vec& x) {
    if (h.size() != cell.hidden_dim() || x.size() != cell.input_dim()) {
        throw Error(ErrorKind::Shape, "GRU step dimension mismatch");
    }
    const RowMat out = gru_rows(cell, h.transpose(), x.transpose());
    return out.row(0).transpose();
}

GtResult gt_forward_with_attention(const GtParams& p, const RowMat& node_in, const RowMat& edge_in) {
    const GtShape shape = p.shape();
    const Eigen::Index n = node_in.rows();
    if (node_in.cols() != shape.d_node_in || edge_in.cols() != shape.d_edge_in || edge_in.rows() != n * n) {
        throw Error(ErrorKind::Shape, "graph transformer input shape mismatch");
    }
    check_finite(node_in, "node input");
    check_finite(edge_in, "edge input");

    // Attention runs in double; softmax amplifies float error in the logits.
    const double scale = 1.0 / std::sqrt(static_cast<double>(shape.d_head));
    const Eigen::MatrixXd ni = node_in.cast<double>();
    const Eigen::MatrixXd ei = edge_in.cast<double>();
    Eigen::MatrixXd concat(n, shape.n_heads * shape.d_head);
    GtResult result;
    result.attention.reserve(shape.n_heads);

    using RowMatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (int k = 0; k < shape.n_heads; ++k) {
        const GtHead& head = p.heads[k];
        const RowMatD q = ni * head.query.cast<double>().transpose();
        const RowMatD key = ni * head.key.cast<double>().transpose();
        const Eigen::MatrixXd val = ni * head.value.cast<double>().transpose();
        const RowMatD gate = ei * head.edge.cast<double>().transpose();  // N² × d_head

        RowMatD attn(n, n);
        const Eigen::Index dk = shape.d_head;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double* qi = q.data() + i * dk;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double* kj = key.data() + j * dk;
                const double* g = gate.data() + (i * n + j) * dk;
                double s = 0.0;
                for (Eigen::Index d = 0; d < dk; ++d) s += qi[d] * kj[d] * g[d];
                attn(i, j) = s * scale;
            }
            const double m = attn.row(i).maxCoeff();
            attn.row(i) = (attn.row(i).array() - m).exp().matrix();
            attn.row(i) /= attn.row(i).sum();
        }
        concat.middleCols(k * shape.d_head, shape.d_head) = attn * val;
        result.attention.push_back(attn.cast<float>());
    }

    result.output = ((concat * p.out_proj.cast<double>().transpose()).rowwise() + p.out_bias.cast<double>().transpose())
                        .array()
                        .tanh()
                        .matrix()
                        .cast<float>();
    return result;
}

RowMat gt_forward(const GtParams& p, const RowMat& node_in, const RowMat& edge_in) {
    return gt_forward_with_attention(p, node_in, edge_in).output;
}

RowMat node_inputs(const GraphState& g) {
    const int n = g.size();
    const int dh = g.node_dim();
    RowMat in(n, 1 + dh + 6);
    in.col(0) = g.activations;
    in.middleCols(1, dh) = g.node_states;
    in.rightCols(6) = node_structural_features(g);
    return in;
}

RowMat edge_inputs(const GraphState& g) {
    const int de = g.edge_dim();
    RowMat in(g.edge_states.rows(), de + 3);
    in.leftCols(de) = g.edge_states;
    in.rightCols(3) = edge_structural_features(g);
    return in;
}

RowMat node_update(const GtParams& gt, const NodeGruParams& gru, const GraphState& g) {
    const RowMat x = gt_forward(gt, node_inputs(g), edge_inputs(g));
    return gru_rows(gru, g.node_states, x);
}

}  // namespace lndp
