#pragma once

// Straight-line scalar transcription of the tagger's forward pass and loss.
// Deliberately written with plain loops over std::vector so that it shares
// no arithmetic code with the Eigen implementation it checks. The scalar
// type is a parameter so that finite differences can be taken on a loss
// evaluated in extended precision.

#include <cmath>
#include <cstddef>
#include <vector>

#include "jointtag/model.hpp"

namespace oracle {

template <typename R>
using VecOf = std::vector<R>;
using Vec = VecOf<double>;

template <typename R>
VecOf<R> mat_vec(const jointtag::Matrix& w, const VecOf<R>& x) {
  VecOf<R> out(static_cast<std::size_t>(w.rows()), R(0));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    R acc = 0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) acc += R(w(i, j)) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

template <typename R = double>
VecOf<R> to_vec(const jointtag::Vector& v) {
  return VecOf<R>(v.data(), v.data() + v.size());
}

template <typename R>
R sig(R x) {
  return R(1) / (R(1) + std::exp(-x));
}

template <typename R>
struct Cell {
  VecOf<R> h, c;
};

// i = sig(Wx x + Wh h + Wc c_prev + b); f likewise; z = tanh(Wx x + Wh h + b);
// c = f*c_prev + i*z; o = sig(Wx x + Wh h + Wc c + b); h = o*tanh(c).
template <typename R>
Cell<R> encoder_step(const jointtag::EncoderLstm& p, const VecOf<R>& x, const VecOf<R>& h_prev, const VecOf<R>& c_prev) {
  const std::size_t n = static_cast<std::size_t>(p.input_gate.bias.size());
  VecOf<R> ix = mat_vec(p.input_gate.input, x), ih = mat_vec(p.input_gate.recurrent, h_prev),
      ic = mat_vec(p.input_gate.extra, c_prev);
  VecOf<R> fx = mat_vec(p.forget_gate.input, x), fh = mat_vec(p.forget_gate.recurrent, h_prev),
      fc = mat_vec(p.forget_gate.extra, c_prev);
  VecOf<R> zx = mat_vec(p.candidate.input, x), zh = mat_vec(p.candidate.recurrent, h_prev);
  Cell<R> out{VecOf<R>(n), VecOf<R>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const R i = sig<R>(ix[k] + ih[k] + ic[k] + p.input_gate.bias(static_cast<Eigen::Index>(k)));
    const R f = sig<R>(fx[k] + fh[k] + fc[k] + p.forget_gate.bias(static_cast<Eigen::Index>(k)));
    const R z = std::tanh(zx[k] + zh[k] + p.candidate.bias(static_cast<Eigen::Index>(k)));
    out.c[k] = f * c_prev[k] + i * z;
  }
  VecOf<R> ox = mat_vec(p.output_gate.input, x), oh = mat_vec(p.output_gate.recurrent, h_prev),
      oc = mat_vec(p.output_gate.extra, out.c);
  for (std::size_t k = 0; k < n; ++k) {
    const R o = sig<R>(ox[k] + oh[k] + oc[k] + p.output_gate.bias(static_cast<Eigen::Index>(k)));
    out.h[k] = o * std::tanh(out.c[k]);
  }
  return out;
}

template <typename R>
struct DecoderOut {
  VecOf<R> h, c, tag;
};

// Gates i, f, z see (h_enc, h_prev, T_prev); o peeps at the new cell;
// T = Wts h + bts.
template <typename R>
DecoderOut<R> decoder_step(const jointtag::DecoderLstm& p, const VecOf<R>& u, const VecOf<R>& h_prev,
                           const VecOf<R>& c_prev, const VecOf<R>& t_prev) {
  const std::size_t n = static_cast<std::size_t>(p.input_gate.bias.size());
  VecOf<R> iu = mat_vec(p.input_gate.input, u), ih = mat_vec(p.input_gate.recurrent, h_prev),
      it = mat_vec(p.input_gate.extra, t_prev);
  VecOf<R> fu = mat_vec(p.forget_gate.input, u), fh = mat_vec(p.forget_gate.recurrent, h_prev),
      ft = mat_vec(p.forget_gate.extra, t_prev);
  VecOf<R> zu = mat_vec(p.candidate.input, u), zh = mat_vec(p.candidate.recurrent, h_prev),
      zt = mat_vec(p.candidate.extra, t_prev);
  DecoderOut<R> out{VecOf<R>(n), VecOf<R>(n), {}};
  for (std::size_t k = 0; k < n; ++k) {
    const auto e = static_cast<Eigen::Index>(k);
    const R i = sig<R>(iu[k] + ih[k] + it[k] + p.input_gate.bias(e));
    const R f = sig<R>(fu[k] + fh[k] + ft[k] + p.forget_gate.bias(e));
    const R z = std::tanh(zu[k] + zh[k] + zt[k] + p.candidate.bias(e));
    out.c[k] = f * c_prev[k] + i * z;
  }
  VecOf<R> ou = mat_vec(p.output_gate.input, u), oh = mat_vec(p.output_gate.recurrent, h_prev),
      oc = mat_vec(p.output_gate.extra, out.c);
  for (std::size_t k = 0; k < n; ++k) {
    const R o = sig<R>(ou[k] + oh[k] + oc[k] + p.output_gate.bias(static_cast<Eigen::Index>(k)));
    out.h[k] = o * std::tanh(out.c[k]);
  }
  out.tag = mat_vec(p.tag_projection, out.h);
  for (std::size_t k = 0; k < out.tag.size(); ++k) out.tag[k] += R(p.tag_bias(static_cast<Eigen::Index>(k)));
  return out;
}

template <typename R = double>
struct Forward {
  std::vector<VecOf<R>> probabilities;
  R loss = 0;
};

// mask, if non-empty, is multiplied into the embeddings (d x n, column-major
// per token as in the implementation).
template <typename R = double>
Forward<R> forward(const jointtag::Parameters& p, const std::vector<jointtag::WordId>& ids,
                       const std::vector<jointtag::TagIndex>& gold, double alpha,
                       const jointtag::Matrix& mask = jointtag::Matrix()) {
  const std::size_t n = ids.size();
  const auto d = static_cast<std::size_t>(p.embedding.cols());
  const auto he = static_cast<std::size_t>(p.forward_encoder.input_gate.bias.size());
  const auto hd = static_cast<std::size_t>(p.decoder.input_gate.bias.size());
  const auto td = static_cast<std::size_t>(p.decoder.tag_projection.rows());

  std::vector<VecOf<R>> x(n, VecOf<R>(d));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < d; ++k) {
      const double m = mask.size() > 0 ? mask(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) : 1.0;
      x[t][k] = R(p.embedding(ids[t], static_cast<Eigen::Index>(k)) * m);
    }
  }
  std::vector<VecOf<R>> fwd(n), bwd(n);
  VecOf<R> h(he, R(0)), c(he, R(0));
  for (std::size_t t = 0; t < n; ++t) {
    Cell<R> s = encoder_step(p.forward_encoder, x[t], h, c);
    h = s.h;
    c = s.c;
    fwd[t] = h;
  }
  h.assign(he, R(0));
  c.assign(he, R(0));
  for (std::size_t t = n; t-- > 0;) {
    Cell<R> s = encoder_step(p.backward_encoder, x[t], h, c);
    h = s.h;
    c = s.c;
    bwd[t] = h;
  }

  Forward<R> out;
  VecOf<R> h2(hd, R(0)), c2(hd, R(0));
  VecOf<R> tag_prev = p.start_tag.size() > 0 ? to_vec<R>(p.start_tag) : VecOf<R>(td, R(0));
  for (std::size_t t = 0; t < n; ++t) {
    VecOf<R> u = fwd[t];
    u.insert(u.end(), bwd[t].begin(), bwd[t].end());
    DecoderOut<R> s = decoder_step(p.decoder, u, h2, c2, tag_prev);
    h2 = s.h;
    c2 = s.c;
    tag_prev = s.tag;

    VecOf<R> y = mat_vec(p.softmax_weights, s.tag);
    R mx = -1e300;
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] += R(p.softmax_bias(static_cast<Eigen::Index>(k)));
      mx = std::max(mx, y[k]);
    }
    R z = 0;
    for (R v : y) z += std::exp(v - mx);
    VecOf<R> prob(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) prob[k] = std::exp(y[k] - mx) / z;
    if (!gold.empty()) {
      const R weight = gold[t] == 0 ? R(1) : R(alpha);
      out.loss -= weight * std::log(prob[gold[t]]);
    }
    out.probabilities.push_back(std::move(prob));
  }
  return out;
}

}  // namespace oracle
