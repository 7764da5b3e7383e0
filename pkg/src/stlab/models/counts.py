"""Closed-form parameter counts, written independently of the builders.

These are hand-derived sums over the layer shapes; a test instantiates
random configs and checks the analytic number equals the materialized
ParameterSet size exactly.
"""

from __future__ import annotations

from .berard import BerardConfig
from .layers import ceil_div
from .transformer import TransformerTextConfig
from .vgg_lstm import VggLstmConfig
from .vgg_transformer import VggTransformerConfig


def _lstm(din, hidden):
    return (din + hidden) * 4 * hidden + 4 * hidden


def _bilstm(din, hidden):
    return 2 * _lstm(din, hidden)


def _vgg(features, channels, kernel):
    total = 0
    cin = 1
    feat = features
    for ch in channels:
        total += ch * cin * kernel * kernel + ch
        total += ch * ch * kernel * kernel + ch
        feat = ceil_div(feat, 2)
        total += 2 * ch * feat
        cin = ch
    return total


def _vgg_out(features, channels):
    feat = features
    for _ in channels:
        feat = ceil_div(feat, 2)
    return channels[-1] * feat


def _mha(d):
    return 4 * (d * d + d)


def _ffn(d, f):
    return d * f + f + f * d + d


def _enc_layer(d, f):
    return _mha(d) + _ffn(d, f) + 2 * 2 * d


def _dec_layer(d, f):
    return 2 * _mha(d) + _ffn(d, f) + 3 * 2 * d


def count_berard(cfg: BerardConfig):
    n1, n2 = cfg.nonlinear
    C, k = cfg.conv_channels, cfg.conv_kernel
    h, H = cfg.lstm_hidden, cfg.dec_hidden
    total = cfg.features * n1 + n1 + n1 * n2 + n2
    total += C * 1 * k * k + C + C * C * k * k + C
    d0 = cfg.conv_feat_dim
    total += _bilstm(d0, h) + 2 * _bilstm(2 * h, h)
    total += cfg.vocab * cfg.embed
    total += _lstm(cfg.embed, H) + (cfg.dec_layers - 1) * _lstm(2 * h, H)
    total += H * cfg.att_dim + 2 * h * cfg.att_dim + cfg.att_dim  # wq, wh, v
    feat = H + 2 * h
    if cfg.logit_bottleneck:
        total += feat * cfg.logit_bottleneck + cfg.logit_bottleneck
        feat = cfg.logit_bottleneck
    total += feat * cfg.vocab + cfg.vocab
    return total


def count_vgg_lstm(cfg: VggLstmConfig):
    total = _vgg(cfg.features, cfg.vgg_channels, cfg.vgg_kernel)
    din = _vgg_out(cfg.features, cfg.vgg_channels)
    s = cfg.lstm_size
    total += _bilstm(din, s) + (cfg.enc_layers - 1) * _bilstm(2 * s, s)
    total += cfg.vocab * cfg.embed
    H = cfg.dec_hidden
    total += _lstm(cfg.embed, H) + (cfg.dec_layers - 1) * _lstm(H, H)
    A, c, f = cfg.att_dim, cfg.att_channels, cfg.att_filter
    total += H * A + 2 * s * A + c * A + c * 1 * f + A  # wq, wh, wf, conv, v
    total += (H + 2 * s) * H + H                        # combine
    total += H * cfg.vocab + cfg.vocab
    return total


def count_vgg_transformer(cfg: VggTransformerConfig):
    total = _vgg(cfg.features, cfg.vgg_channels, cfg.vgg_kernel)
    vout = _vgg_out(cfg.features, cfg.vgg_channels)
    d, f = cfg.d_model, cfg.ffn
    total += vout * d + d
    total += cfg.enc_layers * _enc_layer(d, f) + 2 * d
    total += cfg.vocab * cfg.tgt_embed
    cc, kc = cfg.dec_conv_channels, cfg.dec_conv_kernel
    cin = cfg.tgt_embed
    for _ in range(cfg.dec_conv_layers):
        total += cc * cin * kc + cc + 2 * cc
        cin = cc
    total += cin * d + d
    total += cfg.dec_layers * _dec_layer(d, f) + 2 * d
    total += d * cfg.vocab + cfg.vocab
    return total


def count_transformer_text(cfg: TransformerTextConfig):
    d, f = cfg.d_model, cfg.ffn
    total = cfg.src_vocab * d + cfg.tgt_vocab * d
    if cfg.positions == "learned":
        total += 2 * cfg.max_len * d
    total += cfg.enc_layers * _enc_layer(d, f) + 2 * d
    total += cfg.dec_layers * _dec_layer(d, f) + 2 * d
    total += d * cfg.tgt_vocab + cfg.tgt_vocab
    return total


_COUNTERS = {
    BerardConfig: count_berard,
    VggLstmConfig: count_vgg_lstm,
    VggTransformerConfig: count_vgg_transformer,
    TransformerTextConfig: count_transformer_text,
}


def count_parameters(config):
    """Analytic parameter count for any architecture config, no allocation."""
    for cls, fn in _COUNTERS.items():
        if isinstance(config, cls):
            return fn(config)
    raise TypeError(f"no counter for config type {type(config).__name__}")
