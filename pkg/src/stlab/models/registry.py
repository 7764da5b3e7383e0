"""Named architecture profiles and the model builder."""

from __future__ import annotations

import numpy as np

from .berard import BerardConfig, BerardModel
from .transformer import TransformerTextConfig, TransformerTextModel
from .vgg_lstm import VggLstmConfig, VggLstmModel
from .vgg_transformer import VggTransformerConfig, VggTransformerModel

SPEECH_ARCHS = ("berard", "vgg_lstm", "vgg_transformer")
TEXT_ARCHS = ("transformer_text",)


def berard_profile(profile, vocab):
    if profile == "desk":
        return BerardConfig(vocab=vocab, nonlinear=(48, 32), conv_channels=4,
                            lstm_hidden=32, embed=32, dec_hidden=64, att_dim=48,
                            dec_layers=2)
    if profile == "paper":
        # widths chosen to land on the published 8.9M total (char vocab)
        return BerardConfig(vocab=vocab, nonlinear=(256, 128), conv_channels=16,
                            lstm_hidden=256, embed=128, dec_hidden=512, att_dim=512,
                            dec_layers=2, logit_bottleneck=128)
    if profile == "paper-3dec":
        # the extended variant pairs with the 10k-piece vocabulary
        return BerardConfig(vocab=vocab, nonlinear=(256, 128), conv_channels=16,
                            lstm_hidden=256, embed=128, dec_hidden=512, att_dim=512,
                            dec_layers=3, logit_bottleneck=128)
    raise KeyError(f"unknown berard profile {profile!r}")


def vgg_lstm_profile(profile, vocab):
    if profile == "desk":
        return VggLstmConfig(vocab=vocab, vgg_channels=(4, 8), lstm_size=64,
                             embed=64, dec_hidden=64, att_dim=64, att_channels=10,
                             att_filter=13)
    if profile == "paper":
        return VggLstmConfig(vocab=vocab)
    raise KeyError(f"unknown vgg_lstm profile {profile!r}")


def vgg_transformer_profile(profile, vocab):
    if profile == "desk":
        return VggTransformerConfig(vocab=vocab, vgg_channels=(4, 8), d_model=64,
                                    enc_layers=14, dec_layers=4, heads=16, ffn=256,
                                    dropout=0.15, tgt_embed=8, dec_conv_channels=16)
    if profile == "paper":
        return VggTransformerConfig(vocab=vocab)
    raise KeyError(f"unknown vgg_transformer profile {profile!r}")


def transformer_text_profile(profile, src_vocab, tgt_vocab):
    if profile == "desk":
        return TransformerTextConfig(src_vocab=src_vocab, tgt_vocab=tgt_vocab,
                                     d_model=64, enc_layers=2, dec_layers=2, heads=2,
                                     ffn=128, dropout=0.0, max_len=256)
    if profile == "big":
        return TransformerTextConfig(src_vocab=src_vocab, tgt_vocab=tgt_vocab,
                                     d_model=1024, enc_layers=6, dec_layers=6,
                                     heads=16, ffn=4096, dropout=0.1)
    if profile == "base":
        return TransformerTextConfig(src_vocab=src_vocab, tgt_vocab=tgt_vocab,
                                     d_model=512, enc_layers=6, dec_layers=6,
                                     heads=8, ffn=2048, dropout=0.1)
    raise KeyError(f"unknown transformer_text profile {profile!r}")


def make_config(arch, profile, *, vocab=None, src_vocab=None, tgt_vocab=None,
                overrides=None):
    if arch == "berard":
        cfg = berard_profile(profile, vocab)
    elif arch == "vgg_lstm":
        cfg = vgg_lstm_profile(profile, vocab)
    elif arch == "vgg_transformer":
        cfg = vgg_transformer_profile(profile, vocab)
    elif arch == "transformer_text":
        cfg = transformer_text_profile(profile, src_vocab, tgt_vocab)
    else:
        raise KeyError(f"unknown architecture {arch!r}")
    for key, value in (overrides or {}).items():
        if not hasattr(cfg, key):
            raise KeyError(f"{arch} config has no field {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, tuple):
            value = tuple(value)
        elif current is not None and not isinstance(value, type(current)):
            value = type(current)(value)
        setattr(cfg, key, value)
    return cfg


def build_model(arch, config, seed=0, dtype=np.float32):
    if arch == "berard":
        return BerardModel(config, seed=seed, dtype=dtype)
    if arch == "vgg_lstm":
        return VggLstmModel(config, seed=seed, dtype=dtype)
    if arch == "vgg_transformer":
        return VggTransformerModel(config, seed=seed, dtype=dtype)
    if arch == "transformer_text":
        return TransformerTextModel(config, seed=seed, dtype=dtype)
    raise KeyError(f"unknown architecture {arch!r}")
