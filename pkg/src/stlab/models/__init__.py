"""Model zoo: the three speech architectures plus the text transformer."""

from .base import DecoderState, EncoderOutput
from .berard import BerardConfig, BerardModel
from .vgg_lstm import VggLstmConfig, VggLstmModel
from .vgg_transformer import VggTransformerConfig, VggTransformerModel
from .transformer import TransformerTextConfig, TransformerTextModel
from .attention import AdditiveAttention, HybridAttention
from .counts import count_parameters
from .registry import SPEECH_ARCHS, TEXT_ARCHS, build_model, make_config
from . import layers

__all__ = [
    "DecoderState",
    "EncoderOutput",
    "BerardConfig",
    "BerardModel",
    "VggLstmConfig",
    "VggLstmModel",
    "VggTransformerConfig",
    "VggTransformerModel",
    "TransformerTextConfig",
    "TransformerTextModel",
    "AdditiveAttention",
    "HybridAttention",
    "count_parameters",
    "SPEECH_ARCHS",
    "TEXT_ARCHS",
    "build_model",
    "make_config",
    "layers",
]
