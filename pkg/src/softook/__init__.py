"""Soft-decision reception of Manchester-coded, convolutionally coded OOK."""

__version__ = "0.1.0"

from softook._backend import BACKEND
from softook.convcode import ConvCode, TrellisPath, encode, hard_decode, viterbi_decode
from softook.core import (
    ChannelRealization,
    ComplexSampleFrame,
    DomainError,
    RangeError,
    RngStream,
    StructuralError,
    snr_db_to_noise_power,
    split_stream,
)
from softook.demod import (
    EnvelopeFrame,
    LlrMethod,
    envelope,
    llr_approx_csi,
    llr_approx_scale_free,
    llr_exact,
    llr_hard,
    log_bessel_i0,
)
