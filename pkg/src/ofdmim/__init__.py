"""Multi-user OFDM with index modulation: uplink and downlink link-level simulation."""

__version__ = "0.1.0"

from ._validation import ConfigError
from .analytics import SchemeParams, papr_bound, papr_ccdf, spectral_efficiency
from .channel import ChannelRealization, apply_downlink, apply_uplink, draw_channel
from .frame import assemble_group, deinterleave, interleave, papr_of, to_freq_domain, to_time_domain
from .harness import BerRecord, LinkConfig, run_downlink_trial, run_sweep, run_uplink_trial
from .linkproc import build_precoder, detect_group, equalize_uplink, mmse_filter, receiver_scale
from .lookup import LookupTable, bits_to_indices, build_lookup, indices_to_bits
from .modem import Constellation, demodulate, modulate, qam
from .estimators import MMSEEqualizer, MMSEPrecoder, OfdmImModulator

__all__ = [
    "BerRecord", "ChannelRealization", "ConfigError", "Constellation", "LinkConfig",
    "LookupTable", "MMSEEqualizer", "MMSEPrecoder", "OfdmImModulator", "SchemeParams",
    "apply_downlink", "apply_uplink", "assemble_group", "bits_to_indices", "build_lookup",
    "build_precoder", "deinterleave", "demodulate", "detect_group", "draw_channel",
    "equalize_uplink", "indices_to_bits", "interleave", "mmse_filter", "modulate",
    "papr_bound", "papr_ccdf", "papr_of", "qam", "receiver_scale", "run_downlink_trial",
    "run_sweep", "run_uplink_trial", "spectral_efficiency", "to_freq_domain", "to_time_domain",
]
