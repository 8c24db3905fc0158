"""CRC-aided and multi-CRC-aided polar codes with SC, SCL and reduced-complexity SCL decoding."""
from .channel import ChannelConfig, channel_llr, modulate, transmit
from .crc import CRC2, CRC10, CRC16, CrcSpec, crc_append, crc_check, crc_remainder, get_crc
from .decoder import (
    CrcCheck,
    DecodeResult,
    LVector,
    list_decode,
    rscl_decode,
    sc_decode,
    scl_decode,
    survivor_schedule,
)
from .multicrc import MultiCrcLayout, build_layout, multicrc_encode, multicrc_rscl_decode
from .oracle import wn_probability_oracle
from .polar import (
    ConstructionSpec,
    PolarCode,
    construct_frozen_set,
    kron_encode,
    lowest_set_bit_index,
    msb_truncate,
)
from .sim import SimConfig, SimResult, complexity_report, parse_config, run_bler_sweep

__version__ = "0.1.0"
