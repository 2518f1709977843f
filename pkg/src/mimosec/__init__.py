"""MU-MIMO downlink physical-layer security simulation toolkit."""

from .channel import ChannelSet, an_null_precoder, generate_channels, perturb_csi
from .errors import (ConfigurationError, DegenerateInputError,
                     DegenerateOrderingError, DimensionError, MimosecError,
                     SingularMatrixError, ValidationError)
from .flopmodel import FlopLedger, gmi_pipeline_flops
from .harness import (SweepConfig, SweepRecord, emit_results, load_config,
                      read_records, run_sweep)
from .lattice import LatticeReduction, clll_reduce
from .metrics import (BerCounter, SecrecyReport, ber_accumulate, capacity_max,
                      capacity_user, flops_measured, secrecy_limit,
                      secrecy_rate, secrecy_rate_an)
from .modem import (SymbolFrame, demap_symbols, map_symbols, modulo_reduce,
                    power_normalizer, qam_scale, qam_tau)
from .numerics import QrSplit, SvdSplit, mmse_inverse, qr_split, svd_split
from .precoders import (PrecodingSolution, apply_an, bd_precoder, gmi_filters,
                        mmse_precoder, sgmi_filters, so_thp_solve,
                        thp_assemble, thp_receive, thp_transmit, zf_precoder)

__version__ = "0.1.0"
