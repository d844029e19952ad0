"""Jamming-resistant linear receivers for a massive-MIMO uplink."""

from .model import (BlockRealization, InvalidParameterError, PilotCodebook, SystemParams,
                    build_codebook, data_rx, derive_rng, pilot_rx, sample_channels,
                    sample_jamming_sequence)
from .estimation import (ChannelEstimates, Coefficients, compute_sigma, despread,
                         effective_coefficients, estimate_g, estimate_h)
from .filters import FilterKind, ReceiveFilter, mmse_type, mrc, zf_type
from .rate import (McConfig, RateEstimate, SinrBreakdown, achievable_rate, achievable_rates,
                   combine, effective_sinr, sinr_terms_mc)
from .closed_form import (AppendixTerms, ClosedFormInputs, appendix_terms_mmse,
                          rate_from_closed_form, rho_asymptotic, rho_mmse_approx, rho_zf_approx)

__version__ = "0.1.0"
