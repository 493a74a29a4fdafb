"""Single ensemble empirical mode decomposition (SEEMD) for bearing fault detection.

The package bundles EMD and its noise-assisted variants, a VMD baseline,
envelope-spectrum diagnostics and a bearing vibration simulator.
"""

from .analysis import (
    BearingGeometry,
    EnvelopeSpectrum,
    EnvsiReport,
    Spectrogram,
    envelope,
    envelope_spectrum,
    envsi,
    fault_frequencies,
    spectrogram,
)
from .decomposers import (
    EemdConfig,
    SeemdConfig,
    VmdConfig,
    decompose,
    eemd,
    seemd,
    select_informative_imf,
    vmd,
)
from .emd import Decomposition, SiftConfig, emd, find_extrema, sift_one_imf, spline_envelope
from .errors import SeemdError
from .noise import FgnParams, NoiseSpec, convoluted_wgn, fgn_autocovariance, generate_fgn, generate_wgn
from .signal import Signal, kurtosis, summary_stats
from .simulator import SimConfig, simulate_bearing

__version__ = "0.1.0"

__all__ = [
    "BearingGeometry", "Decomposition", "EemdConfig", "EnvelopeSpectrum", "EnvsiReport",
    "FgnParams", "NoiseSpec", "SeemdConfig", "SeemdError", "SiftConfig", "Signal", "SimConfig",
    "Spectrogram", "VmdConfig", "convoluted_wgn", "decompose", "eemd", "emd", "envelope",
    "envelope_spectrum", "envsi", "fault_frequencies", "fgn_autocovariance", "find_extrema",
    "generate_fgn", "generate_wgn", "kurtosis", "seemd", "select_informative_imf",
    "sift_one_imf", "simulate_bearing", "spectrogram", "spline_envelope", "summary_stats", "vmd",
    "__version__",
]
