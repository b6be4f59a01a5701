"""Sinusoid parameter and model-order estimation from one-bit signed
measurements taken against fixed or time-varying thresholds.

The package provides the sampling model (`sigmodel`), stable one-bit
likelihood primitives (`likelihood`), FFT/chirp-zoom spectral transforms
(`spectral`), the majorize-minimize refinement engine (`mmcore`), the
greedy/relaxed/MM estimator drivers with BIC order selection (`relax`),
and a deterministic Monte Carlo benchmark harness (`bench`).
"""

from . import bench, cli, likelihood, mmcore, relax, sigmodel, spectral
from .likelihood import ScaledParams
from .mmcore import MmConfig, mm_minimize
from .relax import (EstimateReport, RelaxConfig, bic_select, estimate,
                    one_bit_clean, one_bit_mm_relax, one_bit_relax)
from .sigmodel import (RngState, SignedRecord, SinusoidSet, ThresholdSpec,
                       sample_one_bit, snr_to_sigma, synth)

__version__ = "0.1.0"

__all__ = [
    "ScaledParams", "MmConfig", "mm_minimize", "EstimateReport",
    "RelaxConfig", "bic_select", "estimate", "one_bit_clean",
    "one_bit_mm_relax", "one_bit_relax", "RngState", "SignedRecord",
    "SinusoidSet", "ThresholdSpec", "sample_one_bit", "snr_to_sigma",
    "synth",
]
