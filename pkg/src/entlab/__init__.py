"""Typical entanglement of random quantum states.

Haar sampling, entanglement spectra and their closed-form averages, the
log-gas picture of the spectrum, random circuits, decoupling and Gaussian
continuous-variable states, plus the ``lab`` experiment runner.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DensityMatrix,
    EntanglementSpectrum,
    PureState,
    entropy,
    partial_trace,
    purity,
    schmidt_spectrum,
    trace_distance,
)
from .errors import (  # noqa: E402
    CapabilityError,
    ConvergenceError,
    EntlabError,
    InvalidInputError,
    UnsupportedInputError,
)
from .kernels import BACKEND  # noqa: E402
