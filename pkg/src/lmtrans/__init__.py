"""Memory of nonlinear transformations of long-memory linear processes.

Simulation of FARIMA and Type-I series, power ranks of transformations,
theoretical memory classes, GPH estimation and Monte Carlo table harness.
"""

from .farima import Kind, ProcessSpec, Series, simulate
from .innovations import InnovationSpec, Law
from .power_rank import MarginalSampler, power_rank
from .spectral import MemoryEstimate, gph_estimate, periodogram
from .theory import Label, MemoryClass, classify_covariance, classify_spectral
from .transforms import Transform, apply_values, parse_transform

__version__ = "0.1.0"

__all__ = [
    "Kind",
    "ProcessSpec",
    "Series",
    "simulate",
    "InnovationSpec",
    "Law",
    "MarginalSampler",
    "power_rank",
    "MemoryEstimate",
    "gph_estimate",
    "periodogram",
    "Label",
    "MemoryClass",
    "classify_covariance",
    "classify_spectral",
    "Transform",
    "parse_transform",
    "apply_values",
]
