"""Beta function of knots: B_K(s) = int int |gamma(x) - gamma(y)|^s dx dy.

Evaluation for smooth and polygonal knots, meromorphic continuation with
poles and residues, Moebius energy, and first/second variations.
"""

import os as _os

# KNOTBETA_THREADS caps the threads of the numerical libraries; it must be
# applied before numpy is imported.
_threads = _os.environ.get("KNOTBETA_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .continuation import (  # noqa: E402
    ContinuationConfig,
    ResidueReport,
    beta_direct,
    beta_eval,
    beta_residue,
    pole_scan,
    regularity_scan,
)
from .energy import EnergyReport, arc_power_integral, mobius_energy, energy_identity_check  # noqa: E402
from .errors import (  # noqa: E402
    ConfigError,
    KnotBetaError,
    KnotError,
    PoleProximityError,
    ResampleError,
)
from .knot import (  # noqa: E402
    ArcFrame,
    Knot,
    circle_knot,
    ellipse_knot,
    fourier_knot,
    make_knot,
    polygon_knot,
    resample_arclength,
    torus_knot,
)
from .polygonal import polygon_beta, polygon_residues, split_edge  # noqa: E402
from .special import MeroValue, circle_beta, circle_residue, gamma  # noqa: E402
from .variational import (  # noqa: E402
    bernstein_apply,
    gradient_field,
    poisson_bracket,
)

__version__ = "0.1.0"

__all__ = [
    "ArcFrame", "ConfigError", "ContinuationConfig", "EnergyReport", "Knot", "KnotBetaError",
    "KnotError", "MeroValue", "PoleProximityError", "ResampleError", "ResidueReport",
    "arc_power_integral", "bernstein_apply", "beta_direct", "beta_eval", "beta_residue",
    "circle_beta", "circle_knot", "circle_residue", "ellipse_knot", "fourier_knot", "gamma",
    "gradient_field", "make_knot", "mobius_energy", "poisson_bracket", "pole_scan",
    "polygon_beta", "polygon_knot", "polygon_residues", "energy_identity_check", "regularity_scan",
    "resample_arclength", "split_edge", "torus_knot",
]
