"""Moebius energy and the chord-minus-arc comparison functional."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .continuation import (
    ContinuationConfig,
    _chord_log_g,
    _panels,
    _power,
    _symmetric,
    beta_eval,
    series_tables,
)
from .errors import ConfigError
from .special import DEFAULT_GUARD, MeroValue, check_guard

# value of f(-2) stated in the prose of the source text (its formula gives -4)
PRINTED_F_MINUS2 = 4.0


@dataclass
class EnergyReport:
    E: float
    B_minus2: float
    defect: float
    f_minus2: float
    printed_f_minus2: float = PRINTED_F_MINUS2


def arc_distance(frame, x: float, y: float) -> float:
    """Shorter arc between arc-length positions x and y.

    ``frame`` is an ArcFrame or simply the length of the knot.
    """
    length = float(getattr(frame, "length", frame))
    d = abs(x - y) % length
    return min(d, length - d)


def arc_power_integral(length: float, s, guard: float = DEFAULT_GUARD) -> MeroValue:
    """int int d(x,y)^s dx dy = 2^(-s) l^(s+2) / (s+1)."""
    pole, dist = check_guard(s, (-1.0,), guard)
    s = complex(s)
    s = s.real if s.imag == 0 else s
    return MeroValue(complex(2.0 ** (-s) * length ** (s + 2) / (s + 1)), pole, dist)


def difference_functional(frame, s, cfg: ContinuationConfig | None = None) -> complex:
    """int int [|gamma(x)-gamma(y)|^s - d(x,y)^s] dx dy, for Re(s) > -3.

    With h = y - x the shorter arc is |h|, and the integrand is
    |h|^s (G(h)^(s/2) - 1).  Below the switch radius it is replaced by its
    series, whose leading term is h_2(s, x) |h|^(s+2), integrated exactly.
    """
    if complex(s).real <= -3:
        raise ConfigError("difference functional converges for Re(s) > -3 only")
    cfg = cfg or ContinuationConfig()
    s = complex(s)
    s = s.real if s.imag == 0 else s
    l, w = frame.length, frame.weight
    h_sw = cfg.h_switch or min(0.05 / float(np.max(frame.kappa)), l / 32)
    coeffs = series_tables(frame).at(s)
    integrals = coeffs.sum(axis=1) * w
    near = 0.0
    for i in range(2, len(coeffs), 2):
        near = near + 2 * h_sw ** (s + i + 1) / (s + i + 1) * integrals[i]
    h, wh = _panels(h_sw, l / 2, cfg, l, cfg.gauss_order)
    h, wh = _symmetric(h, wh)
    logg = _chord_log_g(frame, h)
    habs = _power(np.log(np.abs(h)), s)[:, None]
    far = w * np.sum(wh[:, None] * habs * np.expm1((s / 2) * logg))
    return complex(far + near)


def mobius_energy(frame, cfg: ContinuationConfig | None = None) -> float:
    """E(K) = int int [chord^-2 - arc^-2] dx dy; its diagonal limit is kappa^2/12."""
    return difference_functional(frame, -2.0, cfg).real


def energy_identity_check(frame, cfg: ContinuationConfig | None = None) -> EnergyReport:
    """Compare B(-2) from the continuation with E - 4."""
    b = beta_eval(frame, -2.0, cfg).value.real
    e = mobius_energy(frame, cfg)
    f = arc_power_integral(frame.length, -2.0).value.real
    return EnergyReport(E=e, B_minus2=b, defect=abs(b - (e - 4.0)), f_minus2=f)
