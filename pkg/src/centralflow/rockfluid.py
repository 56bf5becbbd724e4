"""Two-phase fluid closures: relative permeabilities, mobility, fractional flow.

The model is quadratic (Corey-type) relative permeabilities normalized so that
``krw(1) = 1`` and ``kro(0) = 1``::

    krw(s) = ((s - s_rw) / (1 - s_rw))^2        on s in [s_rw, 1]
    kro(s) = (1 - s / (1 - s_ro))^2             on s in [0, 1 - s_ro]

Water transport only ever sees saturations in the physical range
``[s_rw, 1 - s_ro]``; mobility and fractional flow clamp their argument into
that range, which keeps ``f`` within [0, 1] even when a limiter overshoots.

Any object exposing ``fractional_flow``, ``fractional_flow_derivative`` and
``max_abs_flux_derivative`` can stand in for :class:`FluidModel` in the
transport schemes (the test suite uses a linear-flux stand-in).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class FluidModel:
    """Viscosities (cP) and residual saturations of the water/oil pair."""

    mu_w: float = 0.05
    mu_o: float = 10.0
    s_rw: float = 0.2
    s_ro: float = 0.15

    def __post_init__(self):
        if self.mu_w <= 0 or self.mu_o <= 0:
            raise ValueError("viscosities must be positive")
        if not (0 <= self.s_rw < 1 - self.s_ro <= 1):
            raise ValueError(
                f"residual saturations must satisfy 0 <= s_rw < 1 - s_ro <= 1, "
                f"got s_rw={self.s_rw}, s_ro={self.s_ro}"
            )

    @property
    def s_min(self) -> float:
        return self.s_rw

    @property
    def s_max(self) -> float:
        return 1.0 - self.s_ro

    def krw(self, s):
        """Water relative permeability; monotone nondecreasing, krw(s_rw) = 0."""
        sc = np.clip(s, self.s_rw, 1.0)
        return ((sc - self.s_rw) / (1.0 - self.s_rw)) ** 2

    def kro(self, s):
        """Oil relative permeability; monotone nonincreasing, kro(1 - s_ro) = 0."""
        sc = np.clip(s, 0.0, self.s_max)
        return (1.0 - sc / self.s_max) ** 2

    def _phase_mobilities(self, s):
        sc = np.clip(s, self.s_rw, self.s_max)
        a = ((sc - self.s_rw) / (1.0 - self.s_rw)) ** 2 / self.mu_w
        b = (1.0 - sc / self.s_max) ** 2 / self.mu_o
        return sc, a, b

    def total_mobility(self, s):
        """lambda(s) = krw/mu_w + kro/mu_o, strictly positive on the clamped range."""
        _, a, b = self._phase_mobilities(s)
        return a + b

    def fractional_flow(self, s):
        """Water flux fraction f = (krw/mu_w) / lambda; 0 at s_rw, 1 at 1 - s_ro."""
        _, a, b = self._phase_mobilities(s)
        return a / (a + b)

    def fractional_flow_derivative(self, s):
        """Analytic df/ds (quotient rule); zero outside the physical range."""
        sc, a, b = self._phase_mobilities(s)
        da = 2.0 * (sc - self.s_rw) / ((1.0 - self.s_rw) ** 2 * self.mu_w)
        db = -2.0 * (1.0 - sc / self.s_max) / (self.s_max * self.mu_o)
        return (da * b - a * db) / (a + b) ** 2

    def fractional_flow_second_derivative(self, s):
        """Analytic d2f/ds2 on the clamped range (used to locate df/ds extrema)."""
        sc, a, b = self._phase_mobilities(s)
        da = 2.0 * (sc - self.s_rw) / ((1.0 - self.s_rw) ** 2 * self.mu_w)
        db = -2.0 * (1.0 - sc / self.s_max) / (self.s_max * self.mu_o)
        dda = 2.0 / ((1.0 - self.s_rw) ** 2 * self.mu_w)
        ddb = 2.0 / (self.s_max**2 * self.mu_o)
        u = da * b - a * db
        du = dda * b - a * ddb
        return (du * (a + b) - 2.0 * u * (da + db)) / (a + b) ** 3

    @cached_property
    def flux_derivative_critical_points(self) -> tuple:
        """Interior zeros of d2f/ds2, bracketed on a dense scan and refined.

        These are the only interior extrema of df/ds, so the maximum of |df/ds|
        over any interval is attained at an endpoint or at one of these points.
        """
        lo, hi = self.s_rw, self.s_max
        ss = np.linspace(lo, hi, 513)
        vals = self.fractional_flow_second_derivative(ss)
        roots = []
        for i in range(len(ss) - 1):
            va, vb = vals[i], vals[i + 1]
            if va == 0.0:
                roots.append(ss[i])
            elif va * vb < 0.0:
                roots.append(brentq(self.fractional_flow_second_derivative, ss[i], ss[i + 1]))
        return tuple(r for r in roots if lo < r < hi)

    def max_abs_flux_derivative(self, lo, hi):
        """Exact max of |df/ds| over [lo, hi] elementwise (endpoints + critical points)."""
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        best = np.maximum(
            np.abs(self.fractional_flow_derivative(lo)),
            np.abs(self.fractional_flow_derivative(hi)),
        )
        for c in self.flux_derivative_critical_points:
            inside = (lo < c) & (c < hi)
            best = np.where(inside, np.maximum(best, abs(float(self.fractional_flow_derivative(c)))), best)
        return best
