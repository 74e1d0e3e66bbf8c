"""Static device description, flux-to-frequency response, and decoherence.

Device parameters are stored internally in angular frequency (rad/s) and
seconds.  Preset files use experiment-friendly units (GHz, MHz, us) and are
converted on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from . import operators as ops

TWO_PI = 2.0 * math.pi


class FluxInversionError(ValueError):
    """Raised when the flux response cannot be inverted at a requested shift."""


@dataclass(frozen=True)
class DeviceParams:
    """Physical description of the two operating transmons.

    Frequencies, anharmonicities and coupling in rad/s; times in seconds.
    flux_coeffs are the cubic response coefficients (c1, c2, c3) in rad/s
    per flux-unit power.  Infinite T1/Tphi disables the corresponding
    decoherence channel.
    """

    omega1: float
    omega2: float
    eta1: float
    eta2: float
    g: float
    flux_coeffs: tuple[float, float, float]
    t1_q1: float = math.inf
    t1_q2: float = math.inf
    tphi_q1: float = math.inf
    tphi_q2: float = math.inf
    levels: int = 2

    def __post_init__(self):
        if self.omega1 == self.omega2:
            raise ValueError("parametric scheme requires omega1 != omega2")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.levels not in (2, 3):
            raise ValueError("levels must be 2 or 3")
        if self.flux_coeffs[0] == 0:
            raise ValueError("linear flux coefficient c1 must be nonzero")
        for t in (self.t1_q1, self.t1_q2, self.tphi_q1, self.tphi_q2):
            if t <= 0:
                raise ValueError("T1/Tphi must be positive")

    @property
    def dims(self) -> list[int]:
        return [self.levels, self.levels]

    @property
    def dim(self) -> int:
        return self.levels * self.levels

    def without_decoherence(self) -> "DeviceParams":
        return replace(self, t1_q1=math.inf, t1_q2=math.inf,
                       tphi_q1=math.inf, tphi_q2=math.inf)

    def with_levels(self, levels: int) -> "DeviceParams":
        return replace(self, levels=levels)

    @property
    def swap_carrier(self) -> float:
        """Modulation carrier for the |01>/|10> subspace: omega2 - omega1."""
        return self.omega2 - self.omega1

    @property
    def cz_carrier(self) -> float:
        """Modulation carrier for the |11>/|20> subspace: omega11 - omega20."""
        return self.omega2 - self.omega1 - self.eta1


def params_from_dict(raw: dict) -> DeviceParams:
    """Build DeviceParams from the key-value preset schema (GHz/MHz/us)."""
    known = {"omega1_ghz", "omega2_ghz", "eta1_mhz", "eta2_mhz", "g_mhz",
             "flux_coeffs_ghz", "t1_q1_us", "t1_q2_us", "tphi_q1_us",
             "tphi_q2_us", "levels"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown device keys: {sorted(unknown)}")
    c1, c2, c3 = raw.get("flux_coeffs_ghz", (1.0, -0.1, 0.02))

    def us(key, default=math.inf):
        value = raw.get(key, default)
        return math.inf if value in (None, "inf") else float(value) * 1e-6

    return DeviceParams(
        omega1=TWO_PI * raw["omega1_ghz"] * 1e9,
        omega2=TWO_PI * raw["omega2_ghz"] * 1e9,
        eta1=TWO_PI * raw.get("eta1_mhz", 0.0) * 1e6,
        eta2=TWO_PI * raw.get("eta2_mhz", 0.0) * 1e6,
        g=TWO_PI * raw["g_mhz"] * 1e6,
        flux_coeffs=(TWO_PI * c1 * 1e9, TWO_PI * c2 * 1e9, TWO_PI * c3 * 1e9),
        t1_q1=us("t1_q1_us"),
        t1_q2=us("t1_q2_us"),
        tphi_q1=us("tphi_q1_us"),
        tphi_q2=us("tphi_q2_us"),
        levels=int(raw.get("levels", 2)),
    )


def load_preset(name: str, path: str | None = None) -> DeviceParams:
    """Load a named device preset from a JSON file (bundled by default)."""
    if path is None:
        text = resources.files("paragate").joinpath("presets.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    table = json.loads(text)
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(table)}")
    return params_from_dict(table[name])


def flux_response(eps, params: DeviceParams):
    """Frequency shift f(eps) = c1*eps + c2*eps^2 + c3*eps^3 (rad/s)."""
    c1, c2, c3 = params.flux_coeffs
    eps = np.asarray(eps, dtype=float)
    out = eps * (c1 + eps * (c2 + eps * c3))
    return out if out.ndim else float(out)


def invert_flux_response(df, params: DeviceParams, max_iter: int = 50):
    """Invert the cubic response near zero by Newton iteration.

    Starts from the linear estimate df/c1 and requires f'(eps) > 0 along the
    way (monotonic branch).  Accepts scalars or arrays.
    """
    c1, c2, c3 = params.flux_coeffs
    df_arr = np.atleast_1d(np.asarray(df, dtype=float))
    eps = df_arr / c1
    tol = 1e-9 * abs(c1)
    converged = np.zeros(eps.shape, dtype=bool)
    for _ in range(max_iter):
        resid = flux_response(eps, params) - df_arr
        converged = np.abs(resid) <= tol
        if converged.all():
            break
        deriv = c1 + eps * (2.0 * c2 + eps * 3.0 * c3)
        if np.any(deriv <= 0):
            raise FluxInversionError("response not invertible at requested shift")
        eps = eps - resid / deriv
    else:
        raise FluxInversionError("response not invertible at requested shift")
    return eps if np.ndim(df) else float(eps[0])


def collapse_operators(params: DeviceParams) -> list[np.ndarray]:
    """Jump operators on the full space, decay rates already absorbed.

    Per transmon: relaxation sqrt(1/T1) * a and pure dephasing
    sqrt(2/Tphi) * n, so a two-level coherence decays at 1/(2 T1) + 1/Tphi.
    Channels with infinite times are omitted.
    """
    dims = params.dims
    a = ops.lowering(params.levels)
    n = ops.number(params.levels)
    cset: list[np.ndarray] = []
    for site, (t1, tphi) in enumerate([(params.t1_q1, params.tphi_q1),
                                       (params.t1_q2, params.tphi_q2)]):
        if math.isfinite(t1):
            cset.append(math.sqrt(1.0 / t1) * ops.embed(a, site, dims))
        if math.isfinite(tphi):
            cset.append(math.sqrt(2.0 / tphi) * ops.embed(n, site, dims))
    return cset
