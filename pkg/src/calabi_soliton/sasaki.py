"""Parameter algebra of eta-Einstein Sasaki structures.

Only the scalar data entering the radial reduction is modelled: the complex
dimension ``m`` of the transverse space, the eta-Einstein constants
``alpha`` and ``beta`` (with ``alpha + beta = 2m``) and the transverse
Einstein constant ``kappa = alpha + 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

ALPHA_ATOL = 1e-12


@dataclass(frozen=True)
class EtaEinsteinStructure:
    """Eta-Einstein structure ``Ric_g = alpha g + beta eta (x) eta``.

    ``beta`` and ``kappa`` are derived, so ``alpha + beta == 2m`` and
    ``kappa == alpha + 2`` hold by construction.
    """

    m: int
    alpha: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def beta(self) -> float:
        return 2 * self.m - self.alpha

    @property
    def kappa(self) -> float:
        return self.alpha + 2.0

    @property
    def is_sasaki_einstein(self) -> bool:
        return abs(self.beta) <= ALPHA_ATOL

    def isclose(self, other: "EtaEinsteinStructure", atol: float = ALPHA_ATOL) -> bool:
        return self.m == other.m and abs(self.alpha - other.alpha) <= atol

    def to_dict(self) -> dict:
        return {"m": self.m, "alpha": self.alpha, "beta": self.beta, "kappa": self.kappa}


@dataclass(frozen=True)
class LineBundleData:
    """Line bundle ``L^{-k}`` over a Fano manifold with ``K_M = L^{-p}``."""

    p: int
    k: int

    def __post_init__(self):
        for name in ("p", "k"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.k)

    def kappa(self) -> float:
        return bundle_kappa(self)

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k, "kappa": self.kappa()}


@dataclass(frozen=True)
class ConeAperture:
    """Cone metric ``C i ddbar (r^{2q} / 2q)``."""

    amplitude: float
    exponent: float

    def __post_init__(self):
        if not (self.amplitude > 0 and self.exponent > 0):
            raise ValueError(
                f"aperture needs positive amplitude and exponent, got C={self.amplitude}, q={self.exponent}"
            )

    def potential(self, r):
        return aperture_potential(self, r)

    def to_dict(self) -> dict:
        return {"C": self.amplitude, "q": self.exponent}


def make_eta_einstein(m: int, alpha: float) -> EtaEinsteinStructure:
    return EtaEinsteinStructure(m=m, alpha=float(alpha))


def from_kappa(m: int, kappa: float) -> EtaEinsteinStructure:
    return EtaEinsteinStructure(m=m, alpha=float(kappa) - 2.0)


def d_homothety(e: EtaEinsteinStructure, factor: float) -> EtaEinsteinStructure:
    """Apply the D-homothetic deformation ``r -> r**factor``.

    The transverse Ricci form is unchanged while the transverse Kahler form
    scales by ``factor``, so the new Einstein constant is ``kappa / factor``.
    """
    if not factor > 0:
        raise ValueError(f"D-homothety factor must be positive, got {factor}")
    return EtaEinsteinStructure(m=e.m, alpha=(e.alpha + 2.0 - 2.0 * factor) / factor)


def normalize_to_kappa(e: EtaEinsteinStructure, target_kappa: float):
    """Return ``(factor, structure)`` with the structure's kappa equal to ``target_kappa``.

    Only same-sign normalizations exist; two zero constants give factor 1.
    """
    k0 = e.kappa
    if k0 == 0 and target_kappa == 0:
        return 1.0, e
    if k0 == 0 or target_kappa == 0 or (k0 > 0) != (target_kappa > 0):
        raise ValueError(
            f"cannot D-homothetically move kappa={k0} to kappa'={target_kappa}: signs must agree"
        )
    factor = k0 / target_kappa
    # the target alpha is written directly so that kappa matches exactly
    return factor, EtaEinsteinStructure(m=e.m, alpha=float(target_kappa) - 2.0)


def bundle_kappa(b: LineBundleData) -> float:
    return 2.0 * b.p / b.k


def aperture_potential(c: ConeAperture, r):
    """Radial Kahler potential ``C r^{2q} / (2q)`` of the aperture cone."""
    q = c.exponent
    return c.amplitude * r ** (2.0 * q) / (2.0 * q)
