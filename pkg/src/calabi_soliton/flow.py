"""Self-similar Kahler-Ricci flows generated by solitons, and their gluing.

A shrinking soliton (``lam = -1``) flows for ``t < 0`` and an expanding one
(``lam = 1``) for ``t > 0``; in the radial chart both act by pulling back
``r -> |t|^{-lam mu / 2} r`` and scaling by ``|t|``.  As ``t -> 0`` both
converge to a cone ``C i ddbar(r^{2q} / 2q)``; when the exponents and
amplitudes agree the two flows join into an eternal solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, VerificationError
from .mu_solver import MuRootCertificate, solve_mu
from .profile import SolitonProfile
from .radial import RadialSolution, asymptotic_coefficient, integrate_sigma
from .sasaki import ConeAperture, aperture_potential

GLUE_RTOL = 1e-8
CONTINUITY_R = (math.exp(-2.0), math.exp(2.0))


@dataclass(frozen=True)
class SelfSimilarFlow:
    """Flow ``omega_t = lam t gamma_t^* omega`` of a soliton profile."""

    profile: SolitonProfile

    @property
    def lam(self) -> int:
        return self.profile.lam

    @property
    def mu(self) -> float:
        return self.profile.mu

    @property
    def time_domain(self) -> tuple[float, float]:
        return {1: (0.0, math.inf), -1: (-math.inf, 0.0), 0: (-math.inf, math.inf)}[self.lam]

    def contains(self, t: float) -> bool:
        lo, hi = self.time_domain
        if self.lam == 0:
            return math.isfinite(t)
        return lo < t < hi

    def to_dict(self) -> dict:
        lo, hi = self.time_domain
        return {"lambda": self.lam, "mu": self.mu,
                "time_domain": [None if math.isinf(lo) else lo, None if math.isinf(hi) else hi]}


def flow_argument(fl: SelfSimilarFlow, t: float, s):
    """Shifted radial coordinate at which the soliton potential is sampled."""
    if not fl.contains(t):
        raise InvalidParameterError(f"t = {t} is outside the time domain {fl.time_domain}")
    if fl.lam == 1:
        return s + 0.5 * fl.mu * math.log(t)
    if fl.lam == -1:
        return s - 0.5 * fl.mu * math.log(-t)
    return s


def flow_potential(fl: SelfSimilarFlow, sol: RadialSolution, t: float, r):
    """Radial Kahler potential of ``omega_t`` at radius ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise InvalidParameterError("r must be positive")
    arg = flow_argument(fl, t, np.log(r))
    scale = abs(t) if fl.lam != 0 else 1.0
    return scale * sol.potential_at(arg)


def cone_limit(fl: SelfSimilarFlow, sol: RadialSolution) -> ConeAperture:
    """Aperture of the ``t -> 0`` limit: amplitude from the tail, ``q = -lam / mu``."""
    if fl.lam == 0:
        raise InvalidParameterError("steady flows have no t -> 0 cone limit")
    amp = asymptotic_coefficient(sol, fl.mu)
    return ConeAperture(amplitude=amp, exponent=-fl.lam / fl.mu)


def modulo_constant(diff) -> float:
    """Sup-distance of ``diff`` to the nearest constant.

    Kahler potentials are defined up to additive constants, which carry no
    geometric content.
    """
    diff = np.asarray(diff, dtype=float)
    return float(0.5 * (diff.max() - diff.min()))


def cone_limit_error(fl: SelfSimilarFlow, sol: RadialSolution, aperture: ConeAperture,
                     t: float, r=None) -> float:
    """Distance of the flow potential at time ``t`` to the aperture cone potential."""
    r = np.geomspace(*CONTINUITY_R, 41) if r is None else np.asarray(r, dtype=float)
    return modulo_constant(flow_potential(fl, sol, t, r) - aperture_potential(aperture, r))


@dataclass(frozen=True)
class EternalSolution:
    """Shrinking flow for ``t < 0`` joined to an expanding flow for ``t > 0``."""

    shrinking: SelfSimilarFlow
    expanding: SelfSimilarFlow
    aperture: ConeAperture
    translation: float
    shrink_solution: RadialSolution
    expand_solution: RadialSolution
    mu_certificate: MuRootCertificate
    amplitude_expand: float

    @property
    def q(self) -> float:
        return self.aperture.exponent

    @property
    def amplitude_mismatch(self) -> float:
        d = self.aperture.amplitude
        return abs(self.amplitude_expand - d) / d

    def potential(self, t: float, r):
        if t < 0:
            return flow_potential(self.shrinking, self.shrink_solution, t, r)
        if t > 0:
            return flow_potential(self.expanding, self.expand_solution, t, r)
        return aperture_potential(self.aperture, np.asarray(r, dtype=float))

    def continuity_error(self, t_abs: float = 1e-6, r=None) -> float:
        """Largest deviation of the two sides from the cone and from each other at ``|t|``."""
        r = np.geomspace(*CONTINUITY_R, 41) if r is None else np.asarray(r, dtype=float)
        cone = aperture_potential(self.aperture, r)
        minus = self.potential(-t_abs, r)
        plus = self.potential(t_abs, r)
        return max(modulo_constant(minus - cone), modulo_constant(plus - cone),
                   modulo_constant(plus - minus))

    def to_dict(self, t_abs: float = 1e-6) -> dict:
        return {
            "q": self.q,
            "amplitude": self.aperture.amplitude,
            "amplitude_expand": self.amplitude_expand,
            "mu_shrink": self.shrinking.mu,
            "mu_expand": self.expanding.mu,
            "translation": self.translation,
            "continuity_error": self.continuity_error(t_abs),
        }


def glue_eternal(m: int, p: int, k: int, s_min: float = -6.0, s_max: float = 40.0,
                 n: int = 4601) -> EternalSolution:
    """Join the shrinking soliton on ``L^{-k}`` to the expanding cone soliton.

    Both sides share ``kappa = 2p/k``.  The expanding side uses
    ``mu_e = -mu_s`` so that the cone exponents agree, and is translated in
    ``s`` so that its tail amplitude ``E(0)`` matches ``D(0)`` of the
    shrinking side.  The match is re-verified on a fresh integration.
    """
    if not (int(p) == p and int(k) == k and 0 < k < p):
        raise InvalidParameterError(f"gluing needs integers 0 < k < p, got p={p}, k={k}")
    kappa = 2.0 * p / k
    a = p / k - 1.0
    cert = solve_mu(m, kappa, a)
    mu_s = cert.root
    shrink = SolitonProfile(m, kappa, -1, mu_s, 0.0, a)
    sol_s = integrate_sigma(shrink, a + 1.0, s_min, s_max, n)
    d0 = asymptotic_coefficient(sol_s, mu_s)

    expand = SolitonProfile.expanding_cone(m, kappa, -mu_s)
    mu_e = expand.mu
    sol_e = integrate_sigma(expand, 1.0, s_min, s_max, n)
    e0 = asymptotic_coefficient(sol_e, mu_e)
    delta = -0.5 * mu_e * math.log(d0 / e0)
    sol_e2 = integrate_sigma(expand, sol_e.sigma_at(delta), s_min, s_max, n)
    e1 = asymptotic_coefficient(sol_e2, mu_e)
    if abs(e1 - d0) > GLUE_RTOL * d0:
        raise VerificationError(f"amplitudes differ after translation: E = {e1}, D = {d0}")
    return EternalSolution(
        shrinking=SelfSimilarFlow(shrink),
        expanding=SelfSimilarFlow(expand),
        aperture=ConeAperture(amplitude=d0, exponent=1.0 / mu_s),
        translation=delta,
        shrink_solution=sol_s,
        expand_solution=sol_e2,
        mu_certificate=cert,
        amplitude_expand=e1,
    )
