"""Case builders, checks and the JSON report.

Every CLI subcommand is a builder returning a :class:`Case`: the report
blocks, the radial solution to emit as CSV (if any) and the list of
:class:`Check` records whose failure turns into exit code 3.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classify import bundle_admissibility, completeness_report, extension_check, zero_structure
from .errors import InvalidParameterError
from .flow import CONTINUITY_R, SelfSimilarFlow, cone_limit_error, glue_eternal
from .fullmetric import RadialMetricModel, convergence_study, soliton_identity_residual
from .mu_solver import solve_mu
from .profile import SolitonProfile, ode_residual, phi_closed, phi_prime
from .radial import asymptotic_coefficient, integrate_sigma
from .sasaki import ConeAperture, LineBundleData, from_kappa
from .scalar import (
    ScalarSolitonProfile,
    dphi_scalar,
    phi_scalar,
    positivity_certificate,
    ricci_profile,
    scalar_ode_residual,
)

SCHEMA = 1
DEFAULT_TOL = 1e-8
SLICE_TIMES = (-1e-2, -1e-4, -1e-6, 0.0, 1e-6, 1e-4, 1e-2)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool

    @classmethod
    def below(cls, name, value, tol):
        value = float(value)
        return cls(name, value, float(tol), bool(value <= tol))

    @classmethod
    def flag(cls, name, ok):
        return cls(name, 0.0 if ok else 1.0, 0.0, bool(ok))

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed}


@dataclass
class Case:
    command: str
    params: dict
    blocks: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    solution: object = None
    slices: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def verdicts(self) -> dict:
        """The discrete outcomes a re-run must reproduce."""
        out = {c.name: c.passed for c in self.checks}
        cl = self.blocks.get("classification", {})
        for side in ("left", "right"):
            if side in cl:
                out[f"classification.{side}"] = cl[side]["kind"]
        if "bundle" in cl:
            out["classification.bundle"] = cl["bundle"]["admissible"]
        if "mu_certificate" in self.blocks:
            out["sign_changes"] = self.blocks["mu_certificate"]["sign_changes"]
        return out

    def to_dict(self) -> dict:
        d = {"schema": SCHEMA, "command": self.command, "params": self.params}
        d.update(self.blocks)
        d["checks"] = [c.to_dict() for c in self.checks]
        d["passed"] = self.passed
        d["verdicts"] = self.verdicts()
        d["meta"] = {"package": "calabi_soliton", "version": __version__}
        return d


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(case: Case) -> str:
    return json.dumps(_clean(case.to_dict()), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- shared pieces ------------------------------------------------------------

def max_scaled_residual(pr: SolitonProfile, lo: float | None = None, hi: float = 1e3, n: int = 400) -> float:
    """``max |R| / (1 + |kappa| + |mu| sigma)`` on a log grid."""
    lo = max(pr.a, 1e-3) if lo is None else lo
    sig = np.geomspace(lo, hi, n)
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.abs(ode_residual(pr, sig)) / (1 + abs(pr.kappa) + abs(pr.mu) * sig)
    r = r[np.isfinite(r)]
    return float(r.max()) if r.size else math.nan


def classification_block(pr: SolitonProfile, bundle=None) -> dict:
    left, right = completeness_report(pr)
    out = {"left": left.to_dict(), "right": right.to_dict()}
    if bundle is not None:
        out["bundle"] = bundle.to_dict()
    return out


def _sasaki_block(m, kappa, p=None, k=None, aperture: ConeAperture | None = None) -> dict:
    d = from_kappa(m, kappa).to_dict()
    if p is not None:
        d.update({"p": int(p), "k": int(k)})
    if aperture is not None:
        d["aperture"] = aperture.to_dict()
    return d


# -- builders -----------------------------------------------------------------

def expand_cone_case(m=1, kappa=4.0, mu=-1.0, sigma0=1.0, s_min=-6.0, s_max=40.0, samples=4601,
                     tol=DEFAULT_TOL, zero_scan=1e6) -> Case:
    params = dict(m=m, kappa=kappa, mu=mu, sigma0=sigma0, s_min=s_min, s_max=s_max, samples=samples, tol=tol)
    if not (kappa > 0 and mu < 0):
        raise InvalidParameterError(f"expanding cone solitons need kappa > 0 and mu < 0, got {kappa}, {mu}")
    pr = SolitonProfile.expanding_cone(m, kappa, mu)
    sol = integrate_sigma(pr, sigma0, s_min, s_max, samples)
    amp, err = asymptotic_coefficient(sol, mu, return_error=True)
    ap = ConeAperture(amp, -1.0 / mu)
    zeros = zero_structure(pr, zero_scan)
    case = Case("expand-cone", params, solution=sol)
    case.blocks["sasaki"] = _sasaki_block(m, kappa, aperture=ap)
    case.blocks["profile"] = pr.to_dict()
    case.blocks["classification"] = classification_block(pr)
    cont = cone_limit_error(SelfSimilarFlow(pr), sol, ap, 1e-6)
    case.blocks["asymptotics"] = {"amplitude": amp, "amplitude_error": err, "positive_zeros": len(zeros),
                                  "zero_scan_up_to": zero_scan, "cone_limit_error": cont}
    case.checks += [
        Check.below("ode_residual", max_scaled_residual(pr), tol),
        Check.below("amplitude_relative_error", err / amp, 1e-6),
        Check.flag("no_positive_zero", len(zeros) == 0),
        Check.below("cone_limit_error", cont, 1e-5),
    ]
    return case


def shrink_bundle_case(m=1, p=2, k=1, sigma0=None, s_min=-6.0, s_max=40.0, samples=4601,
                       tol=DEFAULT_TOL) -> Case:
    params = dict(m=m, p=p, k=k, sigma0=sigma0, s_min=s_min, s_max=s_max, samples=samples, tol=tol)
    bundle = bundle_admissibility(p, k, -1)
    if not bundle.admissible:
        raise InvalidParameterError(f"shrinking bundle solitons need 0 < k < p, got p={p}, k={k}")
    kappa = LineBundleData(p, k).kappa()
    a = bundle.a_required
    cert = solve_mu(m, kappa, a)
    pr = SolitonProfile(m, kappa, -1, cert.root, 0.0, a)
    sol = integrate_sigma(pr, a + 1.0 if sigma0 is None else sigma0, s_min, s_max, samples)
    amp, err = asymptotic_coefficient(sol, pr.mu, return_error=True)
    ap = ConeAperture(amp, 1.0 / pr.mu)
    case = Case("shrink-bundle", params, solution=sol)
    case.blocks["sasaki"] = _sasaki_block(m, kappa, p, k, ap)
    case.blocks["profile"] = pr.to_dict()
    case.blocks["mu_certificate"] = cert.to_dict()
    case.blocks["classification"] = classification_block(pr, bundle)
    slope = phi_prime(pr, a)
    case.blocks["asymptotics"] = {"amplitude": amp, "amplitude_error": err}
    case.checks += [
        Check.below("ode_residual", max_scaled_residual(pr), tol),
        Check.below("phi_at_a", abs(pr.phi_at_a()), 1e-10),
        Check.below("slope_at_a_minus_2", abs(slope - 2.0), 1e-8),
        Check.flag("smooth_zero_section", extension_check(pr).kind == "smooth_zero_section"),
        Check.flag("sign_changes_one", cert.sign_changes == 1),
        Check.below("amplitude_relative_error", err / amp, 1e-6),
    ]
    return case


def expand_bundle_case(m=1, p=1, k=2, mu=-1.0, sigma0=None, s_min=-6.0, s_max=40.0, samples=4601,
                       tol=DEFAULT_TOL) -> Case:
    params = dict(m=m, p=p, k=k, mu=mu, sigma0=sigma0, s_min=s_min, s_max=s_max, samples=samples, tol=tol)
    bundle = bundle_admissibility(p, k, 1)
    if not bundle.admissible:
        raise InvalidParameterError(f"expanding bundle solitons need k > p, got p={p}, k={k}")
    if not mu < 0:
        raise InvalidParameterError(f"expanding solitons need mu < 0, got {mu}")
    kappa = LineBundleData(p, k).kappa()
    a = bundle.a_required
    pr = SolitonProfile.with_boundary(m, kappa, 1, mu, a)
    sol = integrate_sigma(pr, a + 1.0 if sigma0 is None else sigma0, s_min, s_max, samples)
    amp, err = asymptotic_coefficient(sol, mu, return_error=True)
    ap = ConeAperture(amp, -1.0 / mu)
    case = Case("expand-bundle", params, solution=sol)
    case.blocks["sasaki"] = _sasaki_block(m, kappa, p, k, ap)
    case.blocks["profile"] = pr.to_dict()
    case.blocks["classification"] = classification_block(pr, bundle)
    case.blocks["asymptotics"] = {"amplitude": amp, "amplitude_error": err}
    case.checks += [
        Check.below("ode_residual", max_scaled_residual(pr), tol),
        Check.below("phi_at_a", abs(pr.phi_from_a(0.0)), 1e-10),
        Check.below("slope_at_a_minus_2", abs(phi_prime(pr, a) - 2.0), 1e-8),
        Check.flag("smooth_zero_section", extension_check(pr).kind == "smooth_zero_section"),
        Check.below("amplitude_relative_error", err / amp, 1e-6),
    ]
    return case


def _slices_csv(et) -> str:
    r = np.geomspace(*CONTINUITY_R, 41)
    lines = ["t,r,potential"]
    for t in SLICE_TIMES:
        for ri, v in zip(r, et.potential(t, r)):
            lines.append(f"{t:.17g},{ri:.17g},{float(v):.17g}")
    return "\n".join(lines) + "\n"


def glue_case(m=1, p=2, k=1, s_min=-6.0, s_max=40.0, samples=4601, tol=DEFAULT_TOL) -> Case:
    params = dict(m=m, p=p, k=k, s_min=s_min, s_max=s_max, samples=samples, tol=tol)
    if not (int(p) == p and int(k) == k and 0 < k < p):
        raise InvalidParameterError(f"gluing requires integers 0 < k < p, got p={p}, k={k}")
    et = glue_eternal(m, p, k, s_min, s_max, samples)
    case = Case("glue", params, solution=et.shrink_solution)
    kappa = LineBundleData(p, k).kappa()
    case.blocks["sasaki"] = _sasaki_block(m, kappa, p, k, et.aperture)
    case.blocks["profile"] = et.shrinking.profile.to_dict()
    case.blocks["mu_certificate"] = et.mu_certificate.to_dict()
    eternal = et.to_dict()
    case.blocks["eternal"] = eternal
    case.slices = _slices_csv(et)
    case.checks += [
        Check.below("q_mismatch", abs(et.q - (-1.0 / et.expanding.mu)), 0.0),
        Check.below("amplitude_mismatch", et.amplitude_mismatch, 1e-8),
        Check.below("continuity_error", eternal["continuity_error"], 1e-5),
    ]
    return case


def scalar_case(m=1, kappa=-2.0, c=-4.0, mu=-1.0, tol=DEFAULT_TOL, positivity_up_to=1e4) -> Case:
    params = dict(m=m, kappa=kappa, c=c, mu=mu, tol=tol)
    pr = ScalarSolitonProfile.build(m, kappa, c, mu)
    sig = np.geomspace(1.01, 1e3, 400)
    res = float(np.max(np.abs(scalar_ode_residual(pr, sig))))
    ricci = kappa == -2 and c == -2 * (m + 1)
    block = pr.to_dict()
    block.update({
        "max_residual": res,
        "phi_at_1": float(phi_scalar(pr, 1.0)),
        "dphi_at_1": float(dphi_scalar(pr, 1.0)),
        "ricci_specialization": bool(ricci),
        "positivity_up_to": None,
    })
    case = Case("scalar", params)
    case.checks += [
        Check.below("scalar_residual", res, tol),
        Check.below("boundary_phi", abs(block["phi_at_1"]), 1e-10),
        Check.below("boundary_dphi", abs(block["dphi_at_1"]), 1e-10),
    ]
    if pr.admissible:
        ok = positivity_certificate(pr, positivity_up_to)
        block["positivity_up_to"] = positivity_up_to if ok else None
        case.checks.append(Check.flag("positivity", ok))
    if ricci:
        rp = ricci_profile(m, mu)
        s2 = np.geomspace(1.01, 1e2, 200)
        g = phi_closed(rp, s2)
        dev = float(np.max(np.abs(phi_scalar(pr, s2) - g) / np.abs(g)))
        block["ricci_bridge_error"] = dev
        case.checks.append(Check.below("ricci_bridge", dev, 1e-10))
    case.blocks["scalar"] = block
    return case


def fullmetric_block(pr: SolitonProfile, h: float = 1e-3) -> tuple[dict, list]:
    rep = convergence_study(pr, h=h)
    wrong = soliton_identity_residual(RadialMetricModel.from_profile(pr, h=2 * h), mu=pr.mu + 0.1)
    checks = [
        Check.below("identity_residual", rep.max_identity_residual, 1e-6),
        Check.flag("second_order", abs(rep.convergence_order_estimate - 2.0) <= 0.3),
        Check.flag("wrong_mu_detected", wrong > 1e-2),
    ]
    d = rep.to_dict()
    d["wrong_mu_residual"] = wrong
    return d, checks


BUILDERS = {
    "expand-cone": expand_cone_case,
    "shrink-bundle": shrink_bundle_case,
    "expand-bundle": expand_bundle_case,
    "glue": glue_case,
    "scalar": scalar_case,
}


def rebuild(report: dict) -> Case:
    """Re-run the case recorded in a report."""
    if report.get("schema") != SCHEMA:
        raise InvalidParameterError(f"unsupported report schema {report.get('schema')!r}")
    cmd = report.get("command")
    if cmd not in BUILDERS:
        raise InvalidParameterError(f"report command {cmd!r} cannot be re-run")
    return BUILDERS[cmd](**report["params"])
