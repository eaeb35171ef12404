"""Parameter container and validity rules for the GARTFIMA family.

A GARTFIMA(p, d, lambda, u, q) process solves

    Phi(B) (1 - 2 u e^{-lambda} B + e^{-2 lambda} B^2)^d X_t = Theta(B) eps_t

with Phi(B) = 1 - sum phi_j B^j and Theta(B) = 1 + sum theta_j B^j.
Pinning parameters recovers the classical special cases:

* ``u = 1``            ARTFIMA with fractional order ``2d``
* ``u = 1, lambda = 0`` ARFIMA with fractional order ``2d``
* ``lambda = 0``        GARMA
* ``d = 0``             ARMA
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import ar_polynomial, ma_polynomial

__all__ = [
    "ModelFamily",
    "ModelSpec",
    "Reduction",
    "ValidationReport",
    "validate",
    "reduce",
    "polynomial_roots_outside",
]

ROOT_TOL = 1e-9


class ModelFamily(str, enum.Enum):
    GARTFIMA = "GARTFIMA"
    ARTFIMA = "ARTFIMA"
    ARFIMA = "ARFIMA"
    GARMA = "GARMA"
    GEGENBAUER = "GEGENBAUER"
    ARMA = "ARMA"

    @classmethod
    def parse(cls, value) -> "ModelFamily":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True)
class ModelSpec:
    """Full GARTFIMA parameter set.

    ``lam`` is the tempering rate; it serializes under the key ``lambda``.
    """

    d: float = 0.0
    lam: float = 0.0
    u: float = 0.0
    ar: tuple = field(default_factory=tuple)
    ma: tuple = field(default_factory=tuple)
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(x) for x in np.atleast_1d(self.ar)))
        object.__setattr__(self, "ma", tuple(float(x) for x in np.atleast_1d(self.ma)))
        for name in ("d", "lam", "u", "sigma2"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def p(self) -> int:
        return len(self.ar)

    @property
    def q(self) -> int:
        return len(self.ma)

    def replace(self, **changes) -> "ModelSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "ar": list(self.ar),
            "ma": list(self.ma),
            "d": self.d,
            "lambda": self.lam,
            "u": self.u,
            "sigma2": self.sigma2,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelSpec":
        unknown = set(doc) - {"ar", "ma", "d", "lambda", "u", "sigma2"}
        if unknown:
            raise KeyError(f"unknown model keys: {sorted(unknown)}")
        return cls(
            d=doc.get("d", 0.0),
            lam=doc.get("lambda", 0.0),
            u=doc.get("u", 0.0),
            ar=tuple(doc.get("ar", ())),
            ma=tuple(doc.get("ma", ())),
            sigma2=doc.get("sigma2", 1.0),
        )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def raise_if_invalid(self):
        from .errors import DomainError

        if self.violations:
            raise DomainError("; ".join(self.violations))


@dataclass(frozen=True)
class Reduction:
    family: ModelFamily
    effective_d: float


def polynomial_roots_outside(coeffs, tol: float = ROOT_TOL) -> bool:
    """True if every root of the ascending-power polynomial lies outside |z| = 1 + tol.

    Works on the reciprocal polynomial (the same coefficients read in
    descending order), whose roots are the inverses.  It is monic here, so
    tiny trailing coefficients do not overflow the companion matrix.
    """
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size <= 1:
        return True
    inv_roots = np.roots(coeffs)
    return bool(np.all(np.abs(inv_roots) < 1.0 / (1.0 + tol)))


def validate(spec: ModelSpec, family: Optional[ModelFamily] = None,
             strict: bool = True) -> ValidationReport:
    """Collect every violated validity condition of ``spec``.

    With ``strict=True`` the GARTFIMA region ``|u| < 1`` applies.  The
    reduction-evaluation mode (``strict=False``) admits ``|u| = 1``, as do the
    ARTFIMA and ARFIMA families (which pin ``u = 1``) and the pure Gegenbauer
    family.  At ``|u| = 1`` with ``lambda = 0`` stationarity needs ``d < 1/4``.
    """
    family = ModelFamily.parse(family) if family is not None else None
    out = []
    values = {"d": spec.d, "lambda": spec.lam, "u": spec.u, "sigma2": spec.sigma2}
    for name, val in values.items():
        if not math.isfinite(val):
            out.append(f"{name} must be finite (got {val})")
    if not all(map(math.isfinite, spec.ar + spec.ma)):
        out.append("ARMA coefficients must be finite")
    if out:
        return ValidationReport(tuple(out))

    allow_unit_u = not strict or family in (
        ModelFamily.ARTFIMA, ModelFamily.ARFIMA, ModelFamily.GEGENBAUER)
    if not abs(spec.d) < 0.5:
        out.append(f"|d| < 1/2 violated (d = {spec.d})")
    if spec.lam < 0:
        out.append(f"lambda >= 0 violated (lambda = {spec.lam})")
    if abs(spec.u) > 1:
        out.append(f"|u| <= 1 violated (u = {spec.u})")
    elif abs(spec.u) == 1 and not allow_unit_u:
        out.append(f"|u| < 1 violated (u = {spec.u}); |u| = 1 needs reduction mode")
    if abs(spec.u) == 1 and spec.lam == 0 and spec.d >= 0.25:
        out.append(f"d < 1/4 violated at |u| = 1, lambda = 0 (d = {spec.d})")
    if not spec.sigma2 > 0:
        out.append(f"sigma2 > 0 violated (sigma2 = {spec.sigma2})")
    if not polynomial_roots_outside(ar_polynomial(spec.ar)):
        out.append("AR root on or inside unit circle")
    if not polynomial_roots_outside(ma_polynomial(spec.ma)):
        out.append("MA root on or inside unit circle")

    if family is ModelFamily.ARTFIMA and spec.u != 1:
        out.append(f"ARTFIMA requires u = 1 (u = {spec.u})")
    elif family is ModelFamily.ARFIMA and (spec.u != 1 or spec.lam != 0):
        out.append(f"ARFIMA requires u = 1 and lambda = 0 (u = {spec.u}, lambda = {spec.lam})")
    elif family in (ModelFamily.GARMA, ModelFamily.GEGENBAUER) and spec.lam != 0:
        out.append(f"{family.value} requires lambda = 0 (lambda = {spec.lam})")
    elif family is ModelFamily.ARMA and spec.d != 0:
        out.append(f"ARMA requires d = 0 (d = {spec.d})")
    if family is ModelFamily.GEGENBAUER and (spec.ar or spec.ma):
        out.append("GEGENBAUER has no ARMA part")
    return ValidationReport(tuple(out))


def reduce(spec: ModelSpec) -> Reduction:
    """Classify ``spec`` by which parameters are pinned.

    ``effective_d`` is the fractional order in the family's own
    parametrisation (``2d`` for the ARTFIMA/ARFIMA reductions).
    """
    if spec.d == 0:
        return Reduction(ModelFamily.ARMA, 0.0)
    if spec.u == 1:
        fam = ModelFamily.ARFIMA if spec.lam == 0 else ModelFamily.ARTFIMA
        return Reduction(fam, 2.0 * spec.d)
    if spec.lam == 0:
        return Reduction(ModelFamily.GARMA, spec.d)
    return Reduction(ModelFamily.GARTFIMA, spec.d)
