"""Weights on the grid: Muckenhoupt-type constants, reverse Holder constants,
doubling, the closed-form self-improvement schedule, and weight generators.

Constants are exact finite maxima over the attached base family.  Every
computed constant is cached on the weight, keyed by (kind, exponent,
base id), so one run never recomputes (or re-rounds) the same number.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lattice
from .errors import BadParams, ExponentOutOfRange, OverflowGuard
from .lattice import BaseFamily, BaseSet, GridDomain, Measure, fsum
from .reports import CertificateReport, make_check

# Above this magnitude an exponentiated cell value is considered unsafe and
# the constant is computed in log space instead.
_OVERFLOW_LIMIT = 1e300
_LOG_LIMIT = math.log(_OVERFLOW_LIMIT)

SELF_IMPROVEMENT_SETTINGS = ("euclidean-cubes", "rectangles", "homogeneous",
                             "non-doubling")

WEIGHT_KINDS = ("power", "random-log-bounded", "rubio-a1", "checkerboard")


def conjugate(p: float) -> float:
    """Dual exponent p' = p / (p - 1)."""
    if p <= 1.0:
        raise ExponentOutOfRange(f"conjugate needs p > 1, got {p}")
    return p / (p - 1.0)


@dataclass(eq=False)
class Weight:
    """Strictly positive cell values plus a provenance tag and constant cache."""

    domain: GridDomain
    values: np.ndarray
    provenance: dict = field(default_factory=dict)
    _records: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != self.domain.sides:
            raise BadParams(f"weight shape {values.shape} != domain {self.domain.sides}")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise BadParams("weight values must be finite and strictly positive")
        values.setflags(write=False)
        self.values = values

    @classmethod
    def unit(cls, domain: GridDomain) -> "Weight":
        return cls(domain, np.ones(domain.sides), provenance={"kind": "unit"})

    @property
    def digest(self) -> str:
        cached = getattr(self, "_digest", None)
        if cached is None:
            h = hashlib.sha256()
            h.update(repr(self.domain.sides).encode())
            h.update(self.values.tobytes())
            cached = h.hexdigest()[:12]
            object.__setattr__(self, "_digest", cached)
        return cached

    def record(self, key):
        return self._records.get(key)

    def cached_constants(self) -> dict:
        out = {}
        for key, rec in sorted(self._records.items(), key=lambda kv: repr(kv[0])):
            out["|".join(str(k) for k in key)] = {
                "value": float(rec.value),
                "argmax": rec.argmax.label() if rec.argmax is not None else None,
            }
        return out


@dataclass(frozen=True)
class ConstantRecord:
    value: float
    argmax: BaseSet | None


def _needs_log_space(values: np.ndarray, exponents) -> bool:
    top = float(np.max(np.abs(np.log(values))))
    return any(abs(e) * top > _LOG_LIMIT for e in exponents)


def _avg_pow(values, masses, box, e, mass_of_box) -> float:
    """Plain-space mean of values**e over the box."""
    sl = box.slices()
    return fsum((values[sl] ** e) * masses[sl]) / mass_of_box


def _log_avg_pow(logv, masses, box, e, log_mass) -> float:
    """log of the mean of exp(e*logv) over the box, overflow-safe."""
    sl = box.slices()
    m = masses[sl]
    pos = m > 0
    a = e * logv[sl][pos] + np.log(m[pos])
    top = float(np.max(a))
    return top + math.log(fsum(np.exp(a - top))) - log_mass


def _finite_or_raise(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise OverflowGuard(f"{what} left the representable range; rescale the weight")
    return value


def muckenhoupt_constant(w: Weight, p: float, base: BaseFamily,
                         measure: Measure) -> float:
    """Largest over the base of (mean of w) * (mean of w^(-1/(p-1)))^(p-1).

    Always >= 1 by Jensen; equals 1 exactly on single cells.  Requires p > 1.
    Records the attaining set on the weight's cache.
    """
    if not p > 1.0:
        raise ExponentOutOfRange(f"the A_p functional needs p > 1, got {p}")
    key = ("ap", float(p), base.base_id, measure.digest)
    got = w.record(key)
    if got is not None:
        return got.value
    e = -1.0 / (p - 1.0)
    set_masses = base.set_masses(measure)
    best, arg = -math.inf, None
    if _needs_log_space(w.values, (1.0, e, p - 1.0)):
        logv = np.log(w.values)
        for box, mass in zip(base.sets, set_masses):
            lm = math.log(mass)
            val = (_log_avg_pow(logv, measure.masses, box, 1.0, lm)
                   + (p - 1.0) * _log_avg_pow(logv, measure.masses, box, e, lm))
            if val > best:
                best, arg = val, box
        result = _finite_or_raise(math.exp(best), "A_p constant")
    else:
        for box, mass in zip(base.sets, set_masses):
            val = (_avg_pow(w.values, measure.masses, box, 1.0, mass)
                   * _avg_pow(w.values, measure.masses, box, e, mass) ** (p - 1.0))
            if val > best:
                best, arg = val, box
        result = _finite_or_raise(best, "A_p constant")
    w._records[key] = ConstantRecord(result, arg)
    return result


def reverse_holder_constant(w: Weight, delta: float, base: BaseFamily,
                            measure: Measure) -> float:
    """Largest over the base of (mean of w^delta)^(1/delta) / (mean of w)."""
    if not delta > 1.0:
        raise ExponentOutOfRange(f"the reverse Holder functional needs delta > 1, got {delta}")
    key = ("rh", float(delta), base.base_id, measure.digest)
    got = w.record(key)
    if got is not None:
        return got.value
    set_masses = base.set_masses(measure)
    best, arg = -math.inf, None
    if _needs_log_space(w.values, (1.0, delta)):
        logv = np.log(w.values)
        for box, mass in zip(base.sets, set_masses):
            lm = math.log(mass)
            val = (_log_avg_pow(logv, measure.masses, box, delta, lm) / delta
                   - _log_avg_pow(logv, measure.masses, box, 1.0, lm))
            if val > best:
                best, arg = val, box
        result = _finite_or_raise(math.exp(best), "reverse Holder constant")
    else:
        for box, mass in zip(base.sets, set_masses):
            val = (_avg_pow(w.values, measure.masses, box, delta, mass) ** (1.0 / delta)
                   / _avg_pow(w.values, measure.masses, box, 1.0, mass))
            if val > best:
                best, arg = val, box
        result = _finite_or_raise(best, "reverse Holder constant")
    w._records[key] = ConstantRecord(result, arg)
    return result


def a1_constant(w: Weight, base: BaseFamily, measure: Measure,
                mode: str = "auto") -> float:
    """Smallest C with (maximal of w) <= C * w on positive-mass cells.

    ``mode`` picks the maximal operator: "auto" resolves to dyadic on dyadic
    base kinds and uncentered otherwise.
    """
    from . import operators

    if mode == "auto":
        mode = "dyadic" if base.kind in lattice.DYADIC_KINDS else "uncentered"
    key = ("a1", mode, base.base_id, measure.digest)
    got = w.record(key)
    if got is not None:
        return got.value
    mw = operators.maximal(w.values, base, measure, operators.MaximalKind(mode))
    live = measure.masses > 0
    ratios = np.zeros(w.values.shape)
    ratios[live] = mw[live] / w.values[live]
    flat_idx = int(np.argmax(ratios.ravel()))
    result = float(ratios.ravel()[flat_idx])
    cell = np.unravel_index(flat_idx, w.values.shape)
    arg = BaseSet(tuple(int(c) for c in cell), tuple(int(c) + 1 for c in cell))
    w._records[key] = ConstantRecord(result, arg)
    return result


def doubling_constant(w: Weight, measure: Measure) -> float:
    """Max ratio of parent to child weighted mass over single-axis halvings.

    Runs over the full per-axis dyadic lattice of the domain down to single
    cells.  A step of a stopping-time walk that bisects d axes then has
    weighted-mass ratio at most D^d.  Children of zero weighted mass are
    skipped (they never enter a walk); returns at least 1.
    """
    domain = w.domain
    wm = w.values * measure.masses
    best = 1.0
    cache: dict[BaseSet, float] = {}

    def wmass(box: BaseSet) -> float:
        got = cache.get(box)
        if got is None:
            got = fsum(wm[box.slices()])
            cache[box] = got
        return got

    for box in lattice.iter_dyadic_boxes(domain):
        child = wmass(box)
        if child <= 0.0:
            continue
        for axis in range(domain.dims):
            parent = lattice.axis_parent(box, axis, domain)
            if parent is None:
                continue
            ratio = wmass(parent) / child
            if ratio > best:
                best = ratio
    return best


@dataclass(frozen=True)
class SelfImprovementParams:
    """Geometry knobs for the closed-form integrability-bump schedule.

    ``dims`` feeds the cube-geometry formula; ``besicovitch`` is the covering
    constant used only by the non-doubling setting; ``tau``/``kconst`` are
    the homogeneous-setting decay and constant.
    """

    setting: str = "euclidean-cubes"
    dims: int = 1
    besicovitch: float = 2.0
    tau: float = 4.0
    kconst: float = 2.0

    def __post_init__(self):
        if self.setting not in SELF_IMPROVEMENT_SETTINGS:
            raise BadParams(f"unknown self-improvement setting {self.setting!r}")
        if self.besicovitch <= 0 or self.tau <= 0 or self.kconst < 1:
            raise BadParams("besicovitch and tau must be positive, kconst >= 1")


def self_improvement(params: SelfImprovementParams, p: float,
                     t: float) -> tuple[float, float]:
    """Closed-form (Delta, K): every weight whose strength constant at
    exponent p is at most t satisfies a reverse Holder inequality with
    exponent Delta(p, t) and constant at most K(p, t).

    Delta > 1, nonincreasing in each argument; K >= 1, nondecreasing.
    """
    if not p > 1.0:
        raise ExponentOutOfRange(f"self-improvement needs p > 1, got {p}")
    if t < 1.0:
        raise BadParams(f"the strength constant is never below 1, got t={t}")
    s = params.setting
    if s == "euclidean-cubes":
        delta = 1.0 + 1.0 / (2.0 ** (params.dims + 1) * t - 1.0)
        return delta, 2.0
    if s == "rectangles":
        delta = 1.0 + 1.0 / (2.0 ** (p + 2.0) * t)
        return delta, 2.0
    if s == "non-doubling":
        delta = 1.0 + 1.0 / (2.0 ** (p + 1.0) * params.besicovitch * t)
        return delta, 2.0
    # homogeneous
    delta = 1.0 + 1.0 / (params.tau * t)
    return delta, params.kconst


def power_bump_check(u: Weight, p: float, delta: float, base: BaseFamily,
                     measure: Measure, tol: float = 1e-9) -> CertificateReport:
    """Certified bump: with q = 1 + delta*(p-1), the A_q constant of u^delta
    is at most (RH_delta(u) * A_p(u))^delta.  One check, computed constants.
    """
    if not p > 1.0 or not delta > 1.0:
        raise ExponentOutOfRange(f"power bump needs p > 1 and delta > 1, got {p}, {delta}")
    q = 1.0 + delta * (p - 1.0)
    rh = reverse_holder_constant(u, delta, base, measure)
    ap = muckenhoupt_constant(u, p, base, measure)
    if _needs_log_space(u.values, (delta,)):
        raise OverflowGuard("u**delta is not representable; rescale the weight")
    bumped = Weight(u.domain, u.values ** delta,
                    provenance={"kind": "derived-power", "exponent": float(delta),
                                "parent": u.digest})
    lhs = muckenhoupt_constant(bumped, q, base, measure)
    rhs = (rh * ap) ** delta
    report = CertificateReport(
        theorem="POWER_BUMP",
        inputs_digest=hashlib.sha256(
            (u.digest + repr((float(p), float(delta))) + base.base_id).encode()
        ).hexdigest()[:16],
        checks=[make_check("bumped_aq_vs_product", lhs, rhs, tol)],
        meta={"p": float(p), "delta": float(delta), "q": float(q),
              "rh": float(rh), "ap": float(ap), "base": base.base_id},
    )
    return report


# ---------------------------------------------------------------------------
# Generators.

def generate_weight(kind: str, params: dict, seed: int, domain: GridDomain,
                    base: BaseFamily | None = None,
                    measure: Measure | None = None) -> Weight:
    """Deterministic weight construction.

    Kinds: ``power`` (distance-to-origin power law, exponent > -dims),
    ``random-log-bounded`` (iid log-uniform in [-M, M]), ``checkerboard``
    (alternating c and 1/c), and ``rubio-a1`` (iterated-maximal construction,
    needs ``base`` and ``measure``).
    """
    params = dict(params or {})
    if kind == "power":
        a = float(params.get("exponent", 1.0))
        if a <= -domain.dims:
            raise BadParams(f"power exponent must exceed {-domain.dims}, got {a}")
        if domain.dims == 1:
            n = domain.sides[0]
            x = (np.arange(n) + 0.5) / n
            vals = x ** a
        else:
            n0, n1 = domain.sides
            x = (np.arange(n0) + 0.5)[:, None] / n0
            y = (np.arange(n1) + 0.5)[None, :] / n1
            vals = (x ** 2 + y ** 2) ** (a / 2.0)
        return Weight(domain, vals, provenance={"kind": kind, "seed": int(seed),
                                                "params": {"exponent": a}})
    if kind == "random-log-bounded":
        bound = float(params.get("bound", 1.0))
        if bound <= 0:
            raise BadParams(f"log bound must be positive, got {bound}")
        rng = np.random.default_rng(seed)
        vals = np.exp(rng.uniform(-bound, bound, size=domain.sides))
        return Weight(domain, vals, provenance={"kind": kind, "seed": int(seed),
                                                "params": {"bound": bound}})
    if kind == "checkerboard":
        contrast = float(params.get("contrast", 2.0))
        if contrast <= 0:
            raise BadParams(f"contrast must be positive, got {contrast}")
        idx = np.indices(domain.sides).sum(axis=0)
        vals = np.where(idx % 2 == 0, contrast, 1.0 / contrast).astype(float)
        return Weight(domain, vals, provenance={"kind": kind, "seed": int(seed),
                                                "params": {"contrast": contrast}})
    if kind == "rubio-a1":
        from . import operators

        if base is None or measure is None:
            raise BadParams("rubio-a1 needs a base family and a measure")
        p = float(params.get("p", 2.0))
        mode = str(params.get("mode", "dyadic" if base.kind in lattice.DYADIC_KINDS
                              else "uncentered"))
        tol = float(params.get("tol", 1e-10))
        g = params.get("g")
        if g is None:
            rng = np.random.default_rng(seed)
            g = np.zeros(domain.sides)
            live = np.flatnonzero(measure.masses.ravel() > 0)
            spike = live[int(rng.integers(len(live)))]
            g.ravel()[spike] = 1.0
        u = operators.rubio_de_francia(np.asarray(g, dtype=float), p, base, measure,
                                       operators.MaximalKind(mode), tol=tol)
        u.provenance.setdefault("seed", int(seed))
        return u
    raise BadParams(f"unknown weight kind {kind!r}")


# ---------------------------------------------------------------------------
# Serialization: weight CSV plus JSON sidecar with provenance and cache.

def write_weight(path, weight: Weight) -> None:
    path = Path(path)
    lattice.write_field_csv(path, weight.domain, weight.values)
    sidecar = {
        "provenance": weight.provenance,
        "digest": weight.digest,
        "constants": weight.cached_constants(),
    }
    path.with_suffix(".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n")


def read_weight(path) -> Weight:
    path = Path(path)
    domain, values = lattice.read_field_csv(path)
    provenance = {}
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        provenance = json.loads(sidecar.read_text()).get("provenance", {})
    return Weight(domain, values, provenance=provenance)
