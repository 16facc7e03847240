"""Deterministic hidden-variable models for two labs with settings z and y.

Each model row fixes the four outcomes (lambda_zA, lambda_zB, lambda_yA,
lambda_yB).  Quantum constraints of the form "P(event) = 0" or
"P(event) > 0" are checked against all 16 rows; the no-go engine takes
them as data.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

VALUES = (1, -1)
SETTINGS = ("z", "y")

TABLE_COLUMNS = (
    "lambda_zA", "lambda_zB", "lambda_yA", "lambda_yB",
    "P--|yy", "P-+|yy", "P+-|yy", "P++|yy", "P--|yz", "P--|zy",
)


@dataclass(frozen=True, order=True)
class HVAssignment:
    lambda_zA: int
    lambda_zB: int
    lambda_yA: int
    lambda_yB: int

    def __post_init__(self):
        for v in self.as_tuple():
            if v not in VALUES:
                raise ValueError(f"hidden values must be +-1, got {v}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.lambda_zA, self.lambda_zB, self.lambda_yA, self.lambda_yB)

    def value(self, lab: str, setting: str) -> int:
        return getattr(self, f"lambda_{setting}{lab}")

    def gives(self, signs: str, settings: str) -> bool:
        """Does this row produce outcome ``signs`` (e.g. '--') at ``settings`` (e.g. 'yz')?"""
        want = [1 if s == "+" else -1 for s in signs]
        return all(self.value(lab, s) == w for lab, s, w in zip("AB", settings, want))


@dataclass(frozen=True)
class DMRTableRow:
    assignment: HVAssignment
    p_mm_yy: int
    p_mp_yy: int
    p_pm_yy: int
    p_pp_yy: int
    p_mm_yz: int
    p_mm_zy: int
    starred: bool

    @classmethod
    def from_assignment(cls, a: HVAssignment) -> "DMRTableRow":
        yy = [int(a.gives(s, "yy")) for s in ("--", "-+", "+-", "++")]
        mm_yz, mm_zy = int(a.gives("--", "yz")), int(a.gives("--", "zy"))
        starred = yy[0] == 1 and mm_yz == 0 and mm_zy == 0
        return cls(a, *yy, mm_yz, mm_zy, starred)

    def cells(self) -> tuple[int, ...]:
        return self.assignment.as_tuple() + (
            self.p_mm_yy, self.p_mp_yy, self.p_pm_yy, self.p_pp_yy, self.p_mm_yz, self.p_mm_zy,
        )


def all_assignments() -> list[HVAssignment]:
    """All 16 rows, lambda_zA slowest and lambda_yB fastest, +1 before -1."""
    return [HVAssignment(*v) for v in itertools.product(VALUES, repeat=4)]


def enumerate_dmr() -> list[DMRTableRow]:
    return [DMRTableRow.from_assignment(a) for a in all_assignments()]


def dmr_table_csv(rows: Sequence[DMRTableRow] | None = None) -> str:
    rows = enumerate_dmr() if rows is None else rows
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS + ("starred",))
    for r in rows:
        w.writerow(r.cells() + (int(r.starred),))
    return buf.getvalue()


def dmr_table_json(rows: Sequence[DMRTableRow] | None = None) -> str:
    rows = enumerate_dmr() if rows is None else rows
    out = [dict(zip(TABLE_COLUMNS, r.cells()), starred=r.starred) for r in rows]
    return json.dumps(out, indent=2) + "\n"


def dmr_table_hash() -> str:
    return hashlib.sha256(dmr_table_csv().encode()).hexdigest()


@dataclass(frozen=True)
class Constraint:
    """P(signs | settings) = 0 (``positive=False``) or > 0 (``positive=True``).

    Zero constraints with ``premise=True`` are the ones used to pick out the
    witness rows; the rest only enter the final consistency check.
    """

    signs: str
    settings: str
    positive: bool = False
    premise: bool = True

    def __post_init__(self):
        if len(self.signs) != 2 or any(s not in "+-" for s in self.signs):
            raise ValueError(f"signs must be two of '+-', got {self.signs!r}")
        if len(self.settings) != 2 or any(s not in SETTINGS for s in self.settings):
            raise ValueError(f"settings must be two of {SETTINGS}, got {self.settings!r}")

    def label(self) -> str:
        rel = ">" if self.positive else "="
        return f"P({self.signs}|{self.settings}) {rel} 0"


# The FR predictions: two vanishing yz/zy events, no ++ in zz, and a 1/12 chance of -- in yy.
FR_CONSTRAINTS = (
    Constraint("--", "yz"),
    Constraint("--", "zy"),
    Constraint("++", "zz", premise=False),
    Constraint("--", "yy", positive=True),
)


@dataclass(frozen=True)
class NoGoVerdict:
    verdict: str
    witness: tuple[HVAssignment, ...]
    allowed: tuple[HVAssignment, ...]
    unexplained: tuple[str, ...] = ()

    @property
    def falsified(self) -> bool:
        return self.verdict == "falsified"

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict,
                "witness": [list(a.as_tuple()) for a in self.witness],
                "allowed": [list(a.as_tuple()) for a in self.allowed],
                "unexplained": list(self.unexplained),
            },
            indent=2,
        ) + "\n"


def dmr_no_go(
    constraints: Iterable[Constraint] = FR_CONSTRAINTS,
    rows: Sequence[HVAssignment] | None = None,
) -> NoGoVerdict:
    """Can some mixture of deterministic rows satisfy every constraint?

    A zero constraint forbids every row giving that event; a positive one
    needs at least one permitted row giving it.  The witness rows are those
    producing a positive event while obeying only the premise constraints;
    when the verdict is "falsified" they are exactly the rows that the
    remaining constraints rule out.
    """
    constraints = list(constraints)
    rows = sorted(all_assignments() if rows is None else rows, reverse=True)
    zeros = [c for c in constraints if not c.positive]
    premises = [c for c in zeros if c.premise]
    positives = [c for c in constraints if c.positive]

    def obeys(a, cs):
        return not any(a.gives(c.signs, c.settings) for c in cs)

    allowed = tuple(a for a in rows if obeys(a, zeros))
    witness = tuple(
        a for a in rows if obeys(a, premises) and any(a.gives(c.signs, c.settings) for c in positives)
    )
    unexplained = tuple(
        c.label() for c in positives if not any(a.gives(c.signs, c.settings) for a in allowed)
    )
    verdict = "falsified" if unexplained else "consistent"
    return NoGoVerdict(verdict, witness, allowed, unexplained)


CHSH_ORDER = ("zz", "zy", "yz", "yy")


def lhv_chsh_max(signs: Sequence[int] = (1, 1, 1, -1), strict: bool = True) -> int:
    """Largest sum_k signs[k] E_k over deterministic rows, E_k ordered zz, zy, yz, yy.

    CHSH patterns have an odd number of minus signs; others raise unless
    ``strict`` is off.
    """
    signs = tuple(int(s) for s in signs)
    if len(signs) != 4 or any(s not in VALUES for s in signs):
        raise ValueError(f"need four signs of +-1, got {signs}")
    if strict and signs.count(-1) % 2 == 0:
        raise ValueError(f"{signs} is not a CHSH pattern (needs an odd number of -1)")
    best = -4
    for a in all_assignments():
        s = sum(
            k * a.value("A", st[0]) * a.value("B", st[1]) for k, st in zip(signs, CHSH_ORDER)
        )
        best = max(best, s)
    return best


@dataclass(frozen=True)
class Check:
    """One numeric claim: ``measured`` against ``expected`` under ``comparison``.

    comparison is "abs" (|measured - expected| <= tolerance), "le"
    (measured <= expected + tolerance) or "ge" (measured >= expected).
    """

    name: str
    expected: float
    measured: float
    tolerance: float
    comparison: str = "abs"

    @property
    def passed(self) -> bool:
        m = self.measured
        if not math.isfinite(m):
            return False
        if self.comparison == "abs":
            return abs(m - self.expected) <= self.tolerance
        if self.comparison == "le":
            return m <= self.expected + self.tolerance
        if self.comparison == "ge":
            return m >= self.expected
        raise ValueError(f"unknown comparison {self.comparison!r}")

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


@dataclass(frozen=True)
class WMRReport:
    alpha: float
    checks: tuple[Check, ...]
    warnings: tuple[str, ...] = ()
    distances: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "passed": self.passed,
            "warnings": list(self.warnings),
            "checks": [c.to_dict() for c in self.checks],
            "distances": self.distances,
        }


def wmr_model_check(
    alpha: float,
    times: Sequence[float] | None = None,
    cutoff: int | None = None,
    grid_points: int = 121,
    omega: float = 1.0,
) -> WMRReport:
    """Superposition-versus-mixture comparisons of the FR state at beta = alpha.

    (a) zz pointer statistics and marginal of the state match the
        three-branch mixture;
    (b) rotating one lab only leaves the marginal indistinguishable from
        the matching partial mixture over the whole time sweep;
    (c) rotating both labs to y makes the two diverge.
    """
    # Local imports keep the table logic usable without the numerics stack.
    from .hilbert import default_cutoff
    from .measurement import pointer_probabilities
    from .qfunc import q_distance, q_marginal_XX
    from .states import DISTINCT_AMPLITUDE, fr_mixture, fr_state

    if abs(alpha) < DISTINCT_AMPLITUDE:
        return WMRReport(
            alpha, (), (f"branches not macroscopically distinct at alpha={alpha}; checks skipped",)
        )
    times = tuple(np.linspace(0, 3 * math.pi / 2, 9) if times is None else times)
    cutoff = cutoff or default_cutoff(alpha)
    psi = fr_state("zz", alpha, alpha, cutoff=cutoff).state
    mixes = {k: fr_mixture(k, alpha, alpha, cutoff=cutoff) for k in ("zz", "mixA", "mixB")}
    axis = (-abs(alpha) - 6, abs(alpha) + 6, grid_points)

    def marg(state, ev):
        return q_marginal_XX(state, axis, evolution=ev, omega=omega)

    checks = []
    p_psi = pointer_probabilities(psi).p
    p_mix = pointer_probabilities(mixes["zz"]).p
    checks.append(Check("zz pointer table, state vs mixture", 0.0, float(np.abs(p_psi - p_mix).max()), 1e-3, "le"))
    d0 = q_distance(marg(psi, None), marg(mixes["zz"], None))[0]
    checks.append(Check("zz marginal sup distance, state vs mixture", 0.0, d0, 1e-3, "le"))

    sweep = {"mixB": [], "mixA": []}
    for t in times:
        ev_b = (t, 0.0)
        sweep["mixB"].append(q_distance(marg(psi, ev_b), marg(mixes["mixB"], ev_b))[0])
        ev_a = (0.0, t)
        sweep["mixA"].append(q_distance(marg(psi, ev_a), marg(mixes["mixA"], ev_a))[0])
    checks.append(Check("A-only rotation sweep, max sup distance vs mixB", 0.0, max(sweep["mixB"]), 1e-6, "le"))
    checks.append(Check("B-only rotation sweep, max sup distance vs mixA", 0.0, max(sweep["mixA"]), 1e-6, "le"))

    both = (3 * math.pi / (2 * omega),) * 2
    g_psi = marg(psi, both)
    div = {k: q_distance(g_psi, marg(mixes[k], both))[0] for k in ("mixA", "mixB")}
    for k, v in div.items():
        checks.append(Check(f"double rotation sup distance vs {k}", 0.01, v, 0.0, "ge"))
    return WMRReport(
        alpha,
        tuple(checks),
        distances={"times": [float(t) for t in times], **sweep, "double": div},
    )
