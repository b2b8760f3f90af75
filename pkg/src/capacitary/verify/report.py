"""Check results and their serializations (JSON report, CSV summary, TSV curves)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CLAIM_KINDS = ("bound", "exact", "stable", "diagnostic")


def ratio(lhs: float, rhs: float) -> float:
    """lhs/rhs with 0/0 = 0 and x/0 = inf for x > 0."""
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def refinement_ratio(coarse: float, fine: float) -> float:
    """C(L+1)/C(L), with 0/0 read as 1 (no growth)."""
    if coarse == 0:
        return 1.0 if fine == 0 else math.inf
    return fine / coarse


@dataclass
class ClaimResult:
    """One inequality or identity of a check, evaluated at every refinement level.

    ``bound`` claims need every ratio <= bound (1 + rtol); ``exact`` claims
    need every ratio within rtol of ``value``; ``bound`` and ``stable``
    claims also need all ratios finite and C_emp growth <= the stability
    threshold between consecutive levels. ``diagnostic`` claims are reported
    but never gate the check.
    """

    name: str
    kind: str
    statement: str
    levels: list[int]
    ratios: list[list[float]]
    bound: float | None = None
    value: float | None = None
    rtol: float = 0.0
    threshold: float = 2.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise ValueError(f"unknown claim kind {self.kind!r}")

    @property
    def c_emp(self) -> list[float]:
        return [max(r) if len(r) else 0.0 for r in self.ratios]

    @property
    def refinement(self) -> float:
        c = self.c_emp
        if len(c) < 2:
            return 1.0
        return max(refinement_ratio(a, b) for a, b in zip(c, c[1:]))

    @property
    def finite(self) -> bool:
        return all(math.isfinite(x) for r in self.ratios for x in r)

    @property
    def passed(self) -> bool | None:
        if self.kind == "diagnostic":
            return None
        if not self.finite:
            return False
        if self.kind == "exact":
            tol = self.rtol * abs(self.value)
            return all(abs(x - self.value) <= tol for r in self.ratios for x in r)
        if self.kind == "bound" and any(x > self.bound * (1 + self.rtol) for r in self.ratios for x in r):
            return False
        return self.refinement <= self.threshold

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "statement": self.statement,
            "bound": self.bound,
            "value": self.value,
            "rtol": self.rtol,
            "levels": self.levels,
            "c_emp": self.c_emp,
            "refinement_ratio": self.refinement,
            "passed": self.passed,
            "ratios": self.ratios,
            "extras": self.extras,
        }


@dataclass
class CheckReport:
    check_id: str
    config: dict
    claims: list[ClaimResult]
    runtime: float = 0.0
    started: str = ""

    @property
    def gated(self) -> list[ClaimResult]:
        return [c for c in self.claims if c.kind != "diagnostic"]

    @property
    def primary(self) -> ClaimResult:
        return (self.gated or self.claims)[0]

    @property
    def ratios(self) -> list[float]:
        """Per-sample ratios of the primary claim at the base level."""
        return self.primary.ratios[0]

    @property
    def c_emp(self) -> float:
        return self.primary.c_emp[0]

    @property
    def refinement_ratio(self) -> float:
        vals = [c.refinement for c in self.gated]
        return max(vals) if vals else 1.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.gated)

    def claim(self, name: str) -> ClaimResult:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "passed": self.passed,
            "c_emp": self.c_emp,
            "refinement_ratio": self.refinement_ratio,
            "ratios": self.ratios,
            "config": self.config,
            "claims": [c.to_dict() for c in self.claims],
            "timestamp": {"started": self.started, "runtime_s": self.runtime},
        }

    def to_json(self, include_timestamp: bool = True) -> str:
        d = self.to_dict()
        if not include_timestamp:
            d.pop("timestamp")
        return json.dumps(_clean(d), indent=2, sort_keys=False, allow_nan=True) + "\n"

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.check_id}: C_emp={self.c_emp:.6g} refinement={self.refinement_ratio:.4g} "
                f"claims={len(self.gated)} runtime={self.runtime:.2f}s")


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


SUMMARY_FIELDS = ("check_id", "claim", "kind", "c_emp_coarse", "c_emp_fine", "refinement_ratio", "bound",
                  "passed")


def summary_csv(reports: list[CheckReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for rep in reports:
        for c in rep.claims:
            ce = c.c_emp
            w.writerow([rep.check_id, c.name, c.kind, repr(ce[0]), repr(ce[-1]), repr(c.refinement),
                        "" if c.bound is None else repr(c.bound), "" if c.passed is None else c.passed])
    return buf.getvalue()


def ratio_curve_tsv(claim: ClaimResult) -> str:
    """Sorted per-sample ratios at every level: sample rank, level, ratio."""
    lines = [f"# {claim.name}: rank\tlevel\tratio"]
    for level, r in zip(claim.levels, claim.ratios):
        for i, x in enumerate(sorted(r)):
            lines.append(f"{i}\t{level}\t{x!r}")
    return "\n".join(lines) + "\n"


def write_outputs(rep: CheckReport, out_dir: str | Path, stamp: str) -> Path:
    """reports/<check_id>/<stamp>.json plus plots/<check_id>_<claim>.tsv."""
    out_dir = Path(out_dir)
    rdir = out_dir / "reports" / rep.check_id
    rdir.mkdir(parents=True, exist_ok=True)
    path = rdir / f"{stamp}.json"
    path.write_text(rep.to_json())
    pdir = out_dir / "plots"
    pdir.mkdir(parents=True, exist_ok=True)
    for c in rep.claims:
        (pdir / f"{rep.check_id}_{c.name}.tsv").write_text(ratio_curve_tsv(c))
    return path
