"""Verification report records and their JSON / CSV / table renderings.

JSON and CSV carry floats at full precision (shortest round-trip repr) with
infinities spelled ``"inf"``; tables use 6 significant digits. Wall times are
kept on the in-memory records only, so rendered reports stay byte-identical
across runs.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

QUANTITY_KEYS = ("H", "I", "F", "W")


@dataclass
class Check:
    name: str
    rho: str
    mu: str | None
    quantities: dict
    margins: list
    verdict: str
    case: str
    point: tuple[float, float] | None = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def sort_key(self):
        return (self.name, self.rho, self.mu or "", self.point or ())


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    def extend(self, checks):
        self.checks.extend(checks)
        return self

    def sorted(self) -> "VerificationReport":
        return VerificationReport(self.suite, self.seed, sorted(self.checks, key=Check.sort_key))

    @property
    def summary(self) -> dict:
        passed = sum(c.passed for c in self.checks)
        return {"total": len(self.checks), "passed": passed, "failed": len(self.checks) - passed}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def encode_number(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_number(x):
    if isinstance(x, str):
        return float(x)
    return x


def check_to_dict(c: Check) -> dict:
    return {
        "name": c.name,
        "rho": c.rho,
        "mu": c.mu,
        "point": None if c.point is None else [encode_number(v) for v in c.point],
        "quantities": {k: encode_number(c.quantities.get(k)) for k in QUANTITY_KEYS},
        "margins": [encode_number(m) for m in c.margins],
        "verdict": c.verdict,
        "case": c.case,
    }


def check_from_dict(d: dict) -> Check:
    q = {k: decode_number(v) for k, v in d["quantities"].items()}
    point = d.get("point")
    return Check(
        name=d["name"], rho=d["rho"], mu=d["mu"], quantities=q,
        margins=[decode_number(m) for m in d["margins"]],
        verdict=d["verdict"], case=d["case"],
        point=None if point is None else tuple(decode_number(v) for v in point),
    )


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "suite": report.suite,
        "seed": report.seed,
        "checks": [check_to_dict(c) for c in report.checks],
        "summary": report.summary,
    }


def report_from_dict(d: dict) -> VerificationReport:
    return VerificationReport(d["suite"], d["seed"], [check_from_dict(c) for c in d["checks"]])


def to_json(report: VerificationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n"


def _csv_num(x):
    if x is None:
        return ""
    x = encode_number(x)
    return x if isinstance(x, str) else repr(x)


def to_csv(report: VerificationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "rho", "mu", "x", "y", *QUANTITY_KEYS, "margins", "verdict", "case"])
    for c in report.checks:
        x, y = c.point if c.point is not None else (None, None)
        w.writerow([
            c.name, c.rho, c.mu or "", _csv_num(x), _csv_num(y),
            *(_csv_num(c.quantities.get(k)) for k in QUANTITY_KEYS),
            ";".join(_csv_num(m) for m in c.margins), c.verdict, c.case,
        ])
    return buf.getvalue()


def fmt6(x) -> str:
    if x is None:
        return "-"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def _short(s, width=28):
    if s is None:
        return "-"
    return s if len(s) <= width else s[: width - 3] + "..."


def to_table(report: VerificationReport) -> str:
    head = ["name", "rho", "mu", "point", *QUANTITY_KEYS, "min margin", "verdict", "case"]
    rows = []
    for c in report.checks:
        point = "-" if c.point is None else f"({fmt6(c.point[0])}, {fmt6(c.point[1])})"
        finite = [m for m in c.margins if m is not None]
        rows.append([
            c.name, _short(c.rho), _short(c.mu), point,
            *(fmt6(c.quantities.get(k)) for k in QUANTITY_KEYS),
            fmt6(min(finite)) if finite else "-", c.verdict, c.case,
        ])
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(wd) for h, wd in zip(head, widths))]
    lines += ["  ".join(v.ljust(wd) for v, wd in zip(r, widths)).rstrip() for r in rows]
    s = report.summary
    lines.append(f"suite={report.suite} seed={report.seed} total={s['total']} "
                 f"passed={s['passed']} failed={s['failed']}")
    return "\n".join(lines) + "\n"
