"""Stored reference energies and the reproduction report built from them."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .ansatz import AnsatzConfig, AnsatzSolveError, solve
from .polynomial import parse_potential
from .quadrature import QuadratureConfig, QuadratureError, first_order_correction
from .ritz import RitzConfig, RitzError, converge_ground_state

__all__ = [
    "ReferenceRow",
    "PaperReferenceTable",
    "ReportRow",
    "Report",
    "RITZ_RELATIVE_TOLERANCE",
    "PERCENT_TOLERANCE",
    "BOUND_SLACK",
    "percent_deviation",
    "build_report",
]

RITZ_RELATIVE_TOLERANCE = 1e-7
PERCENT_TOLERANCE = 0.1
BOUND_SLACK = 1e-8
DEFAULT_EPPS_TOLERANCE = 1e-6

MAIZ_NOTE = (
    "maiz column is echoed reference data only; compare its deviation from the "
    "converged Ritz energy with the number of digits it prints"
)


@dataclass(frozen=True)
class ReferenceRow:
    potential: str
    rpm: float
    source: str
    maiz: Optional[float] = None
    epps: Optional[float] = None
    epps_tol: float = DEFAULT_EPPS_TOLERANCE
    percent_error: Optional[float] = None
    degree: Optional[int] = None


@dataclass(frozen=True)
class PaperReferenceTable:
    rows: tuple

    @classmethod
    def from_dict(cls, data: dict) -> "PaperReferenceTable":
        if "rows" not in data or not isinstance(data["rows"], list):
            raise ValueError("reference data must contain a 'rows' list")
        rows = []
        for i, raw in enumerate(data["rows"]):
            for key in ("potential", "rpm", "source"):
                if key not in raw:
                    raise ValueError(f"reference row {i} lacks {key!r}")
            if not isinstance(raw["rpm"], (int, float)):
                raise ValueError(f"reference row {i}: rpm must be a number")
            known = {k: raw[k] for k in ReferenceRow.__dataclass_fields__ if k in raw}
            if known.get("epps_tol") is None:
                known.pop("epps_tol", None)
            rows.append(ReferenceRow(**known))
        return cls(tuple(rows))

    @classmethod
    def load(cls, path: str | Path | None = None) -> "PaperReferenceTable":
        if path is None:
            text = resources.files("anharmonic").joinpath("data/paper_references.json").read_text()
        else:
            text = Path(path).read_text()
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows]}


def percent_deviation(e_epps: float, e_ritz: float) -> float:
    return 100.0 * (e_epps - e_ritz) / e_ritz


@dataclass
class ReportRow:
    potential: str
    exponent_degree: int
    epps_e0: Optional[float] = None
    epps_e1: Optional[float] = None
    epps_total: Optional[float] = None
    ritz_energy: Optional[float] = None
    ritz_frequency: Optional[float] = None
    ritz_basis_size: Optional[int] = None
    rpm_reference: Optional[float] = None
    maiz_reference: Optional[float] = None
    epps_reference: Optional[float] = None
    ritz_relative_deviation: Optional[float] = None
    epps_absolute_deviation: Optional[float] = None
    percent_deviation: Optional[float] = None
    percent_reference: Optional[float] = None
    maiz_relative_deviation: Optional[float] = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(self.checks.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass
class Report:
    rows: list
    notes: list = field(default_factory=list)
    generated_at: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        out = {"rows": [r.to_dict() for r in self.rows], "notes": list(self.notes), "passed": self.passed}
        if self.generated_at is not None:
            out["generated_at"] = self.generated_at
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    _COLUMNS = (
        ("potential", "potential"),
        ("M", "exponent_degree"),
        ("E0", "epps_e0"),
        ("E1", "epps_e1"),
        ("E_epps", "epps_total"),
        ("E_ritz", "ritz_energy"),
        ("E_rpm", "rpm_reference"),
        ("E_maiz", "maiz_reference"),
        ("pct", "percent_deviation"),
        ("status", None),
    )

    def _cells(self, row: ReportRow, fmt) -> list:
        cells = []
        for _, attr in self._COLUMNS:
            if attr is None:
                cells.append("pass" if row.passed else "FAIL")
                continue
            value = getattr(row, attr)
            cells.append("" if value is None else fmt(value))
        return cells

    def to_table(self) -> str:
        def fmt(v):
            return f"{v:.10g}" if isinstance(v, float) else str(v)

        header = [name for name, _ in self._COLUMNS]
        body = [self._cells(r, fmt) for r in self.rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        lines.append("  ".join("-" * w for w in widths))
        for b in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)))
        for r in self.rows:
            failed = [k for k, ok in r.checks.items() if not ok]
            for msg in failed:
                lines.append(f"{r.potential}: check failed: {msg}")
            for msg in r.errors:
                lines.append(f"{r.potential}: error: {msg}")
            for msg in r.notes:
                lines.append(f"{r.potential}: {msg}")
        lines.extend(f"note: {n}" for n in self.notes)
        if self.generated_at is not None:
            lines.append(f"generated: {self.generated_at}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([name for name, _ in self._COLUMNS])
        for r in self.rows:
            writer.writerow(self._cells(r, lambda v: repr(v) if isinstance(v, float) else str(v)))
        return buf.getvalue()


def _evaluate_row(
    ref: ReferenceRow,
    quadrature: QuadratureConfig,
    ritz: RitzConfig,
) -> ReportRow:
    degree = ref.degree
    row = ReportRow(
        potential=ref.potential,
        exponent_degree=degree or 0,
        rpm_reference=ref.rpm,
        maiz_reference=ref.maiz,
        epps_reference=ref.epps,
        percent_reference=ref.percent_error,
    )
    try:
        V = parse_potential(ref.potential)
    except ValueError as exc:
        row.errors.append(f"bad potential: {exc}")
        return row
    try:
        config = AnsatzConfig(degree) if degree else None
        solution = solve(V, config, quadrature)
        row.exponent_degree = solution.exponent_degree
        result = first_order_correction(V, solution, quadrature)
        row.epps_e0, row.epps_e1, row.epps_total = result.e0, result.e1, result.total
        if solution.residual.is_zero():
            row.notes.append("exact: residual vanishes")
    except (AnsatzSolveError, QuadratureError, ValueError) as exc:
        row.errors.append(f"EPPS failed: {exc}")

    try:
        rr = converge_ground_state(V, ritz)
        row.ritz_energy, row.ritz_frequency, row.ritz_basis_size = rr.energy, rr.frequency, rr.basis_size
    except RitzError as exc:
        row.errors.append(f"Ritz failed: {exc}")

    if row.ritz_energy is not None:
        row.ritz_relative_deviation = abs(row.ritz_energy - ref.rpm) / abs(ref.rpm)
        row.checks[f"ritz within {RITZ_RELATIVE_TOLERANCE:g} relative of rpm reference"] = (
            row.ritz_relative_deviation <= RITZ_RELATIVE_TOLERANCE
        )
        if ref.maiz is not None:
            row.maiz_relative_deviation = abs(ref.maiz - row.ritz_energy) / abs(row.ritz_energy)
    if row.epps_total is not None:
        if ref.epps is not None:
            row.epps_absolute_deviation = abs(row.epps_total - ref.epps)
            row.checks[f"epps within {ref.epps_tol:g} of published value"] = (
                row.epps_absolute_deviation <= ref.epps_tol
            )
        else:
            row.notes.append(f"EPPS computed here with M={row.exponent_degree}; no published value to compare")
    if row.epps_total is not None and row.ritz_energy is not None:
        row.percent_deviation = percent_deviation(row.epps_total, row.ritz_energy)
        row.checks["variational bound epps >= ritz"] = row.epps_total >= row.ritz_energy - BOUND_SLACK
        if ref.percent_error is not None:
            row.checks[f"percent deviation within {PERCENT_TOLERANCE:g} of {ref.percent_error:g}"] = (
                abs(row.percent_deviation - ref.percent_error) <= PERCENT_TOLERANCE
            )
    return row


def build_report(
    table: PaperReferenceTable | None = None,
    quadrature: QuadratureConfig | None = None,
    ritz: RitzConfig | None = None,
    timestamp: bool = True,
) -> Report:
    """Run EPPS and Ritz on every reference row; failures are recorded per row."""
    table = table or PaperReferenceTable.load()
    quadrature = quadrature or QuadratureConfig()
    ritz = ritz or RitzConfig()
    rows = [_evaluate_row(ref, quadrature, ritz) for ref in table.rows]
    generated = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if timestamp else None
    return Report(rows=rows, notes=[MAIZ_NOTE], generated_at=generated)
