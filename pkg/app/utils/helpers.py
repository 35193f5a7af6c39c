"""Plain-text rendering of reports, verdicts and certificates for the CLI."""

from typing import Iterable, Optional

from pydantic import BaseModel

from app.utils.constants import BULLET
from app.utils.types import Certificate, InvariantReport, LegInvariants, TauBounds


def render_tau(tau: Optional[TauBounds]) -> str:
    if tau is None:
        return "not certified"
    if tau.exact is not None:
        return f"{tau.exact} (exact)"
    return f"[{tau.lower}, {tau.upper}]"


def render_report(report: InvariantReport) -> str:
    lines = [
        f"expression: {report.expression}",
        f"Alexander polynomial: {report.alexander.render()}",
        f"Arf: {report.arf}",
        f"genus bound: {report.genus_upper if report.genus_upper is not None else 'unknown'}",
        f"signature: {report.signature}",
        "signature profile (theta/pi):",
    ]
    lines.extend(f"  [{row.start}, {row.end}]  {row.level}" for row in report.profile)
    lines.append(f"rho0: {report.rho0_symbolic}")
    lines.append(f"rho0 interval: [{report.rho0_interval[0]}, {report.rho0_interval[1]}]")
    lines.append(f"tau: {render_tau(report.tau)}")
    if report.legendrian is not None:
        lines.append(f"legendrian: {report.legendrian}")
    if report.first_order:
        lines.append("first-order signatures:")
        lines.extend(BULLET + line for line in report.first_order)
    return "\n".join(lines)


def render_certificate(cert: Certificate) -> str:
    lines = [f"claim: {cert.claim}"]
    if cert.verified:
        lines.append("verified:")
        for check in cert.verified:
            lines.append(f"  [ok] {check.name}" + (f": {check.detail}" if check.detail else ""))
    if cert.assumed:
        lines.append("assumed:")
        lines.extend(f"  [assumed] {a.statement}  ({a.citation})" for a in cert.assumed)
    if cert.failed:
        lines.append("failed:")
        for check in cert.failed:
            lines.append(f"  [FAILED] {check.name}" + (f": {check.detail}" if check.detail else ""))
    if cert.levels:
        lines.append(f"levels: {', '.join(cert.levels)}")
    if cert.notes:
        lines.append("notes:")
        lines.extend(BULLET + note for note in cert.notes)
    lines.append(f"conclusion: {cert.conclusion if cert.asserted else 'not certified'}")
    return "\n".join(lines)


def render_model(model: BaseModel) -> str:
    """``key: value`` lines of a verdict, skipping empty fields."""
    lines = []
    for key, value in model.model_dump(mode="json").items():
        if value is None or value == "" or value == []:
            continue
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(BULLET + str(item) for item in value)
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def render_legendrian(inv: LegInvariants, lower: int, tau: Optional[TauBounds]) -> str:
    lines = [f"tb: {inv.tb}", f"rot: {inv.rot}", f"tau lower bound: {lower}"]
    if tau is not None:
        lines.append(f"tau: {render_tau(tau)}")
    return "\n".join(lines)


def render_tsv(rows: Iterable[tuple], header: tuple[str, ...]) -> str:
    lines = ["\t".join(header)]
    lines.extend("\t".join(str(item) for item in row) for row in rows)
    return "\n".join(lines)
