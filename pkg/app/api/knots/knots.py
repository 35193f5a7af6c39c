from typing import Any, Dict, List, Optional

from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel, Field

from app.celery.tasks import robust_sweep
from app.services.certificates import filtration_certify, robustness_check
from app.services.facts import FactBook, load_facts
from app.services.knot_expr import invariant_report, parse_knot_expr
from app.services.legendrian import (
    builtin_front,
    front_invariants,
    iterate_satellite,
    parse_front,
    tau_bounds,
    tau_lower_bound,
)
from app.services.primality import is_irreducible, strongly_coprime, strongly_prime
from app.services.rho_ledger import DEFAULT_COMPANION_J, operator_by_name
from app.utils.background_job import SweepJob, get_job, start_job
from app.utils.global_logging import get_logger
from app.utils.parsers import parse_laurent
from app.utils.types import LegInvariants

router = APIRouter(prefix="/api/knots", tags=["knots"])
logger = get_logger("Knots Router")


class FactsReq(BaseModel):
    facts: Optional[str] = Field(
        default=None, description="Facts file text; the published facts when omitted"
    )
    use_facts: bool = Field(default=True, description="False assumes nothing")

    def fact_book(self) -> FactBook:
        if not self.use_facts:
            return FactBook.empty()
        if self.facts is not None:
            return FactBook.from_text(self.facts)
        return load_facts()


class ExpressionReq(FactsReq):
    expression: str


class PolynomialReq(BaseModel):
    polynomial: str
    search_bound: Optional[int] = Field(default=None, ge=1)


class CoprimeReq(BaseModel):
    f: str
    g: str


class LegendrianReq(BaseModel):
    front: Optional[str] = Field(default=None, description="Front word text")
    seam: int = Field(default=0, ge=0)
    builtin: Optional[str] = None
    param: Optional[int] = Field(default=None, description="j or k of a builtin front")
    companion_tb: Optional[int] = None
    companion_rot: int = 0
    iterate: int = Field(default=0, ge=0)
    genus: Optional[int] = Field(default=None, ge=0)


class RobustReq(FactsReq):
    op: str = "R"
    k: int = Field(default=1, ge=1)
    p_values: List[int] = Field(default=[1], min_length=1)
    companion_j: str = DEFAULT_COMPANION_J


class SweepReq(BaseModel):
    op: str = "R"
    k_values: List[int] = Field(..., min_length=1)
    p_values: List[int] = Field(..., min_length=1)
    companion_j: str = DEFAULT_COMPANION_J


@router.post("/invariants")
async def post_invariants(req: ExpressionReq) -> Dict[str, Any]:
    report = invariant_report(parse_knot_expr(req.expression), req.fact_book())
    return report.model_dump(mode="json")


@router.post("/prime")
async def post_prime(req: PolynomialReq) -> Dict[str, Any]:
    return is_irreducible(parse_laurent(req.polynomial)).model_dump(mode="json")


@router.post("/strongly-prime")
async def post_strongly_prime(req: PolynomialReq) -> Dict[str, Any]:
    verdict = strongly_prime(parse_laurent(req.polynomial), req.search_bound)
    return verdict.model_dump(mode="json")


@router.post("/strongly-coprime")
async def post_strongly_coprime(req: CoprimeReq) -> Dict[str, Any]:
    verdict = strongly_coprime(parse_laurent(req.f), parse_laurent(req.g))
    return verdict.model_dump(mode="json")


@router.post("/legendrian")
async def post_legendrian(req: LegendrianReq) -> Dict[str, Any]:
    if (req.front is None) == (req.builtin is None):
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail="give either front or builtin",
        )
    if req.builtin is not None:
        front = builtin_front(req.builtin, req.param)
    else:
        front = parse_front(req.front, req.seam)
    inv = front_invariants(front)
    if req.iterate:
        if req.companion_tb is None:
            raise HTTPException(
                status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                detail="iterate needs companion_tb",
            )
        companion = LegInvariants(tb=req.companion_tb, rot=req.companion_rot)
        inv = iterate_satellite(front, companion, req.iterate)
    tau = tau_bounds(inv, req.genus) if req.genus is not None else None
    return {
        "tb": inv.tb,
        "rot": inv.rot,
        "tau_lower": tau_lower_bound(inv),
        "tau": tau.model_dump() if tau is not None else None,
    }


@router.post("/robust")
async def post_robust(req: RobustReq) -> List[Dict[str, Any]]:
    op = operator_by_name(req.op, req.k, req.companion_j)
    book = req.fact_book()
    return [
        robustness_check(op, book, p).model_dump(mode="json") for p in sorted(set(req.p_values))
    ]


@router.post("/filtration")
async def post_filtration(req: ExpressionReq) -> Dict[str, Any]:
    cert = filtration_certify(parse_knot_expr(req.expression), req.fact_book())
    return cert.model_dump(mode="json")


@router.post("/sweeps/robust", status_code=202)
async def post_robust_sweep(req: SweepReq) -> Dict[str, str]:
    for k in req.k_values:
        operator_by_name(req.op, k, req.companion_j)
    sweep = SweepJob(
        op=req.op,
        k_values=sorted(set(req.k_values)),
        p_values=sorted(set(req.p_values)),
        companion_j=req.companion_j,
    )
    job = start_job(sweep)
    robust_sweep.delay(job.job_id, sweep.model_dump())
    logger.info(f"Queued robustness sweep {job.job_id}")
    return {"job_id": job.job_id}


@router.get("/sweeps/{job_id}")
async def get_sweep(job_id: str) -> Dict[str, Any]:
    data = get_job(job_id)
    if data is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Job not found")
    return data
