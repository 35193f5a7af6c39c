from typing import Callable, Optional, Sequence

from celery import group

from app.celery.celery_app import app
from app.services.alexmodule import delta_k
from app.services.certificates import robustness_check
from app.services.facts import FactBook, load_facts
from app.services.laurent import substitute_power
from app.services.primality import sequences_strongly_coprime, strongly_prime
from app.services.rho_ledger import DEFAULT_COMPANION_J, cable_operator, operator_by_name
from app.utils.background_job import BackgroundJob, JobStatus, SweepJob
from app.utils.global_logging import get_logger

logger = get_logger("tasks")


def _facts(facts_path: Optional[str], use_facts: bool = True) -> FactBook:
    return load_facts(facts_path) if use_facts else FactBook.empty()


@app.task
def robust_cell(
    op: str,
    k: int,
    p: int,
    companion_j: str = DEFAULT_COMPANION_J,
    facts_path: Optional[str] = None,
    use_facts: bool = True,
) -> dict:
    """Robustness certificate of one (k, p) cell."""
    logger.debug(f"robust cell op={op} k={k} p={p}")
    cert = robustness_check(operator_by_name(op, k, companion_j), _facts(facts_path, use_facts), p)
    return {"op": op.upper(), "k": k, "p": p, "certificate": cert.model_dump(mode="json")}


@app.task
def strongly_prime_cell(k: int, p: int, search_bound: Optional[int] = None) -> dict:
    """Strong primality verdict for delta_k(t^p)."""
    verdict = strongly_prime(substitute_power(delta_k(k), p), search_bound)
    return {"k": k, "p": p, "verdict": verdict.model_dump(mode="json")}


@app.task
def coprimality_cell(k: int, n: int, p: int, q: int) -> dict:
    """Strong coprimality of the depth-n sequences whose outermost entries are cabled by p and q."""
    op = operator_by_name("R", k)

    def polynomials(cable: int):
        return [cable_operator(op, cable).alexander] + [op.alexander] * (n - 1)

    verdict = sequences_strongly_coprime(polynomials(p), polynomials(q))
    return {"k": k, "n": n, "p": p, "q": q, "verdict": verdict.model_dump(mode="json")}


def run_cells(task: Callable, cells: Sequence[tuple], jobs: int = 1) -> list[dict]:
    """
    Run one task per cell. ``jobs > 1`` dispatches a Celery group; results
    come back in cell order either way.
    """
    cells = sorted(cells)
    if jobs <= 1 or len(cells) <= 1:
        return [task(*cell) for cell in cells]
    logger.info(f"Dispatching {len(cells)} cells of {task.name} as a group")
    result = group(task.s(*cell) for cell in cells).apply_async()
    return result.get(disable_sync_subtasks=False)


@app.task
def robust_sweep(job_id: str, sweep: dict) -> list[dict]:
    """Sweep robustness over a (k, p) grid and record progress on the job."""
    params = SweepJob(**sweep)
    job = BackgroundJob(job_id)
    results = []
    try:
        for k in params.k_values:
            for p in params.p_values:
                cell = robust_cell(params.op, k, p, params.companion_j, params.facts_path)
                results.append(cell)
                verdict = "robust" if cell["certificate"]["conclusion"] else "not certified"
                job.update_job_progress({"message": f"k={k} p={p}: {verdict}"})
        job.set_result(results)
        job.update_job_status(JobStatus.DONE)
        logger.info(f"Sweep {job_id} finished with {len(results)} cells")
    except Exception as e:
        logger.error(f"Error in sweep job {job_id}: {e}")
        job.update_job_progress({"message": f"failed: {e}"})
        job.update_job_status(JobStatus.FAILED)
    return results
