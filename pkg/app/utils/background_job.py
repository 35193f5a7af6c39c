from datetime import datetime, timezone

UTC = timezone.utc
from enum import Enum
from threading import Lock
from typing import Dict, Optional
from uuid import uuid4

from pydantic import BaseModel, Field

from app.utils.global_logging import get_logger


class JobStatus(Enum):
    IN_PROGRESS = "in-progress"
    DONE = "done"
    FAILED = "failed"


class SweepJob(BaseModel):
    """Parameters of a robustness sweep over a (k, p) grid."""

    op: str = Field(..., description="Operator family, Q or R")
    k_values: list[int]
    p_values: list[int]
    companion_j: str
    facts_path: Optional[str] = None


logger = get_logger(__name__)

_JOBS: Dict[str, Dict] = {}
_LOCK = Lock()


class BackgroundJob:
    def __init__(self, job_id: Optional[str] = None):
        self.job_id = job_id or str(uuid4())
        self.data = get_job(self.job_id) or {}

    def add_job_to_db(self, data: Dict):
        data.update({"job_id": self.job_id})
        data.setdefault("started_at", datetime.now(UTC))
        with _LOCK:
            _JOBS[self.job_id] = dict(data)
        self.data = self.data | data

    def update_job_status(self, status: JobStatus):
        if status == JobStatus.DONE or status == JobStatus.FAILED:
            self.data.update({"completed_at": datetime.now(UTC)})
        self.data.update({"status": status.value})
        self.add_job_to_db(self.data)

    def update_job_progress(self, progress: Dict):
        if progress is not None and isinstance(progress, dict):
            progress.update({"at": datetime.now(UTC)})
        if "logs" in self.data and isinstance(self.data["logs"], list):
            self.data["logs"].append(progress)
        else:
            self.data.update({"logs": [progress]})
        self.add_job_to_db(self.data)

    def set_result(self, result):
        self.data.update({"result": result})
        self.add_job_to_db(self.data)


def start_job(sweep: SweepJob) -> BackgroundJob:
    job = BackgroundJob()
    job.add_job_to_db(sweep.model_dump() | {"status": JobStatus.IN_PROGRESS.value})
    logger.info(f"Started sweep job: {job.job_id}")
    return job


def get_job(job_id: str) -> Optional[Dict]:
    with _LOCK:
        data = _JOBS.get(job_id)
    return dict(data) if data is not None else None


def clear_jobs():
    with _LOCK:
        _JOBS.clear()
