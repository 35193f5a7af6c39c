from celery import Celery

from app.config import get_settings

settings = get_settings()

app = Celery(
    "cable_concordance",
    broker=settings.celery_broker_url,
    backend=settings.celery_result_backend,
)
app.conf.update(
    task_always_eager=settings.celery_task_always_eager,
    task_eager_propagates=True,
    task_serializer="json",
    result_serializer="json",
    accept_content=["json"],
)
app.autodiscover_tasks(["app.celery"])
