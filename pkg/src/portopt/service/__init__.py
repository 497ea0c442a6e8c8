from .app import app, create_app
from .schemas import CommandResponse, HealthResponse, RunRequest, SummaryRowModel
