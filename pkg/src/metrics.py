"""
Prometheus metrics for solver sessions and the decomposition loop.
"""

from typing import Optional

from prometheus_client import Counter, Histogram, Info, start_http_server

from .logging_config import get_logger

logger = get_logger(__name__)

# Solver metrics
SOLVES_TOTAL = Counter(
    'dadres_solves_total',
    'Total number of backend solves',
    ['backend', 'kind', 'status']
)

SOLVE_DURATION = Histogram(
    'dadres_solve_duration_seconds',
    'Backend solve wall time in seconds',
    ['backend', 'kind']
)

# Decomposition metrics
CCG_ITERATIONS = Counter(
    'dadres_ccg_iterations_total',
    'Total number of column-and-constraint generation iterations'
)

CCG_DURATION = Histogram(
    'dadres_ccg_duration_seconds',
    'Wall time of complete CCG solves in seconds',
    buckets=(0.1, 0.5, 1, 5, 10, 30, 60, 300, 900, 3600, 14400, 86400)
)

# Error metrics
ERROR_COUNT = Counter(
    'dadres_errors_total',
    'Total number of errors',
    ['error_type', 'component']
)

BUILD_INFO = Info('dadres_info', 'Toolkit information')
BUILD_INFO.info({'version': '1.0.0', 'name': 'dadres'})


class MetricsCollector:
    """Collector for solver metrics"""

    def __init__(self):
        self._started = False

    def start_server(self, port: Optional[int]):
        """Start Prometheus metrics server when a port is configured"""
        if self._started or port is None:
            return
        try:
            start_http_server(port)
            self._started = True
            logger.info(f"Prometheus metrics server started on port {port}")
        except OSError as e:
            logger.warning(f"Failed to start Prometheus server: {e}")

    def record_solve(self, backend: str, kind: str, status: str, duration: Optional[float] = None):
        """Record one backend solve"""
        SOLVES_TOTAL.labels(backend=backend, kind=kind, status=status).inc()
        if duration is not None:
            SOLVE_DURATION.labels(backend=backend, kind=kind).observe(duration)

    def record_iteration(self):
        CCG_ITERATIONS.inc()

    def record_ccg(self, duration: float):
        CCG_DURATION.observe(duration)

    def record_error(self, error_type: str, component: str):
        ERROR_COUNT.labels(error_type=error_type, component=component).inc()


# Global metrics collector instance
metrics_collector = MetricsCollector()


def init_metrics(port: Optional[int] = None):
    """Initialize metrics collection"""
    metrics_collector.start_server(port)


def record_solve(backend: str, kind: str, status: str, duration: Optional[float] = None):
    """Helper to record solve metrics"""
    metrics_collector.record_solve(backend, kind, status, duration)


def record_iteration():
    metrics_collector.record_iteration()


def record_ccg(duration: float):
    metrics_collector.record_ccg(duration)


def record_error(error_type: str, component: str):
    """Helper to record error"""
    metrics_collector.record_error(error_type, component)
