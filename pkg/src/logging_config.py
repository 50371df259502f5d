"""
Logging setup for the solver and the command line.

Records carry optional run context (component, scenario, backend, iteration)
which the formatters surface next to the message.
"""

import json
import logging
import sys
import traceback
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Optional

# Attributes every LogRecord has; anything else came in through `extra`
_RECORD_ATTRS = frozenset(vars(logging.makeLogRecord({}))) | {'message', 'asctime', 'taskName'}

CONTEXT_FIELDS = ('component', 'scenario', 'backend', 'iteration', 'operation', 'duration')

_TEXT_FORMAT = "%(asctime)s %(levelname)-7s %(name)s%(context)s: %(message)s"

# Third-party loggers that are chatty at INFO
_QUIET_LOGGERS = ('mip', 'gurobipy', 'matplotlib')


def _jsonable(value: Any) -> Any:
    try:
        json.dumps(value)
    except (TypeError, ValueError):
        return str(value)
    return value


def _context_of(record: logging.LogRecord) -> Dict[str, Any]:
    return {key: getattr(record, key) for key in CONTEXT_FIELDS if getattr(record, key, None) is not None}


class JSONFormatter(logging.Formatter):
    """
    One JSON object per line. Run context is promoted to top-level keys,
    other `extra` values are nested under "extra".
    """

    def __init__(self, include_extra: bool = True):
        super().__init__()
        self.include_extra = include_extra

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "@timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "where": f"{record.module}.{record.funcName}:{record.lineno}",
        }
        entry.update((key, _jsonable(value)) for key, value in _context_of(record).items())

        if record.exc_info and record.exc_info[0] is not None:
            exc_type, exc_value, _ = record.exc_info
            entry["exception"] = {
                "type": exc_type.__name__,
                "message": str(exc_value),
                "traceback": traceback.format_exception(*record.exc_info),
            }

        if self.include_extra:
            extra = {
                key: _jsonable(value)
                for key, value in vars(record).items()
                if key not in _RECORD_ATTRS and key not in CONTEXT_FIELDS and key != 'context'
            }
            if extra:
                entry["extra"] = extra

        return json.dumps(entry, ensure_ascii=False)


class ContextTextFormatter(logging.Formatter):
    """Plain text with the run context in brackets after the logger name."""

    def __init__(self) -> None:
        super().__init__(_TEXT_FORMAT)

    def format(self, record: logging.LogRecord) -> str:
        context = _context_of(record)
        record.context = (
            " [" + " ".join(f"{key}={value}" for key, value in context.items()) + "]" if context else ""
        )
        return super().format(record)


class ContextAdapter(logging.LoggerAdapter):
    """
    Adapter that merges a fixed context into every record. Per-call `extra`
    wins over the bound context.
    """

    def __init__(self, logger: logging.Logger, extra: Optional[Dict[str, Any]] = None):
        super().__init__(logger, extra or {})

    def process(self, msg: str, kwargs: Dict[str, Any]) -> tuple:
        kwargs['extra'] = {**self.extra, **(kwargs.get('extra') or {})}
        return msg, kwargs

    def bind(self, **context: Any) -> "ContextAdapter":
        return ContextAdapter(self.logger, {**self.extra, **context})


def _quiet(names: Iterable[str], level: int) -> None:
    for name in names:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))


def setup_logging(
    level: Optional[str] = None,
    json_format: Optional[bool] = None,
    log_file: Optional[str] = None,
    component: Optional[str] = None
) -> ContextAdapter:
    """
    Configure the root logger.

    Handlers write to stderr (stdout carries command output) and, when
    `log_file` is set, to that file as well.

    Args:
        level: Logging level name, INFO when unset
        json_format: JSON lines instead of plain text
        log_file: Optional log file path
        component: Component bound to the returned adapter

    Returns:
        Adapter for the application logger
    """
    component = component or "dadres"
    numeric_level = logging.getLevelName((level or "INFO").upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
    root_logger.setLevel(numeric_level)

    formatter: logging.Formatter = JSONFormatter() if json_format else ContextTextFormatter()
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    for handler in handlers:
        handler.setLevel(numeric_level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    _quiet(_QUIET_LOGGERS, numeric_level)
    return ContextAdapter(logging.getLogger(component), {"component": component})


def get_logger(name: str, **context: Any) -> ContextAdapter:
    """Logger adapter for `name` with `context` bound to every record."""
    return ContextAdapter(logging.getLogger(name), context)
