"""Event log for pipeline operations.

Operations decorated with ``@traced`` record start/end events into the log
bound by ``capture_events()``. Nothing is recorded when no log is bound, so
library callers pay only a context-variable lookup.
"""

from __future__ import annotations

import contextvars
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional


@dataclass
class EventLog:
    events: List[Dict[str, Any]] = field(default_factory=list)
    audit_path: Optional[str] = None
    started_at: float = field(default_factory=time.time)

    def append(self, event: Dict[str, Any]) -> None:
        self.events.append(event)
        if self.audit_path:
            _append_jsonl(self.audit_path, event)

    def kinds(self) -> List[str]:
        return [str(e.get("kind")) for e in self.events]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, ensure_ascii=False, default=str) + "\n" for e in self.events)


_CURRENT_LOG: contextvars.ContextVar[Optional[EventLog]] = contextvars.ContextVar("levylab_event_log", default=None)


def _append_jsonl(path: str, event: Dict[str, Any]) -> None:
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, default=str) + "\n")
    except OSError:
        # Audit logging must never break a computation.
        pass


@contextmanager
def capture_events(*, audit_path: Optional[str] = None) -> Iterator[EventLog]:
    log = EventLog(audit_path=audit_path)
    token = _CURRENT_LOG.set(log)
    try:
        yield log
    finally:
        _CURRENT_LOG.reset(token)


def current_log() -> Optional[EventLog]:
    return _CURRENT_LOG.get()


def log_event(kind: str, **fields: Any) -> None:
    log = _CURRENT_LOG.get()
    if log is None:
        return
    event: Dict[str, Any] = {
        "kind": kind,
        "ts": time.time(),
    }
    event.update(fields)
    log.append(event)


def traced(fn: Callable[..., Any]) -> Callable[..., Any]:
    def wrapper(*args, **kwargs):
        if _CURRENT_LOG.get() is None:
            return fn(*args, **kwargs)
        log_event("op_start", op=fn.__name__)
        started = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001
            duration_ms = int((time.perf_counter() - started) * 1000)
            log_event(
                "op_end",
                op=fn.__name__,
                status="error",
                duration_ms=duration_ms,
                error=f"{type(exc).__name__}: {exc}",
            )
            raise
        duration_ms = int((time.perf_counter() - started) * 1000)
        log_event("op_end", op=fn.__name__, status="ok", duration_ms=duration_ms)
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__qualname__ = fn.__qualname__
    wrapper.__doc__ = fn.__doc__
    wrapper.__module__ = fn.__module__
    wrapper.__wrapped__ = fn  # type: ignore[attr-defined]
    return wrapper
