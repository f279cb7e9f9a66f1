"""Request logging and usage statistics.

Every handled request is appended to a JSON Lines log (one ``{ts, text,
intent, score}`` object per line, RFC 3339 UTC timestamps).  Statistics
reproduce the kiosk's reporting: weekday histogram indexed 0=Monday, mean
daily usage, and the most popular request texts.
"""

from __future__ import annotations

import json
import threading
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from .events import format_ts, parse_ts
from .textproc import normalize

# Two conventions for the mean-daily denominator: every calendar day in the
# first..last span (weekends count even when idle) or only days that saw at
# least one request.
DAY_BASES = ("calendar", "active")


@dataclass(frozen=True)
class RequestRecord:
    ts: datetime
    text: str
    intent: str
    score: float

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("request text must be non-empty")
        if self.ts.tzinfo is None:
            raise ValueError("request timestamp must be timezone-aware")


@dataclass(frozen=True)
class UsageStats:
    total: int
    by_weekday: tuple[int, ...]  # index 0 = Monday
    mean_daily: float
    top_requests: tuple[tuple[str, int], ...]


class RequestLog:
    """Append-only request log, file-backed or in-memory.

    A single lock serializes writers; readers parse the file afresh and see
    a consistent snapshot as of the open.
    """

    def __init__(self, path: Optional[str | Path] = None) -> None:
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._memory: list[RequestRecord] = []

    def append(self, record: RequestRecord) -> None:
        line = json.dumps(
            {
                "ts": format_ts(record.ts),
                "text": record.text,
                "intent": record.intent,
                "score": record.score,
            },
            ensure_ascii=False,
        )
        with self._lock:
            if self.path is None:
                self._memory.append(record)
                return
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def records(self) -> list[RequestRecord]:
        if self.path is None:
            with self._lock:
                return list(self._memory)
        if not self.path.exists():
            return []
        records = []
        with self.path.open("r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    records.append(
                        RequestRecord(
                            ts=parse_ts(obj["ts"]),
                            text=str(obj["text"]),
                            intent=str(obj["intent"]),
                            score=float(obj["score"]),
                        )
                    )
                except (ValueError, KeyError, TypeError) as exc:
                    raise ValueError(f"{self.path}:{lineno}: bad log line: {exc}") from exc
        return records


def compute_stats(
    records: Sequence[RequestRecord], top_k: int = 10, day_basis: str = "calendar"
) -> UsageStats:
    """Aggregate a request log into usage statistics.

    ``day_basis`` picks the mean-daily denominator: "calendar" spans every
    day between the first and last record inclusive, "active" counts only
    days with requests.  An empty log yields zeros.
    """
    if day_basis not in DAY_BASES:
        raise ValueError(f"day_basis must be one of {DAY_BASES}, got {day_basis!r}")

    by_weekday = [0] * 7
    dates = set()
    texts: Counter[str] = Counter()
    for record in records:
        ts = record.ts.astimezone(timezone.utc)
        by_weekday[ts.weekday()] += 1
        dates.add(ts.date())
        texts[normalize(record.text)] += 1

    total = len(records)
    if not dates:
        mean_daily = 0.0
    elif day_basis == "calendar":
        span = (max(dates) - min(dates)).days + 1
        mean_daily = total / span
    else:
        mean_daily = total / len(dates)

    top = sorted(texts.items(), key=lambda item: (-item[1], item[0]))[:top_k]
    return UsageStats(
        total=total,
        by_weekday=tuple(by_weekday),
        mean_daily=mean_daily,
        top_requests=tuple(top),
    )
