"""Command routing and event fan-out to kiosk frontends.

User utterances that match a command rule produce kiosk events (avatar
animations, display panels, media stubs).  The broadcaster hands every
published event to every live subscription; a subscription that falls more
than ``buffer_size`` events behind loses the oldest ones and sees a gap
marker instead, so a stuck frontend can never block the dispatcher.
"""

from __future__ import annotations

import json
import threading
from collections import deque
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from .textproc import normalize

EVENT_KINDS = ("avatar_animation", "display_text", "display_panel", "media_stub")

DEFAULT_BUFFER_SIZE = 256


class BroadcastClosedError(RuntimeError):
    """Raised when subscribing to (or publishing on) a closed broadcaster."""


@dataclass(frozen=True)
class KioskEvent:
    seq: int
    kind: str
    name: str
    payload: str
    ts: datetime


@dataclass(frozen=True)
class GapMarker:
    """Placeholder a lagging subscriber sees instead of dropped events."""

    dropped: int


@dataclass(frozen=True)
class EventTemplate:
    kind: str
    name: str
    payload: str = ""

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}; expected one of {EVENT_KINDS}")


@dataclass(frozen=True)
class CommandRule:
    """Trigger phrases plus the events and response they produce."""

    triggers: tuple[str, ...]
    response_text: str = ""
    events: tuple[EventTemplate, ...] = ()

    def __post_init__(self) -> None:
        if not self.triggers:
            raise ValueError("a command rule needs at least one trigger")
        for trigger in self.triggers:
            if not trigger or normalize(trigger) != trigger:
                raise ValueError(f"trigger {trigger!r} must be a normalized non-empty phrase")
        if not self.events and not self.response_text:
            raise ValueError("a command rule needs events or a response_text")


def _now() -> datetime:
    return datetime.now(timezone.utc)


def validate_rules(rules: Sequence[CommandRule]) -> None:
    """Reject duplicate triggers across the rule set."""
    seen: dict[str, int] = {}
    for i, rule in enumerate(rules):
        for trigger in rule.triggers:
            if trigger in seen:
                raise ValueError(f"duplicate trigger {trigger!r} in rules {seen[trigger]} and {i}")
            seen[trigger] = i


def load_rules(path: str | Path) -> list[CommandRule]:
    """Load a JSON array of ``{triggers, response_text, events}`` rules."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of command rules")
    rules = []
    for i, item in enumerate(raw):
        try:
            rules.append(
                CommandRule(
                    triggers=tuple(normalize(str(t)) for t in item["triggers"]),
                    response_text=str(item.get("response_text", "")),
                    events=tuple(
                        EventTemplate(
                            kind=str(e["kind"]),
                            name=str(e["name"]),
                            payload=str(e.get("payload", "")),
                        )
                        for e in item.get("events", ())
                    ),
                )
            )
        except (TypeError, KeyError) as exc:
            raise ValueError(f"{path}: rule {i} is malformed: {exc}") from exc
    validate_rules(rules)
    return rules


def _contains_subsequence(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    if not phrase or len(phrase) > len(tokens):
        return False
    return any(
        list(tokens[i : i + len(phrase)]) == list(phrase)
        for i in range(len(tokens) - len(phrase) + 1)
    )


def route(
    utterance: str, rules: Sequence[CommandRule]
) -> Optional[tuple[CommandRule, list[KioskEvent]]]:
    """Match an utterance against command rules.

    A rule matches when one of its triggers appears as a contiguous token
    subsequence of the normalized utterance.  The longest matching trigger
    wins; ties go to the earliest rule.  Returned events carry a fresh
    timestamp and provisional seq values 0..n-1; publishing them through a
    broadcaster assigns the authoritative stream seq.
    """
    tokens = normalize(utterance).split()
    best_rule: Optional[CommandRule] = None
    best_len = 0
    for rule in rules:
        for trigger in rule.triggers:
            phrase = trigger.split()
            if len(phrase) > best_len and _contains_subsequence(tokens, phrase):
                best_rule, best_len = rule, len(phrase)
    if best_rule is None:
        return None
    ts = _now()
    events = [
        KioskEvent(seq=i, kind=t.kind, name=t.name, payload=t.payload, ts=ts)
        for i, t in enumerate(best_rule.events)
    ]
    return best_rule, events


class Subscription:
    """One consumer's view of the event stream.

    Events arrive in publish order; when the buffer overflows, the oldest
    events are dropped and the next read yields a GapMarker first.
    """

    def __init__(self, broadcaster: "EventBroadcaster") -> None:
        self._broadcaster = broadcaster
        self._buffer: deque[KioskEvent] = deque()
        self._dropped = 0
        self._active = True

    def get(self, timeout: Optional[float] = None) -> Union[KioskEvent, GapMarker, None]:
        """Next event, a GapMarker, or None on timeout / closed-and-drained."""
        cond = self._broadcaster._cond
        with cond:
            if not self._buffer and not self._dropped:
                if self._broadcaster.closed or not self._active:
                    return None
                cond.wait(timeout)
            if self._dropped:
                marker = GapMarker(dropped=self._dropped)
                self._dropped = 0
                return marker
            if self._buffer:
                return self._buffer.popleft()
            return None

    def __iter__(self) -> Iterator[Union[KioskEvent, GapMarker]]:
        """Yield until the broadcaster closes and the buffer drains."""
        while True:
            item = self.get(timeout=None)
            if item is None:
                if self._broadcaster.closed or not self._active:
                    return
                continue
            yield item

    def close(self) -> None:
        self._broadcaster._detach(self)
        self._active = False


class EventBroadcaster:
    """Fan-out hub assigning a strictly increasing seq to every event."""

    def __init__(self, buffer_size: int = DEFAULT_BUFFER_SIZE) -> None:
        if buffer_size < 1:
            raise ValueError(f"buffer_size must be >= 1, got {buffer_size}")
        self._buffer_size = buffer_size
        self._cond = threading.Condition()
        self._subscriptions: list[Subscription] = []
        self._seq = 0
        self._closed = False

    @property
    def closed(self) -> bool:
        return self._closed

    def publish(self, event: KioskEvent) -> KioskEvent:
        """Assign the next seq, fan out, and return the stamped event."""
        with self._cond:
            if self._closed:
                raise BroadcastClosedError("broadcaster is shut down")
            self._seq += 1
            stamped = replace(event, seq=self._seq)
            for sub in self._subscriptions:
                if len(sub._buffer) >= self._buffer_size:
                    sub._buffer.popleft()
                    sub._dropped += 1
                sub._buffer.append(stamped)
            self._cond.notify_all()
            return stamped

    def subscribe(self) -> Subscription:
        with self._cond:
            if self._closed:
                raise BroadcastClosedError("broadcaster is shut down")
            sub = Subscription(self)
            self._subscriptions.append(sub)
            return sub

    def _detach(self, sub: Subscription) -> None:
        with self._cond:
            if sub in self._subscriptions:
                self._subscriptions.remove(sub)
            self._cond.notify_all()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


def format_ts(ts: datetime) -> str:
    """RFC 3339 UTC timestamp with a trailing Z."""
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(value: str) -> datetime:
    """Parse RFC 3339, accepting both Z and numeric offsets."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def to_wire(item: Union[KioskEvent, GapMarker]) -> dict:
    """Wire shape shared by the HTTP stream and the ask response."""
    if isinstance(item, GapMarker):
        return {"kind": "gap", "dropped": item.dropped}
    return {
        "seq": item.seq,
        "kind": item.kind,
        "name": item.name,
        "payload": item.payload,
        "ts": format_ts(item.ts),
    }


# Built-in command surface: greeting, small talk, offline news/weather/time
# panels, a media stub instead of real playback, and the campus map panel.
DEFAULT_RULES: tuple[CommandRule, ...] = (
    CommandRule(
        triggers=("hello", "salam", "hi"),
        response_text="Salam! How can I help you today?",
        events=(EventTemplate(kind="avatar_animation", name="wave"),),
    ),
    CommandRule(
        triggers=("how are you",),
        response_text="I am doing great and happy to help!",
        events=(EventTemplate(kind="avatar_animation", name="talk"),),
    ),
    CommandRule(
        triggers=("weather",),
        response_text="Here is the weather panel.",
        events=(
            EventTemplate(
                kind="display_text",
                name="weather",
                payload="Offline mode: typical Bishkek forecast, sunny with a high of 24 C.",
            ),
            EventTemplate(kind="avatar_animation", name="talk"),
        ),
    ),
    CommandRule(
        triggers=("news",),
        response_text="Here are the latest campus news.",
        events=(
            EventTemplate(
                kind="display_text",
                name="news",
                payload="Offline mode: see the bulletin board for this week's campus news.",
            ),
            EventTemplate(kind="avatar_animation", name="talk"),
        ),
    ),
    CommandRule(
        triggers=("time", "what time is it"),
        response_text="The kiosk clock is on the info panel.",
        events=(
            EventTemplate(
                kind="display_text",
                name="time",
                payload="Offline mode: kiosk local time is shown on the status bar.",
            ),
            EventTemplate(kind="avatar_animation", name="talk"),
        ),
    ),
    CommandRule(
        triggers=("music", "play music"),
        response_text="Music playback is not available on this kiosk.",
        events=(EventTemplate(kind="media_stub", name="music", payload="campus playlist"),),
    ),
    CommandRule(
        triggers=("studencheskiy gorodok", "campus", "campus map"),
        response_text="Here is the campus map with the main buildings.",
        events=(
            EventTemplate(
                kind="display_panel",
                name="campus_map",
                payload="Main hall, library, canteen, dormitories, and sports center.",
            ),
            EventTemplate(kind="avatar_animation", name="talk"),
        ),
    ),
)
