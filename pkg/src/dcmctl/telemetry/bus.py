"""In-process message bus with broker semantics.

Pub/sub with MQTT-style topic filters, a retained-message store, and
synchronous fan-out: publish() runs matching handlers on the calling
thread, in subscription order. A new subscriber immediately receives
any retained messages its filter matches, which is what lets a late
dashboard reconstruct full state without replaying history.

Payloads the daemon itself produces (telemetry, state, rejection
replies) are schema-checked at publish time and never go out invalid.
Command topics skip that check on purpose: parse_command owns the
reject path for malformed operator input.

Thread safety: a single lock guards the subscription list and retained
store. Handlers must not publish re-entrantly from within delivery of
the same topic they subscribe to, or they will recurse.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from dcmctl.telemetry import schemas
from dcmctl.telemetry.topics import topic_matches

log = logging.getLogger(__name__)

Handler = Callable[[str, dict], None]


@dataclass
class _Subscription:
    pattern: str
    handler: Handler
    active: bool = True


class PublishError(Exception):
    """Outbound payload failed its schema; nothing was published."""


@dataclass
class MessageBus:
    validate_outbound: bool = True
    _subs: List[_Subscription] = field(default_factory=list)
    _retained: Dict[str, dict] = field(default_factory=dict)
    _lock: threading.RLock = field(default_factory=threading.RLock)

    def publish(self, topic: str, payload: dict, retain: bool = False) -> None:
        if self.validate_outbound and topic in schemas.STRICT_TOPICS:
            try:
                schemas.validate(topic, payload)
            except schemas.SchemaError as e:
                log.error("refusing to publish %s: %s", topic, e)
                raise PublishError(str(e)) from e
        with self._lock:
            if retain:
                self._retained[topic] = payload
            handlers = [s.handler for s in self._subs if s.active and topic_matches(s.pattern, topic)]
        for handler in handlers:
            try:
                handler(topic, payload)
            except Exception:
                log.exception("subscriber failed on %s", topic)

    def subscribe(self, pattern: str, handler: Handler) -> Callable[[], None]:
        """Register a handler; returns an unsubscribe callable. Retained
        messages matching the filter are delivered immediately."""
        sub = _Subscription(pattern, handler)
        with self._lock:
            self._subs.append(sub)
            replay = [
                (topic, payload)
                for topic, payload in self._retained.items()
                if topic_matches(pattern, topic)
            ]
        for topic, payload in replay:
            try:
                handler(topic, payload)
            except Exception:
                log.exception("subscriber failed on retained %s", topic)

        def unsubscribe():
            with self._lock:
                sub.active = False
                if sub in self._subs:
                    self._subs.remove(sub)

        return unsubscribe

    def retained(self, pattern: str = "#") -> List[Tuple[str, dict]]:
        with self._lock:
            return [
                (topic, payload)
                for topic, payload in self._retained.items()
                if topic_matches(pattern, topic)
            ]

    def retained_value(self, topic: str) -> Optional[dict]:
        with self._lock:
            return self._retained.get(topic)
