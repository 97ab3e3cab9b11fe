from __future__ import annotations

import json
from typing import Any

try:
    import redis
except ModuleNotFoundError:  # pragma: no cover - optional dependency
    redis = None


class RunLedger:
    """Summaries of finished runs keyed by config digest, in Redis when configured."""

    def __init__(self, namespace: str = "proca", redis_url: str | None = None) -> None:
        self.namespace = namespace
        self._redis = None
        if redis_url and redis:
            self._redis = redis.Redis.from_url(redis_url, decode_responses=True)
        self._cache: dict[str, str] = {}

    @property
    def persistent(self) -> bool:
        return self._redis is not None

    def _compose_key(self, digest: str, name: str) -> str:
        return f"{self.namespace}:{digest}:{name}"

    def write(self, digest: str, name: str, value: Any) -> None:
        payload = json.dumps(value)
        key = self._compose_key(digest, name)
        if self._redis:
            self._redis.set(key, payload)
        else:
            self._cache[key] = payload

    def read(self, digest: str, name: str, default: Any = None) -> Any:
        key = self._compose_key(digest, name)
        payload: str | None
        if self._redis:
            payload = self._redis.get(key)
        else:
            payload = self._cache.get(key)
        if payload is None:
            return default
        return json.loads(payload)

    def clear(self, digest: str) -> None:
        prefix = f"{self.namespace}:{digest}:"
        if self._redis:
            keys = list(self._redis.scan_iter(f"{prefix}*"))
            if keys:
                self._redis.delete(*keys)
        else:
            for key in [key for key in list(self._cache) if key.startswith(prefix)]:
                self._cache.pop(key, None)
