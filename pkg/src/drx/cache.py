"""Content-addressed on-disk cache for serialized results."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def request_key(request: dict) -> str:
    return hashlib.sha256(canonical_json(request).encode()).hexdigest()


def _digest(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


class ResultCache:
    def __init__(self, root):
        self.root = Path(root)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> str | None:
        p = self.path(key)
        if not p.exists():
            return None
        try:
            env = json.loads(p.read_text())
            payload = env["payload"]
            if env.get("key") != key or env.get("digest") != _digest(payload):
                raise ValueError("digest mismatch")
            return payload
        except (ValueError, KeyError, TypeError, OSError) as exc:
            log.warning("ignoring corrupt cache entry %s (%s); recomputing", p, exc)
            return None

    def put(self, key: str, payload: str) -> None:
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        env = canonical_json({"key": key, "digest": _digest(payload), "payload": payload})
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(env)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
