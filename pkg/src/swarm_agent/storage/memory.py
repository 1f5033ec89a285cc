"""In-memory object store with presigned-handle support.

The default backend for tests and local serving. Presigned handles are
random tokens in an expiry table; the gateway's artifact endpoint resolves
them back to (bucket, key) while they are still live.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable

from swarm_agent.errors import ToolError
from swarm_agent.messages import utcnow
from swarm_agent.storage.models import (
    BucketInfo,
    ObjectStat,
    PresignedHandle,
    validate_bucket_name,
)


@dataclass
class _StoredObject:
    data: bytes
    content_type: str
    last_modified: datetime


class InMemoryObjectStore:
    def __init__(self, now_fn: Callable[[], datetime] = utcnow) -> None:
        self._buckets: dict[str, dict[str, _StoredObject]] = {}
        self._bucket_created: dict[str, datetime] = {}
        self._handles: dict[str, tuple[str, str, datetime]] = {}
        self._now = now_fn
        self._lock = threading.RLock()

    # -- buckets -----------------------------------------------------------

    def list_buckets(self) -> list[BucketInfo]:
        with self._lock:
            return [
                BucketInfo(name=name, created_at=self._bucket_created[name])
                for name in sorted(self._buckets)
            ]

    def bucket_exists(self, name: str) -> bool:
        return name in self._buckets

    def ensure_bucket(self, name: str) -> None:
        validate_bucket_name(name)
        with self._lock:
            if name not in self._buckets:
                self._buckets[name] = {}
                self._bucket_created[name] = self._now()

    # -- objects -----------------------------------------------------------

    def _bucket(self, name: str) -> dict[str, _StoredObject]:
        bucket = self._buckets.get(name)
        if bucket is None:
            raise ToolError.not_found(f"bucket {name!r} does not exist", bucket=name)
        return bucket

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectStat]:
        with self._lock:
            objects = self._bucket(bucket)
            return [
                ObjectStat(
                    key=key,
                    size=len(obj.data),
                    last_modified=obj.last_modified,
                    content_type=obj.content_type,
                )
                for key, obj in sorted(objects.items())
                if key.startswith(prefix)
            ]

    def get_object(self, bucket: str, key: str) -> bytes:
        with self._lock:
            obj = self._bucket(bucket).get(key)
            if obj is None:
                raise ToolError.not_found(
                    f"object {key!r} not found in bucket {bucket!r}",
                    bucket=bucket,
                    key=key,
                )
            return obj.data

    def stat_object(self, bucket: str, key: str) -> ObjectStat:
        with self._lock:
            obj = self._bucket(bucket).get(key)
            if obj is None:
                raise ToolError.not_found(
                    f"object {key!r} not found in bucket {bucket!r}",
                    bucket=bucket,
                    key=key,
                )
            return ObjectStat(
                key=key,
                size=len(obj.data),
                last_modified=obj.last_modified,
                content_type=obj.content_type,
            )

    def put_object(
        self, bucket: str, key: str, data: bytes, content_type: str = "application/octet-stream"
    ) -> None:
        if not key or key.startswith("/"):
            raise ValueError(f"invalid object key {key!r}")
        with self._lock:
            self._bucket(bucket)[key] = _StoredObject(
                data=bytes(data), content_type=content_type, last_modified=self._now()
            )

    # -- presigned handles ----------------------------------------------------

    def presign(self, bucket: str, key: str, ttl_seconds: int) -> PresignedHandle:
        if ttl_seconds <= 0:
            raise ValueError("ttl_seconds must be positive")
        with self._lock:
            # Validates existence up front so handles never point at nothing.
            self.stat_object(bucket, key)
            token = secrets.token_urlsafe(16)
            expires_at = self._now() + timedelta(seconds=ttl_seconds)
            self._handles[token] = (bucket, key, expires_at)
            return PresignedHandle(
                handle=token,
                url=f"/api/artifacts/{token}",
                expires_at=expires_at,
            )

    def resolve_handle(self, token: str) -> tuple[str, str]:
        """Map a live handle back to (bucket, key)."""
        with self._lock:
            entry = self._handles.get(token)
            if entry is None:
                raise ToolError.not_found("unknown artifact handle")
            bucket, key, expires_at = entry
            if self._now() >= expires_at:
                del self._handles[token]
                raise ToolError.not_found("artifact handle has expired")
            return bucket, key
