"""Minimal S3-compatible client (MinIO-oriented) with SigV4 signing.

Implements exactly the calls the storage agent needs: ListBuckets,
ListObjectsV2, GetObject, PutObject, bucket create/head, and presigned GET
URLs. Hand-rolled instead of pulling in a full SDK because four operations
do not justify the dependency. Path-style addressing throughout, as MinIO
deployments expect. Never exercised in the test suite; CI runs against
InMemoryObjectStore.
"""

from __future__ import annotations

import hashlib
import hmac
import logging
import xml.etree.ElementTree as ET
from datetime import datetime, timedelta, timezone
from typing import Any
from urllib.parse import quote, urlsplit

import requests

from swarm_agent.errors import ToolError
from swarm_agent.messages import parse_timestamp
from swarm_agent.storage.models import (
    BucketInfo,
    ObjectStat,
    PresignedHandle,
    validate_bucket_name,
)

logger = logging.getLogger(__name__)

_ALGORITHM = "AWS4-HMAC-SHA256"
_UNSIGNED = "UNSIGNED-PAYLOAD"


def _sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _hmac(key: bytes, message: str) -> bytes:
    return hmac.new(key, message.encode("utf-8"), hashlib.sha256).digest()


def _uri_encode(value: str, *, encode_slash: bool) -> str:
    safe = "-._~" if encode_slash else "-._~/"
    return quote(value, safe=safe)


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_text(element: ET.Element, name: str) -> str:
    for child in element.iter():
        if _local_name(child.tag) == name:
            return child.text or ""
    return ""


class S3ObjectStore:
    """Object store backed by an S3-compatible server."""

    def __init__(
        self,
        endpoint: str,
        access_key: str,
        secret_key: str,
        region: str = "us-east-1",
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ) -> None:
        if not endpoint:
            raise ValueError("endpoint is required")
        split = urlsplit(endpoint)
        if split.scheme not in ("http", "https") or not split.netloc:
            raise ValueError(f"endpoint must be an http(s) URL, got {endpoint!r}")
        self._endpoint = endpoint.rstrip("/")
        self._host = split.netloc
        self._access_key = access_key
        self._secret_key = secret_key
        self._region = region
        self._timeout = timeout
        self._session = session or requests.Session()

    # -- signing ------------------------------------------------------------

    def _signing_key(self, date: str) -> bytes:
        key = _hmac(("AWS4" + self._secret_key).encode("utf-8"), date)
        key = _hmac(key, self._region)
        key = _hmac(key, "s3")
        return _hmac(key, "aws4_request")

    def _signed_request(
        self,
        method: str,
        path: str,
        query: dict[str, str] | None = None,
        body: bytes = b"",
        content_type: str = "",
    ) -> requests.Response:
        now = datetime.now(timezone.utc)
        amz_date = now.strftime("%Y%m%dT%H%M%SZ")
        date = now.strftime("%Y%m%d")
        payload_hash = _sha256_hex(body)

        canonical_uri = _uri_encode(path, encode_slash=False)
        query = dict(query or {})
        canonical_query = "&".join(
            f"{_uri_encode(k, encode_slash=True)}={_uri_encode(v, encode_slash=True)}"
            for k, v in sorted(query.items())
        )
        headers = {
            "host": self._host,
            "x-amz-content-sha256": payload_hash,
            "x-amz-date": amz_date,
        }
        if content_type:
            headers["content-type"] = content_type
        signed_headers = ";".join(sorted(headers))
        canonical_headers = "".join(f"{k}:{headers[k].strip()}\n" for k in sorted(headers))
        canonical_request = "\n".join(
            [method, canonical_uri, canonical_query, canonical_headers, signed_headers, payload_hash]
        )
        scope = f"{date}/{self._region}/s3/aws4_request"
        string_to_sign = "\n".join(
            [_ALGORITHM, amz_date, scope, _sha256_hex(canonical_request.encode("utf-8"))]
        )
        signature = hmac.new(
            self._signing_key(date), string_to_sign.encode("utf-8"), hashlib.sha256
        ).hexdigest()
        headers["authorization"] = (
            f"{_ALGORITHM} Credential={self._access_key}/{scope}, "
            f"SignedHeaders={signed_headers}, Signature={signature}"
        )
        url = self._endpoint + canonical_uri
        if canonical_query:
            url += "?" + canonical_query
        try:
            return self._session.request(
                method,
                url,
                headers=headers,
                data=body if body else None,
                timeout=self._timeout,
            )
        except requests.RequestException as exc:
            raise ToolError.backend_unavailable(
                f"object storage unreachable: {exc}"
            ) from exc

    @staticmethod
    def _check(response: requests.Response, context: str) -> None:
        if response.status_code == 404:
            raise ToolError.not_found(f"{context}: not found")
        if response.status_code in (401, 403):
            raise ToolError.permission_denied(
                f"{context}: storage rejected credentials ({response.status_code})"
            )
        if response.status_code >= 400:
            raise ToolError.backend_unavailable(
                f"{context}: storage error {response.status_code}: {response.text[:200]}"
            )

    # -- store protocol --------------------------------------------------------

    def list_buckets(self) -> list[BucketInfo]:
        response = self._signed_request("GET", "/")
        self._check(response, "list buckets")
        root = ET.fromstring(response.content)
        buckets: list[BucketInfo] = []
        for element in root.iter():
            if _local_name(element.tag) != "Bucket":
                continue
            name = _find_text(element, "Name")
            created_raw = _find_text(element, "CreationDate")
            created = parse_timestamp(created_raw) if created_raw else None
            buckets.append(BucketInfo(name=name, created_at=created))
        return buckets

    def bucket_exists(self, name: str) -> bool:
        response = self._signed_request("HEAD", f"/{name}")
        if response.status_code == 404:
            return False
        self._check(response, f"head bucket {name!r}")
        return True

    def ensure_bucket(self, name: str) -> None:
        validate_bucket_name(name)
        if self.bucket_exists(name):
            return
        response = self._signed_request("PUT", f"/{name}")
        if response.status_code == 409:
            return
        self._check(response, f"create bucket {name!r}")

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectStat]:
        stats: list[ObjectStat] = []
        token = ""
        while True:
            query = {"list-type": "2"}
            if prefix:
                query["prefix"] = prefix
            if token:
                query["continuation-token"] = token
            response = self._signed_request("GET", f"/{bucket}", query=query)
            self._check(response, f"list objects in {bucket!r}")
            root = ET.fromstring(response.content)
            for element in root.iter():
                if _local_name(element.tag) != "Contents":
                    continue
                key = _find_text(element, "Key")
                size = int(_find_text(element, "Size") or 0)
                modified_raw = _find_text(element, "LastModified")
                stats.append(
                    ObjectStat(
                        key=key,
                        size=size,
                        last_modified=parse_timestamp(modified_raw)
                        if modified_raw
                        else datetime.now(timezone.utc),
                    )
                )
            truncated = _find_text(root, "IsTruncated") == "true"
            token = _find_text(root, "NextContinuationToken")
            if not truncated or not token:
                return stats

    def get_object(self, bucket: str, key: str) -> bytes:
        response = self._signed_request("GET", f"/{bucket}/{key}")
        self._check(response, f"get object {bucket}/{key}")
        return response.content

    def put_object(
        self, bucket: str, key: str, data: bytes, content_type: str = "application/octet-stream"
    ) -> None:
        response = self._signed_request(
            "PUT", f"/{bucket}/{key}", body=data, content_type=content_type
        )
        self._check(response, f"put object {bucket}/{key}")

    def presign(self, bucket: str, key: str, ttl_seconds: int) -> PresignedHandle:
        """Query-string signed GET URL; the handle is the URL itself."""
        if ttl_seconds <= 0:
            raise ValueError("ttl_seconds must be positive")
        now = datetime.now(timezone.utc)
        amz_date = now.strftime("%Y%m%dT%H%M%SZ")
        date = now.strftime("%Y%m%d")
        scope = f"{date}/{self._region}/s3/aws4_request"
        path = f"/{bucket}/{key}"
        canonical_uri = _uri_encode(path, encode_slash=False)
        query = {
            "X-Amz-Algorithm": _ALGORITHM,
            "X-Amz-Credential": f"{self._access_key}/{scope}",
            "X-Amz-Date": amz_date,
            "X-Amz-Expires": str(ttl_seconds),
            "X-Amz-SignedHeaders": "host",
        }
        canonical_query = "&".join(
            f"{_uri_encode(k, encode_slash=True)}={_uri_encode(v, encode_slash=True)}"
            for k, v in sorted(query.items())
        )
        canonical_request = "\n".join(
            ["GET", canonical_uri, canonical_query, f"host:{self._host}\n", "host", _UNSIGNED]
        )
        string_to_sign = "\n".join(
            [_ALGORITHM, amz_date, scope, _sha256_hex(canonical_request.encode("utf-8"))]
        )
        signature = hmac.new(
            self._signing_key(date), string_to_sign.encode("utf-8"), hashlib.sha256
        ).hexdigest()
        url = (
            f"{self._endpoint}{canonical_uri}?{canonical_query}"
            f"&X-Amz-Signature={signature}"
        )
        return PresignedHandle(
            handle=url, url=url, expires_at=now + timedelta(seconds=ttl_seconds)
        )

    def info(self) -> dict[str, Any]:
        return {"backend_type": "s3", "endpoint": self._endpoint, "region": self._region}
