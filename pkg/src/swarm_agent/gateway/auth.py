"""Bearer-token authentication mapping tokens to user contexts.

Static tokens stand in for an SSO integration: the gateway trusts the
config's token table and never sees passwords. Missing or unknown
credentials are 401; a valid credential used on another user's resource
is the resource layer's 403.
"""

from __future__ import annotations

from swarm_agent.sessions.models import UserContext


class AuthError(Exception):
    def __init__(self, status_code: int, detail: str) -> None:
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail


class TokenAuthenticator:
    def __init__(self, tokens: dict[str, UserContext]) -> None:
        if not tokens:
            raise ValueError("at least one token is required")
        self._tokens = dict(tokens)

    def authenticate(self, authorization: str | None) -> UserContext:
        if not authorization:
            raise AuthError(401, "missing Authorization header")
        parts = authorization.split(None, 1)
        if len(parts) != 2 or parts[0].lower() != "bearer" or not parts[1].strip():
            raise AuthError(401, "Authorization header must be 'Bearer <token>'")
        ctx = self._tokens.get(parts[1].strip())
        if ctx is None:
            raise AuthError(401, "unknown token")
        return ctx
