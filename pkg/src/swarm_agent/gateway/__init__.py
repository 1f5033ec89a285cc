"""HTTP gateway: configuration, authentication, app, and operator CLI."""

from swarm_agent.gateway.auth import AuthError, TokenAuthenticator
from swarm_agent.gateway.config import AppConfig, ConfigError, load_config, parse_config

__all__ = [
    "AppConfig",
    "AuthError",
    "ConfigError",
    "TokenAuthenticator",
    "load_config",
    "parse_config",
]
