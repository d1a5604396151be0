"""Emit built-in scenarios as JSON."""

from app.services.fixtures import get_fixture


def cmd_fixture(name: str) -> str:
    return get_fixture(name).to_json()
