"""CLI command implementations."""
from app.commands.fixture import cmd_fixture
from app.commands.run import cmd_run
from app.commands.sweep import cmd_sweep_sigma
from app.commands.verify import cmd_verify, verify_scenario

__all__ = ["cmd_fixture", "cmd_run", "cmd_sweep_sigma", "cmd_verify", "verify_scenario"]
