"""Adaptive consensus for uncertain multi-agent systems - main application package."""
