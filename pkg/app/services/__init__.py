"""Service modules."""

