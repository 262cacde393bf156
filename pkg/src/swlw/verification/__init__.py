"""Oracles, manufactured solutions and acceptance suites."""
