"""Heterogeneous holographic stabilizer codes."""
