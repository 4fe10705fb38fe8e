"""Invariant suites over a realized construction, grouped by the module they exercise."""

SUITE_GROUPS = ("core", "system", "blocks", "fine", "basis", "net", "free")
