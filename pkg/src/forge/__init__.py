"""Certified rigid graph synthesis and graph-of-spaces measurements."""
