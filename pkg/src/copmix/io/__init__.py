"""Readers and writers for data, spec files, models and reports."""
