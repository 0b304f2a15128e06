"""Unit tests for rpq-workbench."""
