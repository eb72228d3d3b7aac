"""Experiment harness: CLI, presets, file output and plots."""
