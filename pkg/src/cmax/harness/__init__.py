"""Experiment harness: configs, batches, statistics, suites and the CLI."""
