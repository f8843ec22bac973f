"""Experiment orchestration: seeded corpora, CSV/JSON reports, figures."""
