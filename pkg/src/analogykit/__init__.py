"""Toolkit for building an analogy knowledge base from KG dumps, deriving
analogy datasets, and evaluating analogy-reasoning baselines."""

__version__ = "0.1.0"
