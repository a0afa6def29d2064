"""Large-deviations analysis of capacity-constrained majority-vote aggregation."""

__version__ = "0.1.0"
