"""Batch pipeline for estimating user political leaning from retweet networks
and profiling media domains by the leaning distribution of their audiences."""

__version__ = "0.1.0"
