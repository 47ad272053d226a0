"""Figure rendering for echomap report bundles.

The renderer is a pure consumer: it reads the precomputed densities,
histograms, rankings, and correlation points from a report JSON file and
draws them. It computes no statistics of its own and never mutates the
report.
"""

__version__ = "0.1.0"
