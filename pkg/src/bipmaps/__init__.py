"""Random bipartite planar maps with prescribed face degrees via labelled forests."""

__version__ = "0.1.0"
FORMAT_VERSION = 1
