"""Exact connective K-theory classes of degeneracy loci in odd orthogonal Grassmannians."""

__version__ = "0.1.0"
