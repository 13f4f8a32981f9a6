"""Combinatorial calculus of block decompositions of principal covers
of genus-zero surfaces, with mechanical verification that the move
complex is connected and simply connected at desk scale."""

__version__ = "0.1.0"
