"""Simulation stack: winner-take-all associative networks, primitive
E-machines with tape-recording learning and E-state reconfiguration, an
imitation-learning tape robot with a mental-imagery mode, and ensembles of
probabilistic protein nanomachines, with cross-layer equivalence checks."""

__version__ = "0.1.0"
