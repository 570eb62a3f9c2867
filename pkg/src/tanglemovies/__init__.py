"""tanglemovies — Reidemeister-move movies of tangle diagrams and the
quantum 1-cocycles they carry.

The package represents isotopies of tangles as discrete movies of
Reidemeister moves on signed Gauss codes, evaluates the associated
skein-valued and integer-valued 1-cocycles, and verifies the tetrahedron
and cube consistency equations those cocycles satisfy.
"""

__version__ = "0.1.0"
