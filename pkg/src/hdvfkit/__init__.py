"""Homology, cohomology and persistence over GF(2) via homological discrete vector fields."""
