"""Numerical toolkit for Herz, Morrey, Besov and Triebel-Lizorkin type quasi-norms."""
