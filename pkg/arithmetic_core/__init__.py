"""
Arithmetic Core Package

Exact rational and power-series arithmetic, finite fields with discrete-log
tables, and multiplicative/additive character sums. Everything in the
moment_zeta package is computed on top of these three modules.
"""
