"""
Moment Zeta Utilities

Report writers shared by the command-line front end and the verification suites.
"""
