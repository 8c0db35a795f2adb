"""
Unit tests for the Fenchel game toolkit.

The default run covers oracles, learners, game dynamics, the projection-free
methods, momentum certificates and the experiment harness on small problems.
Full-size acceptance suites are marked ``slow``.
"""
