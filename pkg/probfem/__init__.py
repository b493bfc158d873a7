"""Finite element likelihoods for Bayesian inverse problems.

Standard FEM, Bayesian FEM, random-mesh FEM and statFEM likelihoods share one
forward-problem interface and one Metropolis sampler, so posteriors of the
same data can be compared across discretization error models.
"""
__version__ = "0.1.0"
