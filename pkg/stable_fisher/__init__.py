"""Stable densities, scores and Fisher information in the (M) parameterization."""
